#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ssvs/data.hpp"
#include "ssvs/term.hpp"

using namespace ssvs;

namespace {

Dataset from_text(const std::string& s, const std::string& response = "Y", const std::set<std::string>& cat = {}) {
    std::istringstream in(s);
    return parse_csv(in, response, cat);
}

Dataset random_abc(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Dataset ds;
    ds.response_name = "Y";
    for (const char* name : {"A", "B", "C"}) {
        std::vector<double> v(n);
        for (auto& x : v) x = z(rng);
        ds.predictors.push_back({name, v});
    }
    ds.response = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(n), [&] { return z(rng); });
    return ds;
}

}  // namespace

TEST(Csv, ParsesNumericAndCategorical) {
    auto ds = from_text("A,Q,Y\n1,a,0.5\n2,b,1.5\n3,a,2.5\n", "Y", {"Q"});
    EXPECT_EQ(ds.rows(), 3u);
    EXPECT_EQ(ds.column("A").reals(), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(ds.column("Q").labels(), (std::vector<std::string>{"a", "b", "a"}));
    EXPECT_DOUBLE_EQ(ds.response[2], 2.5);
}

TEST(Csv, RejectsMissingAndBadCells) {
    EXPECT_THROW(from_text("A,Y\n1,\n"), DataError);
    EXPECT_THROW(from_text("A,Y\n1,2\n,3\n"), DataError);
    EXPECT_THROW(from_text("A,Y\nx,2\n"), DataError);
    EXPECT_THROW(from_text("A,Y\n1,2,3\n"), DataError);
    EXPECT_THROW(from_text("A,B\n1,2\n"), DataError);  // no response column
    EXPECT_THROW(from_text("A,A,Y\n1,2,3\n"), DataError);
}

TEST(Csv, QuotedFields) {
    auto ds = from_text("\"A\",Q,Y\n1,\"x,y\",2\n2,z,3\n", "Y", {"Q"});
    EXPECT_EQ(ds.column("Q").labels()[0], "x,y");
}

TEST(Csv, WriteReadRoundTrip) {
    auto ds = from_text("A,Q,Y\n0.1,a,0.30000000000000004\n-2e-9,b,1e300\n", "Y", {"Q"});
    std::ostringstream out;
    write_csv(ds, out);
    auto back = from_text(out.str(), "Y", {"Q"});
    EXPECT_EQ(back.column("A").reals(), ds.column("A").reals());
    EXPECT_EQ(back.column("Q").labels(), ds.column("Q").labels());
    EXPECT_EQ(back.response, ds.response);
}

TEST(BuildDesign, ProductsAndPowers) {
    auto ds = from_text("A,B,Y\n1,3,0\n2,4,1\n");
    auto vars = variables_of(ds);
    TermSet ts(vars, {parse_term("A*B", vars)});
    auto d = build_design(ds, ts);
    ASSERT_EQ(d.cols(), 2u);
    EXPECT_EQ(d.x(0, 0), 1.0);
    EXPECT_EQ(d.x(0, 1), 3.0);
    EXPECT_EQ(d.x(1, 1), 8.0);
    EXPECT_EQ(d.column_node[0], -1);
    EXPECT_EQ(d.column_node[1], 0);

    auto ds2 = from_text("A,Y\n1,0\n2,0\n3,1\n");
    auto v2 = variables_of(ds2);
    auto d2 = build_design(ds2, TermSet(v2, {parse_term("A^2", v2)}));
    EXPECT_EQ(d2.x.col(1), Eigen::Vector3d(1, 4, 9));
}

TEST(BuildDesign, NonFiniteRejected) {
    auto ds = from_text("A,Y\n1e200,0\n2,0\n");
    auto v = variables_of(ds);
    EXPECT_THROW(build_design(ds, TermSet(v, {parse_term("A^2", v)})), DataError);
}

TEST(BuildDesign, ProductColumnEqualsElementwiseProduct) {
    auto ds = random_abc(20, 3);
    auto vars = variables_of(ds);
    TermSet ts(vars, two_way_terms(vars));
    auto d = build_design(ds, ts);
    EXPECT_TRUE(d.x.col(4).isApprox(d.x.col(1).cwiseProduct(d.x.col(2))));
    EXPECT_TRUE(d.x.col(6).isApprox(d.x.col(2).cwiseProduct(d.x.col(3))));
}

TEST(BuildDesign, SecondOrderSixVariablesHas27Nodes) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    Dataset ds;
    ds.response_name = "Y";
    for (const char* name : {"A", "B", "C", "D", "E", "F"}) {
        std::vector<double> v(30);
        for (auto& x : v) x = z(rng);
        ds.predictors.push_back({name, v});
    }
    ds.response = Eigen::VectorXd::Zero(30);
    auto vars = variables_of(ds);
    auto d = build_design(ds, TermSet(vars, second_order_terms(vars)));
    EXPECT_EQ(d.node_count(), 27u);
    EXPECT_EQ(d.cols(), 28u);
}

TEST(ExpandCategorical, FiveLevels) {
    std::string text = "C,Y\n";
    for (int i = 0; i < 10; ++i) text += "L" + std::to_string(i % 5 + 1) + ",0\n";
    auto ds = from_text(text, "Y", {"C"});
    auto vars = variables_of(ds);
    auto dc = expand_categorical(vars[0], ds);
    EXPECT_EQ(dc.columns.cols(), 4);
    EXPECT_EQ(dc.labels.front(), "C[L2]");
    EXPECT_EQ(dc.columns.row(0).sum(), 0.0);  // reference level
    EXPECT_EQ(dc.columns(1, 0), 1.0);
    TermSet ts(vars, {parse_term("C", vars)});
    auto d = build_design(ds, ts);
    EXPECT_EQ(d.node_count(), 1u);
    EXPECT_EQ(d.node_columns[0].size(), 4u);
}

TEST(ExpandCategorical, TwoLevels) {
    auto ds = from_text("Q,Y\na,0\nb,1\n", "Y", {"Q"});
    auto dc = expand_categorical(variables_of(ds)[0], ds);
    EXPECT_EQ(dc.columns.cols(), 1);
}

TEST(ExpandCategorical, Errors) {
    auto ds = from_text("Q,Y\na,0\nz,1\n", "Y", {"Q"});
    EXPECT_THROW(expand_categorical(BaseVariable::categorical("Q", {"a", "b"}), ds), DataError);
    auto one = from_text("Q,Y\na,0\na,1\n", "Y", {"Q"});
    EXPECT_THROW(expand_categorical(BaseVariable::categorical("Q", {"a", "b"}), one), DataError);
}

TEST(ExpandCategorical, InteractionWithContinuous) {
    std::string text = "A,Q,Y\n";
    for (int i = 0; i < 10; ++i) text += std::to_string(i + 1) + ",q" + std::to_string(i % 5) + ",0\n";
    auto ds = from_text(text, "Y", {"Q"});
    auto vars = variables_of(ds);
    TermSet ts(vars, two_way_terms(vars));
    auto d = build_design(ds, ts);
    ASSERT_EQ(d.node_columns[2].size(), 4u);
    EXPECT_EQ(ts.parents()[2], (std::vector<std::size_t>{0, 1}));
    // A*Q[q1] = A on rows at level q1, 0 elsewhere
    for (Eigen::Index r = 0; r < 10; ++r) EXPECT_EQ(d.x(r, 6), d.x(r, 1) * d.x(r, 2));
}

TEST(BuildDesign, StandardizeOnlyContinuous) {
    std::string text = "A,Q,Y\n";
    for (int i = 0; i < 10; ++i) text += std::to_string(i * 3 + 1) + ",q" + std::to_string(i % 2) + ",0\n";
    auto ds = from_text(text, "Y", {"Q"});
    auto vars = variables_of(ds);
    auto d = build_design(ds, TermSet(vars, {parse_term("A", vars), parse_term("Q", vars)}), {true});
    EXPECT_NEAR(d.x.col(1).mean(), 0.0, 1e-12);
    EXPECT_NEAR(d.x.col(1).squaredNorm() / 10.0, 1.0, 1e-12);
    EXPECT_EQ(d.x.col(2).sum(), 5.0);  // dummy untouched
}

TEST(SpanInvariance, StrongHeredityModelsAreInvariant) {
    auto ds = random_abc(25, 11);
    auto moved = affine_transform(ds, {{"A", {2.5, -1.0}}, {"B", {-0.7, 3.0}}, {"C", {1.3, 0.4}}});
    auto vars = variables_of(ds);
    TermSet ts(vars, two_way_terms(vars));
    auto d0 = build_design(ds, ts), d1 = build_design(moved, ts);
    std::size_t strong = 0;
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        auto pat = ActivationPattern::from_mask(mask, 6);
        bool ok = true;
        for (std::size_t k = 3; k < 6; ++k)
            if (pat[k])
                for (auto par : ts.parents()[k]) ok = ok && pat[par];
        auto cols = d0.active_columns(pat);
        bool same = same_column_space(d0.select(cols), d1.select(cols));
        if (ok) {
            ++strong;
            EXPECT_TRUE(same) << pat.key();
        }
    }
    EXPECT_EQ(strong, 18u);
    auto a_ab = ActivationPattern::from_key("100100");
    auto cols = d0.active_columns(a_ab);
    EXPECT_FALSE(same_column_space(d0.select(cols), d1.select(cols)));
}

TEST(Variables, DeclaredLevelsOrderReference) {
    auto ds = from_text("Q,Y\nb,0\na,1\nc,2\n", "Y", {"Q"});
    EXPECT_EQ(variables_of(ds)[0].levels, (std::vector<std::string>{"a", "b", "c"}));
    auto v = variables_of(ds, {{"Q", {"c", "b", "a"}}});
    EXPECT_EQ(v[0].levels.front(), "c");
}
