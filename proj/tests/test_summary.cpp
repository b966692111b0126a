#include <gtest/gtest.h>

#include <numeric>
#include <regex>
#include <sstream>

#include "ssvs/summary.hpp"
#include "ssvs/svg.hpp"
#include "support.hpp"

using namespace ssvs;
using ssvs::testing::design_from;
using ssvs::testing::three_factor_problem;
using ssvs::testing::two_way_prior;

namespace {

std::vector<ActivationPattern> keys(std::initializer_list<const char*> ks) {
    std::vector<ActivationPattern> out;
    for (const char* k : ks) out.push_back(ActivationPattern::from_key(k));
    return out;
}

std::size_t count_matches(const std::string& doc, const std::string& pattern) {
    std::regex re(pattern);
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(doc.begin(), doc.end(), re), std::sregex_iterator()));
}

/// Height of the first cell of each model group, in document order.
std::vector<double> row_heights(const std::string& doc) {
    std::regex re("<g class=\"model\"[^>]*>\\n<rect class=\"cell [a-z]+\" x=\"[0-9.]+\" y=\"[0-9.]+\" width=\"[0-9.]+\" height=\"([0-9.]+)\"");
    std::vector<double> out;
    for (auto it = std::sregex_iterator(doc.begin(), doc.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back(std::stod((*it)[1]));
    return out;
}

ModelTable table_of(const std::vector<std::pair<std::string, double>>& rows) {
    ModelTable t;
    for (const auto& [k, p] : rows) t.rows.push_back({k, 0, p});
    return t;
}

}  // namespace

TEST(Tabulate, Frequencies) {
    auto t = tabulate(keys({"110", "110", "011", "110"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0].key, "110");
    EXPECT_EQ(t.rows[0].posterior, 0.75);
    EXPECT_EQ(t.rows[0].count, 3u);
    EXPECT_EQ(t.rows[1].posterior, 0.25);
    EXPECT_EQ(t.samples, 4u);

    auto same = tabulate(keys({"01", "01", "01"}));
    ASSERT_EQ(same.rows.size(), 1u);
    EXPECT_EQ(same.rows[0].posterior, 1.0);
    EXPECT_THROW(tabulate(std::vector<ActivationPattern>{}), Error);
}

TEST(Tabulate, TiesBrokenByKey) {
    auto t = tabulate(keys({"10", "01", "11", "01", "10", "11"}));
    EXPECT_EQ(t.rows[0].key, "01");
    EXPECT_EQ(t.rows[1].key, "10");
    EXPECT_EQ(t.rows[2].key, "11");
}

TEST(Tabulate, PriorSamplesMatchEnumeration) {
    Prior pr(two_way_prior(3, 0.5, {0.01, 0.25, 0.25, 0.5}));
    std::mt19937_64 rng(21);
    std::vector<ActivationPattern> draws;
    for (int t = 0; t < 100000; ++t) draws.push_back(pr.sample(rng));
    ModelTable exact;
    std::vector<double> exact_marg(6, 0.0);
    for (const auto& w : enumerate_support(pr)) {
        exact.rows.push_back({w.pattern.key(), 0, w.probability});
        for (std::size_t i = 0; i < 6; ++i) exact_marg[i] += w.pattern[i] * w.probability;
    }
    EXPECT_LT(total_variation(tabulate(draws), exact), 0.01);
    auto m = marginal_inclusion(draws);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(m[i], exact_marg[i], 0.01);
}

TEST(Marginals, Examples) {
    auto m = marginal_inclusion(keys({"110", "110", "011", "110"}));
    EXPECT_EQ(m, (std::vector<double>{0.75, 1.0, 0.25}));
    EXPECT_EQ(marginal_inclusion(keys({"101", "101"})), (std::vector<double>{1, 0, 1}));
    EXPECT_THROW(marginal_inclusion(std::vector<ActivationPattern>{}), Error);
}

TEST(Marginals, TableIdentity) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<ActivationPattern> s;
    for (int t = 0; t < 997; ++t) {
        ActivationPattern d(7);
        for (std::size_t i = 0; i < 7; ++i) d.set(i, bit(rng) && bit(rng));
        s.push_back(d);
    }
    auto direct = marginal_inclusion(s), via_table = marginal_inclusion(tabulate(s));
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(direct[i], via_table[i], 1e-14);
}

TEST(Odds, Examples) {
    EXPECT_DOUBLE_EQ(posterior_prior_odds(0.5, 0.5), 1.0);
    EXPECT_NEAR(posterior_prior_odds(0.128, 0.0012), 122.2, 0.05);
    EXPECT_EQ(posterior_prior_odds(0.0, 0.3), 0.0);
    EXPECT_THROW(posterior_prior_odds(0.2, 0.0), Error);

    Prior pr(two_way_prior(2, 0.5, {0, 0, 0, 0.5}));
    auto t = tabulate(keys({"111", "111", "110", "000"}));
    EXPECT_DOUBLE_EQ(posterior_prior_odds(ActivationPattern::from_key("111"), t, pr), 1.0 / (0.125 / 0.875));
    EXPECT_THROW(posterior_prior_odds(ActivationPattern::from_key("001"), t, pr), Error);
}

TEST(FitMetrics, EmptyAndSaturated) {
    auto p = three_factor_problem({1, 1, 0, 1, 0, 0}, 1.0, 30, 1);
    const auto& y = p.data.response;
    double tss = (y.array() - y.mean()).square().sum();
    auto empty = fit_metrics(ActivationPattern(6), p.design, y);
    EXPECT_NEAR(empty.rss, tss, 1e-9 * tss);
    EXPECT_NEAR(empty.r2, 0.0, 1e-12);

    std::normal_distribution<double> z;
    std::mt19937_64 rng(3);
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(5, 4, [&] { return z(rng); });
    Eigen::VectorXd yy = Eigen::VectorXd::NullaryExpr(5, [&] { return z(rng); });
    auto d = design_from(x, {0, 1, 2, 3});
    auto full = fit_metrics(ActivationPattern::from_key("1111"), d, yy);
    EXPECT_NEAR(full.rss, 0.0, 1e-18);
    EXPECT_NEAR(full.r2, 1.0, 1e-12);
    EXPECT_FALSE(full.rank_deficient);
}

TEST(FitMetrics, NodeOrderPermutationInvariant) {
    auto p = three_factor_problem({1, -1, 0.5, 1, 0, 0}, 1.0, 40, 2);
    // same columns with the nodes listed in reverse order
    Eigen::MatrixXd rev = p.design.x.rightCols(6).rowwise().reverse();
    auto d2 = design_from(rev, {0, 1, 2, 3, 4, 5});
    for (std::uint64_t m = 0; m < 64; ++m) {
        auto a = ActivationPattern::from_mask(m, 6);
        auto key = a.key();
        std::reverse(key.begin(), key.end());
        auto b = ActivationPattern::from_key(key);
        EXPECT_NEAR(fit_metrics(a, p.design, p.data.response).rss, fit_metrics(b, d2, p.data.response).rss, 1e-9);
    }
}

TEST(FitMetrics, RankDeficiencyFlagged) {
    Eigen::MatrixXd x(6, 2);
    x << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10, 6, 12;
    Eigen::VectorXd y(6);
    y << 1, 3, 2, 5, 4, 6;
    auto m = fit_metrics(ActivationPattern::from_key("11"), design_from(x, {0, 1}), y);
    EXPECT_TRUE(m.rank_deficient);
    EXPECT_NEAR(m.rss, fit_metrics(ActivationPattern::from_key("10"), design_from(x, {0, 1}), y).rss, 1e-9);
}

TEST(ModelMatrix, HeightsProportionalToPosterior) {
    auto doc = render_model_matrix(table_of({{"110", 0.3}, {"100", 0.2}, {"010", 0.1}}), {"A", "B", "C"}, 10);
    auto h = row_heights(doc);
    ASSERT_EQ(h.size(), 3u);
    EXPECT_NEAR(h[0] / h[2], 3.0, 1e-3);
    EXPECT_NEAR(h[1] / h[2], 2.0, 1e-3);
    EXPECT_EQ(count_matches(doc, "class=\"separator\""), 3u);
}

TEST(ModelMatrix, MostProbableAtBottom) {
    auto doc = render_model_matrix(table_of({{"11", 0.6}, {"10", 0.4}}), {"A", "B"}, 10);
    std::regex re("data-rank=\"([0-9]+)\"[^>]*>\\n<rect class=\"cell [a-z]+\" x=\"[0-9.]+\" y=\"([0-9.]+)\"");
    std::vector<double> ys;
    for (auto it = std::sregex_iterator(doc.begin(), doc.end(), re); it != std::sregex_iterator(); ++it)
        ys.push_back(std::stod((*it)[2]));
    ASSERT_EQ(ys.size(), 2u);
    EXPECT_GT(ys[0], ys[1]);
}

TEST(ModelMatrix, SingleModelFillsPlot) {
    svg::MatrixLayout l;
    auto doc = render_model_matrix(table_of({{"101", 0.2}}), {"A", "B", "C"}, 5, l);
    auto h = row_heights(doc);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_NEAR(h[0], l.plot_height, 1e-3);
}

TEST(ModelMatrix, CellCountAndSeparators) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<ActivationPattern> s;
    for (int t = 0; t < 5000; ++t) {
        ActivationPattern d(8);
        for (std::size_t i = 0; i < 8; ++i) d.set(i, bit(rng) && bit(rng));
        s.push_back(d);
    }
    auto t = tabulate(s);
    ASSERT_GT(t.rows.size(), 40u);
    std::vector<std::string> labels{"a", "b", "c", "d", "e", "f", "g", "h"};
    auto doc = render_model_matrix(t, labels, 40);
    EXPECT_EQ(count_matches(doc, "<rect class=\"cell "), 40u * 8u);
    EXPECT_EQ(count_matches(doc, "<rect class=\"cell on\""), [&] {
        std::size_t on = 0;
        for (std::size_t k = 0; k < 40; ++k) on += t.rows[k].pattern().count();
        return on;
    }());
    EXPECT_EQ(count_matches(doc, "class=\"separator\""), 10u);
    EXPECT_EQ(count_matches(doc, "<text class=\"label\""), 8u);
    EXPECT_EQ(doc, render_model_matrix(t, labels, 40));
}

TEST(SampledMatrix, EqualHeights) {
    auto doc = render_sampled_matrix(keys({"10", "01", "11", "00"}), {"A", "B"}, 3);
    EXPECT_EQ(count_matches(doc, "<g class=\"sample\""), 3u);
    EXPECT_EQ(count_matches(doc, "height=\"200.000\""), 6u);
}

TEST(RssSize, BaselineAndNesting) {
    auto p = three_factor_problem({1, 1, 0, 1, 0, 0}, 1.0, 30, 4);
    const auto& y = p.data.response;
    double tss = (y.array() - y.mean()).square().sum();
    auto t = table_of({{"100000", 0.1}, {"110000", 0.2}, {"110100", 0.5}, {"111111", 0.2}});
    annotate(t, Prior(two_way_prior(3, 0.5, {0, 0, 0, 0.5})), p.design, y);
    auto doc = render_rss_size(t, p.design, y, 10, {{0, tss}, {2, tss / 2}});
    std::smatch m;
    ASSERT_TRUE(std::regex_search(doc, m, std::regex("class=\"baseline\" data-terms=\"0\" data-rss=\"([^\"]+)\"")));
    EXPECT_NEAR(std::stod(m[1]), tss, 1e-9 * tss);
    EXPECT_EQ(count_matches(doc, "class=\"point\""), 4u);
    EXPECT_EQ(count_matches(doc, "class=\"overlay\""), 1u);

    // nested sequence {} < {A} < {A,B} < {A,B,AB} < full
    std::vector<double> rss{tss};
    for (const char* k : {"100000", "110000", "110100", "111111"})
        rss.push_back(fit_metrics(ActivationPattern::from_key(k), p.design, y).rss);
    for (std::size_t k = 1; k < rss.size(); ++k) EXPECT_LE(rss[k], rss[k - 1] + 1e-9);
    EXPECT_EQ(doc, render_rss_size(t, p.design, y, 10, {{0, tss}, {2, tss / 2}}));
}

TEST(Csv, ModelsRoundTrip) {
    auto t = tabulate(keys({"110", "110", "011", "110", "000", "000", "000"}));
    t.rows[0].prior = 0.1 + 1e-17;
    t.rows[0].rss = 1234.5678901234567;
    t.rows[0].r2 = 0.998;
    std::ostringstream out;
    write_models_csv(t, out);
    std::istringstream in(out.str());
    auto back = read_models_csv(in);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    EXPECT_EQ(back.samples, t.samples);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        EXPECT_EQ(back.rows[k].key, t.rows[k].key);
        EXPECT_EQ(back.rows[k].count, t.rows[k].count);
        EXPECT_EQ(back.rows[k].posterior, t.rows[k].posterior);
        if (std::isnan(t.rows[k].rss))
            EXPECT_TRUE(std::isnan(back.rows[k].rss));
        else
            EXPECT_EQ(back.rows[k].rss, t.rows[k].rss);
    }
    EXPECT_TRUE(std::isnan(back.rows[1].prior));
    std::ostringstream again;
    write_models_csv(back, again);
    EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, MarginalsRoundTrip) {
    MarginalTable m{{"A", "A*B", "C[L2],x", "q\"r"}, {0.1, 0.25, 1.0 / 3.0, 0}, {0.5, 0.125, not_computed, 1}};
    std::ostringstream out;
    write_marginals_csv(m, out);
    std::istringstream in(out.str());
    auto back = read_marginals_csv(in);
    EXPECT_EQ(back.labels, m.labels);
    EXPECT_EQ(back.posterior, m.posterior);
    EXPECT_TRUE(std::isnan(back.prior[2]));
    EXPECT_EQ(back.prior[0], 0.5);
    std::istringstream bad("nope\n");
    EXPECT_THROW(read_marginals_csv(bad), Error);
}
