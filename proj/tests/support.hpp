#pragma once
// Builders shared by the unit tests and the acceptance binary.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssvs/data.hpp"
#include "ssvs/prior.hpp"
#include "ssvs/term.hpp"

namespace ssvs::testing {

/// Design with an intercept followed by the columns of `x`; column j belongs
/// to node node_of[j].
inline DesignMatrix design_from(const Eigen::MatrixXd& x, const std::vector<std::size_t>& node_of) {
    DesignMatrix d;
    d.x.resize(x.rows(), x.cols() + 1);
    d.x.col(0).setOnes();
    d.x.rightCols(x.cols()) = x;
    d.column_names.push_back("(Intercept)");
    d.column_node.push_back(-1);
    std::size_t nodes = 0;
    for (auto k : node_of) nodes = std::max(nodes, k + 1);
    d.node_columns.resize(nodes);
    for (std::size_t j = 0; j < node_of.size(); ++j) {
        d.column_names.push_back("x" + std::to_string(j + 1));
        d.column_node.push_back(static_cast<long>(node_of[j]));
        d.node_columns[node_of[j]].push_back(j + 1);
    }
    for (std::size_t k = 0; k < nodes; ++k) d.node_labels.push_back("n" + std::to_string(k));
    return d;
}

/// m mains plus every two-way interaction; interaction table in subscript order.
inline PriorSpec two_way_prior(std::size_t m, double p_main, const std::vector<double>& cpt) {
    PriorSpec s;
    for (std::size_t i = 0; i < m; ++i) {
        s.labels.push_back(std::string(1, char('A' + i)));
        s.parents.emplace_back();
        s.nodes.push_back(NodePrior::marginal(p_main));
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            s.labels.push_back(s.labels[i] + s.labels[j]);
            s.parents.push_back({i, j});
            s.nodes.push_back(NodePrior::from_subscripts(cpt));
        }
    return s;
}

inline double brute_conditional(const Prior& pr, std::size_t i, ActivationPattern d) {
    d.set(i, false);
    double l0 = pr.log_prior(d);
    d.set(i, true);
    double l1 = pr.log_prior(d);
    if (l0 == neg_inf) return 1.0;
    if (l1 == neg_inf) return 0.0;
    return std::exp(l1) / (std::exp(l0) + std::exp(l1));
}

/// Random prior over p nodes: a DAG with up to 3 earlier parents, tables with
/// occasional exact zeros, optional competing blocks and weight. The empty
/// pattern always keeps positive mass.
inline PriorSpec random_spec(std::mt19937_64& rng, std::size_t p, bool competing, int weight_kind) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PriorSpec s;
    for (std::size_t i = 0; i < p; ++i) {
        s.labels.push_back("n" + std::to_string(i));
        std::vector<std::size_t> ps;
        for (std::size_t q = 0; q < i; ++q)
            if (ps.size() < 3 && u(rng) < 0.3) ps.push_back(q);
        std::vector<double> rows(std::size_t{1} << ps.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double v = u(rng);
            if (r > 0 && u(rng) < 0.2) v = 0.0;
            if (r > 0 && u(rng) < 0.1) v = 1.0;
            rows[r] = r == 0 ? 0.05 + 0.9 * v : v;
        }
        s.parents.push_back(ps);
        s.nodes.push_back(NodePrior::from_rows(rows));
    }
    if (competing) {
        CompetingBlocks cb;
        std::size_t k = 2 + static_cast<std::size_t>(u(rng) * 2);
        double left = 1.0;
        for (std::size_t b = 0; b < k; ++b) {
            std::vector<std::size_t> mem;
            for (std::size_t i = 0; i < p; ++i)
                if (u(rng) < 0.6) mem.push_back(i);
            cb.members.push_back(mem);
            double m = b + 1 == k ? left : left * (0.2 + 0.6 * u(rng));
            cb.mixing.push_back(m);
            left -= m;
        }
        double sum = 0;
        for (double m : cb.mixing) sum += m;
        cb.mixing.back() += 1.0 - sum;
        s.competing = cb;
    }
    if (weight_kind == 1) {
        s.weight = GlobalWeight::size_indicator(p / 2);
    } else if (weight_kind == 2) {
        std::vector<double> w(p + 1);
        for (auto& v : w) v = u(rng) < 0.2 ? 0.0 : u(rng) * 3;
        w[0] = 1.0;
        s.weight = GlobalWeight::size_weights(w);
    } else if (weight_kind == 3) {
        std::vector<std::size_t> sub;
        for (std::size_t i = 0; i < p; ++i)
            if (u(rng) < 0.5) sub.push_back(i);
        std::vector<double> w(sub.size() + 1);
        for (auto& v : w) v = u(rng);
        w[0] = 0.5;
        s.weight = GlobalWeight::subset_weights(sub, w);
    }
    return s;
}

/// A, B, C iid N(0, 1) and Y = X beta + sigma * eps over the two-way design
/// A, B, C, AB, AC, BC.
struct ThreeFactorProblem {
    Dataset data;
    TermSet terms;
    DesignMatrix design;
};

inline ThreeFactorProblem three_factor_problem(const std::vector<double>& beta, double sigma, std::size_t n,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Dataset ds;
    ds.response_name = "Y";
    for (const char* name : {"A", "B", "C"}) {
        std::vector<double> v(n);
        for (auto& x : v) x = z(rng);
        ds.predictors.push_back({name, v});
    }
    auto vars = variables_of(ds);
    TermSet ts(vars, two_way_terms(vars));
    ds.response = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    auto d = build_design(ds, ts);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.cols()));
    for (std::size_t j = 0; j < beta.size(); ++j) b[static_cast<Eigen::Index>(j + 1)] = beta[j];
    ds.response = d.x * b;
    for (Eigen::Index i = 0; i < ds.response.size(); ++i) ds.response[i] += sigma * z(rng);
    return {ds, ts, d};
}

}  // namespace ssvs::testing
