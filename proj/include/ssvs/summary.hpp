#pragma once
//! Model frequency tables, inclusion probabilities, odds and fit metrics.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssvs/data.hpp"
#include "ssvs/error.hpp"
#include "ssvs/linalg.hpp"
#include "ssvs/oracle.hpp"
#include "ssvs/pattern.hpp"
#include "ssvs/prior.hpp"

namespace ssvs {

inline constexpr double not_computed = std::numeric_limits<double>::quiet_NaN();

struct ModelRow {
    std::string key;  ///< bit string in node order
    std::size_t count = 0;
    double posterior = 0;
    double prior = not_computed;
    double rss = not_computed;
    double r2 = not_computed;

    ActivationPattern pattern() const { return ActivationPattern::from_key(key); }
};

/// Rows sorted by posterior probability (descending), ties by key.
struct ModelTable {
    std::vector<ModelRow> rows;
    std::size_t samples = 0;  ///< 0 for exact tables

    const ModelRow* find(const std::string& key) const {
        for (const auto& r : rows)
            if (r.key == key) return &r;
        return nullptr;
    }
    double probability(const std::string& key) const {
        auto r = find(key);
        return r ? r->posterior : 0.0;
    }
};

namespace detail {
inline void sort_rows(std::vector<ModelRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const ModelRow& a, const ModelRow& b) {
        if (a.posterior != b.posterior) return a.posterior > b.posterior;
        return a.key < b.key;
    });
}
}  // namespace detail

/// Relative frequencies of the sampled patterns.
inline ModelTable tabulate(const std::vector<ActivationPattern>& samples) {
    if (samples.empty()) throw Error("tabulate: no samples");
    std::map<std::string, std::size_t> counts;
    for (const auto& d : samples) ++counts[d.key()];
    ModelTable t;
    t.samples = samples.size();
    for (const auto& [key, c] : counts)
        t.rows.push_back({key, c, static_cast<double>(c) / static_cast<double>(samples.size())});
    detail::sort_rows(t.rows);
    return t;
}

inline ModelTable tabulate(const ExactPosterior& ep) {
    ModelTable t;
    for (const auto& e : ep.entries) {
        ModelRow r{e.pattern.key(), 0, e.probability};
        r.prior = std::exp(e.log_prior);
        t.rows.push_back(std::move(r));
    }
    detail::sort_rows(t.rows);
    return t;
}

/// Column means of the sampled bit matrix.
inline std::vector<double> marginal_inclusion(const std::vector<ActivationPattern>& samples) {
    if (samples.empty()) throw Error("marginal_inclusion: no samples");
    std::vector<double> m(samples.front().size(), 0.0);
    for (const auto& d : samples) {
        if (d.size() != m.size()) throw Error("marginal_inclusion: samples differ in length");
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += d[i];
    }
    for (auto& v : m) v /= static_cast<double>(samples.size());
    return m;
}

/// Inclusion implied by a table: probability-weighted sum of bits.
inline std::vector<double> marginal_inclusion(const ModelTable& t) {
    if (t.rows.empty()) throw Error("marginal_inclusion: empty table");
    std::vector<double> m(t.rows.front().key.size(), 0.0);
    for (const auto& r : t.rows)
        for (std::size_t i = 0; i < m.size(); ++i)
            if (r.key[i] == '1') m[i] += r.posterior;
    return m;
}

struct MarginalTable {
    std::vector<std::string> labels;
    std::vector<double> posterior;
    std::vector<double> prior;
};

/// 0.5 * sum |p - q| over the union of models.
inline double total_variation(const ModelTable& a, const ModelTable& b) {
    std::map<std::string, std::pair<double, double>> both;
    for (const auto& r : a.rows) both[r.key].first = r.posterior;
    for (const auto& r : b.rows) both[r.key].second = r.posterior;
    double tv = 0;
    for (const auto& [k, v] : both) tv += std::abs(v.first - v.second);
    return 0.5 * tv;
}

/// (post / (1 - post)) / (prior / (1 - prior)).
inline double posterior_prior_odds(double posterior, double prior) {
    if (!(prior > 0)) throw Error("posterior/prior odds undefined: zero prior probability");
    if (!(prior < 1)) throw Error("posterior/prior odds undefined: prior probability is 1");
    if (posterior <= 0) return 0.0;
    if (posterior >= 1) return std::numeric_limits<double>::infinity();
    return (posterior / (1.0 - posterior)) / (prior / (1.0 - prior));
}

inline double posterior_prior_odds(const ActivationPattern& pattern, const ModelTable& table, const Prior& prior) {
    double lp = prior.log_prior(pattern);
    if (!prior.normalized()) throw Error("posterior/prior odds need a normalized prior");
    return posterior_prior_odds(table.probability(pattern.key()), lp == neg_inf ? 0.0 : std::exp(lp));
}

struct FitMetrics {
    double rss = 0;
    double r2 = 0;
    bool rank_deficient = false;
};

/// Ordinary least squares on the intercept and the columns of active nodes.
inline FitMetrics fit_metrics(const ActivationPattern& pattern, const DesignMatrix& design, const Eigen::VectorXd& y) {
    auto x = design.select(design.active_columns(pattern));
    auto fit = least_squares(x, y);
    double tss = (y.array() - y.mean()).square().sum();
    FitMetrics m;
    m.rss = fit.rss;
    m.r2 = tss > 0 ? 1.0 - fit.rss / tss : 0.0;
    m.rank_deficient = fit.rank_deficient;
    return m;
}

/// Fill prior probability, RSS and R^2 for the first `limit` rows.
inline void annotate(ModelTable& t, const Prior& prior, const DesignMatrix& design, const Eigen::VectorXd& y,
                     std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    for (std::size_t k = 0; k < t.rows.size() && k < limit; ++k) {
        auto& r = t.rows[k];
        auto d = r.pattern();
        double lp = prior.log_prior(d);
        r.prior = lp == neg_inf ? 0.0 : std::exp(lp);
        auto fm = fit_metrics(d, design, y);
        r.rss = fm.rss;
        r.r2 = fm.r2;
    }
}

namespace detail {

inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

inline double parse_real_field(const std::string& s) {
    if (s == "nan") return not_computed;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    if (!parse_real(s, v)) throw Error("cannot parse number '" + s + "'");
    return v;
}

}  // namespace detail

inline void write_models_csv(const ModelTable& t, std::ostream& out, std::size_t limit = std::numeric_limits<std::size_t>::max()) {
    out << "pattern,count,posterior_prob,prior_prob,rss,r2\n";
    for (std::size_t k = 0; k < t.rows.size() && k < limit; ++k) {
        const auto& r = t.rows[k];
        out << r.key << ',' << r.count << ',' << detail::format_real(r.posterior) << ','
            << detail::format_real(r.prior) << ',' << detail::format_real(r.rss) << ','
            << detail::format_real(r.r2) << '\n';
    }
}

inline ModelTable read_models_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "pattern,count,posterior_prob,prior_prob,rss,r2")
        throw Error("models.csv: unexpected header");
    ModelTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 6) throw Error("models.csv: expected 6 fields");
        ModelRow r;
        r.key = f[0];
        ActivationPattern::from_key(r.key);
        r.count = static_cast<std::size_t>(std::stoull(f[1]));
        r.posterior = detail::parse_real_field(f[2]);
        r.prior = detail::parse_real_field(f[3]);
        r.rss = detail::parse_real_field(f[4]);
        r.r2 = detail::parse_real_field(f[5]);
        t.samples += r.count;
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline void write_marginals_csv(const MarginalTable& m, std::ostream& out) {
    out << "term,posterior_incl,prior_incl\n";
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        std::string label = m.labels[i];
        if (label.find_first_of(",\"") != std::string::npos) {
            std::string q = "\"";
            for (char ch : label) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            label = q + "\"";
        }
        out << label << ',' << detail::format_real(m.posterior[i]) << ','
            << detail::format_real(i < m.prior.size() ? m.prior[i] : not_computed) << '\n';
    }
}

inline MarginalTable read_marginals_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "term,posterior_incl,prior_incl")
        throw Error("marginals.csv: unexpected header");
    MarginalTable m;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 3) throw Error("marginals.csv: expected 3 fields");
        m.labels.push_back(f[0]);
        m.posterior.push_back(detail::parse_real_field(f[1]));
        m.prior.push_back(detail::parse_real_field(f[2]));
    }
    return m;
}

}  // namespace ssvs
