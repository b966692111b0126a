#pragma once
//! Factored priors over activation patterns: conditional probability tables on
//! an inheritance DAG, competing-block mixtures and global reweighting.
//!
//! All probabilities are handled in log space; zero mass is -infinity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ssvs/error.hpp"
#include "ssvs/pattern.hpp"

namespace ssvs {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; exact for -inf arguments.
inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double log_or_neg_inf(double x) { return x > 0 ? std::log(x) : neg_inf; }

/// Pr(node active | parent bits), one row per parent configuration.
///
/// Rows are stored little-endian: row index = sum_j bit_j * 2^j where j is the
/// position of the parent in the node's (ascending) parent list. The
/// subscript order p_{b0 b1 ...} used in tables like (p00, p01, p10, p11) puts
/// the first parent in the leftmost subscript; `from_subscripts` converts.
class NodePrior {
public:
    NodePrior() = default;

    static NodePrior marginal(double p) { return NodePrior({p}); }

    /// Same probability whatever the parents do.
    static NodePrior constant(double p, std::size_t parents) {
        return NodePrior(std::vector<double>(std::size_t{1} << parents, p));
    }

    static NodePrior from_rows(std::vector<double> rows) { return NodePrior(std::move(rows)); }

    static NodePrior from_subscripts(const std::vector<double>& subscripted) {
        auto k = arity_of(subscripted.size());
        if (!k) return NodePrior(subscripted);  // left for validate() to report
        std::vector<double> rows(subscripted.size());
        for (std::size_t i = 0; i < subscripted.size(); ++i) rows[reverse_bits(i, *k)] = subscripted[i];
        return NodePrior(std::move(rows));
    }

    enum class Heredity { strong, weak };

    /// Strong: p when all parents are active. Weak: p when any parent is active.
    /// Every other row gets `epsilon`. A root node gets p.
    static NodePrior heredity(Heredity rule, std::size_t parents, double p, double epsilon) {
        std::vector<double> rows(std::size_t{1} << parents);
        const std::size_t all = rows.size() - 1;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            bool ok = parents == 0 || (rule == Heredity::strong ? r == all : r != 0);
            rows[r] = ok ? p : epsilon;
        }
        return NodePrior(std::move(rows));
    }

    const std::vector<double>& rows() const { return rows_; }
    double prob(std::size_t row) const { return rows_[row]; }
    std::optional<std::size_t> arity() const { return arity_of(rows_.size()); }

    std::vector<double> subscripts() const {
        auto k = arity();
        if (!k) return rows_;
        std::vector<double> out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = rows_[reverse_bits(i, *k)];
        return out;
    }

    static std::optional<std::size_t> arity_of(std::size_t rows) {
        if (rows == 0 || (rows & (rows - 1)) != 0) return std::nullopt;
        std::size_t k = 0;
        while ((std::size_t{1} << k) < rows) ++k;
        return k;
    }

private:
    explicit NodePrior(std::vector<double> rows) : rows_(std::move(rows)) {}

    static std::size_t reverse_bits(std::size_t i, std::size_t k) {
        std::size_t r = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (i & (std::size_t{1} << j)) r |= std::size_t{1} << (k - 1 - j);
        return r;
    }

    std::vector<double> rows_{0.5};
};

/// k mutually exclusive sub-models. Block i allows only its members to be
/// active; every other node is forced inactive under that block.
struct CompetingBlocks {
    std::vector<std::vector<std::size_t>> members;
    std::vector<double> mixing;
};

/// Reweighting of the prior by a whole-pattern statistic.
struct GlobalWeight {
    enum class Kind { none, size_indicator, size_weights, subset_weights };
    Kind kind = Kind::none;
    std::size_t max_terms = 0;          ///< size_indicator: allow |delta| <= max_terms
    std::vector<double> weights;        ///< indexed by the statistic value
    std::vector<std::size_t> subset;    ///< subset_weights: nodes whose active count is the statistic

    static GlobalWeight none() { return {}; }
    static GlobalWeight size_indicator(std::size_t max_terms) {
        return {Kind::size_indicator, max_terms, {}, {}};
    }
    static GlobalWeight size_weights(std::vector<double> w) {
        return {Kind::size_weights, 0, std::move(w), {}};
    }
    static GlobalWeight subset_weights(std::vector<std::size_t> nodes, std::vector<double> w) {
        return {Kind::subset_weights, 0, std::move(w), std::move(nodes)};
    }

    /// Model-size prior w_k / C(p, k) over a constant base prior.
    static GlobalWeight size_prior(const std::vector<double>& size_probs) {
        const std::size_t p = size_probs.empty() ? 0 : size_probs.size() - 1;
        std::vector<double> w(size_probs.size());
        for (std::size_t k = 0; k <= p; ++k) {
            double log_choose = std::lgamma(p + 1.0) - std::lgamma(k + 1.0) - std::lgamma(p - k + 1.0);
            w[k] = size_probs[k] * std::exp(-log_choose);
        }
        return size_weights(std::move(w));
    }

    bool active() const { return kind != Kind::none; }

    std::size_t statistic(const ActivationPattern& d) const {
        if (kind != Kind::subset_weights) return d.count();
        std::size_t c = 0;
        for (auto i : subset) c += d[i];
        return c;
    }

    double operator()(const ActivationPattern& d) const {
        switch (kind) {
        case Kind::none: return 1.0;
        case Kind::size_indicator: return d.count() <= max_terms ? 1.0 : 0.0;
        case Kind::size_weights:
        case Kind::subset_weights: {
            auto s = statistic(d);
            return s < weights.size() ? weights[s] : 0.0;
        }
        }
        return 1.0;
    }
};

/// User-facing prior description. Parent lists refer to node indices.
struct PriorSpec {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> parents;
    std::vector<NodePrior> nodes;
    std::optional<CompetingBlocks> competing;
    GlobalWeight weight;
    std::size_t parent_cap = 8;
    std::size_t normalize_limit = 20;  ///< enumerate the weight normalizer up to this many nodes

    std::size_t size() const { return nodes.size(); }

    /// Independent nodes with the given activation probabilities.
    static PriorSpec independence(const std::vector<double>& probs) {
        PriorSpec s;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            s.labels.push_back("x" + std::to_string(i + 1));
            s.parents.emplace_back();
            s.nodes.push_back(NodePrior::marginal(probs[i]));
        }
        return s;
    }
};

struct Diagnostic {
    enum class Severity { warning, error };
    Severity severity = Severity::error;
    std::string message;

    bool is_error() const { return severity == Severity::error; }
};

namespace detail {

/// Kahn's algorithm, lowest index first. Empty optional on a cycle.
inline std::optional<std::vector<std::size_t>> topological_order(
    const std::vector<std::vector<std::size_t>>& parents) {
    const auto p = parents.size();
    std::vector<std::size_t> indeg(p, 0);
    std::vector<std::vector<std::size_t>> children(p);
    for (std::size_t i = 0; i < p; ++i)
        for (auto q : parents[i]) {
            if (q >= p) return std::nullopt;
            ++indeg[i];
            children[q].push_back(i);
        }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < p; ++i)
        if (indeg[i] == 0) ready.insert(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (auto c : children[i])
            if (--indeg[c] == 0) ready.insert(c);
    }
    if (order.size() != p) return std::nullopt;
    return order;
}

}  // namespace detail

/// Check every structural invariant. Errors are fatal; warnings are advisory.
inline std::vector<Diagnostic> validate(const PriorSpec& s) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string m) { out.push_back({Diagnostic::Severity::error, std::move(m)}); };
    auto warn = [&](std::string m) { out.push_back({Diagnostic::Severity::warning, std::move(m)}); };
    const auto p = s.nodes.size();
    auto name = [&](std::size_t i) {
        return i < s.labels.size() ? s.labels[i] : "node " + std::to_string(i);
    };

    if (s.parents.size() != p) error("parent lists: expected " + std::to_string(p) + ", got " + std::to_string(s.parents.size()));
    if (s.labels.size() != p) error("labels: expected " + std::to_string(p) + ", got " + std::to_string(s.labels.size()));
    if (!out.empty()) return out;

    bool structure_ok = true;
    for (std::size_t i = 0; i < p; ++i) {
        const auto& ps = s.parents[i];
        std::set<std::size_t> uniq(ps.begin(), ps.end());
        if (uniq.size() != ps.size()) { error(name(i) + ": duplicate parent"); structure_ok = false; }
        for (auto q : ps)
            if (q >= p || q == i) { error(name(i) + ": invalid parent index " + std::to_string(q)); structure_ok = false; }
        if (!std::is_sorted(ps.begin(), ps.end())) { error(name(i) + ": parent list must be in node order"); structure_ok = false; }
        if (ps.size() > s.parent_cap)
            error(name(i) + ": " + std::to_string(ps.size()) + " parents exceeds cap " + std::to_string(s.parent_cap));

        const auto& rows = s.nodes[i].rows();
        if (rows.size() != (std::size_t{1} << std::min<std::size_t>(ps.size(), 62))) {
            error(name(i) + ": table has " + std::to_string(rows.size()) + " rows, expected 2^" + std::to_string(ps.size()));
            continue;
        }
        bool range_ok = true;
        for (double v : rows)
            if (!(v >= 0.0 && v <= 1.0)) range_ok = false;
        if (!range_ok) { error(name(i) + ": probabilities must lie in [0, 1]"); continue; }

        // Activating an extra parent should not lower the activation probability.
        bool monotone = true;
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t j = 0; j < ps.size(); ++j)
                if (!(r & (std::size_t{1} << j)) && rows[r] > rows[r | (std::size_t{1} << j)]) monotone = false;
        if (!monotone)
            warn(name(i) + ": table violates the ordering p00 <= (p01, p10) <= p11");
    }
    if (structure_ok && !detail::topological_order(s.parents)) error("parent graph has a cycle");

    if (s.competing) {
        const auto& c = *s.competing;
        if (c.members.empty()) error("competing blocks: no blocks");
        if (c.members.size() != c.mixing.size()) error("competing blocks: one mixing probability per block required");
        double sum = 0;
        for (double m : c.mixing) {
            if (!(m >= 0.0 && m <= 1.0)) error("competing blocks: mixing probabilities must lie in [0, 1]");
            sum += m;
        }
        if (std::abs(sum - 1.0) > 1e-12) error("competing blocks: mixing probabilities sum to " + std::to_string(sum) + ", not 1");
        for (std::size_t b = 0; b < c.members.size(); ++b) {
            std::set<std::size_t> uniq(c.members[b].begin(), c.members[b].end());
            if (uniq.size() != c.members[b].size()) error("competing block " + std::to_string(b) + ": duplicate member");
            for (auto m : c.members[b])
                if (m >= p) error("competing block " + std::to_string(b) + ": member index out of range");
        }
    }

    const auto& w = s.weight;
    if (w.active()) {
        for (double v : w.weights)
            if (!(v >= 0.0) || !std::isfinite(v)) error("global weight: weights must be finite and non-negative");
        if (w.kind == GlobalWeight::Kind::size_weights && w.weights.size() != p + 1)
            error("global weight: size weights need p + 1 = " + std::to_string(p + 1) + " entries");
        if (w.kind == GlobalWeight::Kind::subset_weights) {
            for (auto i : w.subset)
                if (i >= p) error("global weight: subset index out of range");
            if (w.weights.size() != w.subset.size() + 1)
                error("global weight: subset weights need |subset| + 1 entries");
        }
        if (w.kind != GlobalWeight::Kind::size_indicator &&
            std::none_of(w.weights.begin(), w.weights.end(), [](double v) { return v > 0; }))
            error("global weight: every partition has zero weight");
    }
    return out;
}

inline bool has_errors(const std::vector<Diagnostic>& d) {
    return std::any_of(d.begin(), d.end(), [](const Diagnostic& x) { return x.is_error(); });
}

/// A validated, immutable prior with evaluation caches.
class Prior {
public:
    explicit Prior(PriorSpec spec) : spec_(std::move(spec)) {
        auto diags = validate(spec_);
        if (has_errors(diags)) {
            std::string msg = "invalid prior:";
            for (const auto& d : diags)
                if (d.is_error()) msg += "\n  " + d.message;
            throw PriorError(msg);
        }
        const auto p = spec_.size();
        topo_ = *detail::topological_order(spec_.parents);
        children_.assign(p, {});
        for (std::size_t i = 0; i < p; ++i)
            for (auto q : spec_.parents[i]) children_[q].push_back(i);
        log_on_.resize(p);
        log_off_.resize(p);
        for (std::size_t i = 0; i < p; ++i)
            for (double v : spec_.nodes[i].rows()) {
                log_on_[i].push_back(log_or_neg_inf(v));
                log_off_[i].push_back(log_or_neg_inf(1.0 - v));
            }
        if (spec_.competing) {
            block_mask_.assign(spec_.competing->members.size(), std::vector<std::uint8_t>(p, 0));
            for (std::size_t b = 0; b < block_mask_.size(); ++b)
                for (auto m : spec_.competing->members[b]) block_mask_[b][m] = 1;
        }
        if (spec_.weight.active() && p <= spec_.normalize_limit) {
            double log_z = neg_inf;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
                auto d = ActivationPattern::from_mask(mask, p);
                log_z = log_add(log_z, log_weight(d) + log_prior_unweighted(d));
            }
            if (log_z == neg_inf) throw PriorError("invalid prior:\n  global weight: no reachable pattern has positive weight");
            log_normalizer_ = log_z;
            normalized_ = true;
        } else {
            normalized_ = !spec_.weight.active();
        }
    }

    const PriorSpec& spec() const { return spec_; }
    std::size_t size() const { return spec_.size(); }
    const std::vector<std::size_t>& topological_order() const { return topo_; }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }
    const std::vector<std::size_t>& parents(std::size_t i) const { return spec_.parents[i]; }
    /// False only when a weight is present and the normalizer was not enumerated.
    bool normalized() const { return normalized_; }
    double log_normalizer() const { return log_normalizer_; }

    std::size_t row(std::size_t i, const ActivationPattern& d) const {
        std::size_t r = 0;
        const auto& ps = spec_.parents[i];
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (d[ps[j]]) r |= std::size_t{1} << j;
        return r;
    }

    /// log Pr(delta_i = bit | parents) for the parent bits in d.
    double log_factor(std::size_t i, const ActivationPattern& d, bool bit) const {
        auto r = row(i, d);
        return bit ? log_on_[i][r] : log_off_[i][r];
    }

    /// Pr(delta_i = 1 | parent bits in d).
    double activation_prob(std::size_t i, const ActivationPattern& d) const {
        return spec_.nodes[i].prob(row(i, d));
    }

    /// Log prior before global reweighting.
    double log_prior_unweighted(const ActivationPattern& d) const {
        check_length(d);
        const auto p = size();
        if (!spec_.competing) {
            double s = 0;
            for (std::size_t i = 0; i < p; ++i) {
                s += log_factor(i, d, d[i]);
                if (s == neg_inf) return neg_inf;
            }
            return s;
        }
        const auto& c = *spec_.competing;
        double total = neg_inf;
        for (std::size_t b = 0; b < block_mask_.size(); ++b) {
            if (c.mixing[b] <= 0) continue;
            const auto& in = block_mask_[b];
            double s = std::log(c.mixing[b]);
            for (std::size_t i = 0; i < p && s != neg_inf; ++i) {
                if (!in[i]) {
                    if (d[i]) s = neg_inf;
                } else {
                    s += log_factor(i, d, d[i]);
                }
            }
            total = log_add(total, s);
        }
        return total;
    }

    double log_weight(const ActivationPattern& d) const {
        return spec_.weight.active() ? log_or_neg_inf(spec_.weight(d)) : 0.0;
    }

    /// Normalized log prior (unnormalized when the weight normalizer was not enumerated).
    double log_prior(const ActivationPattern& d) const {
        double lw = log_weight(d);
        if (lw == neg_inf) return neg_inf;
        double base = log_prior_unweighted(d);
        if (base == neg_inf) return neg_inf;
        return base + lw - log_normalizer_;
    }

    /// Pr(delta_i = 1 | delta_(-i)). The bit at position i of `d` is ignored.
    double conditional_activation(std::size_t i, ActivationPattern d) const {
        check_length(d);
        double u0, u1;
        if (!spec_.competing && !spec_.weight.active()) {
            u0 = u1 = 0;
            d.set(i, false);
            u0 += log_factor(i, d, false);
            u1 += log_factor(i, d, true);
            for (auto c : children_[i]) u0 += log_factor(c, d, d[c]);
            d.set(i, true);
            for (auto c : children_[i]) u1 += log_factor(c, d, d[c]);
        } else {
            d.set(i, false);
            u0 = log_prior_unweighted(d) + log_weight(d);
            d.set(i, true);
            u1 = log_prior_unweighted(d) + log_weight(d);
        }
        if (u0 == neg_inf && u1 == neg_inf)
            throw PriorError("conditional for '" + spec_.labels[i] + "' has zero mass on both settings");
        if (u0 == neg_inf) return 1.0;
        if (u1 == neg_inf) return 0.0;
        return 1.0 / (1.0 + std::exp(u0 - u1));
    }

    /// Ancestral draw: block by mixing weight, then nodes parents-first;
    /// rejection against the global weight.
    template <class Rng>
    ActivationPattern sample(Rng& rng, std::size_t max_attempts = 1000000) const {
        const auto p = size();
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double w_max = 1.0;
        if (spec_.weight.kind == GlobalWeight::Kind::size_weights ||
            spec_.weight.kind == GlobalWeight::Kind::subset_weights)
            w_max = *std::max_element(spec_.weight.weights.begin(), spec_.weight.weights.end());
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            ActivationPattern d(p);
            const std::vector<std::uint8_t>* allowed = nullptr;
            if (spec_.competing) {
                double u = unif(rng), acc = 0;
                std::size_t b = 0;
                for (; b + 1 < block_mask_.size(); ++b) {
                    acc += spec_.competing->mixing[b];
                    if (u < acc) break;
                }
                allowed = &block_mask_[b];
            }
            for (auto i : topo_) {
                if (allowed && !(*allowed)[i]) continue;
                d.set(i, unif(rng) < activation_prob(i, d));
            }
            if (!spec_.weight.active()) return d;
            if (unif(rng) * w_max < spec_.weight(d)) return d;
        }
        throw PriorError("prior sampling: rejection against the global weight did not terminate");
    }

private:
    void check_length(const ActivationPattern& d) const {
        if (d.size() != size())
            throw PriorError("pattern has " + std::to_string(d.size()) + " bits, prior has " +
                             std::to_string(size()) + " nodes");
    }

    PriorSpec spec_;
    std::vector<std::size_t> topo_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<double>> log_on_, log_off_;
    std::vector<std::vector<std::uint8_t>> block_mask_;
    double log_normalizer_ = 0.0;
    bool normalized_ = true;
};

inline double log_prior(const ActivationPattern& d, const Prior& prior) { return prior.log_prior(d); }

inline double conditional_activation(std::size_t i, const ActivationPattern& d, const Prior& prior) {
    return prior.conditional_activation(i, d);
}

struct WeightedPattern {
    ActivationPattern pattern;
    double probability = 0;
    double log_probability = neg_inf;
};

/// Every pattern with positive mass, in lexicographic bit order.
inline std::vector<WeightedPattern> enumerate_support(const Prior& prior, std::size_t p_limit = 20) {
    const auto p = prior.size();
    if (p > p_limit || p > 62)
        throw PriorError("enumeration over " + std::to_string(p) + " nodes exceeds the limit of " +
                         std::to_string(p_limit));
    if (!prior.normalized())
        throw PriorError("enumeration needs a normalized prior (raise normalize_limit)");
    std::vector<WeightedPattern> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
        auto d = ActivationPattern::from_mask(mask, p);
        double lp = prior.log_prior(d);
        if (lp == neg_inf) continue;
        out.push_back({std::move(d), std::exp(lp), lp});
    }
    return out;
}

/// The prior restricted to `nodes` and all of their ancestors. Valid only for
/// plain DAG priors, where non-ancestors marginalize out exactly.
/// Returns the sub-spec and, for each sub-node, its index in the full prior.
inline std::pair<PriorSpec, std::vector<std::size_t>> ancestral_restriction(
    const Prior& prior, const std::vector<std::size_t>& nodes) {
    const auto& s = prior.spec();
    if (s.competing || s.weight.active())
        throw PriorError("ancestral restriction requires a prior without competing blocks or weights");
    std::set<std::size_t> keep;
    std::vector<std::size_t> stack(nodes.begin(), nodes.end());
    while (!stack.empty()) {
        auto i = stack.back();
        stack.pop_back();
        if (i >= s.size()) throw PriorError("node index out of range");
        if (!keep.insert(i).second) continue;
        for (auto q : s.parents[i]) stack.push_back(q);
    }
    std::vector<std::size_t> index(keep.begin(), keep.end());
    std::map<std::size_t, std::size_t> to_sub;
    for (std::size_t k = 0; k < index.size(); ++k) to_sub[index[k]] = k;
    PriorSpec sub;
    sub.parent_cap = s.parent_cap;
    for (auto i : index) {
        sub.labels.push_back(s.labels[i]);
        std::vector<std::size_t> ps;
        for (auto q : s.parents[i]) ps.push_back(to_sub.at(q));
        sub.parents.push_back(std::move(ps));
        sub.nodes.push_back(s.nodes[i]);
    }
    return {std::move(sub), std::move(index)};
}

struct PriorMarginals {
    std::vector<double> inclusion;
    bool exact = true;
};

/// Prior inclusion probability of each node: full enumeration for small p,
/// per-node ancestral enumeration for plain DAG priors, otherwise Monte Carlo.
inline PriorMarginals prior_marginals(const Prior& prior, std::size_t p_limit = 20,
                                      std::size_t mc_draws = 100000, std::uint64_t seed = 20240601) {
    const auto p = prior.size();
    PriorMarginals out;
    out.inclusion.assign(p, 0.0);
    if (p <= p_limit && prior.normalized()) {
        for (const auto& wp : enumerate_support(prior, p_limit))
            for (std::size_t i = 0; i < p; ++i)
                if (wp.pattern[i]) out.inclusion[i] += wp.probability;
        return out;
    }
    const auto& s = prior.spec();
    if (!s.competing && !s.weight.active()) {
        bool ok = true;
        for (std::size_t i = 0; i < p && ok; ++i) {
            auto [sub, index] = ancestral_restriction(prior, {i});
            if (sub.size() > p_limit) { ok = false; break; }
            Prior sp(std::move(sub));
            auto pos = static_cast<std::size_t>(std::find(index.begin(), index.end(), i) - index.begin());
            double m = 0;
            for (const auto& wp : enumerate_support(sp, p_limit))
                if (wp.pattern[pos]) m += wp.probability;
            out.inclusion[i] = m;
        }
        if (ok) return out;
    }
    std::mt19937_64 rng(seed);
    out.inclusion.assign(p, 0.0);
    for (std::size_t t = 0; t < mc_draws; ++t) {
        auto d = prior.sample(rng);
        for (std::size_t i = 0; i < p; ++i) out.inclusion[i] += d[i];
    }
    for (auto& v : out.inclusion) v /= static_cast<double>(mc_draws);
    out.exact = false;
    return out;
}

/// Distribution of the number of active nodes among `subset` under the prior
/// before any global reweighting. Entry k is Pr(k of the subset active).
inline std::vector<double> partition_probabilities(const Prior& prior, const std::vector<std::size_t>& subset,
                                                   std::size_t p_limit = 22) {
    std::vector<double> out(subset.size() + 1, 0.0);
    const auto& s = prior.spec();
    auto accumulate = [&](const Prior& pr, const std::vector<std::size_t>& sub_idx) {
        for (const auto& wp : enumerate_support(pr, p_limit)) {
            std::size_t k = 0;
            for (auto i : sub_idx) k += wp.pattern[i];
            out[k] += wp.probability;
        }
    };
    if (!s.competing) {
        PriorSpec base = s;
        base.weight = GlobalWeight::none();
        Prior unweighted(std::move(base));
        auto [sub, index] = ancestral_restriction(unweighted, subset);
        std::vector<std::size_t> sub_idx;
        for (auto i : subset)
            sub_idx.push_back(static_cast<std::size_t>(std::find(index.begin(), index.end(), i) - index.begin()));
        accumulate(Prior(std::move(sub)), sub_idx);
    } else {
        PriorSpec base = s;
        base.weight = GlobalWeight::none();
        accumulate(Prior(std::move(base)), subset);
    }
    return out;
}

}  // namespace ssvs
