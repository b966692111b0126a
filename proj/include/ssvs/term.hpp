#pragma once
//! Term algebra: formulas over base variables, order and inheritance, and the
//! mapping from terms to selectable nodes.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssvs/error.hpp"

namespace ssvs {

enum class VariableKind { continuous, categorical };

/// A named input column. Categorical variables carry their ordered level
/// labels; the first level is the reference level of the dummy coding.
struct BaseVariable {
    std::string name;
    VariableKind kind = VariableKind::continuous;
    std::vector<std::string> levels;

    static BaseVariable continuous(std::string name) {
        return {std::move(name), VariableKind::continuous, {}};
    }
    static BaseVariable categorical(std::string name, std::vector<std::string> levels) {
        if (levels.size() < 2)
            throw TermError("categorical variable '" + name + "' needs at least 2 levels");
        std::set<std::string> distinct(levels.begin(), levels.end());
        if (distinct.size() != levels.size())
            throw TermError("categorical variable '" + name + "' has duplicate levels");
        return {std::move(name), VariableKind::categorical, std::move(levels)};
    }

    bool is_categorical() const { return kind == VariableKind::categorical; }
    /// Number of indicator columns under reference-level coding.
    std::size_t dummy_count() const { return is_categorical() ? levels.size() - 1 : 1; }
};

struct Factor {
    std::string variable;
    int exponent = 1;
    bool categorical = false;

    friend bool operator==(const Factor&, const Factor&) = default;
};

/// A product of powers of base variables. Factors are kept in declaration
/// order of the variables so that equal products compare equal.
class Term {
public:
    Term() = default;
    explicit Term(std::vector<Factor> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw TermError("term has no factors");
    }

    const std::vector<Factor>& factors() const { return factors_; }

    int exponent_of(std::string_view var) const {
        for (const auto& f : factors_)
            if (f.variable == var) return f.exponent;
        return 0;
    }

    bool has_categorical() const {
        return std::any_of(factors_.begin(), factors_.end(),
                           [](const Factor& f) { return f.categorical; });
    }

    std::string name() const {
        std::string out;
        for (const auto& f : factors_) {
            if (!out.empty()) out += '*';
            out += f.variable;
            if (f.exponent > 1) out += '^' + std::to_string(f.exponent);
        }
        return out;
    }

    friend bool operator==(const Term&, const Term&) = default;

private:
    std::vector<Factor> factors_;
};

inline const BaseVariable* find_variable(const std::vector<BaseVariable>& vars,
                                         std::string_view name) {
    for (const auto& v : vars)
        if (v.name == name) return &v;
    return nullptr;
}

/// Parse "A", "A^2*B", "B*A" ... against the declared variables.
///
/// Grammar: factor ('*' factor)*, factor = identifier ('^' positive-integer)?.
/// Repeated variables multiply ("A*A" is "A^2").
inline Term parse_term(std::string_view text, const std::vector<BaseVariable>& vars) {
    std::map<std::size_t, int> exps;  // variable index -> exponent
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto fail = [&](const std::string& why) -> TermError {
        return TermError("cannot parse term '" + std::string(text) + "': " + why);
    };

    while (true) {
        skip_ws();
        std::size_t start = pos;
        if (pos < text.size() &&
            (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                    text[pos] == '.'))
                ++pos;
        }
        if (pos == start) throw fail("expected identifier at position " + std::to_string(pos));
        std::string ident(text.substr(start, pos - start));

        skip_ws();
        long exponent = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            skip_ws();
            bool negative = false;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
                negative = text[pos] == '-';
                ++pos;
            }
            std::size_t dstart = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == dstart) throw fail("expected integer exponent");
            if (pos - dstart > 6) throw fail("exponent too large");
            exponent = std::stol(std::string(text.substr(dstart, pos - dstart)));
            if (negative) exponent = -exponent;
            if (exponent <= 0) throw fail("exponent must be a positive integer");
        }

        auto it = std::find_if(vars.begin(), vars.end(),
                               [&](const BaseVariable& v) { return v.name == ident; });
        if (it == vars.end()) throw TermError("unknown variable '" + ident + "' in term '" +
                                              std::string(text) + "'");
        exps[static_cast<std::size_t>(it - vars.begin())] += static_cast<int>(exponent);

        skip_ws();
        if (pos == text.size()) break;
        if (text[pos] != '*') throw fail(std::string("unexpected character '") + text[pos] + "'");
        ++pos;
    }

    std::vector<Factor> factors;
    for (auto [idx, e] : exps) {
        const auto& v = vars[idx];
        if (v.is_categorical() && e != 1)
            throw TermError("categorical variable '" + v.name + "' must appear with exponent 1");
        factors.push_back({v.name, e, v.is_categorical()});
    }
    return Term(std::move(factors));
}

/// Total exponent; a categorical factor counts as 1.
inline int order(const Term& t) {
    int sum = 0;
    for (const auto& f : t.factors()) sum += f.exponent;
    return sum;
}

/// True when s divides t as a monomial and is of strictly lower order.
inline bool inherits(const Term& s, const Term& t) {
    for (const auto& f : s.factors())
        if (f.exponent > t.exponent_of(f.variable)) return false;
    return order(s) < order(t);
}

/// Members of `ts` from which `t` inherits immediately (next lower order).
inline std::vector<Term> immediate_parents(const Term& t, const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const auto& s : ts)
        if (order(s) == order(t) - 1 && inherits(s, t)) out.push_back(s);
    return out;
}

/// Labels of the design columns a term produces (one per dummy combination).
inline std::vector<std::string> column_labels(const Term& t, const std::vector<BaseVariable>& vars) {
    std::vector<std::string> labels{""};
    for (const auto& f : t.factors()) {
        std::vector<std::string> next;
        const BaseVariable* v = find_variable(vars, f.variable);
        if (!v) throw TermError("term '" + t.name() + "' references undeclared '" + f.variable + "'");
        std::vector<std::string> pieces;
        if (v->is_categorical()) {
            for (std::size_t l = 1; l < v->levels.size(); ++l)
                pieces.push_back(v->name + "[" + v->levels[l] + "]");
        } else {
            pieces.push_back(f.exponent > 1 ? v->name + "^" + std::to_string(f.exponent) : v->name);
        }
        for (const auto& prefix : labels)
            for (const auto& piece : pieces)
                next.push_back(prefix.empty() ? piece : prefix + "*" + piece);
        labels = std::move(next);
    }
    return labels;
}

/// One design column: term index plus position among that term's columns.
struct ColumnRef {
    std::size_t term = 0;
    std::size_t column = 0;

    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

/// A selectable unit: one activation indicator governing one or more columns.
struct Node {
    std::string label;
    std::vector<ColumnRef> columns;
};

/// Several terms that share a single indicator.
struct TermGroup {
    std::string name;
    std::vector<std::size_t> terms;
};

/// Ordered collection of distinct terms plus the node structure over them.
///
/// By default each term is one node; a categorical term is one node for all of
/// its dummy columns. `groups` merges terms into one node and `split` gives each
/// column of the listed terms its own node. Node order follows the first
/// column of each node in term order.
class TermSet {
public:
    TermSet() = default;

    TermSet(std::vector<BaseVariable> vars, std::vector<Term> terms,
            const std::vector<TermGroup>& groups = {}, const std::vector<std::size_t>& split = {})
        : vars_(std::move(vars)), terms_(std::move(terms)) {
        for (std::size_t i = 0; i < terms_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (terms_[i] == terms_[j])
                    throw TermError("duplicate term '" + terms_[i].name() + "'");
        for (const auto& t : terms_) column_labels(t, vars_);  // validates variable references

        std::vector<std::optional<std::size_t>> group_of(terms_.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (groups[g].terms.empty()) throw TermError("group '" + groups[g].name + "' is empty");
            for (auto t : groups[g].terms) {
                if (t >= terms_.size()) throw TermError("group '" + groups[g].name + "' has bad term index");
                if (group_of[t]) throw TermError("term '" + terms_[t].name() + "' is in two groups");
                group_of[t] = g;
            }
        }
        std::set<std::size_t> split_set(split.begin(), split.end());
        for (auto t : split_set) {
            if (t >= terms_.size()) throw TermError("split list has bad term index");
            if (group_of[t]) throw TermError("term '" + terms_[t].name() + "' is both grouped and split");
        }

        std::vector<std::optional<std::size_t>> group_node(groups.size());
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            auto labels = column_labels(terms_[t], vars_);
            if (group_of[t]) {
                auto g = *group_of[t];
                if (!group_node[g]) {
                    group_node[g] = nodes_.size();
                    nodes_.push_back({groups[g].name, {}});
                }
                for (std::size_t c = 0; c < labels.size(); ++c)
                    nodes_[*group_node[g]].columns.push_back({t, c});
            } else if (split_set.count(t)) {
                for (std::size_t c = 0; c < labels.size(); ++c)
                    nodes_.push_back({labels[c], {{t, c}}});
            } else {
                Node n{terms_[t].name(), {}};
                for (std::size_t c = 0; c < labels.size(); ++c) n.columns.push_back({t, c});
                nodes_.push_back(std::move(n));
            }
        }

        term_nodes_.assign(terms_.size(), {});
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            for (const auto& c : nodes_[k].columns) {
                auto& tn = term_nodes_[c.term];
                if (std::find(tn.begin(), tn.end(), k) == tn.end()) tn.push_back(k);
            }

        parents_.assign(nodes_.size(), {});
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            std::set<std::size_t> ps;
            for (const auto& c : nodes_[k].columns)
                for (std::size_t s = 0; s < terms_.size(); ++s)
                    if (order(terms_[s]) == order(terms_[c.term]) - 1 &&
                        inherits(terms_[s], terms_[c.term]))
                        for (auto node : term_nodes_[s])
                            if (node != k) ps.insert(node);
            parents_[k].assign(ps.begin(), ps.end());
        }
    }

    const std::vector<BaseVariable>& variables() const { return vars_; }
    const std::vector<Term>& terms() const { return terms_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }

    /// Parent node lists; immediate inheritance unless overridden.
    const std::vector<std::vector<std::size_t>>& parents() const { return parents_; }

    /// Replace the parent list of a node, e.g. with its whole inheritance family.
    void set_parents(std::size_t node, std::vector<std::size_t> parents) {
        if (node >= nodes_.size()) throw TermError("node index out of range");
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        for (auto p : parents)
            if (p >= nodes_.size() || p == node) throw TermError("invalid parent for node '" + nodes_[node].label + "'");
        parents_[node] = std::move(parents);
    }

    /// Nodes that carry columns of term `t`.
    const std::vector<std::size_t>& nodes_of_term(std::size_t t) const { return term_nodes_.at(t); }

    std::optional<std::size_t> find_term(const Term& t) const {
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i] == t) return i;
        return std::nullopt;
    }

    /// Node whose label matches, or whose sole term parses equal to `text`.
    std::optional<std::size_t> find_node(std::string_view text) const {
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            if (nodes_[k].label == text) return k;
        try {
            auto t = find_term(parse_term(text, vars_));
            if (t && term_nodes_[*t].size() == 1) return term_nodes_[*t].front();
        } catch (const TermError&) {
        }
        return std::nullopt;
    }

    /// Nodes in `inherits` relation: every ancestor term of node k's terms.
    std::vector<std::size_t> family(std::size_t k) const {
        std::set<std::size_t> fam;
        for (const auto& c : nodes_.at(k).columns)
            for (std::size_t s = 0; s < terms_.size(); ++s)
                if (inherits(terms_[s], terms_[c.term]))
                    for (auto node : term_nodes_[s])
                        if (node != k) fam.insert(node);
        return {fam.begin(), fam.end()};
    }

private:
    std::vector<BaseVariable> vars_;
    std::vector<Term> terms_;
    std::vector<Node> nodes_;
    std::vector<std::vector<std::size_t>> term_nodes_;
    std::vector<std::vector<std::size_t>> parents_;
};

/// Main effects followed by all pairwise interactions.
inline std::vector<Term> two_way_terms(const std::vector<BaseVariable>& vars) {
    std::vector<Term> out;
    for (const auto& v : vars) out.push_back(Term({{v.name, 1, v.is_categorical()}}));
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            out.push_back(Term({{vars[i].name, 1, vars[i].is_categorical()},
                                {vars[j].name, 1, vars[j].is_categorical()}}));
    return out;
}

/// Main effects, squares of continuous variables, then pairwise interactions.
inline std::vector<Term> second_order_terms(const std::vector<BaseVariable>& vars) {
    std::vector<Term> out;
    for (const auto& v : vars) out.push_back(Term({{v.name, 1, v.is_categorical()}}));
    for (const auto& v : vars)
        if (!v.is_categorical()) out.push_back(Term({{v.name, 2, false}}));
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            out.push_back(Term({{vars[i].name, 1, vars[i].is_categorical()},
                                {vars[j].name, 1, vars[j].is_categorical()}}));
    return out;
}

}  // namespace ssvs
