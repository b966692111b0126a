#pragma once
//! Datasets, CSV ingestion, dummy coding and design-matrix assembly.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ssvs/error.hpp"
#include "ssvs/pattern.hpp"
#include "ssvs/term.hpp"

namespace ssvs {

/// A predictor column: reals for continuous variables, labels for categorical ones.
struct DataColumn {
    std::string name;
    std::variant<std::vector<double>, std::vector<std::string>> values;

    bool is_categorical() const { return std::holds_alternative<std::vector<std::string>>(values); }
    const std::vector<double>& reals() const { return std::get<std::vector<double>>(values); }
    const std::vector<std::string>& labels() const {
        return std::get<std::vector<std::string>>(values);
    }
    std::size_t size() const {
        return std::visit([](const auto& v) { return v.size(); }, values);
    }
};

struct Dataset {
    std::string response_name = "Y";
    Eigen::VectorXd response;
    std::vector<DataColumn> predictors;

    std::size_t rows() const { return static_cast<std::size_t>(response.size()); }

    const DataColumn& column(std::string_view name) const {
        for (const auto& c : predictors)
            if (c.name == name) return c;
        throw DataError("dataset has no column '" + std::string(name) + "'");
    }
    bool has_column(std::string_view name) const {
        return std::any_of(predictors.begin(), predictors.end(),
                           [&](const DataColumn& c) { return c.name == name; });
    }

    void check() const {
        if (rows() == 0) throw DataError("dataset has no rows");
        for (const auto& c : predictors)
            if (c.size() != rows())
                throw DataError("column '" + c.name + "' has " + std::to_string(c.size()) +
                                " values, expected " + std::to_string(rows()));
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline bool parse_real(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Parse CSV text: header row, comma separated, no blank cells.
inline Dataset parse_csv(std::istream& in, const std::string& response,
                         const std::set<std::string>& categorical = {}) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV input is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::trim(h);
    {
        std::set<std::string> seen;
        for (const auto& h : header) {
            if (h.empty()) throw DataError("CSV header has an empty column name");
            if (!seen.insert(h).second) throw DataError("CSV header repeats column '" + h + "'");
        }
    }
    auto resp_it = std::find(header.begin(), header.end(), response);
    if (resp_it == header.end()) throw DataError("response column '" + response + "' not in CSV header");
    for (const auto& c : categorical)
        if (std::find(header.begin(), header.end(), c) == header.end())
            throw DataError("categorical column '" + c + "' not in CSV header");

    std::vector<std::vector<std::string>> cells(header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError("CSV line " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            auto v = detail::trim(fields[j]);
            if (v.empty())
                throw DataError("missing value in column '" + header[j] + "' at line " +
                                std::to_string(lineno));
            cells[j].push_back(std::move(v));
        }
    }

    Dataset ds;
    ds.response_name = response;
    for (std::size_t j = 0; j < header.size(); ++j) {
        bool is_cat = categorical.count(header[j]) > 0;
        if (is_cat && header[j] == response) throw DataError("response cannot be categorical");
        if (is_cat) {
            ds.predictors.push_back({header[j], cells[j]});
            continue;
        }
        std::vector<double> vals;
        vals.reserve(cells[j].size());
        for (std::size_t r = 0; r < cells[j].size(); ++r) {
            double x = 0;
            if (!detail::parse_real(cells[j][r], x) || !std::isfinite(x))
                throw DataError("non-numeric value '" + cells[j][r] + "' in column '" + header[j] +
                                "' at line " + std::to_string(r + 2));
            vals.push_back(x);
        }
        if (header[j] == response) {
            ds.response = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        } else {
            ds.predictors.push_back({header[j], std::move(vals)});
        }
    }
    ds.check();
    return ds;
}

inline Dataset read_csv(const std::string& path, const std::string& response,
                        const std::set<std::string>& categorical = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    return parse_csv(in, response, categorical);
}

inline void write_csv(const Dataset& ds, std::ostream& out) {
    for (const auto& c : ds.predictors) out << c.name << ',';
    out << ds.response_name << '\n';
    char buf[32];
    auto real = [&](double x) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, p);
    };
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (const auto& c : ds.predictors) {
            if (c.is_categorical())
                out << c.labels()[r];
            else
                out << real(c.reals()[r]);
            out << ',';
        }
        out << real(ds.response[static_cast<Eigen::Index>(r)]) << '\n';
    }
}

/// Base variables for every predictor column. Categorical levels come from
/// `declared_levels` when given, otherwise the sorted distinct labels.
inline std::vector<BaseVariable> variables_of(
    const Dataset& ds, const std::map<std::string, std::vector<std::string>>& declared_levels = {}) {
    std::vector<BaseVariable> vars;
    for (const auto& c : ds.predictors) {
        if (!c.is_categorical()) {
            vars.push_back(BaseVariable::continuous(c.name));
            continue;
        }
        auto it = declared_levels.find(c.name);
        std::vector<std::string> levels;
        if (it != declared_levels.end()) {
            levels = it->second;
        } else {
            std::set<std::string> distinct(c.labels().begin(), c.labels().end());
            levels.assign(distinct.begin(), distinct.end());
        }
        if (levels.size() < 2)
            throw DataError("categorical column '" + c.name + "' has fewer than 2 levels");
        vars.push_back(BaseVariable::categorical(c.name, std::move(levels)));
    }
    return vars;
}

struct DummyColumns {
    Eigen::MatrixXd columns;  ///< n x (levels - 1), treatment coding
    std::vector<std::string> labels;
};

/// Reference-level indicator columns for a categorical variable.
inline DummyColumns expand_categorical(const BaseVariable& v, const Dataset& ds) {
    if (!v.is_categorical()) throw DataError("variable '" + v.name + "' is not categorical");
    const auto& col = ds.column(v.name);
    if (!col.is_categorical()) throw DataError("column '" + v.name + "' was not loaded as categorical");
    const auto& labels = col.labels();
    std::map<std::string, std::size_t> index;
    for (std::size_t l = 0; l < v.levels.size(); ++l) index[v.levels[l]] = l;

    const auto n = static_cast<Eigen::Index>(labels.size());
    DummyColumns out;
    out.columns = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(v.levels.size() - 1));
    std::set<std::size_t> observed;
    for (Eigen::Index r = 0; r < n; ++r) {
        auto it = index.find(labels[static_cast<std::size_t>(r)]);
        if (it == index.end())
            throw DataError("level '" + labels[static_cast<std::size_t>(r)] + "' of '" + v.name +
                            "' is not declared");
        observed.insert(it->second);
        if (it->second > 0) out.columns(r, static_cast<Eigen::Index>(it->second - 1)) = 1.0;
    }
    if (observed.size() < 2)
        throw DataError("categorical variable '" + v.name + "' has fewer than 2 observed levels");
    for (std::size_t l = 1; l < v.levels.size(); ++l) out.labels.push_back(v.name + "[" + v.levels[l] + "]");
    return out;
}

/// Intercept plus one column per (term, dummy combination).
struct DesignMatrix {
    Eigen::MatrixXd x;                             ///< n x q; column 0 is the intercept
    std::vector<std::string> column_names;         ///< size q
    std::vector<long> column_node;                 ///< size q; -1 for the intercept
    std::vector<std::vector<std::size_t>> node_columns;
    std::vector<std::string> node_labels;

    std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }
    std::size_t node_count() const { return node_columns.size(); }

    /// Intercept and the columns of active nodes, in design order.
    std::vector<std::size_t> active_columns(const ActivationPattern& bits) const {
        if (bits.size() != node_count()) throw Error("pattern length does not match node count");
        std::vector<std::size_t> out{0};
        for (std::size_t j = 1; j < cols(); ++j)
            if (bits[static_cast<std::size_t>(column_node[j])]) out.push_back(j);
        return out;
    }

    Eigen::MatrixXd select(const std::vector<std::size_t>& cols_) const {
        Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols_.size()));
        for (std::size_t k = 0; k < cols_.size(); ++k)
            out.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(cols_[k]));
        return out;
    }
};

struct DesignOptions {
    /// Center and scale columns built only from continuous variables, after the
    /// products are formed from the raw variables.
    bool standardize = false;
};

/// Assemble the design for a term set.
inline DesignMatrix build_design(const Dataset& ds, const TermSet& ts, DesignOptions opt = {}) {
    ds.check();
    const auto n = static_cast<Eigen::Index>(ds.rows());
    const auto& vars = ts.variables();

    std::map<std::string, DummyColumns> dummies;
    for (const auto& v : vars)
        if (v.is_categorical()) dummies.emplace(v.name, expand_categorical(v, ds));

    // Per term: its columns, in column_labels order.
    std::vector<Eigen::MatrixXd> term_cols;
    for (const auto& t : ts.terms()) {
        Eigen::MatrixXd cols = Eigen::MatrixXd::Ones(n, 1);
        for (const auto& f : t.factors()) {
            if (f.categorical) {
                const auto& d = dummies.at(f.variable).columns;
                Eigen::MatrixXd next(n, cols.cols() * d.cols());
                for (Eigen::Index a = 0; a < cols.cols(); ++a)
                    for (Eigen::Index b = 0; b < d.cols(); ++b)
                        next.col(a * d.cols() + b) = cols.col(a).cwiseProduct(d.col(b));
                cols = std::move(next);
            } else {
                const auto& col = ds.column(f.variable);
                if (col.is_categorical())
                    throw DataError("column '" + f.variable + "' is categorical but declared continuous");
                Eigen::Map<const Eigen::VectorXd> base(col.reals().data(), n);
                Eigen::VectorXd pw = base.array().pow(static_cast<double>(f.exponent));
                for (Eigen::Index a = 0; a < cols.cols(); ++a) cols.col(a).array() *= pw.array();
            }
        }
        if (!cols.allFinite())
            throw DataError("term '" + t.name() + "' produced non-finite design values");
        if (opt.standardize && !t.has_categorical()) {
            for (Eigen::Index a = 0; a < cols.cols(); ++a) {
                double mean = cols.col(a).mean();
                cols.col(a).array() -= mean;
                double sd = std::sqrt(cols.col(a).squaredNorm() / static_cast<double>(n));
                if (sd > 0) cols.col(a) /= sd;
            }
        }
        term_cols.push_back(std::move(cols));
    }

    DesignMatrix dm;
    const auto& nodes = ts.nodes();
    std::size_t q = 1;
    for (const auto& nd : nodes) q += nd.columns.size();
    dm.x.resize(n, static_cast<Eigen::Index>(q));
    dm.x.col(0).setOnes();
    dm.column_names.push_back("(intercept)");
    dm.column_node.push_back(-1);
    dm.node_columns.resize(nodes.size());

    // Columns in term order; each column is tagged with its owning node.
    std::vector<std::vector<long>> owner(ts.terms().size());
    for (std::size_t t = 0; t < ts.terms().size(); ++t)
        owner[t].assign(static_cast<std::size_t>(term_cols[t].cols()), -1);
    for (std::size_t k = 0; k < nodes.size(); ++k)
        for (const auto& c : nodes[k].columns) owner[c.term][c.column] = static_cast<long>(k);

    std::size_t j = 1;
    for (std::size_t t = 0; t < ts.terms().size(); ++t) {
        auto labels = column_labels(ts.terms()[t], vars);
        for (std::size_t c = 0; c < labels.size(); ++c) {
            if (owner[t][c] < 0) throw TermError("column '" + labels[c] + "' is not bound to a node");
            dm.x.col(static_cast<Eigen::Index>(j)) = term_cols[t].col(static_cast<Eigen::Index>(c));
            dm.column_names.push_back(labels[c]);
            dm.column_node.push_back(owner[t][c]);
            dm.node_columns[static_cast<std::size_t>(owner[t][c])].push_back(j);
            ++j;
        }
    }
    for (const auto& nd : nodes) dm.node_labels.push_back(nd.label);
    return dm;
}

/// Numerical rank with a relative threshold.
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& m, double tol = 1e-10) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(tol);
    return qr.rank();
}

/// Largest relative residual when projecting the columns of `b` onto span(a).
inline double projection_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    double worst = 0;
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        Eigen::VectorXd col = b.col(c);
        double scale = col.norm();
        if (scale == 0) continue;
        Eigen::VectorXd coef = qr.solve(col);
        worst = std::max(worst, (a * coef - col).norm() / scale);
    }
    return worst;
}

/// Equal column spaces: equal rank and mutual projection residuals below tol.
inline bool same_column_space(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol = 1e-8) {
    if (a.rows() != b.rows()) return false;
    if (numerical_rank(a) != numerical_rank(b)) return false;
    return projection_residual(a, b) < tol && projection_residual(b, a) < tol;
}

/// Apply x -> scale * x + shift to the named continuous columns.
inline Dataset affine_transform(Dataset ds, const std::map<std::string, std::pair<double, double>>& maps) {
    for (auto& c : ds.predictors) {
        auto it = maps.find(c.name);
        if (it == maps.end()) continue;
        if (c.is_categorical()) throw DataError("cannot transform categorical column '" + c.name + "'");
        auto v = c.reals();
        for (auto& x : v) x = it->second.first * x + it->second.second;
        c.values = std::move(v);
    }
    return ds;
}

}  // namespace ssvs
