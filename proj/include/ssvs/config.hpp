#pragma once
//! JSON run configuration, its resolution into a concrete problem, and the
//! synthetic scenario generator.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ssvs/data.hpp"
#include "ssvs/error.hpp"
#include "ssvs/linalg.hpp"
#include "ssvs/oracle.hpp"
#include "ssvs/prior.hpp"
#include "ssvs/sampler.hpp"
#include "ssvs/term.hpp"

namespace ssvs {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- scenarios

/// interaction: A, B, C iid N(0,1); beta over (A, B, C, AB, AC, BC).
/// grouping: A, B iid N(0,1) and a balanced 5-level C; beta over (A, B, C1..C4).
struct ScenarioSpec {
    enum class Name { interaction, grouping };
    Name name = Name::interaction;
    std::vector<double> true_beta;  ///< empty means the scenario default
    double sigma = 1.0;
    std::size_t n = 50;
    std::uint64_t seed = 1;
};

inline std::vector<double> default_beta(ScenarioSpec::Name name) {
    if (name == ScenarioSpec::Name::interaction) return {1, 1, 0, 1, 0, 0};
    return {1, 0, 1, 1, 1, 1};
}

inline std::optional<ScenarioSpec::Name> scenario_name(std::string_view s) {
    if (s == "table1" || s == "interaction") return ScenarioSpec::Name::interaction;
    if (s == "table3" || s == "grouping") return ScenarioSpec::Name::grouping;
    return std::nullopt;
}

inline std::string scenario_name(ScenarioSpec::Name n) {
    return n == ScenarioSpec::Name::interaction ? "table1" : "table3";
}

inline const std::vector<std::string>& grouping_levels() {
    static const std::vector<std::string> levels{"L1", "L2", "L3", "L4", "L5"};
    return levels;
}

/// Predictors come from one stream and the error vector from another, both
/// seeded by `seed`, so changing sigma or beta leaves X and epsilon unchanged.
inline Dataset generate_scenario(const ScenarioSpec& spec) {
    if (spec.n < 5) throw DataError("scenario needs at least 5 rows");
    if (!(spec.sigma >= 0)) throw DataError("scenario sigma must be non-negative");
    auto beta = spec.true_beta.empty() ? default_beta(spec.name) : spec.true_beta;
    if (beta.size() != 6) throw DataError("scenario true_beta needs 6 entries");

    const auto n = static_cast<Eigen::Index>(spec.n);
    Rng xr(spec.seed), er(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> norm(0.0, 1.0);
    auto draw = [&](Rng& r) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = norm(r);
        return v;
    };
    Eigen::VectorXd a = draw(xr), b = draw(xr);
    Eigen::VectorXd eps = draw(er);

    Dataset ds;
    ds.response_name = "Y";
    ds.predictors.push_back({"A", std::vector<double>(a.data(), a.data() + n)});
    ds.predictors.push_back({"B", std::vector<double>(b.data(), b.data() + n)});
    Eigen::VectorXd mean = beta[0] * a + beta[1] * b;

    if (spec.name == ScenarioSpec::Name::interaction) {
        Eigen::VectorXd c = draw(xr);
        ds.predictors.push_back({"C", std::vector<double>(c.data(), c.data() + n)});
        mean += beta[2] * c + beta[3] * a.cwiseProduct(b) + beta[4] * a.cwiseProduct(c) + beta[5] * b.cwiseProduct(c);
    } else {
        const auto& levels = grouping_levels();
        std::vector<std::size_t> level(spec.n);
        for (std::size_t i = 0; i < spec.n; ++i) level[i] = i % levels.size();
        for (std::size_t i = spec.n - 1; i > 0; --i) {  // Fisher-Yates with a portable bounded draw
            const std::uint64_t bound = i + 1, limit = UINT64_MAX - UINT64_MAX % bound;
            std::uint64_t r;
            do r = xr();
            while (r >= limit);
            std::swap(level[i], level[r % bound]);
        }
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < spec.n; ++i) {
            labels.push_back(levels[level[i]]);
            if (level[i] > 0) mean[static_cast<Eigen::Index>(i)] += beta[1 + level[i]];
        }
        ds.predictors.push_back({"C", std::move(labels)});
    }
    ds.response = mean + spec.sigma * eps;
    ds.check();
    return ds;
}

/// Term list of a scenario: every pairwise interaction, or A, B and C.
inline std::vector<std::string> scenario_terms(ScenarioSpec::Name name) {
    if (name == ScenarioSpec::Name::interaction) return {"A", "B", "C", "A*B", "A*C", "B*C"};
    return {"A", "B", "C"};
}

// ------------------------------------------------------------ run config

struct SamplerSettings {
    ChainConfig chain;
    std::size_t chains = 1;
};

struct OracleSettings {
    bool enabled = false;
    OracleConfig config;
};

struct OutputSettings {
    std::string dir = "ssvs_out";
    std::size_t top_n = 100;
    std::size_t top_k = 10;
};

/// Everything the sampler and the oracle need.
struct Problem {
    Dataset data;
    TermSet terms;
    DesignMatrix design;
    PriorSpec prior;
    SpikeSlabScales scales;
    NoiseVariancePrior noise;
};

struct RunConfig {
    Problem problem;
    SamplerSettings sampler;
    OracleSettings oracle;
    OutputSettings output;
    Json echo;  ///< normalized config; loading it again gives the same run
};

/// Prior as printed for humans: CPTs in subscript order, parents by label.
inline Json prior_echo(const PriorSpec& spec) {
    Json nodes = Json::array();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        Json ps = Json::array();
        for (auto p : spec.parents[i]) ps.push_back(spec.labels[p]);
        nodes.push_back({{"node", spec.labels[i]}, {"parents", ps}, {"cpt", spec.nodes[i].subscripts()}});
    }
    return nodes;
}

namespace detail {

struct Issues {
    std::vector<std::string> list;
    void add(const std::string& path, const std::string& msg) { list.push_back(path + ": " + msg); }
    bool empty() const { return list.empty(); }
};

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Reports keys of `obj` outside `allowed`. Returns false when obj is not an object.
inline bool check_object(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed,
                         Issues& iss) {
    if (!obj.is_object()) {
        iss.add(path, "expected an object");
        return false;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) iss.add(join_path(path, it.key()), "unknown field");
    }
    return true;
}

inline const Json* field(const Json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline double number_or(const Json& obj, const char* key, const std::string& path, double def, Issues& iss) {
    auto f = field(obj, key);
    if (!f) return def;
    if (!f->is_number()) {
        iss.add(join_path(path, key), "expected a number");
        return def;
    }
    return f->get<double>();
}

inline std::uint64_t count_or(const Json& obj, const char* key, const std::string& path, std::uint64_t def,
                              Issues& iss) {
    auto f = field(obj, key);
    if (!f) return def;
    if (!f->is_number_integer() || (!f->is_number_unsigned() && f->get<std::int64_t>() < 0)) {
        iss.add(join_path(path, key), "expected a non-negative integer");
        return def;
    }
    return f->is_number_unsigned() ? f->get<std::uint64_t>() : static_cast<std::uint64_t>(f->get<std::int64_t>());
}

inline bool bool_or(const Json& obj, const char* key, const std::string& path, bool def, Issues& iss) {
    auto f = field(obj, key);
    if (!f) return def;
    if (!f->is_boolean()) {
        iss.add(join_path(path, key), "expected true or false");
        return def;
    }
    return f->get<bool>();
}

inline std::string string_or(const Json& obj, const char* key, const std::string& path, const std::string& def,
                             Issues& iss) {
    auto f = field(obj, key);
    if (!f) return def;
    if (!f->is_string()) {
        iss.add(join_path(path, key), "expected a string");
        return def;
    }
    return f->get<std::string>();
}

inline std::optional<std::vector<std::string>> string_list(const Json& j, const std::string& path, Issues& iss) {
    if (!j.is_array()) {
        iss.add(path, "expected an array of strings");
        return std::nullopt;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) {
            iss.add(index_path(path, i), "expected a string");
            return std::nullopt;
        }
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

inline std::optional<std::vector<double>> number_list(const Json& j, const std::string& path, Issues& iss) {
    if (!j.is_array()) {
        iss.add(path, "expected an array of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            iss.add(index_path(path, i), "expected a number");
            return std::nullopt;
        }
        out.push_back(j[i].get<double>());
    }
    return out;
}

/// Node kinds matched by prior defaults.
inline bool node_matches(const TermSet& ts, std::size_t k, const std::string& kind, bool grouped) {
    if (kind == "all") return true;
    if (kind == "group") return grouped;
    if (grouped) return false;
    const auto& t = ts.terms()[ts.nodes()[k].columns.front().term];
    const auto& f = t.factors();
    if (kind == "main") return f.size() == 1 && f.front().exponent == 1;
    if (kind == "power") return f.size() == 1 && f.front().exponent > 1;
    if (kind == "interaction") return f.size() > 1;
    if (kind == "categorical") return t.has_categorical();
    return false;
}

inline bool is_grouped(const TermSet& ts, std::size_t k) {
    const auto& cols = ts.nodes()[k].columns;
    for (const auto& c : cols)
        if (c.term != cols.front().term) return true;
    return false;
}

inline const std::set<std::string>& default_kinds() {
    static const std::set<std::string> kinds{"all", "main", "power", "interaction", "categorical", "group"};
    return kinds;
}

/// One CPT entry {prob} | {cpt} | {rule, prob, epsilon} for a node with `arity` parents.
inline std::optional<NodePrior> node_prior_of(const Json& e, const std::string& path, std::size_t arity,
                                              const std::string& label, Issues& iss) {
    int modes = (field(e, "prob") && !field(e, "rule")) + (field(e, "cpt") != nullptr) + (field(e, "rule") != nullptr);
    if (modes != 1) {
        iss.add(path, "give exactly one of prob, cpt or rule");
        return std::nullopt;
    }
    if (auto c = field(e, "cpt")) {
        auto v = number_list(*c, join_path(path, "cpt"), iss);
        if (!v) return std::nullopt;
        if (v->size() != (std::size_t{1} << arity)) {
            iss.add(join_path(path, "cpt"), "node '" + label + "' has " + std::to_string(arity) + " parents, so " +
                                                "the table needs " + std::to_string(std::size_t{1} << arity) +
                                                " entries, got " + std::to_string(v->size()));
            return std::nullopt;
        }
        return NodePrior::from_subscripts(*v);
    }
    double p = number_or(e, "prob", path, 0.5, iss);
    if (auto r = field(e, "rule")) {
        if (!r->is_string() || (*r != "strong" && *r != "weak")) {
            iss.add(join_path(path, "rule"), "expected \"strong\" or \"weak\"");
            return std::nullopt;
        }
        double eps = number_or(e, "epsilon", path, 0.01, iss);
        auto rule = *r == "strong" ? NodePrior::Heredity::strong : NodePrior::Heredity::weak;
        return NodePrior::heredity(rule, arity, p, eps);
    }
    return NodePrior::constant(p, arity);
}

inline std::optional<std::size_t> resolve_node(const TermSet& ts, const Json& name, const std::string& path,
                                               Issues& iss) {
    if (!name.is_string()) {
        iss.add(path, "expected a term or node name");
        return std::nullopt;
    }
    auto k = ts.find_node(name.get<std::string>());
    if (!k) iss.add(path, "unknown term or node '" + name.get<std::string>() + "'");
    return k;
}

inline std::optional<std::vector<std::size_t>> resolve_nodes(const TermSet& ts, const Json& names,
                                                             const std::string& path, Issues& iss) {
    if (!names.is_array()) {
        iss.add(path, "expected an array of term names");
        return std::nullopt;
    }
    std::vector<std::size_t> out;
    bool ok = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto k = resolve_node(ts, names[i], index_path(path, i), iss);
        if (k)
            out.push_back(*k);
        else
            ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
}

}  // namespace detail

/// Parse and resolve a config document. `base_dir` anchors relative data paths.
inline RunConfig parse_config(const Json& root, const std::filesystem::path& base_dir = {}) {
    using namespace detail;
    Issues iss;
    RunConfig rc;
    Json echo = Json::object();
    if (!check_object(root, "config", {"data", "terms", "groups", "split", "parents", "prior", "scales",
                                       "sigma_prior", "sampler", "oracle", "output"},
                      iss))
        throw ConfigError("config: expected a JSON object");

    // Sections that do not depend on the data.
    {
        const std::string path = "sampler";
        Json s = root.contains(path) ? root[path] : Json::object();
        if (check_object(s, path, {"iterations", "burn_in", "thin", "seed", "chains", "random_scan",
                                   "record_coefficients"},
                         iss)) {
            auto& c = rc.sampler.chain;
            c.iterations = count_or(s, "iterations", path, c.iterations, iss);
            c.burn_in = count_or(s, "burn_in", path, c.burn_in, iss);
            c.thin = count_or(s, "thin", path, c.thin, iss);
            c.seed = count_or(s, "seed", path, c.seed, iss);
            c.random_scan = bool_or(s, "random_scan", path, c.random_scan, iss);
            c.record_coefficients = bool_or(s, "record_coefficients", path, c.record_coefficients, iss);
            rc.sampler.chains = count_or(s, "chains", path, 1, iss);
            if (c.thin < 1) iss.add("sampler.thin", "must be at least 1");
            if (c.iterations <= c.burn_in) iss.add("sampler.iterations", "must exceed burn_in");
            if (rc.sampler.chains < 1) iss.add("sampler.chains", "must be at least 1");
            echo["sampler"] = {{"iterations", c.iterations},   {"burn_in", c.burn_in},
                               {"thin", c.thin},               {"seed", c.seed},
                               {"chains", rc.sampler.chains},  {"random_scan", c.random_scan},
                               {"record_coefficients", c.record_coefficients}};
        }
    }
    {
        const std::string path = "sigma_prior";
        Json s = root.contains(path) ? root[path] : Json::object();
        if (check_object(s, path, {"nu", "lambda"}, iss)) {
            rc.problem.noise.nu = number_or(s, "nu", path, 0.0, iss);
            rc.problem.noise.lambda = number_or(s, "lambda", path, 1.0, iss);
            if (rc.problem.noise.nu < 0) iss.add("sigma_prior.nu", "must be non-negative");
            if (rc.problem.noise.nu > 0 && !(rc.problem.noise.lambda > 0))
                iss.add("sigma_prior.lambda", "must be positive");
            echo["sigma_prior"] = {{"nu", rc.problem.noise.nu}, {"lambda", rc.problem.noise.lambda}};
        }
    }
    {
        const std::string path = "oracle";
        Json s = root.contains(path) ? root[path] : Json::object();
        if (check_object(s, path, {"enabled", "sigma_mode", "sigma", "grid_points", "p_limit", "sigma_min",
                                   "sigma_max"},
                         iss)) {
            auto& o = rc.oracle;
            o.enabled = bool_or(s, "enabled", path, false, iss);
            auto mode = string_or(s, "sigma_mode", path, "integrate", iss);
            if (mode == "integrate")
                o.config.sigma_mode = OracleConfig::SigmaMode::integrate;
            else if (mode == "fixed")
                o.config.sigma_mode = OracleConfig::SigmaMode::fixed;
            else
                iss.add("oracle.sigma_mode", "expected \"integrate\" or \"fixed\"");
            o.config.sigma = number_or(s, "sigma", path, 1.0, iss);
            o.config.grid_points = count_or(s, "grid_points", path, 128, iss);
            o.config.p_limit = count_or(s, "p_limit", path, 14, iss);
            if (field(s, "sigma_min")) o.config.sigma_min = number_or(s, "sigma_min", path, 0, iss);
            if (field(s, "sigma_max")) o.config.sigma_max = number_or(s, "sigma_max", path, 0, iss);
            if (!(o.config.sigma > 0)) iss.add("oracle.sigma", "must be positive");
            if (o.config.grid_points < 32) iss.add("oracle.grid_points", "must be at least 32");
            Json e = {{"enabled", o.enabled}, {"sigma_mode", mode}, {"sigma", o.config.sigma},
                      {"grid_points", o.config.grid_points}, {"p_limit", o.config.p_limit}};
            if (o.config.sigma_min) e["sigma_min"] = *o.config.sigma_min;
            if (o.config.sigma_max) e["sigma_max"] = *o.config.sigma_max;
            echo["oracle"] = e;
        }
        rc.oracle.config.noise = rc.problem.noise;
    }
    {
        const std::string path = "output";
        Json s = root.contains(path) ? root[path] : Json::object();
        if (check_object(s, path, {"dir", "top_n", "top_k"}, iss)) {
            rc.output.dir = string_or(s, "dir", path, rc.output.dir, iss);
            rc.output.top_n = count_or(s, "top_n", path, rc.output.top_n, iss);
            rc.output.top_k = count_or(s, "top_k", path, rc.output.top_k, iss);
            if (rc.output.top_n < 1) iss.add("output.top_n", "must be at least 1");
            echo["output"] = {{"dir", rc.output.dir}, {"top_n", rc.output.top_n}, {"top_k", rc.output.top_k}};
        }
    }

    // Data.
    bool data_ok = false;
    DesignOptions design_opt;
    std::map<std::string, std::vector<std::string>> declared_levels;
    {
        const std::string path = "data";
        auto d = field(root, "data");
        if (!d) {
            iss.add(path, "missing");
        } else if (check_object(*d, path, {"path", "response", "categorical", "scenario", "standardize"}, iss)) {
            design_opt.standardize = bool_or(*d, "standardize", path, false, iss);
            Json de = Json::object();
            std::set<std::string> categorical;
            Json cat_echo = Json::array();
            if (auto c = field(*d, "categorical")) {
                if (!c->is_array()) {
                    iss.add("data.categorical", "expected an array");
                } else {
                    for (std::size_t i = 0; i < c->size(); ++i) {
                        const auto& e = (*c)[i];
                        const auto p = index_path("data.categorical", i);
                        if (e.is_string()) {
                            categorical.insert(e.get<std::string>());
                        } else if (check_object(e, p, {"name", "levels"}, iss)) {
                            auto name = string_or(e, "name", p, "", iss);
                            if (name.empty()) iss.add(p, "needs a name");
                            categorical.insert(name);
                            if (auto l = field(e, "levels"))
                                if (auto lv = string_list(*l, join_path(p, "levels"), iss)) declared_levels[name] = *lv;
                        }
                    }
                }
            }
            const bool has_path = field(*d, "path"), has_scen = field(*d, "scenario");
            try {
                if (has_path == has_scen) {
                    iss.add(path, "give exactly one of path or scenario");
                } else if (has_path) {
                    auto file = string_or(*d, "path", path, "", iss);
                    auto response = string_or(*d, "response", path, "Y", iss);
                    std::filesystem::path fp(file);
                    if (fp.is_relative() && !base_dir.empty()) fp = base_dir / fp;
                    fp = std::filesystem::absolute(fp).lexically_normal();
                    rc.problem.data = read_csv(fp.string(), response, categorical);
                    de["path"] = fp.string();
                    de["response"] = response;
                    data_ok = true;
                } else {
                    const auto& s = *field(*d, "scenario");
                    const std::string sp = "data.scenario";
                    if (check_object(s, sp, {"name", "seed", "sigma", "true_beta", "n"}, iss)) {
                        ScenarioSpec spec;
                        auto name = string_or(s, "name", sp, "", iss);
                        if (auto nm = scenario_name(name))
                            spec.name = *nm;
                        else
                            iss.add(join_path(sp, "name"), "expected \"table1\" or \"table3\"");
                        spec.seed = count_or(s, "seed", sp, 1, iss);
                        spec.sigma = number_or(s, "sigma", sp, 1.0, iss);
                        spec.n = count_or(s, "n", sp, 50, iss);
                        if (auto b = field(s, "true_beta"))
                            if (auto v = number_list(*b, join_path(sp, "true_beta"), iss)) spec.true_beta = *v;
                        if (spec.true_beta.empty()) spec.true_beta = default_beta(spec.name);
                        if (spec.name == ScenarioSpec::Name::grouping) {
                            categorical.insert("C");
                            if (!declared_levels.count("C")) declared_levels["C"] = grouping_levels();
                        }
                        if (iss.empty()) {
                            rc.problem.data = generate_scenario(spec);
                            data_ok = true;
                        }
                        de["scenario"] = {{"name", scenario_name(spec.name)}, {"seed", spec.seed},
                                          {"sigma", spec.sigma},              {"n", spec.n},
                                          {"true_beta", spec.true_beta}};
                    }
                }
            } catch (const Error& e) {
                iss.add(path, e.what());
                data_ok = false;
            }
            for (const auto& name : categorical)
                cat_echo.push_back(declared_levels.count(name) ? Json{{"name", name}, {"levels", declared_levels[name]}}
                                                               : Json(name));
            de["categorical"] = cat_echo;
            de["standardize"] = design_opt.standardize;
            echo["data"] = de;
        }
    }

    // Terms and nodes.
    bool terms_ok = false;
    if (data_ok) {
        auto& pb = rc.problem;
        std::vector<BaseVariable> vars;
        try {
            vars = variables_of(pb.data, declared_levels);
        } catch (const Error& e) {
            iss.add("data", e.what());
        }
        auto var_named = [&](const std::string& n) -> const BaseVariable* { return find_variable(vars, n); };
        std::vector<Term> terms;
        std::vector<std::string> term_text;
        auto add_term = [&](Term t, const std::string& p) {
            if (std::find(terms.begin(), terms.end(), t) != terms.end()) {
                iss.add(p, "duplicate term '" + t.name() + "'");
                return;
            }
            term_text.push_back(t.name());
            terms.push_back(std::move(t));
        };
        auto expand = [&](const Json& e, const std::string& p) {
            if (!check_object(e, p, {"expand", "variables"}, iss)) return;
            auto kind = string_or(e, "expand", p, "", iss);
            std::vector<BaseVariable> sub;
            if (auto v = field(e, "variables")) {
                if (auto names = string_list(*v, join_path(p, "variables"), iss))
                    for (const auto& n : *names) {
                        if (auto bv = var_named(n))
                            sub.push_back(*bv);
                        else
                            iss.add(join_path(p, "variables"), "unknown variable '" + n + "'");
                    }
            } else {
                sub = vars;
            }
            std::vector<Term> ts;
            if (kind == "second_order")
                ts = second_order_terms(sub);
            else if (kind == "two_way")
                ts = two_way_terms(sub);
            else if (kind == "main")
                for (const auto& v : sub) ts.push_back(Term({{v.name, 1, v.is_categorical()}}));
            else
                iss.add(join_path(p, "expand"), "expected \"main\", \"two_way\" or \"second_order\"");
            for (auto& t : ts) add_term(std::move(t), p);
        };
        auto t = field(root, "terms");
        if (!t) {
            iss.add("terms", "missing");
        } else if (t->is_object()) {
            expand(*t, "terms");
        } else if (t->is_array()) {
            for (std::size_t i = 0; i < t->size(); ++i) {
                const auto& e = (*t)[i];
                const auto p = index_path("terms", i);
                if (e.is_string()) {
                    try {
                        add_term(parse_term(e.get<std::string>(), vars), p);
                    } catch (const Error& err) {
                        iss.add(p, err.what());
                    }
                } else {
                    expand(e, p);
                }
            }
        } else {
            iss.add("terms", "expected an array of terms or an expansion object");
        }
        if (terms.empty() && iss.empty()) iss.add("terms", "no terms given");
        echo["terms"] = term_text;

        auto term_index = [&](const Json& name, const std::string& p) -> std::optional<std::size_t> {
            if (!name.is_string()) {
                iss.add(p, "expected a term");
                return std::nullopt;
            }
            try {
                auto tt = parse_term(name.get<std::string>(), vars);
                auto it = std::find(terms.begin(), terms.end(), tt);
                if (it == terms.end()) {
                    iss.add(p, "term '" + name.get<std::string>() + "' is not in the term list");
                    return std::nullopt;
                }
                return static_cast<std::size_t>(it - terms.begin());
            } catch (const Error& err) {
                iss.add(p, err.what());
                return std::nullopt;
            }
        };

        std::vector<TermGroup> groups;
        Json groups_echo = Json::array();
        if (auto g = field(root, "groups")) {
            if (!g->is_array()) {
                iss.add("groups", "expected an array");
            } else {
                for (std::size_t i = 0; i < g->size(); ++i) {
                    const auto p = index_path("groups", i);
                    if (!check_object((*g)[i], p, {"name", "terms"}, iss)) continue;
                    TermGroup tg;
                    tg.name = string_or((*g)[i], "name", p, "", iss);
                    if (tg.name.empty()) iss.add(p, "needs a name");
                    Json members = Json::array();
                    if (auto m = field((*g)[i], "terms"); m && m->is_array()) {
                        for (std::size_t k = 0; k < m->size(); ++k)
                            if (auto ti = term_index((*m)[k], index_path(join_path(p, "terms"), k))) {
                                tg.terms.push_back(*ti);
                                members.push_back(terms[*ti].name());
                            }
                    } else {
                        iss.add(join_path(p, "terms"), "expected an array of terms");
                    }
                    groups_echo.push_back({{"name", tg.name}, {"terms", members}});
                    groups.push_back(std::move(tg));
                }
            }
        }
        echo["groups"] = groups_echo;

        std::vector<std::size_t> split;
        Json split_echo = Json::array();
        if (auto s = field(root, "split")) {
            if (!s->is_array()) {
                iss.add("split", "expected an array of terms");
            } else {
                for (std::size_t i = 0; i < s->size(); ++i)
                    if (auto ti = term_index((*s)[i], index_path("split", i))) {
                        split.push_back(*ti);
                        split_echo.push_back(terms[*ti].name());
                    }
            }
        }
        echo["split"] = split_echo;

        if (iss.empty()) {
            try {
                pb.terms = TermSet(vars, terms, groups, split);
                terms_ok = true;
            } catch (const Error& err) {
                iss.add("terms", err.what());
            }
        }

        Json parents_echo = Json::array();
        if (terms_ok) {
            if (auto ps = field(root, "parents")) {
                if (!ps->is_array()) {
                    iss.add("parents", "expected an array");
                } else {
                    for (std::size_t i = 0; i < ps->size(); ++i) {
                        const auto p = index_path("parents", i);
                        const auto& e = (*ps)[i];
                        if (!check_object(e, p, {"node", "parents", "family"}, iss)) continue;
                        auto nf = field(e, "node");
                        auto k = nf ? resolve_node(pb.terms, *nf, join_path(p, "node"), iss) : std::nullopt;
                        if (!nf) iss.add(p, "needs a node");
                        if (!k) continue;
                        bool family = bool_or(e, "family", p, false, iss);
                        std::vector<std::size_t> list;
                        if (family) {
                            list = pb.terms.family(*k);
                        } else if (auto pl = field(e, "parents")) {
                            auto r = resolve_nodes(pb.terms, *pl, join_path(p, "parents"), iss);
                            if (!r) continue;
                            list = *r;
                        } else {
                            iss.add(p, "give parents or family");
                            continue;
                        }
                        try {
                            pb.terms.set_parents(*k, list);
                        } catch (const Error& err) {
                            iss.add(p, err.what());
                        }
                        Json pe = Json::array();
                        for (auto q : pb.terms.parents()[*k]) pe.push_back(pb.terms.nodes()[q].label);
                        parents_echo.push_back({{"node", pb.terms.nodes()[*k].label}, {"parents", pe}});
                    }
                }
            }
        }
        echo["parents"] = parents_echo;
    }

    // Design, prior and scales.
    if (terms_ok && iss.empty()) {
        auto& pb = rc.problem;
        try {
            pb.design = build_design(pb.data, pb.terms, design_opt);
        } catch (const Error& err) {
            iss.add("data", err.what());
            terms_ok = false;
        }
    }
    if (terms_ok && iss.empty()) {
        auto& pb = rc.problem;
        const auto& ts = pb.terms;
        const std::size_t p = ts.node_count();
        auto& spec = pb.prior;
        spec.parents = ts.parents();
        for (const auto& n : ts.nodes()) spec.labels.push_back(n.label);
        spec.nodes.clear();
        for (std::size_t k = 0; k < p; ++k) spec.nodes.push_back(NodePrior::constant(0.5, spec.parents[k].size()));

        const std::string path = "prior";
        Json pr = root.contains(path) ? root[path] : Json::object();
        Json prior_echo_json = Json::object();
        if (check_object(pr, path, {"defaults", "nodes", "competing", "weight", "parent_cap"}, iss)) {
            spec.parent_cap = count_or(pr, "parent_cap", path, spec.parent_cap, iss);
            if (auto d = field(pr, "defaults")) {
                if (!d->is_array()) iss.add("prior.defaults", "expected an array");
                for (std::size_t i = 0; d->is_array() && i < d->size(); ++i) {
                    const auto dp = index_path("prior.defaults", i);
                    const auto& e = (*d)[i];
                    if (!check_object(e, dp, {"match", "prob", "cpt", "rule", "epsilon"}, iss)) continue;
                    auto kind = string_or(e, "match", dp, "all", iss);
                    if (!default_kinds().count(kind)) {
                        iss.add(join_path(dp, "match"), "unknown kind '" + kind + "'");
                        continue;
                    }
                    for (std::size_t k = 0; k < p; ++k)
                        if (node_matches(ts, k, kind, is_grouped(ts, k)))
                            if (auto np = node_prior_of(e, dp, spec.parents[k].size(), spec.labels[k], iss))
                                spec.nodes[k] = *np;
                }
            }
            if (auto n = field(pr, "nodes")) {
                if (!n->is_array()) iss.add("prior.nodes", "expected an array");
                for (std::size_t i = 0; n->is_array() && i < n->size(); ++i) {
                    const auto np_path = index_path("prior.nodes", i);
                    const auto& e = (*n)[i];
                    if (!check_object(e, np_path, {"node", "term", "prob", "cpt", "rule", "epsilon"},
                                      iss))
                        continue;
                    auto nf = field(e, "node") ? field(e, "node") : field(e, "term");
                    if (!nf) {
                        iss.add(np_path, "needs a node");
                        continue;
                    }
                    auto k = resolve_node(ts, *nf, np_path, iss);
                    if (!k) continue;
                    if (auto np = node_prior_of(e, np_path, spec.parents[*k].size(), spec.labels[*k], iss))
                        spec.nodes[*k] = *np;
                }
            }
            if (auto c = field(pr, "competing")) {
                const std::string cp = "prior.competing";
                if (check_object(*c, cp, {"blocks"}, iss)) {
                    auto b = field(*c, "blocks");
                    if (!b || !b->is_array()) {
                        iss.add(cp + ".blocks", "expected an array");
                    } else {
                        CompetingBlocks cb;
                        for (std::size_t i = 0; i < b->size(); ++i) {
                            const auto bp = index_path(cp + ".blocks", i);
                            if (!check_object((*b)[i], bp, {"members", "mixing"}, iss)) continue;
                            auto m = field((*b)[i], "members");
                            auto r = m ? resolve_nodes(ts, *m, join_path(bp, "members"), iss) : std::nullopt;
                            if (!m) iss.add(bp, "needs members");
                            cb.members.push_back(r ? *r : std::vector<std::size_t>{});
                            cb.mixing.push_back(number_or((*b)[i], "mixing", bp, 1.0 / b->size(), iss));
                        }
                        spec.competing = cb;
                    }
                }
            }
            if (auto w = field(pr, "weight")) {
                const std::string wp = "prior.weight";
                if (check_object(*w, wp, {"kind", "max_terms", "weights", "nodes", "probs"}, iss)) {
                    auto kind = string_or(*w, "kind", wp, "none", iss);
                    auto weights = [&](const char* key) {
                        auto f = field(*w, key);
                        if (!f) {
                            iss.add(wp, std::string("needs ") + key);
                            return std::vector<double>{};
                        }
                        return number_list(*f, join_path(wp, key), iss).value_or(std::vector<double>{});
                    };
                    if (kind == "none") {
                    } else if (kind == "size_indicator") {
                        spec.weight = GlobalWeight::size_indicator(count_or(*w, "max_terms", wp, p, iss));
                    } else if (kind == "size_weights") {
                        spec.weight = GlobalWeight::size_weights(weights("weights"));
                    } else if (kind == "subset_weights") {
                        auto nf = field(*w, "nodes");
                        auto r = nf ? resolve_nodes(ts, *nf, wp + ".nodes", iss) : std::nullopt;
                        if (!nf) iss.add(wp, "needs nodes");
                        spec.weight = GlobalWeight::subset_weights(r.value_or(std::vector<std::size_t>{}),
                                                                   weights("weights"));
                    } else if (kind == "size_prior") {
                        auto probs = weights("probs");
                        if (!probs.empty() && probs.size() != p + 1)
                            iss.add(wp + ".probs", "needs " + std::to_string(p + 1) + " entries");
                        spec.weight = GlobalWeight::size_prior(probs);
                    } else {
                        iss.add(wp + ".kind", "unknown weight kind '" + kind + "'");
                    }
                }
            }
        }
        for (const auto& d : validate(spec))
            if (d.is_error()) iss.add("prior", d.message);

        prior_echo_json["parent_cap"] = spec.parent_cap;
        Json nodes = Json::array();
        for (std::size_t k = 0; k < p; ++k)
            nodes.push_back({{"node", spec.labels[k]}, {"cpt", spec.nodes[k].subscripts()}});
        prior_echo_json["nodes"] = nodes;
        if (spec.competing) {
            Json blocks = Json::array();
            for (std::size_t i = 0; i < spec.competing->members.size(); ++i) {
                Json m = Json::array();
                for (auto k : spec.competing->members[i])
                    if (k < p) m.push_back(spec.labels[k]);
                blocks.push_back({{"members", m},
                                  {"mixing", i < spec.competing->mixing.size() ? spec.competing->mixing[i] : 0.0}});
            }
            prior_echo_json["competing"] = {{"blocks", blocks}};
        }
        {
            const auto& w = spec.weight;
            using K = GlobalWeight::Kind;
            Json we;
            switch (w.kind) {
            case K::none: we = {{"kind", "none"}}; break;
            case K::size_indicator: we = {{"kind", "size_indicator"}, {"max_terms", w.max_terms}}; break;
            case K::size_weights: we = {{"kind", "size_weights"}, {"weights", w.weights}}; break;
            case K::subset_weights: {
                Json m = Json::array();
                for (auto k : w.subset)
                    if (k < p) m.push_back(spec.labels[k]);
                we = {{"kind", "subset_weights"}, {"nodes", m}, {"weights", w.weights}};
                break;
            }
            }
            prior_echo_json["weight"] = we;
        }
        echo["prior"] = prior_echo_json;

        // Scales.
        const std::string sp = "scales";
        Json sc = root.contains(sp) ? root[sp] : Json::object();
        const std::size_t q = pb.design.cols() - 1;
        if (check_object(sc, sp, {"tau", "tau_terms", "se_multiplier", "se_basis", "c", "intercept_scale"}, iss)) {
            int modes = (field(sc, "tau") != nullptr) + (field(sc, "tau_terms") != nullptr) +
                        (field(sc, "se_multiplier") != nullptr);
            double c = number_or(sc, "c", sp, 10.0, iss);
            Json se = Json::object();
            pb.scales = SpikeSlabScales::uniform(q, 0.2, c);
            pb.scales.intercept_scale = number_or(sc, "intercept_scale", sp, 1e6, iss);
            if (field(sc, "se_basis") && !field(sc, "se_multiplier")) iss.add(sp + ".se_basis", "needs se_multiplier");
            if (modes > 1) {
                iss.add(sp, "give only one of tau, tau_terms or se_multiplier");
            } else if (auto t = field(sc, "tau_terms")) {
                if (!t->is_object()) {
                    iss.add(sp + ".tau_terms", "expected an object mapping terms to tau");
                } else {
                    std::vector<bool> covered(q, false);
                    for (auto it = t->begin(); it != t->end(); ++it) {
                        const auto tp = sp + ".tau_terms." + it.key();
                        if (!it.value().is_number()) {
                            iss.add(tp, "expected a number");
                            continue;
                        }
                        std::vector<std::size_t> nodes;
                        if (auto k = ts.find_node(it.key())) {
                            nodes.push_back(*k);
                        } else {
                            try {
                                if (auto ti = ts.find_term(parse_term(it.key(), ts.variables())))
                                    nodes = ts.nodes_of_term(*ti);
                            } catch (const Error&) {
                            }
                        }
                        if (nodes.empty()) {
                            iss.add(tp, "unknown term or node '" + it.key() + "'");
                            continue;
                        }
                        for (auto k : nodes)
                            for (auto j : pb.design.node_columns[k]) {
                                pb.scales.tau[static_cast<Eigen::Index>(j - 1)] = it.value().get<double>();
                                covered[j - 1] = true;
                            }
                    }
                    for (std::size_t j = 0; j < q; ++j)
                        if (!covered[j]) iss.add(sp + ".tau_terms", "no tau for column '" + pb.design.column_names[j + 1] + "'");
                    se["tau_terms"] = *t;
                }
            } else if (auto k = field(sc, "se_multiplier")) {
                if (!k->is_number() || !(k->get<double>() > 0)) {
                    iss.add(sp + ".se_multiplier", "expected a positive number");
                } else {
                    auto basis = string_or(sc, "se_basis", sp, "residual", iss);
                    if (basis != "residual" && basis != "unscaled")
                        iss.add(sp + ".se_basis", "expected \"residual\" or \"unscaled\"");
                    try {
                        auto sev = coefficient_standard_errors(pb.design.x, pb.data.response, basis == "unscaled");
                        pb.scales.tau = k->get<double>() * sev.tail(static_cast<Eigen::Index>(q));
                    } catch (const Error& err) {
                        iss.add(sp + ".se_multiplier", err.what());
                    }
                    se["se_multiplier"] = *k;
                    se["se_basis"] = basis;
                }
            } else {
                double tau = number_or(sc, "tau", sp, 0.2, iss);
                pb.scales.tau.setConstant(tau);
                se["tau"] = tau;
            }
            se["c"] = c;
            se["intercept_scale"] = pb.scales.intercept_scale;
            echo["scales"] = se;
            try {
                pb.scales.check(q);
            } catch (const Error& err) {
                iss.add(sp, err.what());
            }
        }
    }

    if (!iss.empty()) {
        std::string msg = "invalid config:";
        for (const auto& m : iss.list) msg += "\n  " + m;
        throw ConfigError(msg);
    }

    // Stable echo order.
    Json ordered = Json::object();
    for (const char* key : {"data", "terms", "groups", "split", "parents", "prior", "scales", "sigma_prior", "sampler",
                            "oracle", "output"})
        if (echo.contains(key)) ordered[key] = echo[key];
    rc.echo = std::move(ordered);
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    Json root;
    try {
        root = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(root, std::filesystem::absolute(path).parent_path());
}

}  // namespace ssvs
