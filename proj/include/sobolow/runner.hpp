#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sobolow/distribution.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/estimators.hpp"
#include "sobolow/sample.hpp"
#include "sobolow/spectral.hpp"
#include "sobolow/testfunctions.hpp"

namespace sobolow {

inline Distribution1D distribution_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.contains("params"))
        throw ConfigInvalid("input law needs 'family' and 'params'");
    std::string fam = j.at("family").get<std::string>();
    std::vector<double> p = j.at("params").get<std::vector<double>>();
    auto need = [&](std::size_t k) {
        if (p.size() != k)
            throw ConfigInvalid("law '" + fam + "' takes " + std::to_string(k) + " parameters");
    };
    Distribution1D d = [&]() {
        if (fam == "uniform") {
            need(2);
            return Distribution1D::uniform(p[0], p[1]);
        }
        if (fam == "normal") {
            need(2);
            return Distribution1D::normal(p[0], p[1]);
        }
        if (fam == "triangular") {
            need(3);
            return Distribution1D::triangular(p[0], p[1], p[2]);
        }
        if (fam == "gumbel") {
            need(2);
            return Distribution1D::gumbel(p[0], p[1]);
        }
        if (fam == "laplace") {
            need(2);
            return Distribution1D::laplace(p[0], p[1]);
        }
        if (fam == "cauchy") {
            need(2);
            return Distribution1D::cauchy(p[0], p[1]);
        }
        if (fam == "beta") {
            need(2);
            return Distribution1D::beta(p[0], p[1]);
        }
        if (fam == "gamma") {
            need(2);
            return Distribution1D::gamma(p[0], p[1]);
        }
        throw ConfigInvalid("unknown input law '" + fam + "'");
    }();
    if (j.contains("truncate")) {
        auto t = j.at("truncate").get<std::vector<double>>();
        if (t.size() != 2) throw ConfigInvalid("'truncate' takes [lo, hi]");
        d = d.truncate(t[0], t[1]);
    }
    return d;
}

inline nlohmann::json distribution_to_json(const Distribution1D& d) {
    nlohmann::json j;
    j["family"] = family_name(d.family());
    j["params"] = d.params();
    if (d.truncated()) j["truncate"] = {d.support_lo(), d.support_hi()};
    return j;
}

struct RunConfig {
    std::string model;
    nlohmann::json model_params = nlohmann::json::object();
    std::string data;
    std::vector<Distribution1D> inputs;
    std::vector<std::string> estimators{"pdo"};
    std::vector<int> variables; // 0-based; empty means all
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    int bootstrap = 0;
    double level = 0.9;
    int K = 3;
    int M = 2000;
    int eig_index = 1;
    bool quadrature = false;
    int quadrature_points = 16;
    int monomial_degree = 1;
    int oracle_points = 16;
    std::string out = "out";
    std::string format = "json";
    bool cache = true;

    // Everything that determines the numbers, for the report echo; output
    // destination, format, and caching are deliberately excluded so reruns
    // into different places produce identical reports.
    nlohmann::json echo() const {
        nlohmann::json j;
        j["model"] = model;
        j["model_params"] = model_params;
        j["data"] = data;
        nlohmann::json in = nlohmann::json::array();
        for (const auto& d : inputs) in.push_back(distribution_to_json(d));
        j["inputs"] = in;
        j["estimators"] = estimators;
        nlohmann::json vars = nlohmann::json::array();
        for (int v : variables) vars.push_back(v + 1);
        j["variables"] = vars;
        j["n"] = n;
        j["seed"] = seed;
        j["bootstrap"] = bootstrap;
        j["level"] = level;
        j["K"] = K;
        j["M"] = M;
        j["eig_index"] = eig_index;
        j["quadrature"] = quadrature;
        j["quadrature_points"] = quadrature_points;
        j["monomial_degree"] = monomial_degree;
        j["oracle_points"] = oracle_points;
        return j;
    }
};

inline RunConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigInvalid("configuration must be a JSON object");
    RunConfig c;
    auto get = [&](const char* key, auto& slot) {
        if (!j.contains(key)) return;
        try {
            slot = j.at(key).get<std::decay_t<decltype(slot)>>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigInvalid(std::string("bad value for '") + key + "'");
        }
    };
    get("model", c.model);
    if (j.contains("model_params")) c.model_params = j.at("model_params");
    get("data", c.data);
    get("estimators", c.estimators);
    get("n", c.n);
    get("seed", c.seed);
    get("bootstrap", c.bootstrap);
    get("level", c.level);
    get("K", c.K);
    get("M", c.M);
    get("eig_index", c.eig_index);
    get("quadrature", c.quadrature);
    get("quadrature_points", c.quadrature_points);
    get("monomial_degree", c.monomial_degree);
    get("oracle_points", c.oracle_points);
    get("out", c.out);
    get("format", c.format);
    get("cache", c.cache);
    if (j.contains("inputs")) {
        if (!j.at("inputs").is_array()) throw ConfigInvalid("'inputs' must be an array of laws");
        for (const auto& in : j.at("inputs")) c.inputs.push_back(distribution_from_json(in));
    }
    if (j.contains("variables")) {
        std::vector<int> vars;
        get("variables", vars);
        for (int v : vars) {
            if (v < 1) throw ConfigInvalid("'variables' entries are 1-based");
            c.variables.push_back(v - 1);
        }
    }
    if (c.model.empty() && c.data.empty())
        throw ConfigInvalid("configuration needs 'model' or 'data'");
    if (c.format != "json" && c.format != "csv") throw ConfigInvalid("'format' must be json or csv");
    if (!(c.level > 0.0 && c.level < 1.0)) throw ConfigInvalid("'level' must be inside (0,1)");
    if (c.K < 1 || c.M < 10) throw ConfigInvalid("'K' must be >= 1 and 'M' >= 10");
    if (c.eig_index < 1) throw ConfigInvalid("'eig_index' must be >= 1");
    if (c.quadrature_points < 2 || c.oracle_points < 2)
        throw ConfigInvalid("quadrature orders must be >= 2");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot open configuration file " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("configuration is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

// Model registry for the command line. Parameters: linear_interaction takes
// {"a": number}, g_sobol {"a": [numbers]}, monomial {"m": integer}.
inline TestProblem resolve_problem(const std::string& name, const nlohmann::json& params) {
    if (name == "linear_interaction")
        return linear_interaction(params.value("a", 1.0));
    if (name == "g_sobol") {
        std::vector<double> a{0.0, 1.0, 4.5, 9.0};
        if (params.contains("a")) a = params.at("a").get<std::vector<double>>();
        return g_sobol(a);
    }
    if (name == "monomial") return monomial_example(params.value("m", 1));
    if (name == "normal_product") return normal_product();
    if (name == "flood") return flood_model();
    if (name == "flood_s") return flood_water_level();
    throw ModelUnknown("no model named '" + name + "'");
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string cache_key(const Distribution1D& d, int K, int M) {
    std::string tag = d.describe() + "|K=" + std::to_string(K) + "|M=" + std::to_string(M) + "|w=one";
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(tag)));
    return buf;
}

inline void print_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace detail

// One spectral basis per input, closed form when the law admits one, finite
// element otherwise, with the solved spectra cached on disk keyed by the law,
// the truncation, and the mesh.
inline std::vector<SpectralBasis> resolve_bases(const std::vector<Distribution1D>& dists, int K,
                                                int M, const std::string& cache_dir,
                                                bool use_cache) {
    std::vector<SpectralBasis> bases;
    for (const auto& d : dists) {
        try {
            bases.push_back(closed_form_spectrum(d, K));
            continue;
        } catch (const NoClosedForm&) {
        }
        std::filesystem::path file;
        if (use_cache && !cache_dir.empty()) {
            std::filesystem::create_directories(cache_dir);
            file = std::filesystem::path(cache_dir) / ("spectrum_" + detail::cache_key(d, K, M) + ".json");
            if (std::filesystem::exists(file)) {
                std::ifstream in(file);
                nlohmann::json j;
                in >> j;
                bases.push_back(SpectralBasis::from_json(j));
                continue;
            }
        }
        bases.push_back(solve_spectrum(d, K, M));
        if (use_cache && !cache_dir.empty()) {
            std::ofstream outf(file);
            outf << bases.back().to_json().dump(2) << "\n";
        }
    }
    return bases;
}

struct RunReport {
    std::string command;
    nlohmann::json config;
    std::vector<BoundEstimate> results;
    std::vector<nlohmann::json> errors;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = 1;
        j["command"] = command;
        j["config"] = config;
        nlohmann::json rs = nlohmann::json::array();
        for (const auto& r : results) rs.push_back(r.to_json());
        j["results"] = rs;
        j["errors"] = errors;
        return j;
    }

    // variable,estimator,value,ci_lo,ci_hi,n,seed with round-trip doubles;
    // interval fields stay empty when no interval was computed.
    std::string to_csv() const {
        std::string out = "variable,estimator,value,ci_lo,ci_hi,n,seed\n";
        for (const auto& r : results) {
            out += std::to_string(r.variable);
            out += ",";
            out += r.kind;
            out += ",";
            detail::print_double(out, r.value);
            out += ",";
            if (r.ci) detail::print_double(out, r.ci->lo);
            out += ",";
            if (r.ci) detail::print_double(out, r.ci->hi);
            out += ",";
            out += std::to_string(r.n_used);
            out += ",";
            out += std::to_string(r.seed);
            out += "\n";
        }
        return out;
    }
};

namespace detail {

inline void write_report(const RunReport& rep, const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out);
    {
        std::ofstream f(std::filesystem::path(cfg.out) / "report.json");
        f << rep.to_json().dump(2) << "\n";
    }
    if (cfg.format == "csv") {
        std::ofstream f(std::filesystem::path(cfg.out) / "report.csv");
        f << rep.to_csv();
    }
}

inline void record_error(RunReport& rep, const std::string& estimator, int variable,
                         const std::exception& e) {
    nlohmann::json err;
    err["estimator"] = estimator;
    err["variable"] = variable + 1;
    err["message"] = e.what();
    rep.errors.push_back(err);
}

inline std::vector<int> resolve_variables(const RunConfig& cfg, int d) {
    std::vector<int> vars = cfg.variables;
    if (vars.empty())
        for (int i = 0; i < d; ++i) vars.push_back(i);
    for (int v : vars)
        if (v < 0 || v >= d) throw ConfigInvalid("variable index outside the model dimension");
    return vars;
}

inline void print_results(const RunReport& rep) {
    for (const auto& r : rep.results) {
        std::printf("x%-3d %-12s %.12g", r.variable, r.kind.c_str(), r.value);
        if (r.ci) std::printf("  [%.12g, %.12g] @%g", r.ci->lo, r.ci->hi, r.ci->level);
        std::printf("\n");
    }
    for (const auto& e : rep.errors)
        std::printf("x%-3d %-12s skipped: %s\n", e.at("variable").get<int>(),
                    e.at("estimator").get<std::string>().c_str(),
                    e.at("message").get<std::string>().c_str());
}

} // namespace detail

inline int run_spectrum(RunConfig cfg) {
    std::vector<Distribution1D> dists = cfg.inputs;
    if (dists.empty()) {
        if (cfg.model.empty()) throw ConfigInvalid("spectrum needs 'inputs' or 'model'");
        dists = resolve_problem(cfg.model, cfg.model_params).inputs;
    }
    std::string cache_dir = (std::filesystem::path(cfg.out) / "cache").string();
    auto bases = resolve_bases(dists, cfg.K, cfg.M, cache_dir, cfg.cache);
    std::filesystem::create_directories(cfg.out);
    for (std::size_t i = 0; i < bases.size(); ++i) {
        auto path = std::filesystem::path(cfg.out) / ("spectrum_x" + std::to_string(i + 1) + ".json");
        std::ofstream f(path);
        f << bases[i].to_json().dump(2) << "\n";
        std::printf("x%zu  %-12s lambda_1=%.12g  C_P=%.12g\n", i + 1,
                    family_name(bases[i].input().family()), bases[i].eigenvalue(1),
                    bases[i].poincare_constant());
    }
    return 0;
}

inline int run_bounds(RunConfig cfg, const char* command = "bounds") {
    std::optional<TestProblem> problem;
    std::vector<Distribution1D> dists = cfg.inputs;
    EvaluationSample sample;
    if (!cfg.data.empty()) {
        sample = read_sample_csv(cfg.data);
        if (dists.empty()) throw ConfigInvalid("'data' runs need explicit 'inputs'");
        if (static_cast<int>(dists.size()) != sample.dim())
            throw ConfigInvalid("'inputs' count differs from the data dimension");
    } else {
        problem = resolve_problem(cfg.model, cfg.model_params);
        if (dists.empty()) dists = problem->inputs;
        if (static_cast<int>(dists.size()) != problem->model.dim())
            throw ConfigInvalid("'inputs' count differs from the model dimension");
        bool want_grad = problem->model.has_gradient();
        sample = cfg.quadrature
                     ? quadrature_design(problem->model, dists, cfg.quadrature_points, want_grad)
                     : monte_carlo_design(problem->model, dists, cfg.n, cfg.seed, want_grad);
    }

    bool need_bases = false;
    for (const auto& e : cfg.estimators)
        if (e == "pdo" || e == "pdo_der" || e == "dgsm_upper") need_bases = true;
    std::vector<SpectralBasis> bases;
    if (need_bases) {
        std::string cache_dir = (std::filesystem::path(cfg.out) / "cache").string();
        bases = resolve_bases(dists, std::max(cfg.K, cfg.eig_index), cfg.M, cache_dir, cfg.cache);
    }

    RunReport rep;
    rep.command = command;
    rep.config = cfg.echo();
    auto vars = detail::resolve_variables(cfg, sample.dim());
    for (int v : vars) {
        int ei = 0;
        for (const auto& est : cfg.estimators) {
            std::uint64_t ci_seed =
                derive_seed(cfg.seed, 0xb0000u + static_cast<std::uint64_t>(v) * 64u
                                          + static_cast<std::uint64_t>(ei++));
            try {
                if (est == "pdo") {
                    rep.results.push_back(pdo_lower_bound(sample, bases, v, cfg.eig_index,
                                                          cfg.bootstrap, cfg.level, ci_seed));
                } else if (est == "pdo_der") {
                    rep.results.push_back(pdo_der_lower_bound(sample, bases, v, cfg.eig_index,
                                                              cfg.bootstrap, cfg.level, ci_seed));
                } else if (est == "fisher") {
                    rep.results.push_back(
                        fisher_lower_bound(sample, dists, v, cfg.bootstrap, cfg.level, ci_seed));
                } else if (est == "monomial") {
                    if (!problem) throw MissingFaceValues("monomial bound needs a model, not data");
                    rep.results.push_back(monomial_lower_bound(sample, problem->model, dists, v,
                                                               cfg.monomial_degree));
                } else if (est == "dgsm_upper") {
                    rep.results.push_back(dgsm_upper_bound(sample, bases, v));
                } else if (est == "pick_freeze") {
                    if (!problem) throw MissingFaceValues("pick-freeze needs a model, not data");
                    rep.results.push_back(pick_freeze_total(problem->model, dists, v, cfg.n,
                                                            derive_seed(cfg.seed, 0x9f0u + static_cast<std::uint64_t>(v)),
                                                            cfg.bootstrap, cfg.level));
                } else {
                    throw ConfigInvalid("unknown estimator '" + est + "'");
                }
            } catch (const std::exception& e) {
                detail::record_error(rep, est, v, e);
            }
        }
    }
    detail::write_report(rep, cfg);
    detail::print_results(rep);
    return 0;
}

inline int run_oracle(RunConfig cfg) {
    if (cfg.model.empty()) throw ConfigInvalid("oracle needs 'model'");
    auto problem = resolve_problem(cfg.model, cfg.model_params);
    std::vector<Distribution1D> dists = cfg.inputs.empty() ? problem.inputs : cfg.inputs;
    if (static_cast<int>(dists.size()) != problem.model.dim())
        throw ConfigInvalid("'inputs' count differs from the model dimension");
    RunReport rep;
    rep.command = "oracle";
    rep.config = cfg.echo();
    auto vars = detail::resolve_variables(cfg, problem.model.dim());
    for (int v : vars) {
        try {
            rep.results.push_back(anova_oracle(problem.model, dists, {v}, cfg.oracle_points, false));
            rep.results.push_back(anova_oracle(problem.model, dists, {v}, cfg.oracle_points, true));
        } catch (const std::exception& e) {
            detail::record_error(rep, "oracle", v, e);
        }
    }
    try {
        BoundEstimate var;
        var.kind = "oracle";
        var.target = "variance";
        var.variable = 0;
        var.value = oracle_variance(problem.model, dists, cfg.oracle_points);
        var.n_used = 0;
        rep.results.push_back(var);
    } catch (const std::exception& e) {
        detail::record_error(rep, "oracle", -1, e);
    }
    detail::write_report(rep, cfg);
    detail::print_results(rep);
    return 0;
}

inline int run_benchmark(RunConfig cfg) {
    bool has_pf = false;
    for (const auto& e : cfg.estimators) has_pf = has_pf || e == "pick_freeze";
    if (!has_pf) cfg.estimators.push_back("pick_freeze");
    return run_bounds(std::move(cfg), "benchmark");
}

inline int run_command(const std::string& command, RunConfig cfg) {
    if (command == "spectrum") return run_spectrum(std::move(cfg));
    if (command == "bounds") return run_bounds(std::move(cfg));
    if (command == "oracle") return run_oracle(std::move(cfg));
    if (command == "benchmark") return run_benchmark(std::move(cfg));
    throw ConfigInvalid("unknown command '" + command + "'");
}

} // namespace sobolow
