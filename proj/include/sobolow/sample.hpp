#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sobolow/core.hpp"
#include "sobolow/distribution.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/model.hpp"
#include "sobolow/quadrature.hpp"

namespace sobolow {

// A design with model outputs: rows of input points, one output per row,
// optional gradient rows, and optional row weights. Empty weights mean an
// equal-weight Monte Carlo sample; weighted samples come from tensorized
// quadrature designs whose per-dimension weights are normalized to sum to
// one, so row weights sum to one as well.
struct EvaluationSample {
    Matrix design;                    // n x d
    std::vector<double> outputs;      // n
    std::optional<Matrix> gradients;  // n x d when present
    std::vector<double> weights;      // empty or n
    bool centered = false;
    std::uint64_t seed = 0;

    std::size_t size() const { return outputs.size(); }
    int dim() const { return static_cast<int>(design.cols()); }
    bool weighted() const { return !weights.empty(); }
    bool has_gradients() const { return gradients.has_value(); }

    void validate() const {
        if (design.rows() != outputs.size()) throw std::invalid_argument("sample: design/output size mismatch");
        if (gradients && (gradients->rows() != outputs.size() || gradients->cols() != design.cols()))
            throw std::invalid_argument("sample: gradient shape mismatch");
        if (!weights.empty() && weights.size() != outputs.size())
            throw std::invalid_argument("sample: weight count mismatch");
    }
};

inline double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (weights.empty()) return mean(values);
    if (weights.size() != values.size()) throw std::invalid_argument("weighted_mean: size mismatch");
    std::vector<double> prod(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) prod[i] = values[i] * weights[i];
    return pairwise_sum(prod) / pairwise_sum(weights);
}

// Subtract the (weighted) output mean. Gradients are untouched; a sample
// already flagged centered is returned unchanged.
inline EvaluationSample center(const EvaluationSample& s) {
    if (s.centered) return s;
    EvaluationSample out = s;
    double m = weighted_mean(s.outputs, s.weights);
    for (auto& y : out.outputs) y -= m;
    out.centered = true;
    return out;
}

// Monte Carlo design: one derived seed stream per input dimension, outputs
// (and gradients when requested) evaluated row by row.
inline EvaluationSample monte_carlo_design(const ModelFunction& f,
                                           const std::vector<Distribution1D>& dists, std::size_t n,
                                           std::uint64_t seed, bool with_gradients = false) {
    const int d = f.dim();
    if (static_cast<int>(dists.size()) != d)
        throw std::invalid_argument("monte_carlo_design: dimension mismatch");
    EvaluationSample s;
    s.seed = seed;
    s.design = Matrix(n, d);
    for (int j = 0; j < d; ++j) {
        auto col = dists[static_cast<std::size_t>(j)].sample(n, derive_seed(seed, static_cast<std::uint64_t>(j)));
        for (std::size_t r = 0; r < n; ++r) s.design(r, j) = col[r];
    }
    s.outputs.resize(n);
    if (with_gradients) s.gradients = Matrix(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = s.design.row(r);
        s.outputs[r] = f(row);
        if (with_gradients) {
            auto g = f.gradient(row);
            for (int j = 0; j < d; ++j) (*s.gradients)(r, j) = g[static_cast<std::size_t>(j)];
        }
    }
    return s;
}

namespace detail {

// Per-dimension quadrature rule under the input law: Gauss-Hermite for the
// untruncated normal, otherwise Gauss-Legendre against the density on each
// smooth segment (splitting at density and model kinks; unbounded supports
// clipped at the 1e-13 quantiles). Weights normalized to sum to one.
inline QuadRule dimension_rule(const Distribution1D& d, int points, std::vector<double> splits) {
    QuadRule rule;
    if (d.family() == Family::Normal && !d.truncated()) {
        rule = gauss_hermite(points);
        double m = d.params()[0], s = d.params()[1];
        for (auto& x : rule.nodes) x = m + s * x;
    } else {
        double lo = d.support_lo(), hi = d.support_hi();
        if (!std::isfinite(lo)) lo = d.quantile(1e-13);
        if (!std::isfinite(hi)) hi = d.quantile(1.0 - 1e-13);
        for (double k : d.kink_points()) splits.push_back(k);
        std::sort(splits.begin(), splits.end());
        std::vector<double> cuts{lo};
        for (double c : splits)
            if (c > cuts.back() && c < hi) cuts.push_back(c);
        cuts.push_back(hi);
        for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
            QuadRule r = gauss_legendre(points, cuts[seg], cuts[seg + 1]);
            for (std::size_t k = 0; k < r.size(); ++k) {
                rule.nodes.push_back(r.nodes[k]);
                rule.weights.push_back(r.weights[k] * d.pdf(r.nodes[k]));
            }
        }
    }
    double total = pairwise_sum(rule.weights);
    if (!(total > 0.0)) throw SingularMass("quadrature rule carries no mass");
    for (auto& w : rule.weights) w /= total;
    return rule;
}

} // namespace detail

// Deterministic tensor-product quadrature design. points_per_dim is the
// Gauss order per smooth segment; row weights are the products of the
// per-dimension weights.
inline EvaluationSample quadrature_design(const ModelFunction& f,
                                          const std::vector<Distribution1D>& dists,
                                          int points_per_dim, bool with_gradients = false) {
    const int d = f.dim();
    if (static_cast<int>(dists.size()) != d)
        throw std::invalid_argument("quadrature_design: dimension mismatch");
    if (points_per_dim < 2) throw std::invalid_argument("quadrature_design: need >= 2 points");

    std::vector<QuadRule> rules;
    std::size_t n = 1;
    for (int j = 0; j < d; ++j) {
        std::vector<double> splits = j < static_cast<int>(f.kinks().size())
                                         ? f.kinks()[static_cast<std::size_t>(j)]
                                         : std::vector<double>{};
        rules.push_back(detail::dimension_rule(dists[static_cast<std::size_t>(j)], points_per_dim,
                                               std::move(splits)));
        n *= rules.back().size();
    }

    EvaluationSample s;
    s.design = Matrix(n, d);
    s.outputs.resize(n);
    s.weights.resize(n);
    if (with_gradients) s.gradients = Matrix(n, d);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t r = 0; r < n; ++r) {
        double w = 1.0;
        for (int j = 0; j < d; ++j) {
            s.design(r, j) = rules[static_cast<std::size_t>(j)].nodes[idx[static_cast<std::size_t>(j)]];
            w *= rules[static_cast<std::size_t>(j)].weights[idx[static_cast<std::size_t>(j)]];
        }
        s.weights[r] = w;
        auto row = s.design.row(r);
        s.outputs[r] = f(row);
        if (with_gradients) {
            auto g = f.gradient(row);
            for (int j = 0; j < d; ++j) (*s.gradients)(r, j) = g[static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < rules[static_cast<std::size_t>(j)].size()) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }
    return s;
}

// CSV layout: header x1..xd,y[,dy1..dyd], doubles printed round-trip exact.
inline void write_sample_csv(const std::string& path, const EvaluationSample& s) {
    s.validate();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const int d = s.dim();
    for (int j = 1; j <= d; ++j) f << "x" << j << ",";
    f << "y";
    if (s.has_gradients())
        for (int j = 1; j <= d; ++j) f << ",dy" << j;
    f << "\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        f << buf;
    };
    for (std::size_t r = 0; r < s.size(); ++r) {
        for (int j = 0; j < d; ++j) {
            put(s.design(r, j));
            f << ",";
        }
        put(s.outputs[r]);
        if (s.has_gradients())
            for (int j = 0; j < d; ++j) {
                f << ",";
                put((*s.gradients)(r, j));
            }
        f << "\n";
    }
}

inline EvaluationSample read_sample_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty sample file " + path);
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) head.push_back(tok);
    }
    int d = 0;
    while (d < static_cast<int>(head.size()) && head[static_cast<std::size_t>(d)] == "x" + std::to_string(d + 1)) ++d;
    bool grads = head.size() == static_cast<std::size_t>(2 * d + 1);
    if (d == 0 || head[static_cast<std::size_t>(d)] != "y"
        || (head.size() != static_cast<std::size_t>(d + 1) && !grads))
        throw std::runtime_error("malformed sample header in " + path);

    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() != head.size()) throw std::runtime_error("ragged sample row in " + path);
        rows.push_back(std::move(row));
    }
    EvaluationSample s;
    s.design = Matrix(rows.size(), d);
    s.outputs.resize(rows.size());
    if (grads) s.gradients = Matrix(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int j = 0; j < d; ++j) s.design(r, j) = rows[r][static_cast<std::size_t>(j)];
        s.outputs[r] = rows[r][static_cast<std::size_t>(d)];
        if (grads)
            for (int j = 0; j < d; ++j) (*s.gradients)(r, j) = rows[r][static_cast<std::size_t>(d + 1 + j)];
    }
    return s;
}

} // namespace sobolow
