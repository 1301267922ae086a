#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sobolow/core.hpp"
#include "sobolow/distribution.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/model.hpp"
#include "sobolow/multiindex.hpp"
#include "sobolow/sample.hpp"
#include "sobolow/spectral.hpp"

namespace sobolow {

struct ConfidenceInterval {
    double lo = 0;
    double hi = 0;
    double level = 0;
};

// One estimate: a bound (or reference value) for one variable of one model.
// `terms` carries the per-multi-index contributions that sum to `value` for
// the expansion-based estimators. `variable` is 1-based in reports, matching
// the x1..xd column naming; 0 marks a non-singleton target.
struct BoundEstimate {
    std::string kind;
    std::string target;
    int variable = 0;
    double value = 0;
    std::map<MultiIndex, double> terms;
    std::optional<ConfidenceInterval> ci;
    std::optional<double> normalized;
    std::size_t n_used = 0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = kind;
        j["target"] = target;
        j["variable"] = variable;
        j["value"] = value;
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [mi, v] : terms) t[mi.to_string()] = v;
        j["terms"] = t;
        if (ci) j["ci"] = {{"lo", ci->lo}, {"hi", ci->hi}, {"level", ci->level}};
        if (normalized) j["normalized"] = *normalized;
        j["n_used"] = n_used;
        j["seed"] = seed;
        return j;
    }
};

namespace detail {

// Per-dimension basis rows evaluated on a sample. In weighted (quadrature)
// mode each row of order >= 1 is centered and normalized against the
// discrete per-dimension weights, and derivative rows are rescaled by the
// same factor; products of such rows across distinct dimensions are then
// exactly orthonormal under the tensorized weights, which is what makes the
// truncated-expansion bound dominated by the discrete variance. Monte Carlo
// rows are left as the continuum-orthonormal functions.
class BasisRowCache {
public:
    BasisRowCache(const EvaluationSample& s, const std::vector<SpectralBasis>& bases)
        : s_(s), bases_(bases) {}

    const std::vector<double>& values(int dim, int order) { return fill(dim, order).first; }
    const std::vector<double>& derivs(int dim, int order) { return fill(dim, order).second; }

private:
    const EvaluationSample& s_;
    const std::vector<SpectralBasis>& bases_;
    std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>> rows_;

    const std::pair<std::vector<double>, std::vector<double>>& fill(int dim, int order) {
        auto key = std::make_pair(dim, order);
        auto it = rows_.find(key);
        if (it != rows_.end()) return it->second;
        const std::size_t n = s_.size();
        std::vector<double> v(n), dv(n);
        const auto& b = bases_[static_cast<std::size_t>(dim)];
        for (std::size_t r = 0; r < n; ++r) {
            double x = s_.design(r, dim);
            v[r] = b.value(order, x);
            dv[r] = b.derivative(order, x);
        }
        if (s_.weighted() && order >= 1) {
            double m = weighted_mean(v, s_.weights);
            std::vector<double> sq(n);
            for (std::size_t r = 0; r < n; ++r) sq[r] = s_.weights[r] * (v[r] - m) * (v[r] - m);
            double sd = std::sqrt(pairwise_sum(sq) / pairwise_sum(s_.weights));
            if (!(sd > 1e-150))
                throw DegenerateSpectrum("basis row has no variance on the quadrature grid");
            for (std::size_t r = 0; r < n; ++r) {
                v[r] = (v[r] - m) / sd;
                dv[r] /= sd;
            }
        }
        return rows_.emplace(key, std::make_pair(std::move(v), std::move(dv))).first->second;
    }
};

// Discrete inner product of the (centered) outputs, or of a gradient column
// when deriv_dim >= 0, with a product of basis rows. The derivative row is
// substituted in its own dimension.
inline double product_coefficient(BasisRowCache& cache, const EvaluationSample& s,
                                  const MultiIndex& mi, int deriv_dim = -1) {
    const std::size_t n = s.size();
    std::vector<double> acc(n);
    for (std::size_t r = 0; r < n; ++r) {
        double base = deriv_dim >= 0 ? (*s.gradients)(r, deriv_dim) : s.outputs[r];
        acc[r] = base * (s.weighted() ? s.weights[r] : 1.0 / static_cast<double>(n));
    }
    for (int j = 0; j < mi.dim(); ++j) {
        int k = mi.order(j);
        if (k == 0) continue;
        const auto& row = j == deriv_dim ? cache.derivs(j, k) : cache.values(j, k);
        for (std::size_t r = 0; r < n; ++r) acc[r] *= row[r];
    }
    return pairwise_sum(acc);
}

inline void check_variable(const EvaluationSample& s, int var) {
    if (var < 0 || var >= s.dim()) throw InactiveIndex("variable index out of range");
}

inline std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng() % n);
    return idx;
}

inline ConfidenceInterval percentile_interval(std::vector<double> reps, double level) {
    std::sort(reps.begin(), reps.end());
    auto quantile = [&](double q) {
        double pos = q * static_cast<double>(reps.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, reps.size() - 1);
        double t = pos - static_cast<double>(lo);
        return (1 - t) * reps[lo] + t * reps[hi];
    };
    double alpha = (1.0 - level) / 2.0;
    return ConfidenceInterval{quantile(alpha), quantile(1.0 - alpha), level};
}

} // namespace detail

inline EvaluationSample resample_rows(const EvaluationSample& s, std::span<const std::size_t> idx) {
    EvaluationSample out;
    out.seed = s.seed;
    out.design = Matrix(idx.size(), s.design.cols());
    out.outputs.resize(idx.size());
    if (s.has_gradients()) out.gradients = Matrix(idx.size(), s.design.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (int j = 0; j < s.dim(); ++j) {
            out.design(r, j) = s.design(idx[r], j);
            if (s.has_gradients()) (*out.gradients)(r, j) = (*s.gradients)(idx[r], j);
        }
        out.outputs[r] = s.outputs[idx[r]];
    }
    return out; // centered flag intentionally reset: the resampled mean moved
}

// Percentile bootstrap over row resampling. Only meaningful for Monte Carlo
// samples; weighted designs are deterministic and carry no sampling error.
template <typename Stat>
ConfidenceInterval bootstrap_ci(const EvaluationSample& s, Stat stat, int B, double level,
                                std::uint64_t seed) {
    if (s.weighted()) throw std::invalid_argument("bootstrap_ci: weighted samples not resampled");
    if (B < 100) throw std::invalid_argument("bootstrap_ci: need at least 100 replicates");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: bad level");
    std::vector<double> reps(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        auto idx = detail::resample_indices(s.size(), derive_seed(seed, static_cast<std::uint64_t>(b) + 1));
        reps[static_cast<std::size_t>(b)] = stat(resample_rows(s, idx));
    }
    return detail::percentile_interval(std::move(reps), level);
}

// Squared-coefficient sum over an explicit multi-index family: the truncated
// expansion of the centered output against products of basis functions.
inline std::map<MultiIndex, double> gc_coefficients(const EvaluationSample& sample,
                                                    const std::vector<SpectralBasis>& bases,
                                                    const std::vector<MultiIndex>& indices) {
    if (bases.size() != static_cast<std::size_t>(sample.dim()))
        throw std::invalid_argument("gc_coefficients: one basis per dimension required");
    auto cs = center(sample);
    detail::BasisRowCache cache(cs, bases);
    std::map<MultiIndex, double> out;
    for (const auto& mi : indices) {
        if (mi.dim() != sample.dim()) throw MixedPattern("multi-index dimension mismatch");
        out[mi] = detail::product_coefficient(cache, cs, mi);
    }
    return out;
}

inline BoundEstimate gc_lower_bound(const EvaluationSample& sample,
                                    const std::vector<SpectralBasis>& bases,
                                    const std::vector<MultiIndex>& indices, int var,
                                    std::string target = "total") {
    detail::check_variable(sample, var);
    BoundEstimate e;
    e.kind = "gc";
    e.target = std::move(target);
    e.variable = var + 1;
    e.n_used = sample.size();
    e.seed = sample.seed;
    for (const auto& [mi, c] : gc_coefficients(sample, bases, indices)) {
        e.terms[mi] = c * c;
        e.value += c * c;
    }
    return e;
}

namespace detail {

inline std::pair<double, std::map<MultiIndex, double>> bessel_value(
    const EvaluationSample& raw, const std::vector<SpectralBasis>& bases,
    const std::vector<MultiIndex>& indices, int var, bool derivative_form) {
    auto cs = center(raw);
    BasisRowCache cache(cs, bases);
    std::map<MultiIndex, double> terms;
    double total = 0;
    for (const auto& mi : indices) {
        double c;
        if (derivative_form) {
            double lambda = bases[static_cast<std::size_t>(var)].eigenvalue(mi.order(var));
            c = product_coefficient(cache, cs, mi, var) / lambda;
        } else {
            c = product_coefficient(cache, cs, mi);
        }
        terms[mi] = c * c;
        total += c * c;
    }
    return {total, std::move(terms)};
}

inline BoundEstimate expansion_bound(const EvaluationSample& sample,
                                     const std::vector<SpectralBasis>& bases, int var,
                                     int eig_index, bool derivative_form, int B, double level,
                                     std::uint64_t seed, const char* kind) {
    check_variable(sample, var);
    if (bases.size() != static_cast<std::size_t>(sample.dim()))
        throw std::invalid_argument("expansion bound: one basis per dimension required");
    if (derivative_form && !sample.has_gradients())
        throw MissingGradients("derivative-form bound needs gradient columns");
    auto indices = total_index_set(sample.dim(), var, eig_index);
    BoundEstimate e;
    e.kind = kind;
    e.target = "total";
    e.variable = var + 1;
    e.n_used = sample.size();
    e.seed = sample.seed;
    auto [value, terms] = bessel_value(sample, bases, indices, var, derivative_form);
    e.value = value;
    e.terms = std::move(terms);
    if (B > 0 && !sample.weighted()) {
        e.ci = bootstrap_ci(
            sample,
            [&](const EvaluationSample& rs) {
                return bessel_value(rs, bases, indices, var, derivative_form).first;
            },
            B, level, seed);
    }
    return e;
}

} // namespace detail

// Lower bound on the total contribution of one variable from the squared
// expansion coefficients of the output itself: the coefficient on the first
// (or chosen) eigenfunction in that dimension plus one interaction term per
// companion dimension at the same eigenvalue index.
inline BoundEstimate pdo_lower_bound(const EvaluationSample& sample,
                                     const std::vector<SpectralBasis>& bases, int var,
                                     int eig_index = 1, int B = 0, double level = 0.9,
                                     std::uint64_t seed = 0) {
    return detail::expansion_bound(sample, bases, var, eig_index, false, B, level, seed, "pdo");
}

// Same family of coefficients obtained from the partial derivative through
// the eigenvalue identity: needs gradient columns, rewards smooth models
// with a faster-converging estimate.
inline BoundEstimate pdo_der_lower_bound(const EvaluationSample& sample,
                                         const std::vector<SpectralBasis>& bases, int var,
                                         int eig_index = 1, int B = 0, double level = 0.9,
                                         std::uint64_t seed = 0) {
    return detail::expansion_bound(sample, bases, var, eig_index, true, B, level, seed, "pdo_der");
}

namespace detail {

struct ScoreRows {
    // One score row per dimension, normalized to unit discrete variance in
    // weighted mode or unit continuum information in Monte Carlo mode.
    std::vector<std::vector<double>> z;
};

// The derivative route replaces the inner product of the output with its own
// score by minus the mean of the partial derivative; it is only valid when
// the density of the active variable vanishes at its support boundary, and
// it is what makes an inactive variable score an exact zero.
inline std::pair<double, std::map<MultiIndex, double>> fisher_value(
    const EvaluationSample& raw, const std::vector<Distribution1D>& dists, int var,
    bool derivative_route) {
    auto cs = center(raw);
    const std::size_t n = cs.size();
    const int d = cs.dim();
    std::vector<std::vector<double>> z(static_cast<std::size_t>(d));
    std::vector<double> scale(static_cast<std::size_t>(d), 1.0);
    for (int j = 0; j < d; ++j) {
        const auto& dist = dists[static_cast<std::size_t>(j)];
        if (!dist.score_supported())
            throw UnsupportedForBounds("score of input " + std::to_string(j + 1)
                                       + " is undefined or uninformative");
        auto& row = z[static_cast<std::size_t>(j)];
        row.resize(n);
        for (std::size_t r = 0; r < n; ++r) row[r] = dist.score(cs.design(r, j));
        if (cs.weighted()) {
            double m = weighted_mean(row, cs.weights);
            std::vector<double> sq(n);
            for (std::size_t r = 0; r < n; ++r) sq[r] = cs.weights[r] * (row[r] - m) * (row[r] - m);
            double sd = std::sqrt(pairwise_sum(sq) / pairwise_sum(cs.weights));
            if (!(sd > 1e-150)) throw UnsupportedForBounds("score has no variance on the grid");
            for (auto& v : row) v = (v - m) / sd;
            scale[static_cast<std::size_t>(j)] = sd;
        } else {
            double info = dist.fisher_information();
            if (!(info > 0)) throw UnsupportedForBounds("vanishing information");
            double s = std::sqrt(info);
            for (auto& v : row) v /= s;
            scale[static_cast<std::size_t>(j)] = s;
        }
    }

    auto weighted_dot = [&](const std::vector<double>& a) {
        std::vector<double> acc(n);
        for (std::size_t r = 0; r < n; ++r)
            acc[r] = a[r] * (cs.weighted() ? cs.weights[r] : 1.0 / static_cast<double>(n));
        return pairwise_sum(acc);
    };

    std::map<MultiIndex, double> terms;
    double total = 0;
    const auto& zv = z[static_cast<std::size_t>(var)];
    for (int j = -1; j < d; ++j) {
        if (j == var) continue;
        std::vector<double> integrand(n);
        if (derivative_route) {
            // Integrating by parts trades the product with the active score
            // for minus the partial derivative; the normalization of the
            // replaced row is reapplied as a plain division.
            for (std::size_t r = 0; r < n; ++r) {
                double g = -(*cs.gradients)(r, var);
                integrand[r] = j < 0 ? g : g * z[static_cast<std::size_t>(j)][r];
            }
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                double base = cs.outputs[r] * zv[r];
                integrand[r] = j < 0 ? base : base * z[static_cast<std::size_t>(j)][r];
            }
        }
        double c = weighted_dot(integrand);
        if (derivative_route) c /= scale[static_cast<std::size_t>(var)];
        MultiIndex mi = MultiIndex::unit(d, var, 1);
        if (j >= 0) mi.orders[static_cast<std::size_t>(j)] = 1;
        terms[mi] = c * c;
        total += c * c;
    }
    return {total, std::move(terms)};
}

} // namespace detail

// Weight-free lower bound on the total contribution of one variable built
// from score functions: one squared correlation with the variable's own
// score plus one interaction term per companion score. When gradients are
// available and the active density vanishes at its boundary the first-order
// coefficient is taken as minus the mean partial derivative.
inline BoundEstimate fisher_lower_bound(const EvaluationSample& sample,
                                        const std::vector<Distribution1D>& dists, int var,
                                        int B = 0, double level = 0.9, std::uint64_t seed = 0) {
    detail::check_variable(sample, var);
    if (dists.size() != static_cast<std::size_t>(sample.dim()))
        throw std::invalid_argument("fisher_lower_bound: one law per dimension required");
    bool derivative_route = sample.has_gradients()
                            && dists[static_cast<std::size_t>(var)].pdf_vanishes_at_boundaries();
    BoundEstimate e;
    e.kind = "fisher";
    e.target = "total";
    e.variable = var + 1;
    e.n_used = sample.size();
    e.seed = sample.seed;
    auto [value, terms] = detail::fisher_value(sample, dists, var, derivative_route);
    e.value = value;
    e.terms = std::move(terms);
    if (B > 0 && !sample.weighted()) {
        e.ci = bootstrap_ci(
            sample,
            [&](const EvaluationSample& rs) {
                return detail::fisher_value(rs, dists, var, derivative_route).first;
            },
            B, level, seed);
    }
    return e;
}

// First-order lower bound from a single monomial test function on standard
// uniform inputs. A is the mean gap between the output at the upper face and
// the output itself; W is the mean of the partial derivative weighted by the
// monomial of the next degree; the bound is (2m+1)/m^2 (A - W)^2 and attains
// the first-order contribution of a pure degree-m monomial exactly.
inline BoundEstimate monomial_lower_bound(const EvaluationSample& sample, const ModelFunction& f,
                                          const std::vector<Distribution1D>& dists, int var,
                                          int m) {
    detail::check_variable(sample, var);
    if (m < 1) throw std::invalid_argument("monomial_lower_bound: degree must be >= 1");
    for (const auto& d : dists) {
        if (d.family() != Family::Uniform || std::abs(d.support_lo()) > 1e-12
            || std::abs(d.support_hi() - 1.0) > 1e-12)
            throw NotUniform01("monomial bound requires standard uniform inputs");
    }
    if (!sample.has_gradients())
        throw MissingGradients("monomial bound needs the partial derivative column");
    const std::size_t n = sample.size();
    std::vector<double> gap(n), wgt(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = sample.design.row(r);
        double face = f.face(var, 1.0, row);
        double w = sample.weighted() ? sample.weights[r] : 1.0 / static_cast<double>(n);
        gap[r] = w * (face - sample.outputs[r]);
        wgt[r] = w * (*sample.gradients)(r, var) * std::pow(sample.design(r, var), m + 1);
    }
    double A = pairwise_sum(gap);
    double W = pairwise_sum(wgt);
    double mm = static_cast<double>(m);
    BoundEstimate e;
    e.kind = "monomial";
    e.target = "first";
    e.variable = var + 1;
    e.value = (2 * mm + 1) / (mm * mm) * (A - W) * (A - W);
    e.terms[MultiIndex::unit(sample.dim(), var, m)] = e.value;
    e.n_used = n;
    e.seed = sample.seed;
    return e;
}

// Mean squared partial derivative of one variable.
inline double dgsm_index(const EvaluationSample& sample, int var) {
    detail::check_variable(sample, var);
    if (!sample.has_gradients()) throw MissingGradients("derivative measure needs gradients");
    const std::size_t n = sample.size();
    std::vector<double> acc(n);
    for (std::size_t r = 0; r < n; ++r) {
        double g = (*sample.gradients)(r, var);
        acc[r] = g * g * (sample.weighted() ? sample.weights[r] : 1.0 / static_cast<double>(n));
    }
    return pairwise_sum(acc);
}

// Upper bound on the total contribution: the mean squared derivative scaled
// by the inverse of the smallest nonzero eigenvalue of that dimension.
inline BoundEstimate dgsm_upper_bound(const EvaluationSample& sample,
                                      const std::vector<SpectralBasis>& bases, int var) {
    detail::check_variable(sample, var);
    if (bases.size() != static_cast<std::size_t>(sample.dim()))
        throw std::invalid_argument("dgsm_upper_bound: one basis per dimension required");
    double nu = dgsm_index(sample, var);
    BoundEstimate e;
    e.kind = "dgsm_upper";
    e.target = "total";
    e.variable = var + 1;
    e.value = nu * bases[static_cast<std::size_t>(var)].poincare_constant();
    e.terms[MultiIndex::unit(sample.dim(), var, 1)] = nu;
    e.n_used = sample.size();
    e.seed = sample.seed;
    return e;
}

// Reference pick-freeze estimate of the total contribution: half the mean
// squared gap between outputs at paired designs differing only in the chosen
// coordinate. `normalized` divides by the unbiased output variance.
inline BoundEstimate pick_freeze_total(const ModelFunction& f,
                                       const std::vector<Distribution1D>& dists, int var,
                                       std::size_t n, std::uint64_t seed, int B = 0,
                                       double level = 0.9) {
    const int d = f.dim();
    if (var < 0 || var >= d) throw InactiveIndex("variable index out of range");
    if (dists.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("pick_freeze_total: one law per dimension required");
    Matrix X(n, d);
    for (int j = 0; j < d; ++j) {
        auto col = dists[static_cast<std::size_t>(j)].sample(n, derive_seed(seed, static_cast<std::uint64_t>(j)));
        for (std::size_t r = 0; r < n; ++r) X(r, j) = col[r];
    }
    auto frozen = dists[static_cast<std::size_t>(var)].sample(
        n, derive_seed(seed, static_cast<std::uint64_t>(d + var)));
    std::vector<double> y(n), sq(n);
    std::vector<double> xrow(static_cast<std::size_t>(d));
    for (std::size_t r = 0; r < n; ++r) {
        for (int j = 0; j < d; ++j) xrow[static_cast<std::size_t>(j)] = X(r, j);
        y[r] = f(xrow);
        xrow[static_cast<std::size_t>(var)] = frozen[r];
        double gap = y[r] - f(xrow);
        sq[r] = gap * gap;
    }
    BoundEstimate e;
    e.kind = "pick_freeze";
    e.target = "total";
    e.variable = var + 1;
    e.value = pairwise_sum(sq) / (2.0 * static_cast<double>(n));
    e.n_used = n;
    e.seed = seed;
    double my = mean(y);
    std::vector<double> dev(n);
    for (std::size_t r = 0; r < n; ++r) dev[r] = (y[r] - my) * (y[r] - my);
    double variance = pairwise_sum(dev) / static_cast<double>(n - 1);
    if (variance > 0) e.normalized = e.value / variance;
    if (B > 0) {
        if (B < 100) throw std::invalid_argument("pick_freeze_total: need at least 100 replicates");
        std::vector<double> reps(static_cast<std::size_t>(B));
        for (int b = 0; b < B; ++b) {
            auto idx = detail::resample_indices(n, derive_seed(seed, 0x9d0full + static_cast<std::uint64_t>(b)));
            std::vector<double> boot(n);
            for (std::size_t r = 0; r < n; ++r) boot[r] = sq[idx[r]];
            reps[static_cast<std::size_t>(b)] = pairwise_sum(boot) / (2.0 * static_cast<double>(n));
        }
        e.ci = detail::percentile_interval(std::move(reps), level);
    }
    return e;
}

namespace detail {

struct TensorGrid {
    std::vector<QuadRule> rules;
    std::vector<double> values; // outputs at the tensor nodes, dim 0 fastest
    std::size_t cells = 1;
};

inline TensorGrid build_grid(const ModelFunction& f, const std::vector<Distribution1D>& dists,
                             int points_per_dim) {
    const int d = f.dim();
    TensorGrid g;
    for (int j = 0; j < d; ++j) {
        std::vector<double> splits = j < static_cast<int>(f.kinks().size())
                                         ? f.kinks()[static_cast<std::size_t>(j)]
                                         : std::vector<double>{};
        g.rules.push_back(dimension_rule(dists[static_cast<std::size_t>(j)], points_per_dim,
                                         std::move(splits)));
        g.cells *= g.rules.back().size();
    }
    g.values.resize(g.cells);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t c = 0; c < g.cells; ++c) {
        for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = g.rules[static_cast<std::size_t>(j)].nodes[idx[static_cast<std::size_t>(j)]];
        g.values[c] = f(x);
        for (int j = 0; j < d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < g.rules[static_cast<std::size_t>(j)].size()) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }
    return g;
}

// Variance of the conditional mean for every subset of dimensions, by one
// accumulation pass per subset over the full tensor.
inline std::vector<double> subset_variances(const TensorGrid& g) {
    const int d = static_cast<int>(g.rules.size());
    const std::size_t nsub = std::size_t{1} << d;

    // Center against the global weighted mean first.
    std::vector<double> w(g.cells);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t c = 0; c < g.cells; ++c) {
        double wc = 1.0;
        for (int j = 0; j < d; ++j) wc *= g.rules[static_cast<std::size_t>(j)].weights[idx[static_cast<std::size_t>(j)]];
        w[c] = wc;
        for (int j = 0; j < d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < g.rules[static_cast<std::size_t>(j)].size()) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }
    std::vector<double> wh(g.cells);
    for (std::size_t c = 0; c < g.cells; ++c) wh[c] = w[c] * g.values[c];
    double m0 = pairwise_sum(wh) / pairwise_sum(w);
    std::vector<double> h(g.cells);
    for (std::size_t c = 0; c < g.cells; ++c) h[c] = g.values[c] - m0;

    std::vector<double> V(nsub, 0.0);
    for (std::size_t mask = 1; mask < nsub; ++mask) {
        std::size_t tsize = 1;
        for (int j = 0; j < d; ++j)
            if (mask >> j & 1) tsize *= g.rules[static_cast<std::size_t>(j)].size();
        std::vector<double> table(tsize, 0.0);
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t c = 0; c < g.cells; ++c) {
            double wcomp = 1.0;
            std::size_t t = 0, stride = 1;
            for (int j = 0; j < d; ++j) {
                if (mask >> j & 1) {
                    t += idx[static_cast<std::size_t>(j)] * stride;
                    stride *= g.rules[static_cast<std::size_t>(j)].size();
                } else {
                    wcomp *= g.rules[static_cast<std::size_t>(j)].weights[idx[static_cast<std::size_t>(j)]];
                }
            }
            table[t] += wcomp * h[c];
            for (int j = 0; j < d; ++j) {
                if (++idx[static_cast<std::size_t>(j)] < g.rules[static_cast<std::size_t>(j)].size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
        // Weighted sum of squared conditional means over the subset grid.
        std::size_t t = 0;
        std::vector<std::size_t> sidx;
        std::vector<std::size_t> sdims;
        for (int j = 0; j < d; ++j)
            if (mask >> j & 1) sdims.push_back(static_cast<std::size_t>(j));
        sidx.assign(sdims.size(), 0);
        double acc = 0;
        for (t = 0; t < tsize; ++t) {
            double wt = 1.0;
            for (std::size_t k = 0; k < sdims.size(); ++k) wt *= g.rules[sdims[k]].weights[sidx[k]];
            acc += wt * table[t] * table[t];
            for (std::size_t k = 0; k < sdims.size(); ++k) {
                if (++sidx[k] < g.rules[sdims[k]].size()) break;
                sidx[k] = 0;
            }
        }
        V[mask] = acc;
    }
    return V;
}

} // namespace detail

// Deterministic decomposition reference on a tensor grid: the exact
// contribution of a subset of variables (or its total-effect superset sum)
// under the product law discretized by the same per-dimension rules the
// weighted designs use. Intended for low dimension; refuses d > 4.
inline BoundEstimate anova_oracle(const ModelFunction& f, const std::vector<Distribution1D>& dists,
                                  const std::vector<int>& subset, int points_per_dim, bool total) {
    const int d = f.dim();
    if (d > 4) throw DimensionTooLarge("decomposition reference limited to 4 dimensions");
    if (dists.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("anova_oracle: one law per dimension required");
    if (subset.empty()) throw std::invalid_argument("anova_oracle: empty subset");
    std::size_t imask = 0;
    for (int v : subset) {
        if (v < 0 || v >= d) throw InactiveIndex("subset variable out of range");
        imask |= std::size_t{1} << v;
    }
    auto grid = detail::build_grid(f, dists, points_per_dim);
    auto V = detail::subset_variances(grid);
    const std::size_t nsub = std::size_t{1} << d;

    // Component values from conditional-mean variances by inclusion-exclusion.
    std::vector<double> D(nsub, 0.0);
    for (std::size_t mask = 1; mask < nsub; ++mask) {
        double acc = 0;
        std::size_t sub = mask;
        while (true) {
            int diff = std::popcount(static_cast<unsigned>(mask)) - std::popcount(static_cast<unsigned>(sub));
            acc += (diff % 2 == 0 ? 1.0 : -1.0) * V[sub];
            if (sub == 0) break;
            sub = (sub - 1) & mask;
        }
        D[mask] = acc;
    }

    BoundEstimate e;
    e.kind = "oracle";
    e.target = total ? "total" : "closed";
    e.variable = subset.size() == 1 ? subset.front() + 1 : 0;
    if (total) {
        for (std::size_t mask = 1; mask < nsub; ++mask)
            if ((mask & imask) == imask) e.value += D[mask];
    } else {
        e.value = D[imask];
    }
    MultiIndex key{std::vector<int>(static_cast<std::size_t>(d), 0)};
    for (int v : subset) key.orders[static_cast<std::size_t>(v)] = 1;
    e.terms[key] = e.value;
    e.n_used = grid.cells;
    return e;
}

// Output variance on the same tensor grid the decomposition reference uses.
inline double oracle_variance(const ModelFunction& f, const std::vector<Distribution1D>& dists,
                              int points_per_dim) {
    auto grid = detail::build_grid(f, dists, points_per_dim);
    std::vector<std::size_t> idx(grid.rules.size(), 0);
    std::vector<double> w(grid.cells), wh(grid.cells);
    for (std::size_t c = 0; c < grid.cells; ++c) {
        double wc = 1.0;
        for (std::size_t j = 0; j < grid.rules.size(); ++j) wc *= grid.rules[j].weights[idx[j]];
        w[c] = wc;
        wh[c] = wc * grid.values[c];
        for (std::size_t j = 0; j < grid.rules.size(); ++j) {
            if (++idx[j] < grid.rules[j].size()) break;
            idx[j] = 0;
        }
    }
    double m = pairwise_sum(wh) / pairwise_sum(w);
    for (std::size_t c = 0; c < grid.cells; ++c)
        wh[c] = w[c] * (grid.values[c] - m) * (grid.values[c] - m);
    return pairwise_sum(wh);
}

} // namespace sobolow
