#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sobolow/core.hpp"
#include "sobolow/distribution.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/spline.hpp"
#include "sobolow/tridiagonal.hpp"

namespace sobolow {

// Weight in front of the second-derivative term of the operator
//   L h = w h'' + (w' - w V') h'.
// The plain operator uses w = 1. The polynomial weights make the classical
// shape families tractable: 1 - x^2 on [-1,1] (beta), x on (0,inf) (gamma).
struct Weight {
    enum class Kind { One, OneMinusX2, Linear };
    Kind kind = Kind::One;

    double operator()(double x) const {
        switch (kind) {
            case Kind::One: return 1.0;
            case Kind::OneMinusX2: return 1.0 - x * x;
            case Kind::Linear: return x;
        }
        return 1.0;
    }

    const char* name() const {
        switch (kind) {
            case Kind::One: return "one";
            case Kind::OneMinusX2: return "one_minus_x2";
            case Kind::Linear: return "x";
        }
        return "?";
    }

    static Weight one() { return {Kind::One}; }
    static Weight jacobi() { return {Kind::OneMinusX2}; }
    static Weight laguerre() { return {Kind::Linear}; }

    static Weight from_name(const std::string& s) {
        if (s == "one") return one();
        if (s == "one_minus_x2") return jacobi();
        if (s == "x") return laguerre();
        throw ConfigInvalid("unknown weight: " + s);
    }
};

// Truncated eigenbasis of the diffusion operator attached to a law: the
// eigenvalues 0 = lambda_0 < lambda_1 <= ... <= lambda_K and unit-variance
// eigenfunctions, with e_0 constant one. Closed forms (cosines for uniform,
// Hermite polynomials for the normal) evaluate analytically; finite element
// spectra evaluate through clamped cubic splines of the nodal tables.
class SpectralBasis {
public:
    enum class Source { FiniteElement, Fourier, Hermite };

    int max_order() const { return static_cast<int>(eigenvalues_.size()) - 1; }
    const Distribution1D& input() const { return dist_; }
    const Weight& weight() const { return weight_; }
    Source source() const { return source_; }
    const std::vector<double>& grid() const { return grid_; }

    double eigenvalue(int k) const {
        check_order(k);
        return eigenvalues_[k];
    }

    double value(int k, double x) const {
        check_order(k);
        if (k == 0) return 1.0;
        switch (source_) {
            case Source::Fourier: {
                double a = dist_.support_lo(), len = dist_.support_hi() - a;
                return std::sqrt(2.0) * std::cos(M_PI * k * (x - a) / len);
            }
            case Source::Hermite: {
                double z = (x - dist_.params()[0]) / dist_.params()[1];
                return hermite_normalized(k, z);
            }
            case Source::FiniteElement:
                return splines_[k].value(x);
        }
        return 0.0;
    }

    double derivative(int k, double x) const {
        check_order(k);
        if (k == 0) return 0.0;
        switch (source_) {
            case Source::Fourier: {
                double a = dist_.support_lo(), len = dist_.support_hi() - a;
                double f = M_PI * k / len;
                return -std::sqrt(2.0) * f * std::sin(f * (x - a));
            }
            case Source::Hermite: {
                double s = dist_.params()[1];
                double z = (x - dist_.params()[0]) / s;
                return std::sqrt(static_cast<double>(k)) / s * hermite_normalized(k - 1, z);
            }
            case Source::FiniteElement:
                return splines_[k].deriv(x);
        }
        return 0.0;
    }

    double poincare_constant() const {
        if (max_order() < 1 || !(eigenvalues_[1] > 0.0))
            throw DegenerateSpectrum("first nonzero eigenvalue unavailable");
        return 1.0 / eigenvalues_[1];
    }

    // JSON record: family/params (with truncation when present), weight,
    // grid, eigenvalues, one row per eigenfunction with its nodal values and
    // nodal derivatives. Closed-form spectra are tagged by source and
    // re-derived on load; finite element spectra reload through splines of
    // the value rows.
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["family"] = family_name(dist_.family());
        j["params"] = dist_.params();
        if (dist_.truncated() || dist_.family() == Family::Uniform)
            j["truncation"] = {dist_.support_lo(), dist_.support_hi()};
        j["weight"] = weight_.name();
        j["source"] = source_ == Source::FiniteElement ? "finite_element"
                    : source_ == Source::Fourier       ? "fourier"
                                                       : "hermite";
        j["grid"] = grid_;
        j["eigenvalues"] = eigenvalues_;
        nlohmann::json vals = nlohmann::json::array(), ders = nlohmann::json::array();
        for (int k = 0; k <= max_order(); ++k) {
            std::vector<double> v(grid_.size()), d(grid_.size());
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                v[i] = value(k, grid_[i]);
                d[i] = derivative(k, grid_[i]);
            }
            vals.push_back(v);
            ders.push_back(d);
        }
        j["eigenfunctions"] = vals;
        j["derivatives"] = ders;
        return j;
    }

    static SpectralBasis from_json(const nlohmann::json& j);

    static SpectralBasis make_closed_form(Distribution1D d, int K, Source src,
                                          std::vector<double> grid) {
        SpectralBasis b(std::move(d), Weight::one(), src);
        b.grid_ = std::move(grid);
        b.eigenvalues_.resize(K + 1);
        for (int k = 0; k <= K; ++k) {
            if (src == Source::Fourier) {
                double len = b.dist_.support_hi() - b.dist_.support_lo();
                b.eigenvalues_[k] = (M_PI * k / len) * (M_PI * k / len);
            } else {
                double s = b.dist_.params()[1];
                b.eigenvalues_[k] = k / (s * s);
            }
        }
        return b;
    }

    static SpectralBasis make_finite_element(Distribution1D d, Weight w, std::vector<double> grid,
                                             std::vector<double> eigenvalues, Matrix nodal_values) {
        SpectralBasis b(std::move(d), w, Source::FiniteElement);
        b.grid_ = std::move(grid);
        b.eigenvalues_ = std::move(eigenvalues);
        b.splines_.resize(b.eigenvalues_.size());
        std::vector<double> row(b.grid_.size());
        for (std::size_t k = 1; k < b.eigenvalues_.size(); ++k) {
            for (std::size_t i = 0; i < b.grid_.size(); ++i) row[i] = nodal_values(k, i);
            b.splines_[k] = CubicSpline::with_fd_slopes(b.grid_, row);
        }
        return b;
    }

private:
    SpectralBasis(Distribution1D d, Weight w, Source s)
        : dist_(std::move(d)), weight_(w), source_(s) {}

    void check_order(int k) const {
        if (k < 0 || k > max_order())
            throw OutOfRange("eigenpair index " + std::to_string(k) + " exceeds truncation "
                             + std::to_string(max_order()));
    }

    // He_k(z) / sqrt(k!) by upward recurrence on the normalized functions:
    // p_k = (z p_{k-1} - sqrt(k-1) p_{k-2}) / sqrt(k).
    static double hermite_normalized(int k, double z) {
        double pm = 1.0;
        if (k == 0) return pm;
        double p = z;
        for (int n = 2; n <= k; ++n) {
            double pn = (z * p - std::sqrt(n - 1.0) * pm) / std::sqrt(static_cast<double>(n));
            pm = p;
            p = pn;
        }
        return p;
    }

    Distribution1D dist_;
    Weight weight_;
    Source source_;
    std::vector<double> grid_;
    std::vector<double> eigenvalues_;
    std::vector<CubicSpline> splines_; // index 0 unused
};

// Closed-form spectrum: cosines for any uniform law, Hermite functions for
// the untruncated normal. Everything else throws NoClosedForm.
inline SpectralBasis closed_form_spectrum(const Distribution1D& d, int K, int grid_points = 257) {
    if (K < 1) throw std::invalid_argument("closed_form_spectrum: K must be >= 1");
    if (d.family() == Family::Uniform) {
        double a = d.support_lo(), b = d.support_hi();
        std::vector<double> grid(grid_points);
        for (int i = 0; i < grid_points; ++i) grid[i] = a + (b - a) * i / (grid_points - 1.0);
        return SpectralBasis::make_closed_form(d, K, SpectralBasis::Source::Fourier, std::move(grid));
    }
    if (d.family() == Family::Normal && !d.truncated()) {
        double m = d.params()[0], s = d.params()[1];
        std::vector<double> grid(grid_points);
        for (int i = 0; i < grid_points; ++i) grid[i] = m + s * (-8.0 + 16.0 * i / (grid_points - 1.0));
        return SpectralBasis::make_closed_form(d, K, SpectralBasis::Source::Hermite, std::move(grid));
    }
    throw NoClosedForm(std::string("no closed-form spectrum for ") + d.describe());
}

// Numerical spectrum by P1 finite elements on an equispaced grid of M cells:
// two-point Gauss assembly of the stiffness/mass pencil, Sturm bisection for
// the lowest K+1 eigenvalues, inverse iteration for the eigenfunctions,
// normalized to unit variance and sign-fixed positive at the left end of the
// support. Unbounded supports are clipped at the 1e-8 / 1-1e-8 quantiles
// (the untruncated normal short-circuits to its closed form). Eigenfunction
// values between nodes come from clamped cubic splines.
inline SpectralBasis solve_spectrum(const Distribution1D& dist, int K, int M,
                                    const Weight& w = Weight::one()) {
    if (K < 1) throw std::invalid_argument("solve_spectrum: K must be >= 1");
    if (M < 10 * K || M < 32)
        throw std::invalid_argument("solve_spectrum: M must be >= max(10K, 32)");

    Distribution1D d = dist;
    if (!d.bounded()) {
        if (d.family() == Family::Normal && !d.truncated() && w.kind == Weight::Kind::One)
            return closed_form_spectrum(d, K);
        d = d.truncate(d.quantile(1e-8), d.quantile(1.0 - 1e-8));
    }

    const double lo = d.support_lo(), hi = d.support_hi();
    const int n = M + 1;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / static_cast<double>(M);
    grid[M] = hi;

    Tridiag A{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
    Tridiag B{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
    const double gp = 0.5 / std::sqrt(3.0); // 2-point Gauss offsets on a unit cell
    for (int c = 0; c < M; ++c) {
        double xl = grid[c], xr = grid[c + 1], h = xr - xl, mid = 0.5 * (xl + xr);
        double g1 = mid - gp * h, g2 = mid + gp * h;
        double p1 = d.pdf(g1), p2 = d.pdf(g2);
        if (!(std::isfinite(p1) && std::isfinite(p2)) || p1 + p2 <= 0.0)
            throw SingularMass("density vanishes on cell " + std::to_string(c));
        double w1 = w(g1), w2 = w(g2);
        // piecewise-linear hat functions: phi_l' = -1/h, phi_r' = 1/h
        double stiff = 0.5 * h * (p1 * w1 + p2 * w2) / (h * h);
        A.diag[c] += stiff;
        A.diag[c + 1] += stiff;
        A.off[c] -= stiff;
        auto phi_l = [&](double x) { return (xr - x) / h; };
        auto phi_r = [&](double x) { return (x - xl) / h; };
        B.diag[c] += 0.5 * h * (p1 * phi_l(g1) * phi_l(g1) + p2 * phi_l(g2) * phi_l(g2));
        B.diag[c + 1] += 0.5 * h * (p1 * phi_r(g1) * phi_r(g1) + p2 * phi_r(g2) * phi_r(g2));
        B.off[c] += 0.5 * h * (p1 * phi_l(g1) * phi_r(g1) + p2 * phi_l(g2) * phi_r(g2));
    }

    std::vector<double> eig = pencil_lowest_eigenvalues(A, B, K + 1);
    eig[0] = 0.0; // constants are in the kernel exactly

    Matrix vals(K + 1, n, 0.0);
    std::vector<std::vector<double>> found;
    {
        // e_0 = 1 normalized under the discrete mass
        std::vector<double> ones(n, 1.0);
        double nb = std::sqrt(tridiag_inner(ones, B, ones));
        for (auto& v : ones) v /= nb;
        for (int i = 0; i < n; ++i) vals(0, i) = 1.0; // stored as exactly one
        found.push_back(std::move(ones));
    }
    for (int k = 1; k <= K; ++k) {
        auto v = pencil_eigenvector(A, B, eig[k], found, derive_seed(0x5eedbau, k));
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, std::fabs(x));
        for (int i = 0; i < n; ++i) {
            if (std::fabs(v[i]) > 1e-10 * vmax) {
                if (v[i] < 0.0)
                    for (auto& x : v) x = -x;
                break;
            }
        }
        for (int i = 0; i < n; ++i) vals(k, i) = v[i];
        found.push_back(std::move(v));
    }

    return SpectralBasis::make_finite_element(std::move(d), w, std::move(grid), std::move(eig),
                                              std::move(vals));
}

inline SpectralBasis SpectralBasis::from_json(const nlohmann::json& j) {
    std::string fam = j.at("family").get<std::string>();
    std::vector<double> par = j.at("params").get<std::vector<double>>();
    Distribution1D d = [&]() {
        if (fam == "uniform") {
            auto t = j.at("truncation").get<std::vector<double>>();
            return Distribution1D::uniform(t[0], t[1]);
        }
        if (fam == "normal") return Distribution1D::normal(par[0], par[1]);
        if (fam == "triangular") return Distribution1D::triangular(par[0], par[1], par[2]);
        if (fam == "gumbel") return Distribution1D::gumbel(par[0], par[1]);
        if (fam == "laplace") return Distribution1D::laplace(par[0], par[1]);
        if (fam == "cauchy") return Distribution1D::cauchy(par[0], par[1]);
        if (fam == "beta") return Distribution1D::beta(par[0], par[1]);
        if (fam == "gamma") return Distribution1D::gamma(par[0], par[1]);
        throw ConfigInvalid("unknown family in basis record: " + fam);
    }();
    if (fam != "uniform" && j.contains("truncation")) {
        auto t = j.at("truncation").get<std::vector<double>>();
        d = d.truncate(t[0], t[1]);
    }
    std::string src = j.at("source").get<std::string>();
    std::vector<double> grid = j.at("grid").get<std::vector<double>>();
    std::vector<double> eig = j.at("eigenvalues").get<std::vector<double>>();
    int K = static_cast<int>(eig.size()) - 1;
    if (src == "fourier") return make_closed_form(std::move(d), K, Source::Fourier, std::move(grid));
    if (src == "hermite") return make_closed_form(std::move(d), K, Source::Hermite, std::move(grid));
    auto rows = j.at("eigenfunctions").get<std::vector<std::vector<double>>>();
    Matrix vals(eig.size(), grid.size(), 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) vals(k, i) = rows[k][i];
    return make_finite_element(std::move(d), Weight::from_name(j.at("weight").get<std::string>()),
                               std::move(grid), std::move(eig), std::move(vals));
}

// Free-function conveniences mirroring the member calls.
inline double eval_basis(const SpectralBasis& b, int k, double x, bool deriv = false) {
    return deriv ? b.derivative(k, x) : b.value(k, x);
}

inline double poincare_constant(const SpectralBasis& b) { return b.poincare_constant(); }

} // namespace sobolow
