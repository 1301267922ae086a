#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sobolow/core.hpp"
#include "sobolow/tridiagonal.hpp"

namespace sobolow {

struct QuadRule {
    std::vector<double> nodes, weights;

    std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre on [-1,1]: Newton iteration on the three-term recurrence.
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadRule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

inline QuadRule gauss_legendre(int n, double a, double b) {
    QuadRule r = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (auto& x : r.nodes) x = mid + half * x;
    for (auto& w : r.weights) w *= half;
    return r;
}

// Gauss rule for expectations under N(0,1) (probabilists' convention):
// Golub-Welsch on the Jacobi matrix with off-diagonal sqrt(k). Weights sum
// to one.
inline QuadRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    std::vector<double> d(n, 0.0), e(n > 1 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(static_cast<double>(k));
    Matrix z(n, n, 0.0);
    for (int i = 0; i < n; ++i) z(i, i) = 1.0;
    tridiag_ql(d, e, &z);
    QuadRule r;
    r.nodes = d;
    r.weights.assign(n, 0.0);
    for (int j = 0; j < n; ++j) r.weights[j] = z(0, j) * z(0, j);
    return r;
}

namespace detail {

inline const QuadRule& gl12() {
    static const QuadRule r = gauss_legendre(12);
    return r;
}

template <class F>
double gl12_apply(F& f, double a, double b) {
    const QuadRule& r = gl12();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return half * s;
}

template <class F>
double adaptive_rec(F& f, double a, double b, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = gl12_apply(f, a, m), right = gl12_apply(f, m, b);
    double delta = left + right - whole;
    // stop on the requested tolerance, on floating-point noise, or at the
    // depth cap (panel width b-a shrinks by 2^-depth)
    if (std::fabs(delta) <= tol || std::fabs(delta) <= 5e-15 * (std::fabs(left) + std::fabs(right))
        || depth >= 44)
        return left + right;
    return adaptive_rec(f, a, m, left, 0.5 * tol, depth + 1)
         + adaptive_rec(f, m, b, right, 0.5 * tol, depth + 1);
}

} // namespace detail

// Adaptive Gauss integration on a finite interval, absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
    if (!(b > a)) return 0.0;
    double whole = detail::gl12_apply(f, a, b);
    return detail::adaptive_rec(f, a, b, whole, tol, 0);
}

} // namespace sobolow
