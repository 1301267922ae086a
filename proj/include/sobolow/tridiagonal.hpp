#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "sobolow/core.hpp"

// Symmetric tridiagonal eigenvalue machinery:
//  * implicit-shift QL with optional eigenvector accumulation (small dense
//    problems, Golub-Welsch quadrature),
//  * Sturm-count bisection and inverse iteration for the generalized pencil
//    K x = lambda M x with K, M both tridiagonal (finite element spectra).

namespace sobolow {

struct Tridiag {
    std::vector<double> diag; // n entries
    std::vector<double> off;  // n-1 entries

    std::size_t n() const { return diag.size(); }
};

inline std::vector<double> tridiag_matvec(const Tridiag& t, const std::vector<double>& x) {
    std::size_t n = t.n();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = t.diag[i] * x[i];
        if (i > 0) s += t.off[i - 1] * x[i - 1];
        if (i + 1 < n) s += t.off[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

inline double tridiag_inner(const std::vector<double>& x, const Tridiag& t,
                            const std::vector<double>& y) {
    std::vector<double> ty = tridiag_matvec(t, y);
    std::vector<double> prod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) prod[i] = x[i] * ty[i];
    return pairwise_sum(prod);
}

// Implicit-shift QL on a symmetric tridiagonal matrix. d holds the diagonal
// on entry and the eigenvalues (ascending) on exit; e holds the n-1
// subdiagonal entries and is destroyed. If z is non-null it must be n x n
// (typically the identity) and its columns get rotated into eigenvectors.
inline void tridiag_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z = nullptr) {
    const std::size_t n = d.size();
    if (n == 0) return;
    if (e.size() + 1 < n) throw std::invalid_argument("tridiag_ql: subdiagonal too short");
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) f[i] = e[i];
    const double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(f[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 50) throw std::runtime_error("tridiag_ql: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * f[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + f[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t ii = m; ii-- > l;) {
                    double ff = s * f[ii];
                    double b = c * f[ii];
                    r = std::hypot(ff, g);
                    f[ii + 1] = r;
                    if (r == 0.0) {
                        d[ii + 1] -= p;
                        f[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = ff / r;
                    c = g / r;
                    g = d[ii + 1] - p;
                    r = (d[ii] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[ii + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (std::size_t k = 0; k < n; ++k) {
                            double t = (*z)(k, ii + 1);
                            (*z)(k, ii + 1) = s * (*z)(k, ii) + c * t;
                            (*z)(k, ii) = c * (*z)(k, ii) - s * t;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                f[l] = g;
                f[m] = 0.0;
            }
        } while (m != l);
    }

    // ascending order, carrying eigenvector columns along
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            if (z)
                for (std::size_t r2 = 0; r2 < n; ++r2) std::swap((*z)(r2, i), (*z)(r2, k));
        }
    }
}

// Number of eigenvalues of the pencil (A, B) strictly below sigma, via the
// signs of the LDL^T pivots of A - sigma B. Zero pivots are floored to a
// tiny signed value so the count is well defined at (or next to) an
// eigenvalue.
inline int pencil_count_below(const Tridiag& A, const Tridiag& B, double sigma) {
    const std::size_t n = A.n();
    if (B.n() != n) throw std::invalid_argument("pencil_count_below: size mismatch");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max(scale, std::fabs(A.diag[i]) + std::fabs(sigma) * std::fabs(B.diag[i]));
    const double floor_val = std::max(scale, 1.0) * 1e-300;
    int count = 0;
    double q = A.diag[0] - sigma * B.diag[0];
    if (std::fabs(q) < floor_val) q = -floor_val;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        double o = A.off[i - 1] - sigma * B.off[i - 1];
        q = (A.diag[i] - sigma * B.diag[i]) - o * o / q;
        if (std::fabs(q) < floor_val) q = -floor_val;
        if (q < 0.0) ++count;
    }
    return count;
}

// Lowest `count` eigenvalues of the pencil (A, B), B positive definite,
// by bisection on the Sturm count. Relative tolerance ~1e-14.
inline std::vector<double> pencil_lowest_eigenvalues(const Tridiag& A, const Tridiag& B, int count) {
    if (count <= 0) return {};
    if (static_cast<std::size_t>(count) > A.n())
        throw std::invalid_argument("pencil_lowest_eigenvalues: count exceeds matrix size");
    double lo = -1.0;
    while (pencil_count_below(A, B, lo) > 0) {
        lo *= 4.0;
        if (lo < -1e300) throw std::runtime_error("pencil_lowest_eigenvalues: no lower bound");
    }
    double hi = 1.0;
    while (pencil_count_below(A, B, hi) < count) {
        hi *= 4.0;
        if (hi > 1e300) throw std::runtime_error("pencil_lowest_eigenvalues: no upper bound");
    }
    std::vector<double> eig(count);
    double left = lo;
    for (int j = 0; j < count; ++j) {
        double a = left, b = hi;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            if (b - a <= 1e-15 * std::max(1.0, std::fabs(mid)) + 5e-300) break;
            if (pencil_count_below(A, B, mid) >= j + 1)
                b = mid;
            else
                a = mid;
        }
        eig[j] = 0.5 * (a + b);
        left = a; // eigenvalues are ordered; reuse as the next lower bracket
    }
    return eig;
}

namespace detail {

// Partial-pivoting LU of a general tridiagonal matrix (LAPACK dgttrf layout:
// dl holds multipliers, du2 the fill-in second superdiagonal).
struct TridiagLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv; // 1 means rows i, i+1 were swapped

    void factor(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup) {
        const std::size_t n = diag.size();
        dl = std::move(sub);
        d = std::move(diag);
        du = std::move(sup);
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        piv.assign(n > 1 ? n - 1 : 0, 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::fabs(d[i]) >= std::fabs(dl[i])) {
                if (d[i] != 0.0) {
                    double fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = 0.0;
                }
            } else {
                double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                piv[i] = 1;
            }
        }
    }

    // Solve in place; near-zero pivots floored so inverse iteration can run
    // at an exact eigenvalue.
    void solve(std::vector<double>& b) const {
        const std::size_t n = d.size();
        double scale = 0.0;
        for (double v : d) scale = std::max(scale, std::fabs(v));
        const double floor_val = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon() * 1e-10;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!piv[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        auto pivot = [&](std::size_t i) {
            double v = d[i];
            if (std::fabs(v) < floor_val) v = (v < 0.0 ? -floor_val : floor_val);
            return v;
        };
        b[n - 1] /= pivot(n - 1);
        if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / pivot(n - 2);
        for (std::size_t i = n - 2; i-- > 0;)
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / pivot(i);
    }
};

} // namespace detail

// Eigenvector of the pencil (A, B) at eigenvalue lambda by inverse iteration,
// B-orthogonalized against the columns of `prev` (each assumed B-normalized)
// so clustered or consecutive eigenpairs stay separated. Returned vector has
// v^T B v = 1.
inline std::vector<double> pencil_eigenvector(const Tridiag& A, const Tridiag& B, double lambda,
                                              const std::vector<std::vector<double>>& prev,
                                              std::uint64_t seed = 12345) {
    const std::size_t n = A.n();
    std::vector<double> sub(n > 1 ? n - 1 : 0), diag(n), sup(n > 1 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) diag[i] = A.diag[i] - lambda * B.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = sup[i] = A.off[i] - lambda * B.off[i];
    detail::TridiagLU lu;
    lu.factor(sub, diag, sup);

    std::mt19937_64 rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = canonical_u01(rng) - 0.5;

    auto b_orthogonalize = [&](std::vector<double>& x) {
        for (const auto& p : prev) {
            double c = tridiag_inner(p, B, x);
            for (std::size_t i = 0; i < n; ++i) x[i] -= c * p[i];
        }
    };
    auto b_normalize = [&](std::vector<double>& x) {
        double nb = std::sqrt(tridiag_inner(x, B, x));
        if (!(nb > 0.0)) throw std::runtime_error("pencil_eigenvector: zero iterate");
        for (auto& y : x) y /= nb;
        return nb;
    };

    b_orthogonalize(v);
    b_normalize(v);
    std::vector<double> w;
    for (int it = 0; it < 8; ++it) {
        w = tridiag_matvec(B, v);
        lu.solve(w);
        b_orthogonalize(w);
        double growth = b_normalize(w);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::fabs(std::fabs(w[i]) - std::fabs(v[i])));
        v = w;
        if (it >= 1 && (diff < 1e-13 || growth > 1e12)) break;
    }
    return v;
}

} // namespace sobolow
