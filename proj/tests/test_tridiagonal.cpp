#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "sobolow/tridiagonal.hpp"

using namespace sobolow;

namespace {

// residual ||A v - lambda B v||_inf
double pencil_residual(const Tridiag& A, const Tridiag& B, double lambda,
                       const std::vector<double>& v) {
    auto av = tridiag_matvec(A, v);
    auto bv = tridiag_matvec(B, v);
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::fabs(av[i] - lambda * bv[i]));
    return r;
}

} // namespace

TEST_CASE("implicit QL reproduces the discrete Laplacian spectrum") {
    const int n = 12;
    std::vector<double> d(n, 2.0), e(n - 1, -1.0);
    Matrix z(n, n, 0.0);
    for (int i = 0; i < n; ++i) z(i, i) = 1.0;
    tridiag_ql(d, e, &z);

    for (int k = 1; k <= n; ++k) {
        double exact = 2.0 - 2.0 * std::cos(k * M_PI / (n + 1));
        CHECK(d[k - 1] == Catch::Approx(exact).epsilon(1e-12));
    }

    // eigenvector residual and orthonormality of the accumulated columns
    Tridiag T{std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
    for (int j = 0; j < n; ++j) {
        std::vector<double> v(n);
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            v[i] = z(i, j);
            nrm += v[i] * v[i];
        }
        CHECK(nrm == Catch::Approx(1.0).epsilon(1e-12));
        auto tv = tridiag_matvec(T, v);
        for (int i = 0; i < n; ++i) CHECK(std::fabs(tv[i] - d[j] * v[i]) < 1e-11);
    }
}

TEST_CASE("pencil bisection matches QL when the mass matrix is the identity") {
    const int n = 30;
    std::mt19937_64 rng(7);
    Tridiag A;
    A.diag.resize(n);
    A.off.resize(n - 1);
    for (auto& x : A.diag) x = 2.0 * canonical_u01(rng) - 1.0;
    for (auto& x : A.off) x = 2.0 * canonical_u01(rng) - 1.0;
    Tridiag B{std::vector<double>(n, 1.0), std::vector<double>(n - 1, 0.0)};

    std::vector<double> d = A.diag, e = A.off;
    tridiag_ql(d, e);
    auto lo = pencil_lowest_eigenvalues(A, B, 5);
    for (int j = 0; j < 5; ++j) CHECK(lo[j] == Catch::Approx(d[j]).margin(1e-12));
}

TEST_CASE("pencil eigenpairs have small residual and consistent Sturm counts") {
    // FE discretization of -u'' = lambda u with natural boundary conditions
    // on [0, pi]; exact eigenvalues k^2.
    const int cells = 400;
    const double h = M_PI / cells;
    const int n = cells + 1;
    Tridiag K{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
    Tridiag M{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
    for (int c = 0; c < cells; ++c) {
        K.diag[c] += 1.0 / h;
        K.diag[c + 1] += 1.0 / h;
        K.off[c] -= 1.0 / h;
        M.diag[c] += h / 3.0;
        M.diag[c + 1] += h / 3.0;
        M.off[c] += h / 6.0;
    }

    auto eig = pencil_lowest_eigenvalues(K, M, 4);
    CHECK(std::fabs(eig[0]) < 1e-10);
    for (int k = 1; k <= 3; ++k) {
        // consistent-mass FE overestimates by about (kh)^2/12 relative
        double rel = eig[k] / (k * k) - 1.0;
        CHECK(rel > 0.0);
        CHECK(rel < 2.0 * k * k * h * h / 12.0 + 1e-10);
    }

    std::vector<std::vector<double>> found;
    for (int k = 0; k <= 3; ++k) {
        auto v = pencil_eigenvector(K, M, eig[k], found, 100 + k);
        CHECK(pencil_residual(K, M, eig[k], v) < 1e-8);
        CHECK(tridiag_inner(v, M, v) == Catch::Approx(1.0).epsilon(1e-10));
        for (const auto& p : found) CHECK(std::fabs(tridiag_inner(p, M, v)) < 1e-8);
        found.push_back(v);
    }

    double eps = 1e-6;
    for (int k = 1; k <= 3; ++k) {
        CHECK(pencil_count_below(K, M, eig[k] - eps * eig[k]) == k);
        CHECK(pencil_count_below(K, M, eig[k] + eps * eig[k]) == k + 1);
    }
}

TEST_CASE("tridiagonal LU with partial pivoting solves a random system") {
    const int n = 50;
    std::mt19937_64 rng(11);
    std::vector<double> sub(n - 1), diag(n), sup(n - 1), x(n);
    for (auto& v : sub) v = 2.0 * canonical_u01(rng) - 1.0;
    for (auto& v : sup) v = 2.0 * canonical_u01(rng) - 1.0;
    for (auto& v : diag) v = 0.3 * (2.0 * canonical_u01(rng) - 1.0); // not diagonally dominant
    for (auto& v : x) v = 2.0 * canonical_u01(rng) - 1.0;

    std::vector<double> b(n, 0.0);
    for (int i = 0; i < n; ++i) {
        b[i] = diag[i] * x[i];
        if (i > 0) b[i] += sub[i - 1] * x[i - 1];
        if (i + 1 < n) b[i] += sup[i] * x[i + 1];
    }
    detail::TridiagLU lu;
    lu.factor(sub, diag, sup);
    lu.solve(b);
    for (int i = 0; i < n; ++i) CHECK(b[i] == Catch::Approx(x[i]).margin(1e-9));
}
