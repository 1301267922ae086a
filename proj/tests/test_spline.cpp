#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sobolow/spline.hpp"

using namespace sobolow;

TEST_CASE("clamped spline reproduces a cubic exactly") {
    auto f = [](double x) { return x * x * x - 2.0 * x * x + x; };
    auto fp = [](double x) { return 3.0 * x * x - 4.0 * x + 1.0; };
    std::vector<double> x, y;
    for (int i = 0; i <= 10; ++i) {
        x.push_back(-1.0 + 0.3 * i);
        y.push_back(f(x.back()));
    }
    CubicSpline s(x, y, fp(x.front()), fp(x.back()));
    for (double t : {-0.95, -0.31, 0.0, 0.47, 1.13, 1.99}) {
        CHECK(s.value(t) == Catch::Approx(f(t)).margin(1e-12));
        CHECK(s.deriv(t) == Catch::Approx(fp(t)).margin(1e-11));
    }
}

TEST_CASE("finite-difference end slopes give near-quartic convergence on a smooth function") {
    const int n = 200;
    std::vector<double> x(n + 1), y(n + 1);
    for (int i = 0; i <= n; ++i) {
        x[i] = M_PI * i / n;
        y[i] = std::cos(x[i]);
    }
    auto s = CubicSpline::with_fd_slopes(x, y);
    double err_v = 0.0, err_d = 0.0;
    for (int i = 0; i < 500; ++i) {
        double t = M_PI * (i + 0.5) / 500.0;
        err_v = std::max(err_v, std::fabs(s.value(t) - std::cos(t)));
        err_d = std::max(err_d, std::fabs(s.deriv(t) + std::sin(t)));
    }
    CHECK(err_v < 1e-7);
    CHECK(err_d < 1e-5);
}

TEST_CASE("evaluation clamps to the tabulated range") {
    std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> y{0.0, 1.0, 4.0, 9.0, 16.0};
    auto s = CubicSpline::with_fd_slopes(x, y);
    CHECK(s.value(-0.5) == Catch::Approx(s.value(0.0)));
    CHECK(s.value(9.0) == Catch::Approx(s.value(4.0)));
}

TEST_CASE("constructor rejects malformed input") {
    CHECK_THROWS_AS(CubicSpline({0.0, 0.0, 1.0}, {1.0, 2.0, 3.0}, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CubicSpline({0.0}, {1.0}, 0.0, 0.0), std::invalid_argument);
}
