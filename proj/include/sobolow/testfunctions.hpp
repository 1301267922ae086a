#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sobolow/distribution.hpp"
#include "sobolow/errors.hpp"
#include "sobolow/model.hpp"

namespace sobolow {

// A model bundled with its input laws and, when known, closed-form values of
// the variance decomposition for cross-checking estimates.
struct TestProblem {
    ModelFunction model;
    std::vector<Distribution1D> inputs;
    std::function<double(const std::vector<int>&)> analytic_closed;
    std::function<double(int)> analytic_total;
    std::function<double()> analytic_variance;

    double closed(const std::vector<int>& I) const {
        if (!analytic_closed) throw NoAnalyticForm("no closed-form components for " + model.name());
        return analytic_closed(I);
    }
    double total(int i) const {
        if (!analytic_total) throw NoAnalyticForm("no closed-form totals for " + model.name());
        return analytic_total(i);
    }
    double variance() const {
        if (!analytic_variance) throw NoAnalyticForm("no closed-form variance for " + model.name());
        return analytic_variance();
    }
};

// Two centered uniforms with a product interaction. Both main contributions
// equal 1/12; the interaction contributes a^2/144.
inline TestProblem linear_interaction(double a = 1.0) {
    ModelFunction m("linear_interaction", 2,
                    [a](std::span<const double> x) { return x[0] + x[1] + a * x[0] * x[1]; });
    m = m.with_gradient([a](std::span<const double> x) {
        return std::vector<double>{1.0 + a * x[1], 1.0 + a * x[0]};
    });
    TestProblem p{std::move(m),
                  {Distribution1D::uniform(-0.5, 0.5), Distribution1D::uniform(-0.5, 0.5)},
                  nullptr,
                  nullptr,
                  nullptr};
    p.analytic_closed = [a](const std::vector<int>& I) -> double {
        if (I.size() == 1) return 1.0 / 12.0;
        if (I.size() == 2) return a * a / 144.0;
        throw NoAnalyticForm("linear_interaction components are singletons or the pair");
    };
    p.analytic_total = [a](int) { return 1.0 / 12.0 + a * a / 144.0; };
    p.analytic_variance = [a]() { return 1.0 / 6.0 + a * a / 144.0; };
    return p;
}

// Product of shifted tent factors on standard uniforms. The factor for
// variable i is (|4x-2| - 1)/(1 + a_i), mean zero and variance
// (1/3)/(1+a_i)^2; components multiply across subsets.
inline TestProblem g_sobol(std::vector<double> a) {
    const int d = static_cast<int>(a.size());
    if (d == 0) throw std::invalid_argument("g_sobol: need at least one factor");
    ModelFunction m("g_sobol", d, [a](std::span<const double> x) {
        double prod = 1.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            prod *= 1.0 + (std::abs(4.0 * x[i] - 2.0) - 1.0) / (1.0 + a[i]);
        return prod;
    });
    m = m.with_gradient([a](std::span<const double> x) {
        std::vector<double> g(a.size());
        std::vector<double> fac(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            fac[i] = 1.0 + (std::abs(4.0 * x[i] - 2.0) - 1.0) / (1.0 + a[i]);
        for (std::size_t i = 0; i < a.size(); ++i) {
            double others = 1.0;
            for (std::size_t j = 0; j < a.size(); ++j)
                if (j != i) others *= fac[j];
            double s = 4.0 * x[i] - 2.0;
            double sign = s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
            g[i] = 4.0 * sign / (1.0 + a[i]) * others;
        }
        return g;
    });
    m = m.with_kinks(std::vector<std::vector<double>>(static_cast<std::size_t>(d), {0.5}));
    std::vector<double> D(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) D[i] = (1.0 / 3.0) / ((1.0 + a[i]) * (1.0 + a[i]));
    TestProblem p{std::move(m),
                  std::vector<Distribution1D>(static_cast<std::size_t>(d), Distribution1D::uniform(0, 1)),
                  nullptr,
                  nullptr,
                  nullptr};
    p.analytic_closed = [D](const std::vector<int>& I) {
        double prod = 1.0;
        for (int i : I) prod *= D[static_cast<std::size_t>(i)];
        return prod;
    };
    p.analytic_total = [D](int i) {
        double t = D[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < D.size(); ++j)
            if (static_cast<int>(j) != i) t *= 1.0 + D[j];
        return t;
    };
    p.analytic_variance = [D]() {
        double v = 1.0;
        for (double Di : D) v *= 1.0 + Di;
        return v - 1.0;
    };
    return p;
}

// x1^m + x2 on standard uniforms: the first variable contributes exactly
// m^2 / ((m+1)^2 (2m+1)), which the degree-m monomial bound attains.
inline TestProblem monomial_example(int m) {
    if (m < 1) throw std::invalid_argument("monomial_example: degree must be >= 1");
    ModelFunction f("monomial_example", 2, [m](std::span<const double> x) {
        return std::pow(x[0], m) + x[1];
    });
    f = f.with_gradient([m](std::span<const double> x) {
        return std::vector<double>{m * std::pow(x[0], m - 1), 1.0};
    });
    double mm = m;
    double D1 = mm * mm / ((mm + 1) * (mm + 1) * (2 * mm + 1));
    TestProblem p{std::move(f),
                  {Distribution1D::uniform(0, 1), Distribution1D::uniform(0, 1)},
                  nullptr,
                  nullptr,
                  nullptr};
    p.analytic_closed = [D1](const std::vector<int>& I) -> double {
        if (I == std::vector<int>{0}) return D1;
        if (I == std::vector<int>{1}) return 1.0 / 12.0;
        return 0.0;
    };
    p.analytic_total = [D1](int i) { return i == 0 ? D1 : 1.0 / 12.0; };
    p.analytic_variance = [D1]() { return D1 + 1.0 / 12.0; };
    return p;
}

// x1 (1 + x2) on independent standard normals: the score-function bound is
// tight here, with total contribution 2 for the first variable.
inline TestProblem normal_product() {
    ModelFunction f("normal_product", 2,
                    [](std::span<const double> x) { return x[0] + x[0] * x[1]; });
    f = f.with_gradient([](std::span<const double> x) {
        return std::vector<double>{1.0 + x[1], x[0]};
    });
    TestProblem p{std::move(f),
                  {Distribution1D::normal(0, 1), Distribution1D::normal(0, 1)},
                  nullptr,
                  nullptr,
                  nullptr};
    p.analytic_closed = [](const std::vector<int>& I) -> double {
        if (I == std::vector<int>{0}) return 1.0;
        if (I == std::vector<int>{1}) return 0.0;
        return 1.0;
    };
    p.analytic_total = [](int i) { return i == 0 ? 2.0 : 1.0; };
    p.analytic_variance = []() { return 2.0; };
    return p;
}

namespace detail {

// Water level above the dyke crest for the river reach model. Inputs in
// order: flow Q, Strickler K_s, downstream bed Z_v, upstream bed Z_m, dyke
// height H_d, bank level C_b, reach length L, river width B.
inline double flood_level(std::span<const double> x) {
    double Q = x[0], Ks = x[1], Zv = x[2], Zm = x[3], Hd = x[4], Cb = x[5], L = x[6], B = x[7];
    if (!(Q > 0) || !(Ks > 0) || !(L > 0) || !(B > 0))
        throw InvalidPhysicalParams("flood model needs positive Q, K_s, L, B");
    if (!(Zm > Zv)) throw InvalidPhysicalParams("flood model needs Z_m > Z_v");
    double T = std::pow(Q / (B * Ks * std::sqrt((Zm - Zv) / L)), 0.6);
    return T + Zv - Hd - Cb;
}

inline std::vector<double> flood_level_gradient(std::span<const double> x) {
    double Q = x[0], Ks = x[1], Zv = x[2], Zm = x[3], L = x[6], B = x[7];
    double T = std::pow(Q / (B * Ks * std::sqrt((Zm - Zv) / L)), 0.6);
    std::vector<double> g(8, 0.0);
    g[0] = 0.6 * T / Q;
    g[1] = -0.6 * T / Ks;
    g[2] = 0.3 * T / (Zm - Zv) + 1.0;
    g[3] = -0.3 * T / (Zm - Zv);
    g[4] = -1.0;
    g[5] = -1.0;
    g[6] = 0.3 * T / L;
    g[7] = -0.6 * T / B;
    return g;
}

// Damage slope of the cost with respect to the level: zero above the crest
// and exponentially flat just below it, so the cost is smooth across S = 0.
inline double flood_cost_slope(double S) {
    if (S >= 0.0) return 0.0;
    double t = -1000.0 / (S * S * S * S);
    if (t < -700.0) return 0.0;
    return -3200.0 * std::exp(t) / (S * S * S * S * S);
}

} // namespace detail

// Customary laws for the river reach inputs, in model order.
inline std::vector<Distribution1D> flood_inputs() {
    std::vector<Distribution1D> in;
    in.push_back(Distribution1D::gumbel(1013.0, 558.0).truncate(500.0, 3000.0));
    in.push_back(Distribution1D::normal(30.0, 7.5).truncate(15.0, 45.0));
    in.push_back(Distribution1D::triangular(49.0, 50.0, 51.0));
    in.push_back(Distribution1D::triangular(54.0, 55.0, 56.0));
    in.push_back(Distribution1D::uniform(7.0, 9.0));
    in.push_back(Distribution1D::triangular(55.0, 55.5, 56.0));
    in.push_back(Distribution1D::triangular(4990.0, 5000.0, 5010.0));
    in.push_back(Distribution1D::triangular(295.0, 300.0, 305.0));
    return in;
}

inline TestProblem flood_water_level() {
    ModelFunction f("flood_s", 8, [](std::span<const double> x) { return detail::flood_level(x); });
    f = f.with_gradient([](std::span<const double> x) {
        detail::flood_level(x); // parameter guards
        return detail::flood_level_gradient(x);
    });
    return TestProblem{std::move(f), flood_inputs(), nullptr, nullptr, nullptr};
}

// Annual cost for the river reach: certain damage above the crest, a smooth
// ramp below it, plus maintenance growing once the dyke exceeds eight
// meters. Continuous in the level and in H_d.
inline TestProblem flood_model() {
    ModelFunction f("flood", 8, [](std::span<const double> x) {
        double S = detail::flood_level(x);
        double Hd = x[4];
        double damage;
        if (S > 0.0) {
            damage = 1.0;
        } else {
            double t = -1000.0 / (S * S * S * S);
            damage = 0.2 + 0.8 * (1.0 - (t < -700.0 ? 0.0 : std::exp(t)));
        }
        return damage + std::max(Hd, 8.0) / 20.0;
    });
    f = f.with_gradient([](std::span<const double> x) {
        double S = detail::flood_level(x);
        auto gs = detail::flood_level_gradient(x);
        double slope = detail::flood_cost_slope(S);
        std::vector<double> g(8);
        for (int j = 0; j < 8; ++j) g[static_cast<std::size_t>(j)] = slope * gs[static_cast<std::size_t>(j)];
        if (x[4] > 8.0) g[4] += 1.0 / 20.0;
        return g;
    });
    std::vector<std::vector<double>> kinks(8);
    kinks[4] = {8.0};
    f = f.with_kinks(std::move(kinks));
    return TestProblem{std::move(f), flood_inputs(), nullptr, nullptr, nullptr};
}

} // namespace sobolow
