#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "sobolow/model.hpp"

namespace testsupport {

// Random polynomial with total degree <= max_degree and coefficients in
// [-1, 1], with its analytic gradient. Deterministic in the seed.
inline sobolow::ModelFunction random_polynomial(int d, int max_degree, std::uint64_t seed) {
    struct Term {
        double coeff;
        std::vector<int> expo;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    std::mt19937_64 rng(seed);
    auto u = [&rng]() { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0; };

    std::vector<int> expo(static_cast<std::size_t>(d), 0);
    // Enumerate exponent tuples with total degree <= max_degree.
    auto total = [&expo]() {
        int t = 0;
        for (int e : expo) t += e;
        return t;
    };
    while (true) {
        if (total() <= max_degree) terms->push_back({u(), expo});
        int j = 0;
        while (j < d) {
            if (++expo[static_cast<std::size_t>(j)] <= max_degree && total() <= max_degree) break;
            expo[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == d) break;
    }

    sobolow::ModelFunction f("random_poly", d, [terms](std::span<const double> x) {
        double s = 0;
        for (const auto& t : *terms) {
            double v = t.coeff;
            for (std::size_t j = 0; j < t.expo.size(); ++j)
                for (int e = 0; e < t.expo[j]; ++e) v *= x[j];
            s += v;
        }
        return s;
    });
    return f.with_gradient([terms, d](std::span<const double> x) {
        std::vector<double> g(static_cast<std::size_t>(d), 0.0);
        for (const auto& t : *terms) {
            for (std::size_t k = 0; k < t.expo.size(); ++k) {
                if (t.expo[k] == 0) continue;
                double v = t.coeff * t.expo[k];
                for (std::size_t j = 0; j < t.expo.size(); ++j) {
                    int e = t.expo[j] - (j == k ? 1 : 0);
                    for (int q = 0; q < e; ++q) v *= x[j];
                }
                g[k] += v;
            }
        }
        return g;
    });
}

} // namespace testsupport
