#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace sobolow {

// Dense row-major matrix. Just storage plus indexing; the heavy structure in
// this library is tridiagonal and lives elsewhere.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// Pairwise (cascade) summation. Error grows like log(n) ulps instead of n,
// and the result does not depend on how the caller batched the data.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean of empty range");
    return pairwise_sum(v) / static_cast<double>(v.size());
}

// splitmix64 step; used to derive independent streams from one base seed so
// that per-column / per-replicate generators never share state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull);
    splitmix64(s);
    return splitmix64(s);
}

// Canonical double strictly inside (0,1): 52 random bits centered in their
// cell, so the extremes 2^-53 and 1 - 2^-53 are exactly representable and
// quantile transforms stay finite.
inline double canonical_u01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 12) + 0.5) * 0x1p-52;
}

} // namespace sobolow
