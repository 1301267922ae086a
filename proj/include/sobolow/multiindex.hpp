#pragma once

#include <compare>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobolow/errors.hpp"

namespace sobolow {

// Multi-index over the tensor basis: orders[j] is the per-dimension
// eigenfunction order, 0 meaning the constant.
struct MultiIndex {
    std::vector<int> orders;

    int dim() const { return static_cast<int>(orders.size()); }
    int order(int j) const { return orders[static_cast<std::size_t>(j)]; }
    bool active(int j) const { return order(j) > 0; }

    int total_active() const {
        int c = 0;
        for (int o : orders) c += (o > 0);
        return c;
    }

    std::vector<int> active_set() const {
        std::vector<int> s;
        for (int j = 0; j < dim(); ++j)
            if (active(j)) s.push_back(j);
        return s;
    }

    std::string to_string() const {
        std::ostringstream os;
        for (int j = 0; j < dim(); ++j) os << (j ? "," : "") << orders[static_cast<std::size_t>(j)];
        return os.str();
    }

    static MultiIndex unit(int d, int i, int ell) {
        MultiIndex m{std::vector<int>(static_cast<std::size_t>(d), 0)};
        m.orders[static_cast<std::size_t>(i)] = ell;
        return m;
    }

    auto operator<=>(const MultiIndex&) const = default;
};

// Index family behind the total-index lower bound for variable i: the pure
// mode {r at i} plus one interaction per companion {r at i, r at j}.
inline std::vector<MultiIndex> total_index_set(int d, int i, int eig_index = 1) {
    if (i < 0 || i >= d) throw std::invalid_argument("total_index_set: variable out of range");
    if (eig_index < 1) throw std::invalid_argument("total_index_set: eigenvalue index must be >= 1");
    std::vector<MultiIndex> out;
    out.push_back(MultiIndex::unit(d, i, eig_index));
    for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        MultiIndex m = MultiIndex::unit(d, i, eig_index);
        m.orders[static_cast<std::size_t>(j)] = eig_index;
        out.push_back(m);
    }
    return out;
}

// All indices supported exactly on the subset I with per-dimension orders in
// 1..max_order; these truncate the closed-index (non-total) Parseval sum.
inline std::vector<MultiIndex> pattern_set(int d, const std::vector<int>& I, int max_order) {
    if (I.empty()) throw std::invalid_argument("pattern_set: empty subset");
    for (int j : I)
        if (j < 0 || j >= d) throw std::invalid_argument("pattern_set: variable out of range");
    std::vector<MultiIndex> out;
    std::vector<int> counter(I.size(), 1);
    while (true) {
        MultiIndex m{std::vector<int>(static_cast<std::size_t>(d), 0)};
        for (std::size_t k = 0; k < I.size(); ++k) m.orders[static_cast<std::size_t>(I[k])] = counter[k];
        out.push_back(std::move(m));
        std::size_t p = 0;
        while (p < counter.size() && ++counter[p] > max_order) counter[p++] = 1;
        if (p == counter.size()) break;
    }
    return out;
}

} // namespace sobolow
