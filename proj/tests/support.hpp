#pragma once

// Shared fixtures and slow-but-obvious reference implementations.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "meptsp/tsp.hpp"

namespace testing {

// (0,0), (0,3), (4,0), (4,3): d01=3 d02=4 d03=5 d12=5 d13=4 d23=3.
inline meptsp::TiGraph r4() {
    const std::vector<meptsp::Point> pts{{0, 0}, {0, 3}, {4, 0}, {4, 3}};
    return meptsp::TiGraph::from_points(pts);
}

inline double cycle_sum(const meptsp::TiGraph& g, const std::vector<std::size_t>& order) {
    double total = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i)
        total += g(order[i], order[(i + 1) % order.size()]);
    return total;
}

// Nearest neighbour written from scratch: scan, keep the strictly closer one.
inline std::vector<std::size_t> brute_nn(const meptsp::TiGraph& g, std::size_t start) {
    const std::size_t n = g.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> order{start};
    seen[start] = true;
    while (order.size() < n) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (seen[v])
                continue;
            if (pick == n || g(order.back(), v) < g(order.back(), pick))
                pick = v;
        }
        seen[pick] = true;
        order.push_back(pick);
    }
    return order;
}

// Optimal cycle by enumerating every permutation with node 0 first.
inline double brute_optimum(const meptsp::TiGraph& g) {
    std::vector<std::size_t> perm(g.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, cycle_sum(g, perm));
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return best;
}

inline bool is_permutation_of_n(std::vector<std::size_t> order, std::size_t n) {
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] != i)
            return false;
    return order.size() == n;
}

} // namespace testing
