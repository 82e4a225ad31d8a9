#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "meptsp/errors.hpp"
#include "meptsp/tsp.hpp"

namespace meptsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Prim's algorithm from `root`. parent[root] == root.
std::vector<std::size_t> prim_parents(const TiGraph& g, std::size_t root) {
    const std::size_t n = g.size();
    std::vector<double> key(n, kInf);
    std::vector<std::size_t> parent(n, root);
    std::vector<char> in_tree(n, 0);
    key[root] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && (u == n || key[v] < key[u]))
                u = v;
        in_tree[u] = 1;
        const auto row = g.row(u);
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && row[v] < key[v]) {
                key[v] = row[v];
                parent[v] = u;
            }
    }
    return parent;
}

} // namespace

Tour nearest_neighbor(const TiGraph& g, std::size_t start) {
    if (start >= g.size())
        throw std::invalid_argument("start node " + std::to_string(start) + " is out of range");
    const std::size_t n = g.size();
    std::vector<char> visited(n, 0);
    Tour tour;
    tour.order.reserve(n);
    tour.order.push_back(start);
    visited[start] = 1;
    while (tour.order.size() < n) {
        const auto row = g.row(tour.order.back());
        std::size_t next = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!visited[v] && (next == n || row[v] < row[next]))
                next = v;
        visited[next] = 1;
        tour.order.push_back(next);
    }
    tour.cycle_length = tour_length(g, tour.order);
    return tour;
}

Tour mst_heuristic(const TiGraph& g, std::size_t start) {
    if (start >= g.size())
        throw std::invalid_argument("start node " + std::to_string(start) + " is out of range");
    const std::size_t n = g.size();
    const auto parent = prim_parents(g, start);

    // Children in increasing node order, by construction of the scan.
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t v = 0; v < n; ++v)
        if (v != start)
            children[parent[v]].push_back(v);

    Tour tour;
    tour.order.reserve(n);
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        tour.order.push_back(u);
        for (auto it = children[u].rbegin(); it != children[u].rend(); ++it)
            stack.push_back(*it);
    }
    tour.cycle_length = tour_length(g, tour.order);
    return tour;
}

double mst_weight(const TiGraph& g) {
    const auto parent = prim_parents(g, 0);
    double total = 0.0;
    for (std::size_t v = 1; v < g.size(); ++v)
        total += g(v, parent[v]);
    return total;
}

Tour exact_tour(const TiGraph& g) {
    const std::size_t n = g.size();
    if (n > kExactTourMaxNodes)
        throw ResourceLimitError("exact_tour supports at most " + std::to_string(kExactTourMaxNodes) +
                                 " nodes, got " + std::to_string(n));

    // Node 0 is fixed as the start; bit k of a subset stands for node k + 1.
    const std::size_t m = n - 1;
    const std::size_t full = (std::size_t{1} << m) - 1;
    std::vector<double> cost((full + 1) * m, kInf);
    std::vector<std::uint8_t> prev((full + 1) * m, 0);
    const auto at = [m](std::size_t subset, std::size_t last) { return subset * m + last; };

    for (std::size_t k = 0; k < m; ++k)
        cost[at(std::size_t{1} << k, k)] = g(0, k + 1);

    for (std::size_t subset = 1; subset <= full; ++subset) {
        for (std::size_t last = 0; last < m; ++last) {
            if (!(subset & (std::size_t{1} << last)))
                continue;
            const double here = cost[at(subset, last)];
            if (here == kInf)
                continue;
            for (std::size_t next = 0; next < m; ++next) {
                if (subset & (std::size_t{1} << next))
                    continue;
                const std::size_t grown = subset | (std::size_t{1} << next);
                const double candidate = here + g(last + 1, next + 1);
                if (candidate < cost[at(grown, next)]) {
                    cost[at(grown, next)] = candidate;
                    prev[at(grown, next)] = static_cast<std::uint8_t>(last);
                }
            }
        }
    }

    std::size_t last = 0;
    double best = kInf;
    for (std::size_t k = 0; k < m; ++k) {
        const double total = cost[at(full, k)] + g(k + 1, 0);
        if (total < best) {
            best = total;
            last = k;
        }
    }

    std::vector<std::size_t> reversed;
    std::size_t subset = full;
    for (std::size_t step = 0; step < m; ++step) {
        reversed.push_back(last + 1);
        const std::size_t before = prev[at(subset, last)];
        subset &= ~(std::size_t{1} << last);
        last = before;
    }
    Tour tour;
    tour.order.push_back(0);
    tour.order.insert(tour.order.end(), reversed.rbegin(), reversed.rend());
    tour.cycle_length = tour_length(g, tour.order);
    return tour;
}

} // namespace meptsp
