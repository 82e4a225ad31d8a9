#include "meptsp/tsp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "meptsp/parallel.hpp"

namespace meptsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_node(const TiGraph& g, std::size_t node, const char* what) {
    if (node >= g.size())
        throw std::invalid_argument(std::string(what) + " " + std::to_string(node) +
                                    " is out of range for a graph of " + std::to_string(g.size()) +
                                    " nodes");
}

struct Aggregate {
    double min = kInf;
    double max = 0.0;
    double sum = 0.0;
    double prod = 1.0;
    bool empty = true;

    void add(double d) noexcept {
        min = d < min ? d : min;
        max = max < d ? d : max;
        sum += d;
        prod *= d;
        empty = false;
    }
    void finish() noexcept {
        if (empty)
            min = 0.0;
    }
};

} // namespace

TiGraph::TiGraph(std::size_t n, std::vector<double> dist) : n_(n), dist_(std::move(dist)) {
    if (n_ < 3)
        throw std::invalid_argument("a graph needs at least 3 nodes, got " + std::to_string(n_));
    if (dist_.size() != n_ * n_)
        throw std::invalid_argument("distance matrix has " + std::to_string(dist_.size()) +
                                    " entries, expected " + std::to_string(n_ * n_));
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 0.0)
            throw std::invalid_argument("non-zero diagonal at node " + std::to_string(i));
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d = (*this)(i, j);
            if (!std::isfinite(d) || d < 0.0)
                throw std::invalid_argument("distance (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") must be finite and non-negative");
            if (d != (*this)(j, i))
                throw std::invalid_argument("distance matrix is not symmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
        }
    }
}

TiGraph TiGraph::from_points(std::span<const Point> points) {
    const std::size_t n = points.size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    return TiGraph(n, std::move(dist));
}

double TiGraph::max_triangle_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k)
                worst = std::max(worst, (*this)(i, j) - (*this)(i, k) - (*this)(k, j));
    return worst;
}

double TiGraph::sampled_triangle_violation(std::size_t samples, Rng& rng) const {
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t i = uniform_index(rng, n_);
        const std::size_t j = uniform_index(rng, n_);
        const std::size_t k = uniform_index(rng, n_);
        worst = std::max(worst, (*this)(i, j) - (*this)(i, k) - (*this)(k, j));
    }
    return worst;
}

TiGraph random_ti_graph(std::size_t n_min, std::size_t n_max, Rng& rng) {
    if (n_min < 3)
        throw std::invalid_argument("random graphs need at least 3 nodes");
    if (n_max < n_min)
        throw std::invalid_argument("n_max must not be smaller than n_min");
    const std::size_t n = n_min + uniform_index(rng, n_max - n_min + 1);
    std::vector<Point> points(n);
    for (Point& p : points) {
        p.x = uniform_real(rng);
        p.y = uniform_real(rng);
    }
    return TiGraph::from_points(points);
}

TourState::TourState(const TiGraph& g, std::size_t start) : visited_(g.size(), 0) {
    require_node(g, start, "start node");
    path_.reserve(g.size());
    path_.push_back(start);
    visited_[start] = 1;
}

void TourState::append(const TiGraph& g, std::size_t node) {
    require_node(g, node, "node");
    if (visited_[node])
        throw std::invalid_argument("node " + std::to_string(node) + " is already on the path");
    length_ += g(path_.back(), node);
    path_.push_back(node);
    visited_[node] = 1;
}

FeatureVector node_features(const TiGraph& g, const TourState& state, std::size_t y2) {
    return node_features(g, state, y2, TerminalMask{}.set());
}

FeatureVector node_features(const TiGraph& g, const TourState& state, std::size_t y2,
                            const TerminalMask& needed) {
    require_node(g, y2, "candidate");
    if (state.visited(y2))
        throw std::invalid_argument("candidate " + std::to_string(y2) + " is already visited");

    const auto wants = [&](Terminal t) { return needed.test(static_cast<std::size_t>(t)); };
    const bool from_y1 = wants(Terminal::MinGY1) || wants(Terminal::MaxGY1) ||
                         wants(Terminal::SumGY1) || wants(Terminal::ProdGY1);
    const bool from_y2 = wants(Terminal::MinGY2) || wants(Terminal::MaxGY2) ||
                         wants(Terminal::SumGY2) || wants(Terminal::ProdGY2);

    const std::size_t y1 = state.last();
    Aggregate a1;
    Aggregate a2;
    if (from_y1 || from_y2) {
        const auto row1 = g.row(y1);
        const auto row2 = g.row(y2);
        const auto visited = state.visited_mask();
        for (std::size_t u = 0; u < g.size(); ++u) {
            if (visited[u] || u == y2)
                continue;
            if (from_y1)
                a1.add(row1[u]);
            if (from_y2)
                a2.add(row2[u]);
        }
        a1.finish();
        a2.finish();
    }

    FeatureVector fv;
    if (wants(Terminal::DY1Y2))
        fv[Terminal::DY1Y2] = g(y1, y2);
    if (wants(Terminal::Length))
        fv[Terminal::Length] = state.length_so_far();
    if (from_y1) {
        fv[Terminal::MinGY1] = a1.min;
        fv[Terminal::MaxGY1] = a1.max;
        fv[Terminal::SumGY1] = a1.sum;
        fv[Terminal::ProdGY1] = a1.prod;
    }
    if (from_y2) {
        fv[Terminal::MinGY2] = a2.min;
        fv[Terminal::MaxGY2] = a2.max;
        fv[Terminal::SumGY2] = a2.sum;
        fv[Terminal::ProdGY2] = a2.prod;
    }
    for (std::size_t t = 0; t < kTerminalCount; ++t)
        if (!needed.test(t))
            fv.values[t] = 0.0;
    return fv;
}

PathFunction::PathFunction(Expression e) : impl_(std::move(e)), needed_(std::get<0>(impl_).terminals_used()) {}

PathFunction::PathFunction(std::function<double(const FeatureVector&)> fn, TerminalMask needed)
    : impl_(std::move(fn)), needed_(needed) {}

double PathFunction::operator()(const FeatureVector& fv) const {
    if (const auto* e = std::get_if<Expression>(&impl_))
        return e->evaluate(fv);
    return std::get<1>(impl_)(fv);
}

double tour_length(const TiGraph& g, std::span<const std::size_t> order) {
    if (order.size() != g.size())
        throw std::invalid_argument("tour visits " + std::to_string(order.size()) + " nodes, graph has " +
                                    std::to_string(g.size()));
    std::vector<char> seen(g.size(), 0);
    for (std::size_t v : order) {
        if (v >= g.size() || seen[v])
            throw std::invalid_argument("tour is not a permutation of the graph's nodes");
        seen[v] = 1;
    }
    return open_path_length(g, order) + g(order.back(), order.front());
}

double open_path_length(const TiGraph& g, std::span<const std::size_t> order) {
    double total = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i)
        total += g(order[i - 1], order[i]);
    return total;
}

Tour build_tour(const TiGraph& g, const PathFunction& f, std::size_t start) {
    TourState state(g, start);
    const TerminalMask& needed = f.needed();
    while (!state.complete()) {
        std::size_t best = g.size();
        double best_score = kInf;
        for (std::size_t y2 = 0; y2 < g.size(); ++y2) {
            if (state.visited(y2))
                continue;
            double score = f(node_features(g, state, y2, needed));
            if (!std::isfinite(score))
                score = kInf;
            if (best == g.size() || score < best_score) {
                best = y2;
                best_score = score;
            }
        }
        state.append(g, best);
    }
    Tour tour{{state.path().begin(), state.path().end()}, 0.0};
    tour.cycle_length = tour_length(g, tour.order);
    return tour;
}

Tour run_heuristic(const TiGraph& g, const Heuristic& h, std::size_t start) {
    if (const auto* f = std::get_if<PathFunction>(&h))
        return build_tour(g, *f, start);
    switch (std::get<Baseline>(h)) {
    case Baseline::NearestNeighbor: return nearest_neighbor(g, start);
    case Baseline::MinimumSpanningTree: return mst_heuristic(g, start);
    }
    throw std::logic_error("unknown baseline");
}

Tour best_over_starts(const TiGraph& g, const Heuristic& h, unsigned jobs) {
    std::vector<Tour> tours(g.size());
    parallel_for(g.size(), jobs, [&](std::size_t s) { tours[s] = run_heuristic(g, h, s); });
    std::size_t best = 0;
    for (std::size_t s = 1; s < tours.size(); ++s)
        if (tours[s].cycle_length < tours[best].cycle_length)
            best = s;
    return std::move(tours[best]);
}

} // namespace meptsp
