#pragma once

/// @file tsp.hpp
/// @brief Symmetric TSP instances, the ten path-function features, greedy
/// tour construction driven by a path function, and reference heuristics.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "meptsp/expr.hpp"
#include "meptsp/random.hpp"

namespace meptsp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Complete undirected graph with a symmetric, zero-diagonal, non-negative
/// distance matrix. The triangle inequality is not enforced on construction
/// (rounded TSPLIB metrics break it by up to one unit); see
/// max_triangle_violation().
class TiGraph {
  public:
    /// `dist` is row-major n*n. Throws std::invalid_argument if n < 3 or the
    /// matrix is not symmetric, non-negative, finite with a zero diagonal.
    TiGraph(std::size_t n, std::vector<double> dist);

    static TiGraph from_points(std::span<const Point> points);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept { return {dist_.data() + i * n_, n_}; }

    /// max over all triples of d(i,j) - d(i,k) - d(k,j), clamped at 0.
    double max_triangle_violation() const;
    /// Same, over `samples` uniformly drawn triples.
    double sampled_triangle_violation(std::size_t samples, Rng& rng) const;

    friend bool operator==(const TiGraph&, const TiGraph&) = default;

  private:
    std::size_t n_;
    std::vector<double> dist_;
};

/// n uniform in [n_min, n_max], points uniform in the unit square, Euclidean
/// distances.
TiGraph random_ti_graph(std::size_t n_min, std::size_t n_max, Rng& rng);

/// Partial path under construction.
class TourState {
  public:
    TourState(const TiGraph& g, std::size_t start);

    void append(const TiGraph& g, std::size_t node);

    std::span<const std::size_t> path() const noexcept { return path_; }
    std::size_t last() const noexcept { return path_.back(); }
    bool visited(std::size_t node) const noexcept { return visited_[node] != 0; }
    std::span<const char> visited_mask() const noexcept { return visited_; }
    double length_so_far() const noexcept { return length_; }
    bool complete() const noexcept { return path_.size() == visited_.size(); }

  private:
    std::vector<std::size_t> path_;
    std::vector<char> visited_;
    double length_ = 0.0;
};

/// The ten terminal values for moving from state.last() to the unvisited
/// candidate y2. Aggregates run over the pool of unvisited nodes other than
/// y2; an empty pool yields min = max = sum = 0 and prod = 1.
FeatureVector node_features(const TiGraph& g, const TourState& state, std::size_t y2);

/// Features restricted to `needed`; the other entries are left at zero. The
/// values that are computed are bit-identical to node_features().
FeatureVector node_features(const TiGraph& g, const TourState& state, std::size_t y2,
                            const TerminalMask& needed);

/// A scoring rule for candidate next nodes: lower is better.
class PathFunction {
  public:
    PathFunction(Expression e); // NOLINT(google-explicit-constructor)
    PathFunction(std::function<double(const FeatureVector&)> fn, TerminalMask needed);

    double operator()(const FeatureVector& fv) const;
    const TerminalMask& needed() const noexcept { return needed_; }

  private:
    std::variant<Expression, std::function<double(const FeatureVector&)>> impl_;
    TerminalMask needed_;
};

struct Tour {
    std::vector<std::size_t> order;
    double cycle_length = 0.0; // includes the closing edge back to order[0]
};

/// Cycle length of `order`. Throws std::invalid_argument unless `order` is a
/// permutation of 0..n-1.
double tour_length(const TiGraph& g, std::span<const std::size_t> order);

/// Same as tour_length() minus the closing edge.
double open_path_length(const TiGraph& g, std::span<const std::size_t> order);

/// Greedy construction: from `start`, repeatedly append the unvisited node
/// with the lowest score. NaN and infinite scores rank as +infinity; ties go
/// to the lowest node index.
Tour build_tour(const TiGraph& g, const PathFunction& f, std::size_t start);

Tour nearest_neighbor(const TiGraph& g, std::size_t start);

/// Prim's MST grown from `start` (ties to the lowest index), toured by a
/// preorder walk that visits children in increasing node order.
Tour mst_heuristic(const TiGraph& g, std::size_t start);

double mst_weight(const TiGraph& g);

inline constexpr std::size_t kExactTourMaxNodes = 18;

/// Held-Karp. Throws ResourceLimitError above kExactTourMaxNodes nodes.
Tour exact_tour(const TiGraph& g);

enum class Baseline { NearestNeighbor, MinimumSpanningTree };

using Heuristic = std::variant<PathFunction, Baseline>;

Tour run_heuristic(const TiGraph& g, const Heuristic& h, std::size_t start);

/// Shortest cycle over all start nodes; ties to the lowest start. Starts are
/// spread over `jobs` threads without affecting the result.
Tour best_over_starts(const TiGraph& g, const Heuristic& h, unsigned jobs = 1);

/// `tigraphs v1 count=<k>` header, then per graph `n=<n>` and the strict upper
/// triangle, one row per node. Values use shortest round-trip decimal form.
void write_graph_set(std::ostream& out, std::span<const TiGraph> graphs);
std::vector<TiGraph> read_graph_set(std::istream& in);

} // namespace meptsp
