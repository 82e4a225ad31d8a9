#pragma once

/// @file bench.hpp
/// @brief Experiment drivers behind the command-line tool: graph-set
/// generation, evolution runs, TSPLIB benchmarking and random-graph win
/// counts. Every function is deterministic in its inputs.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meptsp/evolution.hpp"
#include "meptsp/tsp.hpp"
#include "meptsp/tsplib.hpp"

namespace meptsp::bench {

enum class StartPolicy { Fixed0, BestOverAll };

std::string_view name(StartPolicy p) noexcept;
std::string_view name(tsplib::RoundingMode m) noexcept;

/// The path function evolved in the original MEP experiment.
inline constexpr std::string_view kPaperFormula =
    "(* (sum_g_y2) (+ (- (d_y1y2) (max (d_y1y2) (max_g_y1))) (d_y1y2)))";

struct NamedHeuristic {
    std::string name;
    Heuristic heuristic;
};

/// `paper-mep`, `nn` and `mst` are presets; anything else is a formula file.
NamedHeuristic resolve_heuristic(std::string_view spec);

Expression read_formula_file(const std::filesystem::path& path);

/// Flat `key=value` lines named after EvolutionConfig fields. '#' starts a
/// comment line. Unknown or repeated keys throw ParseError.
EvolutionConfig parse_config(std::string_view text);
std::string format_config(const EvolutionConfig& cfg);

/// Source of randomness for graph `index` of a set seeded with `seed`;
/// independent of how many graphs are drawn or in which order.
Rng graph_rng(std::uint64_t seed, std::size_t index);

std::vector<TiGraph> generate_graphs(std::size_t n_min, std::size_t n_max, std::size_t count,
                                     std::uint64_t seed);

std::vector<TiGraph> load_graph_set(const std::filesystem::path& path);
void save_graph_set(const std::filesystem::path& path, std::span<const TiGraph> graphs);

Tour apply(const TiGraph& g, const Heuristic& h, StartPolicy policy, unsigned jobs = 1);

struct BenchRow {
    std::string instance;
    std::string heuristic;
    tsplib::RoundingMode mode = tsplib::RoundingMode::Unrounded;
    StartPolicy start_policy = StartPolicy::BestOverAll;
    double length = 0.0;
    std::optional<double> optimum;
    std::optional<double> error_percent;
};

struct MeanRow {
    std::string heuristic;
    std::size_t instances = 0; // rows with a known optimum
    double mean_error_percent = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<MeanRow> means;
    std::vector<std::string> skipped; // "<file>: <reason>"
    std::vector<std::string> notes;
};

BenchRow run_instance(const NamedHeuristic& h, const tsplib::Instance& inst, tsplib::RoundingMode mode,
                      StartPolicy policy, unsigned jobs = 1);

/// One row per instance and heuristic ({formula, nn, mst}, duplicates
/// dropped), instances in file-name order, plus a mean-error row per heuristic.
BenchReport run_bench(const NamedHeuristic& formula, const std::filesystem::path& instance_dir,
                      tsplib::RoundingMode mode, StartPolicy policy, const tsplib::OptimaRegistry& optima,
                      unsigned jobs = 1);

void write_rows(std::ostream& out, std::span<const BenchRow> rows);
void write_report(std::ostream& out, const BenchReport& report);

struct WinCount {
    std::string graph_class;
    std::string opponent;
    std::size_t wins = 0;
    std::size_t total = 0;
};

/// Node-count range of a graph class: "G_200" is [3, 200], "10-50" is [10, 50].
std::pair<std::size_t, std::size_t> parse_graph_class(std::string_view spec);

/// Strict wins of `formula` against NN and MST on `count` random graphs.
std::array<WinCount, 2> run_compare(const NamedHeuristic& formula, std::string_view graph_class,
                                    std::size_t count, std::uint64_t seed, StartPolicy policy,
                                    unsigned jobs = 1);

void write_win_counts(std::ostream& out, std::span<const WinCount> counts);

/// Writes history.csv, best.formula and run.meta into out_dir.
EvolutionResult run_evolve(const EvolutionConfig& cfg, std::span<const TiGraph> training,
                           std::span<const TiGraph> validation, const std::filesystem::path& out_dir,
                           unsigned jobs = 1, std::ostream* progress = nullptr);

void write_history(std::ostream& out, const RunHistory& history);

struct ExactResult {
    std::string label;
    Tour tour;
};

/// Accepts a graph-set file or a TSPLIB instance.
std::vector<ExactResult> run_exact(const std::filesystem::path& path, tsplib::RoundingMode mode);

} // namespace meptsp::bench
