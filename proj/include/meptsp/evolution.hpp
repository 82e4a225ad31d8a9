#pragma once

/// @file evolution.hpp
/// @brief Generational MEP over path-function genomes.
///
/// Fitness of a chromosome is the best (lowest) training-set total tour
/// length achieved by any of the expressions it encodes. Each generation
/// keeps `elite_count` best individuals, fills a mating pool by binary
/// tournament, and breeds the pool pairwise with crossover and mutation. The
/// run's output is the expression that scored best on a held-out validation
/// set, sampled once per generation from the best training individual.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meptsp/expr.hpp"
#include "meptsp/random.hpp"
#include "meptsp/tsp.hpp"

namespace meptsp {

enum class CrossoverKind { OnePoint, TwoPoint, Uniform };

/// How a constructed tour is scored: as a closed cycle, or as the open path
/// without the closing edge.
enum class TourScoring { Cycle, OpenPath };

struct EvolutionConfig {
    std::size_t population_size = 300;
    std::size_t generations = 100;
    std::size_t chromosome_length = 40;
    double mutation_prob = 0.1;
    double crossover_prob = 0.9;
    CrossoverKind crossover_kind = CrossoverKind::TwoPoint;
    std::size_t elite_count = 1;
    double terminal_prob = 0.4;
    std::uint64_t rng_seed = 1;
    TourScoring scoring = TourScoring::Cycle;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const EvolutionConfig& cfg);

struct Individual {
    Chromosome chromosome;
    double fitness = 0.0;
    std::size_t best_expr_index = 0;
};

struct EvolvedHeuristic {
    Expression expression;
    double training_fitness = 0.0;
    double validation_fitness = 0.0;
    std::size_t generation_found = 0;
};

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double validation_best = 0.0; // best validation total seen so far
};

struct RunHistory {
    std::vector<GenerationRecord> records;
};

struct EvolutionResult {
    EvolvedHeuristic heuristic;
    RunHistory history;
};

/// Binary tournament: two uniform draws with replacement; the lower fitness
/// wins and ties go to the first draw.
std::size_t tournament_select(std::span<const Individual> population, Rng& rng);

/// Offspring pair. One-point cuts at p in [1, L-1] and swaps tails; two-point
/// picks distinct cuts p < q in [0, L] and swaps [p, q); uniform swaps each
/// position with probability 1/2.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, CrossoverKind kind,
                                            Rng& rng);

/// Each gene mutates with probability p_m. Gene 0 becomes a uniformly drawn
/// terminal; later genes a uniformly drawn symbol, with fresh argument
/// addresses when it is a function.
Chromosome mutate(const Chromosome& c, double p_m, Rng& rng);

/// Total tour length of `e` over `graphs`, each tour built from node 0.
double total_length(const Expression& e, std::span<const TiGraph> graphs,
                    TourScoring scoring = TourScoring::Cycle);

struct FitnessResult {
    double fitness = 0.0;
    std::size_t best_expr_index = 0;
};

/// Minimum over the decoded expressions of total_length(); non-finite totals
/// count as +infinity and ties go to the lowest gene index.
FitnessResult fitness(const Chromosome& c, std::span<const TiGraph> training,
                      TourScoring scoring = TourScoring::Cycle);

/// `on_generation`, if given, sees each record as it is produced.
EvolutionResult evolve(const EvolutionConfig& cfg, std::span<const TiGraph> training,
                       std::span<const TiGraph> validation, unsigned jobs = 1,
                       const std::function<void(const GenerationRecord&)>& on_generation = {});

std::string_view name(CrossoverKind kind) noexcept;
std::optional<CrossoverKind> crossover_from_name(std::string_view text) noexcept;
std::string_view name(TourScoring scoring) noexcept;
std::optional<TourScoring> scoring_from_name(std::string_view text) noexcept;

} // namespace meptsp
