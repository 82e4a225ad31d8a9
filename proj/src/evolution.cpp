#include "meptsp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "meptsp/parallel.hpp"

namespace meptsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kSymbolCount = kTerminalCount + kFunctionCount;

Gene random_gene(std::size_t position, Rng& rng) {
    if (position == 0)
        return Gene::terminal(kAllTerminals[uniform_index(rng, kTerminalCount)]);
    const std::size_t s = uniform_index(rng, kSymbolCount);
    if (s < kTerminalCount)
        return Gene::terminal(kAllTerminals[s]);
    const Function f = kAllFunctions[s - kTerminalCount];
    const auto a = static_cast<std::uint32_t>(uniform_index(rng, position));
    const auto b = arity(f) == 2 ? static_cast<std::uint32_t>(uniform_index(rng, position)) : 0u;
    return Gene::call(f, a, b);
}

// Lowest fitness, ties to the lowest index.
std::size_t best_index(std::span<const Individual> population) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i)
        if (population[i].fitness < population[best].fitness)
            best = i;
    return best;
}

Individual evaluated(Chromosome c, std::span<const TiGraph> training, TourScoring scoring) {
    const FitnessResult r = fitness(c, training, scoring);
    return Individual{std::move(c), r.fitness, r.best_expr_index};
}

} // namespace

void validate(const EvolutionConfig& cfg) {
    if (cfg.population_size < 2)
        throw std::invalid_argument("population_size must be at least 2");
    if (cfg.chromosome_length == 0)
        throw std::invalid_argument("chromosome_length must be positive");
    if (!(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0))
        throw std::invalid_argument("mutation_prob must lie in [0, 1]");
    if (!(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0))
        throw std::invalid_argument("crossover_prob must lie in [0, 1]");
    if (cfg.elite_count == 0 || cfg.elite_count >= cfg.population_size)
        throw std::invalid_argument("elite_count must lie in [1, population_size)");
    if (!(cfg.terminal_prob > 0.0 && cfg.terminal_prob < 1.0))
        throw std::invalid_argument("terminal_prob must lie in (0, 1)");
}

std::size_t tournament_select(std::span<const Individual> population, Rng& rng) {
    if (population.empty())
        throw std::invalid_argument("tournament over an empty population");
    const std::size_t first = uniform_index(rng, population.size());
    const std::size_t second = uniform_index(rng, population.size());
    return population[second].fitness < population[first].fitness ? second : first;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, CrossoverKind kind,
                                            Rng& rng) {
    if (a.size() != b.size())
        throw std::invalid_argument("crossover parents differ in length");
    const std::size_t len = a.size();
    std::vector<Gene> x(a.genes().begin(), a.genes().end());
    std::vector<Gene> y(b.genes().begin(), b.genes().end());

    switch (kind) {
    case CrossoverKind::OnePoint:
        if (len >= 2) {
            const std::size_t cut = 1 + uniform_index(rng, len - 1);
            std::swap_ranges(x.begin() + cut, x.end(), y.begin() + cut);
        }
        break;
    case CrossoverKind::TwoPoint: {
        std::size_t p = uniform_index(rng, len + 1);
        std::size_t q = uniform_index(rng, len);
        if (q >= p)
            ++q;
        if (q < p)
            std::swap(p, q);
        std::swap_ranges(x.begin() + p, x.begin() + q, y.begin() + p);
        break;
    }
    case CrossoverKind::Uniform:
        for (std::size_t i = 0; i < len; ++i)
            if (bernoulli(rng, 0.5))
                std::swap(x[i], y[i]);
        break;
    }
    return {Chromosome(std::move(x)), Chromosome(std::move(y))};
}

Chromosome mutate(const Chromosome& c, double p_m, Rng& rng) {
    std::vector<Gene> genes(c.genes().begin(), c.genes().end());
    for (std::size_t i = 0; i < genes.size(); ++i)
        if (bernoulli(rng, p_m))
            genes[i] = random_gene(i, rng);
    return Chromosome(std::move(genes));
}

double total_length(const Expression& e, std::span<const TiGraph> graphs, TourScoring scoring) {
    const PathFunction f(e);
    double total = 0.0;
    for (const TiGraph& g : graphs) {
        const Tour t = build_tour(g, f, 0);
        total += scoring == TourScoring::Cycle ? t.cycle_length : open_path_length(g, t.order);
    }
    return total;
}

FitnessResult fitness(const Chromosome& c, std::span<const TiGraph> training, TourScoring scoring) {
    if (training.empty())
        throw std::invalid_argument("fitness needs a non-empty training set");
    const std::vector<Expression> exprs = decode(c);
    std::vector<double> totals(exprs.size(), kInf);
    FitnessResult best{kInf, 0};
    for (std::size_t i = 0; i < exprs.size(); ++i) {
        // Structurally equal expressions build identical tours.
        const auto same = std::find(exprs.begin(), exprs.begin() + static_cast<std::ptrdiff_t>(i), exprs[i]);
        if (same != exprs.begin() + static_cast<std::ptrdiff_t>(i)) {
            totals[i] = totals[static_cast<std::size_t>(same - exprs.begin())];
        } else {
            totals[i] = total_length(exprs[i], training, scoring);
            if (!std::isfinite(totals[i]))
                totals[i] = kInf;
        }
        if (i == 0 || totals[i] < best.fitness)
            best = {totals[i], i};
    }
    return best;
}

EvolutionResult evolve(const EvolutionConfig& cfg, std::span<const TiGraph> training,
                       std::span<const TiGraph> validation, unsigned jobs,
                       const std::function<void(const GenerationRecord&)>& on_generation) {
    validate(cfg);
    if (training.empty() || validation.empty())
        throw std::invalid_argument("evolve needs non-empty training and validation sets");

    Rng rng(cfg.rng_seed);
    const std::size_t pop_size = cfg.population_size;

    std::vector<Chromosome> fresh;
    fresh.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i)
        fresh.push_back(random_chromosome(cfg.chromosome_length, cfg.terminal_prob, rng));

    const auto evaluate_all = [&](std::vector<Chromosome>& chromosomes, std::vector<Individual>& out) {
        std::vector<std::optional<Individual>> slots(chromosomes.size());
        parallel_for(chromosomes.size(), jobs, [&](std::size_t i) {
            slots[i] = evaluated(std::move(chromosomes[i]), training, cfg.scoring);
        });
        for (auto& s : slots)
            out.push_back(std::move(*s));
    };

    std::vector<Individual> population;
    population.reserve(pop_size);
    evaluate_all(fresh, population);

    std::optional<EvolvedHeuristic> best;
    RunHistory history;
    const auto record = [&](std::size_t generation) {
        const Individual& leader = population[best_index(population)];
        Expression expr = Expression::from_genes(leader.chromosome.genes(), leader.best_expr_index);
        double score = total_length(expr, validation, cfg.scoring);
        if (!std::isfinite(score))
            score = kInf;
        if (!best || score < best->validation_fitness)
            best = EvolvedHeuristic{std::move(expr), leader.fitness, score, generation};

        double sum = 0.0;
        for (const Individual& ind : population)
            sum += ind.fitness;
        GenerationRecord rec{generation, leader.fitness, sum / static_cast<double>(pop_size),
                             best->validation_fitness};
        history.records.push_back(rec);
        if (on_generation)
            on_generation(rec);
    };
    record(0);

    const std::size_t breed_count = pop_size - cfg.elite_count;
    for (std::size_t generation = 1; generation <= cfg.generations; ++generation) {
        std::vector<std::size_t> ranked(pop_size);
        std::iota(ranked.begin(), ranked.end(), std::size_t{0});
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t l, std::size_t r) {
            return population[l].fitness < population[r].fitness;
        });

        std::vector<Individual> next;
        next.reserve(pop_size);
        for (std::size_t e = 0; e < cfg.elite_count; ++e)
            next.push_back(population[ranked[e]]);

        // An odd pool gets one extra draw so parents always pair up; the
        // surplus child is discarded.
        std::vector<std::size_t> pool(breed_count + breed_count % 2);
        for (std::size_t& p : pool)
            p = tournament_select(population, rng);

        std::vector<Chromosome> children;
        children.reserve(pool.size());
        for (std::size_t k = 0; k < pool.size(); k += 2) {
            const Chromosome& mum = population[pool[k]].chromosome;
            const Chromosome& dad = population[pool[k + 1]].chromosome;
            auto [first, second] = bernoulli(rng, cfg.crossover_prob)
                                       ? crossover(mum, dad, cfg.crossover_kind, rng)
                                       : std::pair{mum, dad};
            children.push_back(mutate(first, cfg.mutation_prob, rng));
            children.push_back(mutate(second, cfg.mutation_prob, rng));
        }
        children.resize(breed_count, children.front());

        evaluate_all(children, next);
        population = std::move(next);
        record(generation);
    }

    return EvolutionResult{std::move(*best), std::move(history)};
}

std::string_view name(CrossoverKind kind) noexcept {
    switch (kind) {
    case CrossoverKind::OnePoint: return "one_point";
    case CrossoverKind::TwoPoint: return "two_point";
    case CrossoverKind::Uniform: return "uniform";
    }
    return "?";
}

std::optional<CrossoverKind> crossover_from_name(std::string_view text) noexcept {
    for (CrossoverKind k : {CrossoverKind::OnePoint, CrossoverKind::TwoPoint, CrossoverKind::Uniform})
        if (name(k) == text)
            return k;
    return std::nullopt;
}

std::string_view name(TourScoring scoring) noexcept {
    return scoring == TourScoring::Cycle ? "cycle" : "open_path";
}

std::optional<TourScoring> scoring_from_name(std::string_view text) noexcept {
    for (TourScoring s : {TourScoring::Cycle, TourScoring::OpenPath})
        if (name(s) == text)
            return s;
    return std::nullopt;
}

} // namespace meptsp
