#include <doctest.h>

#include <array>
#include <map>

#include "meptsp/evolution.hpp"
#include "support.hpp"

using namespace meptsp;
using testing::r4;

namespace {

using T = Terminal;
using F = Function;

std::vector<Individual> with_fitness(std::initializer_list<double> values) {
    std::vector<Individual> pop;
    for (double v : values)
        pop.push_back(Individual{Chromosome({Gene::terminal(T::DY1Y2)}), v, 0});
    return pop;
}

std::vector<TiGraph> graphs(std::uint64_t seed, std::size_t count, std::size_t n_max) {
    Rng rng(seed);
    std::vector<TiGraph> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(random_ti_graph(3, n_max, rng));
    return out;
}

} // namespace

TEST_CASE("config validation") {
    EvolutionConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    CHECK(cfg.crossover_kind == CrossoverKind::TwoPoint);
    CHECK(cfg.elite_count == 1);
    cfg.elite_count = cfg.population_size;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.mutation_prob = 1.5;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.terminal_prob = 1.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("tournament_select") {
    Rng rng(1);
    CHECK_THROWS_AS(tournament_select(std::vector<Individual>{}, rng), std::invalid_argument);

    const auto single = with_fitness({3.0});
    for (int i = 0; i < 10; ++i)
        CHECK(tournament_select(single, rng) == 0);

    // Replay the two draws to check the winner rule on [5, 1].
    const auto pair = with_fitness({5.0, 1.0});
    for (int i = 0; i < 50; ++i) {
        Rng a(static_cast<std::uint64_t>(i));
        Rng b(static_cast<std::uint64_t>(i));
        const std::size_t first = uniform_index(b, 2);
        const std::size_t second = uniform_index(b, 2);
        const std::size_t expected = (first == 1 || second == 1) ? 1 : 0;
        CHECK(tournament_select(pair, a) == expected);
    }

    // Ties go to the first draw.
    const auto tied = with_fitness({2.0, 2.0, 2.0});
    for (int i = 0; i < 50; ++i) {
        Rng a(static_cast<std::uint64_t>(i));
        Rng b(static_cast<std::uint64_t>(i));
        const std::size_t first = uniform_index(b, 3);
        CHECK(tournament_select(tied, a) == first);
    }
}

TEST_CASE("tournament selection frequencies") {
    // With fitness ranks 1..4, P(pick rank k) = (2(4-k)+1)/16 over the 16
    // equally likely draw pairs: 7/16, 5/16, 3/16, 1/16.
    std::array<double, 4> expected{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            expected[std::min(i, j)] += 1.0 / 16.0;
    CHECK(expected[0] == 7.0 / 16);
    CHECK(expected[3] == 1.0 / 16);

    const auto pop = with_fitness({1.0, 2.0, 3.0, 4.0});
    Rng rng(99);
    std::array<int, 4> counts{};
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        ++counts[tournament_select(pop, rng)];
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(counts[k] / double(draws) == doctest::Approx(expected[k]).epsilon(0.15));
    CHECK(counts[0] > counts[1]);
    CHECK(counts[1] > counts[2]);
    CHECK(counts[2] > counts[3]);
}

TEST_CASE("crossover keeps genomes valid") {
    Rng rng(17);
    for (CrossoverKind kind : {CrossoverKind::OnePoint, CrossoverKind::TwoPoint, CrossoverKind::Uniform}) {
        for (int i = 0; i < 10000; ++i) {
            const std::size_t len = 1 + uniform_index(rng, 40);
            const Chromosome a = random_chromosome(len, 0.4, rng);
            const Chromosome b = random_chromosome(len, 0.4, rng);
            auto [x, y] = crossover(a, b, kind, rng);
            REQUIRE_FALSE(structural_defect(x.genes()).has_value());
            REQUIRE_FALSE(structural_defect(y.genes()).has_value());
            // Every position of a child comes from one parent, the sibling holds the other.
            for (std::size_t k = 0; k < len; ++k) {
                const bool kept = x[k] == a[k] && y[k] == b[k];
                const bool swapped = x[k] == b[k] && y[k] == a[k];
                REQUIRE((kept || swapped));
            }
        }
    }
    CHECK_THROWS_AS(crossover(random_chromosome(3, 0.4, rng), random_chromosome(4, 0.4, rng),
                              CrossoverKind::TwoPoint, rng),
                    std::invalid_argument);
}

TEST_CASE("one-point cut never leaves a parent whole") {
    const std::vector<Gene> ga{Gene::terminal(T::DY1Y2), Gene::terminal(T::DY1Y2), Gene::terminal(T::DY1Y2)};
    const std::vector<Gene> gb{Gene::terminal(T::Length), Gene::terminal(T::Length), Gene::terminal(T::Length)};
    const Chromosome a(ga), b(gb);
    Rng rng(5);
    std::map<std::size_t, int> cuts;
    for (int i = 0; i < 1000; ++i) {
        auto [x, y] = crossover(a, b, CrossoverKind::OnePoint, rng);
        CHECK(x[0] == a[0]);
        CHECK(x[2] == b[2]);
        std::size_t cut = 0;
        while (cut < 3 && x[cut] == a[cut])
            ++cut;
        ++cuts[cut];
    }
    CHECK(cuts.size() == 2);
    CHECK(cuts.count(1) == 1);
    CHECK(cuts.count(2) == 1);
}

TEST_CASE("uniform crossover that swaps everything returns (B, A)") {
    Rng rng(23);
    const Chromosome a = random_chromosome(1, 0.4, rng);
    const Chromosome b = random_chromosome(1, 0.4, rng);
    // With one gene the mask is a single coin; find a seed where it swaps.
    bool seen = false;
    for (std::uint64_t s = 0; s < 20 && !seen; ++s) {
        Rng r(s);
        auto [x, y] = crossover(a, b, CrossoverKind::Uniform, r);
        if (x == b) {
            CHECK(y == a);
            seen = true;
        }
    }
    CHECK(seen);
}

TEST_CASE("mutate") {
    Rng rng(31);
    const Chromosome c = random_chromosome(40, 0.4, rng);
    CHECK(mutate(c, 0.0, rng) == c);

    for (int i = 0; i < 200; ++i) {
        const Chromosome one = mutate(random_chromosome(1, 0.4, rng), 1.0, rng);
        CHECK(one[0].is_terminal());
    }

    for (int i = 0; i < 10000; ++i) {
        const Chromosome m = mutate(random_chromosome(1 + uniform_index(rng, 40), 0.4, rng), 0.5, rng);
        REQUIRE_FALSE(structural_defect(m.genes()).has_value());
    }

    // p_m = 1 rewrites every gene, so positions > 0 see functions too.
    bool saw_function = false;
    for (int i = 0; i < 20; ++i)
        for (const Gene& g : mutate(c, 1.0, rng).genes())
            saw_function = saw_function || !g.is_terminal();
    CHECK(saw_function);
}

TEST_CASE("fitness") {
    const std::vector<TiGraph> one{r4()};
    const FitnessResult nn = fitness(Chromosome({Gene::terminal(T::DY1Y2)}), one);
    CHECK(nn.fitness == 14);
    CHECK(nn.best_expr_index == 0);

    CHECK_THROWS_AS(fitness(Chromosome({Gene::terminal(T::DY1Y2)}), std::vector<TiGraph>{}),
                    std::invalid_argument);

    const Chromosome same({Gene::terminal(T::Length), Gene::terminal(T::Length), Gene::terminal(T::Length)});
    CHECK(fitness(same, one).best_expr_index == 0);

    // Open-path scoring drops the closing edge: 3 + 4 + 3.
    CHECK(fitness(Chromosome({Gene::terminal(T::DY1Y2)}), one, TourScoring::OpenPath).fitness == 10);
}

TEST_CASE("fitness is the minimum over encoded expressions") {
    const auto train = graphs(12, 8, 25);
    Rng rng(77);
    const auto formula = parse_formula("(* (sum_g_y2) (+ (- (d_y1y2) (max (d_y1y2) (max_g_y1))) (d_y1y2)))");
    for (int trial = 0; trial < 10; ++trial) {
        const Chromosome base = random_chromosome(33, 0.4, rng);
        std::vector<Gene> genes(base.genes().begin(), base.genes().end());
        // Append the formula's nodes; they only reference each other.
        const auto offset = static_cast<std::uint32_t>(genes.size());
        for (Gene g : formula.nodes()) {
            if (!g.is_terminal()) {
                g.args[0] += offset;
                if (arity(std::get<F>(g.symbol)) == 2)
                    g.args[1] += offset;
            }
            genes.push_back(g);
        }
        const Chromosome with(genes);
        CHECK(decode(with).back() == formula);
        CHECK(fitness(with, train).fitness <= fitness(base, train).fitness);

        double expected = std::numeric_limits<double>::infinity();
        std::size_t expected_index = 0;
        const auto exprs = decode(with);
        for (std::size_t i = 0; i < exprs.size(); ++i) {
            const double total = total_length(exprs[i], train);
            if (std::isfinite(total) && total < expected) {
                expected = total;
                expected_index = i;
            }
        }
        const FitnessResult r = fitness(with, train);
        CHECK(r.fitness == expected);
        CHECK(r.best_expr_index == expected_index);
    }
}

TEST_CASE("fitness ignores training-set order") {
    auto train = graphs(40, 6, 20);
    Rng rng(41);
    const Chromosome c = random_chromosome(40, 0.4, rng);
    const double forward = fitness(c, train).fitness;
    std::reverse(train.begin(), train.end());
    CHECK(fitness(c, train).fitness == doctest::Approx(forward).epsilon(1e-12));
}

TEST_CASE("evolve: zero generations") {
    const auto train = graphs(1, 5, 12);
    const auto valid = graphs(2, 5, 12);
    EvolutionConfig cfg;
    cfg.population_size = 20;
    cfg.generations = 0;
    cfg.chromosome_length = 10;
    const EvolutionResult r = evolve(cfg, train, valid);
    CHECK(r.history.records.size() == 1);
    CHECK(r.heuristic.generation_found == 0);
    CHECK(r.heuristic.validation_fitness == total_length(r.heuristic.expression, valid));
}

TEST_CASE("evolve: determinism, elitism and validation bookkeeping") {
    const auto train = graphs(3, 10, 20);
    const auto valid = graphs(4, 10, 40);
    EvolutionConfig cfg;
    cfg.population_size = 40;
    cfg.generations = 12;
    cfg.chromosome_length = 20;
    cfg.rng_seed = 5;

    const EvolutionResult a = evolve(cfg, train, valid, 1);
    const EvolutionResult b = evolve(cfg, train, valid, 1);
    const EvolutionResult c = evolve(cfg, train, valid, 4);
    CHECK(a.heuristic.expression == b.heuristic.expression);
    CHECK(a.heuristic.expression == c.heuristic.expression);
    REQUIRE(a.history.records.size() == cfg.generations + 1);
    for (std::size_t g = 0; g < a.history.records.size(); ++g) {
        const auto& x = a.history.records[g];
        const auto& z = c.history.records[g];
        CHECK(x.generation == g);
        CHECK(x.best_fitness == z.best_fitness);
        CHECK(x.mean_fitness == z.mean_fitness);
        CHECK(x.validation_best == z.validation_best);
        CHECK(x.mean_fitness >= x.best_fitness);
        if (g > 0) {
            CHECK(x.best_fitness <= a.history.records[g - 1].best_fitness);
            CHECK(x.validation_best <= a.history.records[g - 1].validation_best);
        }
    }
    CHECK(a.heuristic.validation_fitness == total_length(a.heuristic.expression, valid));
    CHECK(a.heuristic.validation_fitness == a.history.records.back().validation_best);

    cfg.rng_seed = 6;
    const EvolutionResult other = evolve(cfg, train, valid, 1);
    CHECK(other.history.records.back().mean_fitness != a.history.records.back().mean_fitness);
}

TEST_CASE("evolve: no variation keeps the elite fixed") {
    const auto train = graphs(8, 6, 15);
    EvolutionConfig cfg;
    cfg.population_size = 15;
    cfg.generations = 8;
    cfg.chromosome_length = 12;
    cfg.crossover_prob = 0.0;
    cfg.mutation_prob = 0.0;
    cfg.elite_count = 2;
    const EvolutionResult r = evolve(cfg, train, train);
    for (const auto& rec : r.history.records)
        CHECK(rec.best_fitness == r.history.records.front().best_fitness);
}

TEST_CASE("crossover and scoring names") {
    for (CrossoverKind k : {CrossoverKind::OnePoint, CrossoverKind::TwoPoint, CrossoverKind::Uniform})
        CHECK(crossover_from_name(name(k)) == k);
    CHECK(scoring_from_name("open_path") == TourScoring::OpenPath);
    CHECK_FALSE(crossover_from_name("three_point").has_value());
}
