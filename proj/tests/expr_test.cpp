#include <doctest.h>

#include <cmath>
#include <limits>

#include "meptsp/errors.hpp"
#include "meptsp/expr.hpp"

using namespace meptsp;

namespace {

using T = Terminal;
using F = Function;

Expression L(T t) { return Expression::leaf(t); }

Expression evolved_formula() {
    const auto d = L(T::DY1Y2);
    return Expression::apply(
        F::Mul, L(T::SumGY2),
        Expression::apply(F::Add, Expression::apply(F::Sub, d, Expression::apply(F::Max, d, L(T::MaxGY1))), d));
}

FeatureVector features(std::initializer_list<std::pair<T, double>> values) {
    FeatureVector fv;
    for (auto [t, v] : values)
        fv[t] = v;
    return fv;
}

} // namespace

TEST_CASE("terminal and function names round-trip") {
    for (T t : kAllTerminals)
        CHECK(terminal_from_name(name(t)) == t);
    for (F f : kAllFunctions)
        CHECK(function_from_name(name(f)) == f);
    CHECK(arity(F::Cos) == 1);
    CHECK(arity(F::Sin) == 1);
    CHECK(arity(F::Div) == 2);
    CHECK_FALSE(terminal_from_name("x").has_value());
}

TEST_CASE("chromosome structural rules") {
    CHECK_THROWS_AS(Chromosome({}), std::invalid_argument);
    CHECK_THROWS_AS(Chromosome({Gene::call(F::Cos, 0)}), std::invalid_argument);
    CHECK_THROWS_AS(Chromosome({Gene::terminal(T::DY1Y2), Gene::call(F::Add, 0, 1)}), std::invalid_argument);
    CHECK_NOTHROW(Chromosome({Gene::terminal(T::DY1Y2), Gene::call(F::Add, 0, 0)}));
    Gene odd = Gene::call(F::Sin, 0);
    odd.args[1] = 3;
    CHECK(structural_defect(std::vector<Gene>{Gene::terminal(T::Length), odd}).has_value());
}

TEST_CASE("random_chromosome") {
    Rng rng(7);
    CHECK_THROWS_AS(random_chromosome(0, 0.5, rng), std::invalid_argument);

    for (int s = 0; s < 50; ++s) {
        const Chromosome one = random_chromosome(1, 0.5, rng);
        CHECK(one[0].is_terminal());
    }

    const Chromosome forty = random_chromosome(40, 0.5, rng);
    CHECK(forty.size() == 40);
    CHECK_FALSE(structural_defect(forty.genes()).has_value());

    Rng seeded(1);
    const Chromosome six = random_chromosome(6, 0.5, seeded);
    for (std::size_t i = 0; i < six.size(); ++i) {
        if (six[i].is_terminal())
            continue;
        const F f = std::get<F>(six[i].symbol);
        for (std::size_t k = 0; k < arity(f); ++k)
            CHECK(six[i].args[k] < i);
    }
}

TEST_CASE("decode: generic six-gene example") {
    // a b +(1,2) c d *(4,5), addresses 1-based in the original notation.
    const T a = T::DY1Y2, b = T::MinGY1, c = T::MinGY2, d = T::MaxGY1;
    const Chromosome chr({Gene::terminal(a), Gene::terminal(b), Gene::call(F::Add, 0, 1), Gene::terminal(c),
                          Gene::terminal(d), Gene::call(F::Mul, 3, 4)});
    const auto e = decode(chr);
    REQUIRE(e.size() == 6);
    CHECK(e[0] == L(a));
    CHECK(e[1] == L(b));
    CHECK(e[2] == Expression::apply(F::Add, L(a), L(b)));
    CHECK(e[3] == L(c));
    CHECK(e[4] == L(d));
    CHECK(e[5] == Expression::apply(F::Mul, L(c), L(d)));
    CHECK(e[5] != Expression::apply(F::Add, L(c), L(d)));
}

TEST_CASE("decode: path-function example") {
    const Chromosome chr({Gene::terminal(T::DY1Y2), Gene::terminal(T::MinGY1), Gene::call(F::Add, 0, 1),
                          Gene::terminal(T::SumGY2), Gene::call(F::Mul, 1, 3)});
    const auto f = decode(chr);
    REQUIRE(f.size() == 5);
    CHECK(f[2] == Expression::apply(F::Add, L(T::DY1Y2), L(T::MinGY1)));
    CHECK(f[4] == Expression::apply(F::Mul, L(T::MinGY1), L(T::SumGY2)));
    CHECK(format_formula(f[4]) == "(* (min_g_y1) (sum_g_y2))");
}

TEST_CASE("decode: all terminals") {
    const Chromosome chr({Gene::terminal(T::Length), Gene::terminal(T::ProdGY1), Gene::terminal(T::Length)});
    const auto e = decode(chr);
    REQUIRE(e.size() == 3);
    for (const auto& x : e)
        CHECK(x.nodes().size() == 1);
    CHECK(e[0] == e[2]);
}

TEST_CASE("shared subtrees are stored once") {
    // g_k = g_{k-1} + g_{k-1}: the tree doubles each step, the DAG grows by one.
    std::vector<Gene> genes{Gene::terminal(T::DY1Y2)};
    for (std::uint32_t i = 1; i < 40; ++i)
        genes.push_back(Gene::call(F::Add, i - 1, i - 1));
    const auto e = decode(Chromosome(genes));
    CHECK(e.back().nodes().size() == 40);
    CHECK(e.back().tree_size() == doctest::Approx(std::ldexp(1.0, 40) - 1));
    FeatureVector fv;
    fv[T::DY1Y2] = 1.0;
    CHECK(e.back().evaluate(fv) == std::ldexp(1.0, 39));
}

TEST_CASE("evaluate") {
    CHECK(L(T::DY1Y2).evaluate(features({{T::DY1Y2, 3}})) == 3.0);

    const auto fv = features({{T::DY1Y2, 3}, {T::MaxGY1, 5}, {T::SumGY2, 9}, {T::Length, 123}});
    CHECK(evolved_formula().evaluate(fv) == 9.0);

    const auto ratio = Expression::apply(F::Div, L(T::DY1Y2), L(T::Length));
    CHECK(ratio.evaluate(features({{T::DY1Y2, 2}, {T::Length, 0}})) == std::numeric_limits<double>::infinity());
    CHECK(ratio.evaluate(features({{T::DY1Y2, -2}, {T::Length, 0}})) == -std::numeric_limits<double>::infinity());
    CHECK(std::isnan(ratio.evaluate(features({}))));

    const auto trig = Expression::apply(F::Sin, Expression::apply(F::Cos, L(T::Length)));
    CHECK(trig.evaluate(features({{T::Length, 0.5}})) == std::sin(std::cos(0.5)));

    const auto lo = Expression::apply(F::Min, L(T::MinGY1), L(T::MaxGY1));
    const auto hi = Expression::apply(F::Max, L(T::MinGY1), L(T::MaxGY1));
    CHECK(lo.evaluate(features({{T::MinGY1, 2}, {T::MaxGY1, 7}})) == 2.0);
    CHECK(hi.evaluate(features({{T::MinGY1, 2}, {T::MaxGY1, 7}})) == 7.0);
}

TEST_CASE("terminals_used") {
    const auto mask = evolved_formula().terminals_used();
    CHECK(mask.count() == 3);
    CHECK(mask.test(static_cast<std::size_t>(T::DY1Y2)));
    CHECK(mask.test(static_cast<std::size_t>(T::MaxGY1)));
    CHECK(mask.test(static_cast<std::size_t>(T::SumGY2)));
}

TEST_CASE("format and parse") {
    CHECK(format_formula(L(T::Length)) == "(length)");
    CHECK(format_formula(Expression::apply(F::Add, L(T::DY1Y2), L(T::Length))) == "(+ (d_y1y2) (length))");

    const std::string text = "(* (sum_g_y2) (+ (- (d_y1y2) (max (d_y1y2) (max_g_y1))) (d_y1y2)))";
    CHECK(parse_formula(text) == evolved_formula());
    CHECK(format_formula(parse_formula(text)) == text);

    CHECK(parse_formula("(d_y1y2)") == L(T::DY1Y2));
    CHECK(parse_formula("# header\n  ( +\n(d_y1y2)\t(length) )\n") ==
          Expression::apply(F::Add, L(T::DY1Y2), L(T::Length)));
}

TEST_CASE("parse errors carry a position") {
    const auto fails_at = [](std::string_view text) -> std::size_t {
        try {
            parse_formula(text);
        } catch (const ParseError& e) {
            return e.location();
        }
        FAIL("no error for " << text);
        return 0;
    };
    CHECK(fails_at("(+ (d_y1y2))") == 11);
    CHECK(fails_at("(foo)") == 1);
    fails_at("(+ (d_y1y2) (length)");
    fails_at("(d_y1y2))");
    fails_at("");
    fails_at("(cos (length) (length))");
    fails_at("d_y1y2");
}

TEST_CASE("parse(format(e)) == e for random expressions") {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const Chromosome c = random_chromosome(1 + uniform_index(rng, 40), 0.3, rng);
        const auto exprs = decode(c);
        const Expression& e = exprs[uniform_index(rng, exprs.size())];
        const Expression back = parse_formula(format_formula(e));
        REQUIRE(back == e);
    }
}
