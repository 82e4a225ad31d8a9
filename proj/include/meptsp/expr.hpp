#pragma once

/// @file expr.hpp
/// @brief Linear MEP genomes and the expressions they encode.
///
/// A chromosome is a fixed-length sequence of genes. Each gene is either a
/// terminal (one of the ten tour features) or a function whose arguments are
/// addresses of strictly earlier genes. Every gene position therefore roots
/// a finite expression, so a chromosome of length L encodes L candidate path
/// functions at once.

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "meptsp/random.hpp"

namespace meptsp {

enum class Terminal : std::uint8_t {
    DY1Y2,   // distance from the current node y1 to the candidate y2
    MinGY1,  // min / max / sum / product of distances from y1 to the pool
    MinGY2,
    MaxGY1,
    MaxGY2,
    SumGY1,
    SumGY2,
    ProdGY1,
    ProdGY2,
    Length,  // length of the partial path built so far
};
inline constexpr std::size_t kTerminalCount = 10;

enum class Function : std::uint8_t { Add, Sub, Div, Mul, Cos, Sin, Min, Max };
inline constexpr std::size_t kFunctionCount = 8;

inline constexpr std::array<Terminal, kTerminalCount> kAllTerminals = {
    Terminal::DY1Y2,  Terminal::MinGY1, Terminal::MinGY2,  Terminal::MaxGY1,  Terminal::MaxGY2,
    Terminal::SumGY1, Terminal::SumGY2, Terminal::ProdGY1, Terminal::ProdGY2, Terminal::Length,
};
inline constexpr std::array<Function, kFunctionCount> kAllFunctions = {
    Function::Add, Function::Sub, Function::Div, Function::Mul,
    Function::Cos, Function::Sin, Function::Min, Function::Max,
};

constexpr std::size_t arity(Function f) noexcept {
    return (f == Function::Cos || f == Function::Sin) ? 1 : 2;
}

std::string_view name(Terminal t) noexcept;
std::string_view name(Function f) noexcept;
std::optional<Terminal> terminal_from_name(std::string_view text) noexcept;
std::optional<Function> function_from_name(std::string_view text) noexcept;

using Symbol = std::variant<Terminal, Function>;

/// Which terminals an expression reads; lets tour construction skip
/// features nobody asked for.
using TerminalMask = std::bitset<kTerminalCount>;

/// Values of the ten terminals for one (current node, candidate, tour) triple.
struct FeatureVector {
    std::array<double, kTerminalCount> values{};

    double operator[](Terminal t) const noexcept { return values[static_cast<std::size_t>(t)]; }
    double& operator[](Terminal t) noexcept { return values[static_cast<std::size_t>(t)]; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Gene {
    Symbol symbol;
    // Only the first arity() entries are meaningful; unused ones are zero so
    // that defaulted equality is structural.
    std::array<std::uint32_t, 2> args{};

    static Gene terminal(Terminal t) noexcept { return Gene{t, {0, 0}}; }
    static Gene call(Function f, std::uint32_t a, std::uint32_t b = 0) noexcept {
        return Gene{f, {a, arity(f) == 2 ? b : 0u}};
    }

    bool is_terminal() const noexcept { return std::holds_alternative<Terminal>(symbol); }

    friend bool operator==(const Gene&, const Gene&) = default;
};

/// Empty when `genes` is a valid genome, otherwise a description of the first
/// violated rule (empty genome, non-terminal first gene, forward or self
/// reference, non-canonical unused argument).
std::optional<std::string> structural_defect(std::span<const Gene> genes);

class Chromosome {
  public:
    /// Throws std::invalid_argument if the genes violate any structural rule.
    explicit Chromosome(std::vector<Gene> genes);

    std::span<const Gene> genes() const noexcept { return genes_; }
    std::size_t size() const noexcept { return genes_.size(); }
    const Gene& operator[](std::size_t i) const noexcept { return genes_[i]; }

    friend bool operator==(const Chromosome&, const Chromosome&) = default;

  private:
    std::vector<Gene> genes_;
};

/// Gene 0 is a uniformly drawn terminal. Every later gene is a terminal with
/// probability `terminal_prob`, otherwise a uniformly drawn function with
/// argument addresses uniform in [0, i).
Chromosome random_chromosome(std::size_t length, double terminal_prob, Rng& rng);

/// An expression tree, stored as its hash-consed DAG in post-order.
///
/// Every distinct subtree appears exactly once and nodes are numbered in
/// first-visit post-order (left operand first), so two expressions are
/// structurally equal exactly when their node vectors are equal. Node
/// arguments index earlier nodes; the root is the last node.
class Expression {
  public:
    using Node = Gene;

    static Expression leaf(Terminal t);
    static Expression apply(Function f, const Expression& operand);
    static Expression apply(Function f, const Expression& lhs, const Expression& rhs);

    /// The expression rooted at genes[root]. Arguments must point backwards.
    static Expression from_genes(std::span<const Gene> genes, std::size_t root);

    std::span<const Node> nodes() const noexcept { return nodes_; }
    const Node& root() const noexcept { return nodes_.back(); }

    /// Operand `k` of the root as a standalone expression.
    Expression operand(std::size_t k) const;

    TerminalMask terminals_used() const noexcept { return terminals_; }

    /// Plain IEEE arithmetic, no protected operators: x/0 is a signed
    /// infinity, 0/0 is NaN, and non-finite values propagate. min/max return
    /// the first operand unless the second compares strictly smaller/larger.
    double evaluate(const FeatureVector& features) const;

    /// Number of nodes the expression would have as a plain tree.
    double tree_size() const;

    friend bool operator==(const Expression&, const Expression&) = default;

  private:
    explicit Expression(std::vector<Node> nodes);

    std::vector<Node> nodes_;
    TerminalMask terminals_;
};

/// The expressions encoded by each gene position; result[i] is rooted at gene i.
std::vector<Expression> decode(const Chromosome& chromosome);

/// Canonical fully parenthesised prefix text, e.g. "(+ (d_y1y2) (length))".
std::string format_formula(const Expression& e);

/// Inverse of format_formula. Whitespace between tokens is free and lines
/// whose first non-blank character is '#' are comments. Throws ParseError
/// carrying the byte offset of the offending token.
Expression parse_formula(std::string_view text);

} // namespace meptsp
