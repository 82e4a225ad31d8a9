#include "meptsp/expr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace meptsp {

namespace {

constexpr std::array<std::string_view, kTerminalCount> kTerminalNames = {
    "d_y1y2", "min_g_y1", "min_g_y2", "max_g_y1",  "max_g_y2",
    "sum_g_y1", "sum_g_y2", "prod_g_y1", "prod_g_y2", "length",
};
constexpr std::array<std::string_view, kFunctionCount> kFunctionNames = {
    "+", "-", "/", "*", "cos", "sin", "min", "max",
};

std::size_t symbol_code(const Symbol& s) {
    if (const auto* t = std::get_if<Terminal>(&s))
        return static_cast<std::size_t>(*t);
    return kTerminalCount + static_cast<std::size_t>(std::get<Function>(s));
}

double apply_function(Function f, double a, double b) noexcept {
    switch (f) {
    case Function::Add: return a + b;
    case Function::Sub: return a - b;
    case Function::Div: return a / b;
    case Function::Mul: return a * b;
    case Function::Cos: return std::cos(a);
    case Function::Sin: return std::sin(a);
    case Function::Min: return b < a ? b : a;
    case Function::Max: return a < b ? b : a;
    }
    return a;
}

// Hash-conses the subtree rooted at genes[root] into `out`, appending nodes in
// first-visit post-order. `memo` maps source positions to output ids.
class Canonicalizer {
  public:
    explicit Canonicalizer(std::span<const Gene> genes)
        : genes_(genes), memo_(genes.size(), kUnset) {}

    std::uint32_t visit(std::size_t pos) {
        if (memo_[pos] != kUnset)
            return memo_[pos];
        Gene node = genes_[pos];
        if (const auto* f = std::get_if<Function>(&node.symbol)) {
            for (std::size_t k = 0; k < arity(*f); ++k)
                node.args[k] = visit(node.args[k]);
        }
        const std::uint64_t key = (static_cast<std::uint64_t>(symbol_code(node.symbol)) << 56) |
                                  (static_cast<std::uint64_t>(node.args[0]) << 28) |
                                  static_cast<std::uint64_t>(node.args[1]);
        auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(out_.size()));
        if (inserted)
            out_.push_back(node);
        return memo_[pos] = it->second;
    }

    std::vector<Gene> take() { return std::move(out_); }

  private:
    static constexpr std::uint32_t kUnset = ~std::uint32_t{0};

    std::span<const Gene> genes_;
    std::vector<std::uint32_t> memo_;
    std::unordered_map<std::uint64_t, std::uint32_t> ids_;
    std::vector<Gene> out_;
};

} // namespace

std::string_view name(Terminal t) noexcept { return kTerminalNames[static_cast<std::size_t>(t)]; }
std::string_view name(Function f) noexcept { return kFunctionNames[static_cast<std::size_t>(f)]; }

std::optional<Terminal> terminal_from_name(std::string_view text) noexcept {
    for (std::size_t i = 0; i < kTerminalCount; ++i)
        if (kTerminalNames[i] == text)
            return kAllTerminals[i];
    return std::nullopt;
}

std::optional<Function> function_from_name(std::string_view text) noexcept {
    for (std::size_t i = 0; i < kFunctionCount; ++i)
        if (kFunctionNames[i] == text)
            return kAllFunctions[i];
    return std::nullopt;
}

std::optional<std::string> structural_defect(std::span<const Gene> genes) {
    if (genes.empty())
        return "chromosome has no genes";
    if (!genes[0].is_terminal())
        return "gene 0 must be a terminal";
    for (std::size_t i = 0; i < genes.size(); ++i) {
        const Gene& g = genes[i];
        const std::size_t used = g.is_terminal() ? 0 : arity(std::get<Function>(g.symbol));
        for (std::size_t k = 0; k < g.args.size(); ++k) {
            if (k < used && g.args[k] >= i)
                return "gene " + std::to_string(i) + " references gene " +
                       std::to_string(g.args[k]) + " which is not earlier";
            if (k >= used && g.args[k] != 0)
                return "gene " + std::to_string(i) + " has a non-zero unused argument";
        }
    }
    return std::nullopt;
}

Chromosome::Chromosome(std::vector<Gene> genes) : genes_(std::move(genes)) {
    if (auto defect = structural_defect(genes_))
        throw std::invalid_argument("invalid chromosome: " + *defect);
}

Chromosome random_chromosome(std::size_t length, double terminal_prob, Rng& rng) {
    if (length == 0)
        throw std::invalid_argument("chromosome length must be positive");
    if (!(terminal_prob > 0.0 && terminal_prob < 1.0))
        throw std::invalid_argument("terminal_prob must lie in (0, 1)");

    std::vector<Gene> genes;
    genes.reserve(length);
    genes.push_back(Gene::terminal(kAllTerminals[uniform_index(rng, kTerminalCount)]));
    for (std::size_t i = 1; i < length; ++i) {
        if (bernoulli(rng, terminal_prob)) {
            genes.push_back(Gene::terminal(kAllTerminals[uniform_index(rng, kTerminalCount)]));
        } else {
            const Function f = kAllFunctions[uniform_index(rng, kFunctionCount)];
            const auto a = static_cast<std::uint32_t>(uniform_index(rng, i));
            const auto b = arity(f) == 2 ? static_cast<std::uint32_t>(uniform_index(rng, i)) : 0u;
            genes.push_back(Gene::call(f, a, b));
        }
    }
    return Chromosome(std::move(genes));
}

Expression::Expression(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    for (const Node& n : nodes_)
        if (const auto* t = std::get_if<Terminal>(&n.symbol))
            terminals_.set(static_cast<std::size_t>(*t));
}

Expression Expression::leaf(Terminal t) { return Expression({Gene::terminal(t)}); }

Expression Expression::apply(Function f, const Expression& operand) {
    if (arity(f) != 1)
        throw std::invalid_argument(std::string(name(f)) + " takes two operands");
    std::vector<Gene> raw(operand.nodes_.begin(), operand.nodes_.end());
    raw.push_back(Gene::call(f, static_cast<std::uint32_t>(raw.size() - 1)));
    return from_genes(raw, raw.size() - 1);
}

Expression Expression::apply(Function f, const Expression& lhs, const Expression& rhs) {
    if (arity(f) != 2)
        throw std::invalid_argument(std::string(name(f)) + " takes one operand");
    std::vector<Gene> raw(lhs.nodes_.begin(), lhs.nodes_.end());
    const auto offset = static_cast<std::uint32_t>(raw.size());
    for (Gene g : rhs.nodes_) {
        if (!g.is_terminal())
            for (std::size_t k = 0; k < arity(std::get<Function>(g.symbol)); ++k)
                g.args[k] += offset;
        raw.push_back(g);
    }
    raw.push_back(Gene::call(f, offset - 1, static_cast<std::uint32_t>(raw.size() - 1)));
    return from_genes(raw, raw.size() - 1);
}

Expression Expression::from_genes(std::span<const Gene> genes, std::size_t root) {
    if (root >= genes.size())
        throw std::invalid_argument("expression root out of range");
    if (auto defect = structural_defect(genes.first(root + 1)))
        throw std::invalid_argument("invalid expression: " + *defect);
    Canonicalizer c(genes);
    c.visit(root);
    return Expression(c.take());
}

Expression Expression::operand(std::size_t k) const {
    const auto* f = std::get_if<Function>(&root().symbol);
    if (f == nullptr || k >= arity(*f))
        throw std::out_of_range("operand index out of range");
    return from_genes(nodes_, root().args[k]);
}

double Expression::evaluate(const FeatureVector& features) const {
    constexpr std::size_t kInline = 64;
    std::array<double, kInline> small;
    std::vector<double> large;
    double* values = small.data();
    if (nodes_.size() > kInline) {
        large.resize(nodes_.size());
        values = large.data();
    }

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (const auto* t = std::get_if<Terminal>(&n.symbol))
            values[i] = features[*t];
        else
            values[i] = apply_function(std::get<Function>(n.symbol), values[n.args[0]], values[n.args[1]]);
    }
    return values[nodes_.size() - 1];
}

double Expression::tree_size() const {
    std::vector<double> size(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        size[i] = 1.0;
        if (const auto* f = std::get_if<Function>(&nodes_[i].symbol))
            for (std::size_t k = 0; k < arity(*f); ++k)
                size[i] += size[nodes_[i].args[k]];
    }
    return size.back();
}

std::vector<Expression> decode(const Chromosome& chromosome) {
    std::vector<Expression> out;
    out.reserve(chromosome.size());
    for (std::size_t i = 0; i < chromosome.size(); ++i)
        out.push_back(Expression::from_genes(chromosome.genes(), i));
    return out;
}

} // namespace meptsp
