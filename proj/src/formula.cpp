#include <cctype>
#include <string>

#include "meptsp/errors.hpp"
#include "meptsp/expr.hpp"

namespace meptsp {

namespace {

void format_node(std::span<const Gene> nodes, std::size_t i, std::string& out) {
    const Gene& n = nodes[i];
    out += '(';
    if (const auto* t = std::get_if<Terminal>(&n.symbol)) {
        out += name(*t);
    } else {
        const Function f = std::get<Function>(n.symbol);
        out += name(f);
        for (std::size_t k = 0; k < arity(f); ++k) {
            out += ' ';
            format_node(nodes, n.args[k], out);
        }
    }
    out += ')';
}

class FormulaParser {
  public:
    explicit FormulaParser(std::string_view text) : text_(text) {}

    Expression parse() {
        skip_blank();
        if (pos_ == text_.size())
            fail("empty formula", pos_);
        const std::uint32_t root = parse_node();
        skip_blank();
        if (pos_ != text_.size())
            fail("unexpected text after formula", pos_);
        return Expression::from_genes(raw_, root);
    }

  private:
    [[noreturn]] static void fail(const std::string& what, std::size_t at) {
        throw ParseError("formula parse error at offset " + std::to_string(at) + ": " + what, at);
    }

    // Whitespace, plus '#' comment lines.
    void skip_blank() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#' && at_line_start(pos_)) {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    bool at_line_start(std::size_t at) const {
        while (at > 0) {
            const char c = text_[--at];
            if (c == '\n')
                return true;
            if (c != ' ' && c != '\t' && c != '\r')
                return false;
        }
        return true;
    }

    std::uint32_t parse_node() {
        skip_blank();
        const std::size_t open = pos_;
        if (pos_ >= text_.size() || text_[pos_] != '(')
            fail("expected '('", pos_);
        ++pos_;
        skip_blank();

        const std::size_t name_at = pos_;
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        const std::string_view symbol = text_.substr(name_at, pos_ - name_at);
        if (symbol.empty())
            fail("expected a symbol name", name_at);

        Gene node;
        std::size_t expected = 0;
        if (auto t = terminal_from_name(symbol)) {
            node = Gene::terminal(*t);
        } else if (auto f = function_from_name(symbol)) {
            node = Gene::call(*f, 0, 0);
            expected = arity(*f);
        } else {
            fail("unknown symbol '" + std::string(symbol) + "'", name_at);
        }

        std::size_t count = 0;
        for (;;) {
            skip_blank();
            if (pos_ >= text_.size())
                fail("unbalanced parentheses: missing ')' for '(' at offset " + std::to_string(open), pos_);
            if (text_[pos_] == ')')
                break;
            const std::size_t operand_at = pos_;
            const std::uint32_t child = parse_node();
            if (count >= expected)
                fail("arity mismatch: '" + std::string(symbol) + "' takes " + std::to_string(expected) +
                         " operand(s)",
                     operand_at);
            node.args[count++] = child;
        }
        if (count != expected)
            fail("arity mismatch: '" + std::string(symbol) + "' takes " + std::to_string(expected) +
                     " operand(s), got " + std::to_string(count),
                 pos_);
        ++pos_;

        raw_.push_back(node);
        return static_cast<std::uint32_t>(raw_.size() - 1);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Gene> raw_;
};

} // namespace

std::string format_formula(const Expression& e) {
    std::string out;
    format_node(e.nodes(), e.nodes().size() - 1, out);
    return out;
}

Expression parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

} // namespace meptsp
