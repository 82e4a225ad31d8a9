#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "meptsp/errors.hpp"
#include "meptsp/tsp.hpp"

namespace meptsp {

namespace {

std::string shortest(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

struct Token {
    std::string text;
    std::size_t line;
};

std::vector<Token> tokenize(std::istream& in) {
    std::vector<Token> tokens;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        std::istringstream words(line);
        std::string word;
        while (words >> word)
            tokens.push_back({word, number});
    }
    return tokens;
}

template <typename T>
T parse_number(const Token& tok, std::string_view text, const char* what) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ParseError("graph set line " + std::to_string(tok.line) + ": bad " + what + " '" +
                             tok.text + "'",
                         tok.line);
    return value;
}

std::string_view after_prefix(const Token& tok, std::string_view prefix) {
    if (!std::string_view(tok.text).starts_with(prefix))
        throw ParseError("graph set line " + std::to_string(tok.line) + ": expected '" + std::string(prefix) +
                             "...', got '" + tok.text + "'",
                         tok.line);
    return std::string_view(tok.text).substr(prefix.size());
}

} // namespace

void write_graph_set(std::ostream& out, std::span<const TiGraph> graphs) {
    out << "tigraphs v1 count=" << graphs.size() << '\n';
    for (const TiGraph& g : graphs) {
        out << "n=" << g.size() << '\n';
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            for (std::size_t j = i + 1; j < g.size(); ++j) {
                if (j > i + 1)
                    out << ' ';
                out << shortest(g(i, j));
            }
            out << '\n';
        }
    }
}

std::vector<TiGraph> read_graph_set(std::istream& in) {
    const auto tokens = tokenize(in);
    if (tokens.size() < 3 || tokens[0].text != "tigraphs" || tokens[1].text != "v1")
        throw ParseError("graph set line 1: expected header 'tigraphs v1 count=<k>'", 1);
    const auto count = parse_number<std::size_t>(tokens[2], after_prefix(tokens[2], "count="), "count");

    std::size_t pos = 3;
    const auto next = [&]() -> const Token& {
        if (pos >= tokens.size())
            throw ParseError("graph set: unexpected end of input", tokens.back().line);
        return tokens[pos++];
    };

    std::vector<TiGraph> graphs;
    graphs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const Token& header = next();
        const auto n = parse_number<std::size_t>(header, after_prefix(header, "n="), "node count");
        if (n < 3)
            throw ParseError("graph set line " + std::to_string(header.line) + ": graphs need at least 3 nodes",
                             header.line);
        std::vector<double> dist(n * n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const Token& tok = next();
                const double d = parse_number<double>(tok, tok.text, "distance");
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        try {
            graphs.emplace_back(n, std::move(dist));
        } catch (const std::invalid_argument& e) {
            throw ParseError("graph set line " + std::to_string(header.line) + ": " + e.what(), header.line);
        }
    }
    if (pos != tokens.size())
        throw ParseError("graph set line " + std::to_string(tokens[pos].line) + ": trailing data after " +
                             std::to_string(count) + " graphs",
                         tokens[pos].line);
    return graphs;
}

} // namespace meptsp
