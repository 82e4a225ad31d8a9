#include "meptsp/tsplib.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "meptsp/errors.hpp"

namespace meptsp::tsplib {

namespace {

// TSPLIB allows at most one unit of rounding slack in the triangle inequality.
constexpr double kRoundingSlack = 1.0;
constexpr std::size_t kTriangleSamples = 10000;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ParseError("TSPLIB line " + std::to_string(line) + ": " + what, line);
}

double parse_real(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        fail(line, "bad number '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> words(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i > start)
            out.push_back(line.substr(start, i - start));
    }
    return out;
}

} // namespace

Instance parse(std::string_view text) {
    Instance inst;
    std::optional<std::size_t> dimension;
    std::optional<EdgeWeightType> type;
    bool have_name = false;
    bool in_coords = false;
    bool saw_coords = false;
    std::vector<char> filled;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string_view raw = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty())
            continue;

        if (in_coords) {
            const auto w = words(line);
            if (w.size() == 1 && upper(std::string(w[0])) == "EOF")
                break;
            if (std::isalpha(static_cast<unsigned char>(line[0]))) {
                in_coords = false; // next section keyword
            } else {
                if (w.size() != 3)
                    fail(line_no, "expected '<index> <x> <y>'");
                const double index = parse_real(w[0], line_no);
                if (index != std::floor(index) || index < 1 || index > static_cast<double>(*dimension))
                    fail(line_no, "node index " + std::string(w[0]) + " outside 1.." + std::to_string(*dimension));
                const auto k = static_cast<std::size_t>(index) - 1;
                if (filled[k])
                    fail(line_no, "duplicate node index " + std::string(w[0]));
                inst.coords[k] = {parse_real(w[1], line_no), parse_real(w[2], line_no)};
                filled[k] = 1;
                continue;
            }
        }

        std::string key;
        std::string value;
        if (const auto colon = line.find(':'); colon != std::string::npos) {
            key = upper(trim(std::string_view(line).substr(0, colon)));
            value = trim(std::string_view(line).substr(colon + 1));
        } else {
            const auto w = words(line);
            key = upper(std::string(w[0]));
            value = trim(std::string_view(line).substr(w[0].size()));
        }

        if (key == "EOF")
            break;
        if (key == "NAME") {
            inst.name = value;
            have_name = true;
        } else if (key == "DIMENSION") {
            const double d = parse_real(value, line_no);
            if (d != std::floor(d) || d < 3)
                fail(line_no, "DIMENSION must be an integer >= 3");
            dimension = static_cast<std::size_t>(d);
        } else if (key == "EDGE_WEIGHT_TYPE") {
            const std::string v = upper(value);
            if (v == "EUC_2D")
                type = EdgeWeightType::Euc2D;
            else if (v == "ATT")
                type = EdgeWeightType::Att;
            else
                fail(line_no, "unsupported EDGE_WEIGHT_TYPE " + value + " (supported: EUC_2D, ATT)");
        } else if (key == "NODE_COORD_SECTION") {
            if (!dimension)
                fail(line_no, "NODE_COORD_SECTION before DIMENSION");
            inst.coords.assign(*dimension, Point{});
            filled.assign(*dimension, 0);
            in_coords = true;
            saw_coords = true;
        } else if (key == "TYPE") {
            const std::string v = upper(value);
            if (v != "TSP")
                fail(line_no, "unsupported problem TYPE " + value);
        } else if (key.ends_with("_SECTION")) {
            fail(line_no, "unsupported section " + key);
        }
        // Other specification keywords (COMMENT, DISPLAY_DATA_TYPE, ...) are ignored.
    }

    if (!have_name)
        fail(line_no, "missing NAME");
    if (!dimension)
        fail(line_no, "missing DIMENSION");
    if (!type)
        fail(line_no, "missing EDGE_WEIGHT_TYPE");
    if (!saw_coords)
        fail(line_no, "missing NODE_COORD_SECTION");
    const auto count = static_cast<std::size_t>(std::count(filled.begin(), filled.end(), 1));
    if (count != *dimension)
        fail(line_no, "NODE_COORD_SECTION lists " + std::to_string(count) + " nodes, DIMENSION is " +
                          std::to_string(*dimension));

    inst.dimension = *dimension;
    inst.edge_weight_type = *type;
    return inst;
}

Instance load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.location());
    }
}

double distance(const Instance& inst, std::size_t i, std::size_t j, RoundingMode mode) {
    if (i >= inst.dimension || j >= inst.dimension)
        throw std::out_of_range("node index out of range for " + inst.name);
    if (i == j)
        return 0.0;
    const double dx = inst.coords[i].x - inst.coords[j].x;
    const double dy = inst.coords[i].y - inst.coords[j].y;
    switch (inst.edge_weight_type) {
    case EdgeWeightType::Euc2D: {
        const double d = std::sqrt(dx * dx + dy * dy);
        return mode == RoundingMode::Unrounded ? d : std::floor(d + 0.5);
    }
    case EdgeWeightType::Att: {
        const double r = std::sqrt((dx * dx + dy * dy) / 10.0);
        if (mode == RoundingMode::Unrounded)
            return r;
        const double t = std::floor(r + 0.5);
        return t < r ? t + 1.0 : t;
    }
    }
    throw std::logic_error("unknown edge weight type");
}

TiGraph to_tigraph(const Instance& inst, RoundingMode mode) {
    const std::size_t n = inst.dimension;
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(inst, i, j, mode);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    TiGraph g(n, std::move(dist));

    if (mode == RoundingMode::TsplibStandard) {
        Rng rng(0x75b1);
        const double worst = g.sampled_triangle_violation(kTriangleSamples, rng);
        if (worst > kRoundingSlack)
            throw std::runtime_error(inst.name + ": triangle inequality violated by " + std::to_string(worst));
        if (worst > 0.0)
            std::clog << inst.name << ": rounding breaks the triangle inequality by up to " << worst
                      << " (tolerated)\n";
    }
    return g;
}

double error_percent(double length, double shortest) {
    if (!(shortest > 0.0))
        throw std::invalid_argument("shortest length must be positive");
    return (length - shortest) / shortest * 100.0;
}

OptimaRegistry parse_optima(std::string_view text) {
    OptimaRegistry out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const auto w = words(line);
        if (w.size() != 2)
            throw ParseError("optima line " + std::to_string(line_no) + ": expected '<name>\\t<length>'",
                             line_no);
        const double v = parse_real(w[1], line_no);
        if (!(v > 0.0))
            throw ParseError("optima line " + std::to_string(line_no) + ": length must be positive", line_no);
        out.emplace(std::string(w[0]), v);
    }
    return out;
}

OptimaRegistry load_optima(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_optima(buf.str());
}

std::filesystem::path default_optima_path() { return std::filesystem::path(MEPTSP_DATA_DIR) / "optima.tsv"; }

} // namespace meptsp::tsplib
