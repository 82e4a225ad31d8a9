#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meptsp/tsp.hpp"

namespace meptsp::tsplib {

enum class EdgeWeightType { Euc2D, Att };

/// Unrounded keeps the raw real-valued metric; TsplibStandard applies the
/// TSPLIB integer conventions (nint for EUC_2D, the pseudo-Euclidean
/// round-up rule for ATT), under which published optima are stated.
enum class RoundingMode { Unrounded, TsplibStandard };

struct Instance {
    std::string name;
    std::size_t dimension = 0;
    EdgeWeightType edge_weight_type = EdgeWeightType::Euc2D;
    std::vector<Point> coords;
    std::optional<double> known_optimum;
};

/// Parses a NODE_COORD_SECTION document with EDGE_WEIGHT_TYPE EUC_2D or ATT.
/// Throws ParseError whose location is the 1-based offending line.
Instance parse(std::string_view text);
Instance load(const std::filesystem::path& path);

double distance(const Instance& inst, std::size_t i, std::size_t j, RoundingMode mode);

/// Full distance matrix. Rounded metrics may break the triangle inequality by
/// up to one unit; a sampled check rejects anything worse.
TiGraph to_tigraph(const Instance& inst, RoundingMode mode);

/// (length - shortest) / shortest * 100. Throws std::invalid_argument if
/// shortest <= 0.
double error_percent(double length, double shortest);

using OptimaRegistry = std::map<std::string, double, std::less<>>;

/// Lines `<name>\t<optimal length>`; blank lines and '#' comments ignored.
OptimaRegistry parse_optima(std::string_view text);
OptimaRegistry load_optima(const std::filesystem::path& path);

/// The registry bundled with the sources.
std::filesystem::path default_optima_path();

} // namespace meptsp::tsplib
