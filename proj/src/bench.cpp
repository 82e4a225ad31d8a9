#include "meptsp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "meptsp/errors.hpp"
#include "meptsp/parallel.hpp"

namespace meptsp::bench {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_for_writing(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T config_number(const std::string& key, const std::string& value, std::size_t line) {
    T v{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || end != value.data() + value.size())
        throw ParseError(fmt::format("config line {}: bad value '{}' for {}", line, value, key), line);
    return v;
}

std::string optional_number(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : "-"; }

} // namespace

std::string_view name(StartPolicy p) noexcept { return p == StartPolicy::Fixed0 ? "fixed0" : "best"; }

std::string_view name(tsplib::RoundingMode m) noexcept {
    return m == tsplib::RoundingMode::Unrounded ? "unrounded" : "tsplib";
}

NamedHeuristic resolve_heuristic(std::string_view spec) {
    if (spec == "paper-mep")
        return {"paper-mep", PathFunction(parse_formula(kPaperFormula))};
    if (spec == "nn")
        return {"nn", Baseline::NearestNeighbor};
    if (spec == "mst")
        return {"mst", Baseline::MinimumSpanningTree};
    const fs::path path(spec);
    return {path.stem().string(), PathFunction(read_formula_file(path))};
}

Expression read_formula_file(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return parse_formula(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.location());
    }
}

EvolutionConfig parse_config(std::string_view text) {
    EvolutionConfig cfg;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(fmt::format("config line {}: expected key=value", line_no), line_no);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!seen.insert(key).second)
            throw ParseError(fmt::format("config line {}: duplicate key '{}'", line_no, key), line_no);

        if (key == "population_size")
            cfg.population_size = config_number<std::size_t>(key, value, line_no);
        else if (key == "generations")
            cfg.generations = config_number<std::size_t>(key, value, line_no);
        else if (key == "chromosome_length")
            cfg.chromosome_length = config_number<std::size_t>(key, value, line_no);
        else if (key == "mutation_prob")
            cfg.mutation_prob = config_number<double>(key, value, line_no);
        else if (key == "crossover_prob")
            cfg.crossover_prob = config_number<double>(key, value, line_no);
        else if (key == "elite_count")
            cfg.elite_count = config_number<std::size_t>(key, value, line_no);
        else if (key == "terminal_prob")
            cfg.terminal_prob = config_number<double>(key, value, line_no);
        else if (key == "rng_seed")
            cfg.rng_seed = config_number<std::uint64_t>(key, value, line_no);
        else if (key == "crossover_kind") {
            const auto kind = crossover_from_name(value);
            if (!kind)
                throw ParseError(fmt::format("config line {}: crossover_kind must be one_point, two_point or "
                                             "uniform",
                                             line_no),
                                 line_no);
            cfg.crossover_kind = *kind;
        } else if (key == "scoring") {
            const auto s = scoring_from_name(value);
            if (!s)
                throw ParseError(fmt::format("config line {}: scoring must be cycle or open_path", line_no),
                                 line_no);
            cfg.scoring = *s;
        } else {
            throw ParseError(fmt::format("config line {}: unknown key '{}'", line_no, key), line_no);
        }
    }
    return cfg;
}

std::string format_config(const EvolutionConfig& cfg) {
    std::string out;
    out += fmt::format("population_size={}\n", cfg.population_size);
    out += fmt::format("generations={}\n", cfg.generations);
    out += fmt::format("chromosome_length={}\n", cfg.chromosome_length);
    out += fmt::format("mutation_prob={}\n", cfg.mutation_prob);
    out += fmt::format("crossover_prob={}\n", cfg.crossover_prob);
    out += fmt::format("crossover_kind={}\n", name(cfg.crossover_kind));
    out += fmt::format("elite_count={}\n", cfg.elite_count);
    out += fmt::format("terminal_prob={}\n", cfg.terminal_prob);
    out += fmt::format("rng_seed={}\n", cfg.rng_seed);
    out += fmt::format("scoring={}\n", name(cfg.scoring));
    return out;
}

Rng graph_rng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

std::vector<TiGraph> generate_graphs(std::size_t n_min, std::size_t n_max, std::size_t count,
                                     std::uint64_t seed) {
    std::vector<TiGraph> graphs;
    graphs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng = graph_rng(seed, k);
        graphs.push_back(random_ti_graph(n_min, n_max, rng));
    }
    return graphs;
}

std::vector<TiGraph> load_graph_set(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    try {
        return read_graph_set(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.location());
    }
}

void save_graph_set(const fs::path& path, std::span<const TiGraph> graphs) {
    auto out = open_for_writing(path);
    write_graph_set(out, graphs);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

Tour apply(const TiGraph& g, const Heuristic& h, StartPolicy policy, unsigned jobs) {
    return policy == StartPolicy::Fixed0 ? run_heuristic(g, h, 0) : best_over_starts(g, h, jobs);
}

BenchRow run_instance(const NamedHeuristic& h, const tsplib::Instance& inst, tsplib::RoundingMode mode,
                      StartPolicy policy, unsigned jobs) {
    const TiGraph g = tsplib::to_tigraph(inst, mode);
    BenchRow row;
    row.instance = inst.name;
    row.heuristic = h.name;
    row.mode = mode;
    row.start_policy = policy;
    row.length = apply(g, h.heuristic, policy, jobs).cycle_length;
    row.optimum = inst.known_optimum;
    if (row.optimum)
        row.error_percent = tsplib::error_percent(row.length, *row.optimum);
    return row;
}

BenchReport run_bench(const NamedHeuristic& formula, const fs::path& instance_dir, tsplib::RoundingMode mode,
                      StartPolicy policy, const tsplib::OptimaRegistry& optima, unsigned jobs) {
    BenchReport report;
    std::vector<fs::path> files;
    std::error_code ec;
    for (fs::directory_iterator it(instance_dir, ec), end; !ec && it != end; it.increment(ec))
        if (it->is_regular_file() && it->path().extension() == ".tsp")
            files.push_back(it->path());
    if (ec)
        report.skipped.push_back(instance_dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());

    std::vector<NamedHeuristic> heuristics{formula};
    for (const char* preset : {"nn", "mst"})
        if (formula.name != preset)
            heuristics.push_back(resolve_heuristic(preset));

    for (const fs::path& file : files) {
        tsplib::Instance inst;
        try {
            inst = tsplib::load(file);
        } catch (const std::exception& e) {
            report.skipped.push_back(file.filename().string() + ": " + e.what());
            continue;
        }
        if (auto it = optima.find(inst.name); it != optima.end())
            inst.known_optimum = it->second;
        for (const NamedHeuristic& h : heuristics)
            report.rows.push_back(run_instance(h, inst, mode, policy, jobs));
    }

    for (const NamedHeuristic& h : heuristics) {
        MeanRow mean{h.name, 0, 0.0};
        double sum = 0.0;
        for (const BenchRow& row : report.rows)
            if (row.heuristic == h.name && row.error_percent) {
                sum += *row.error_percent;
                ++mean.instances;
            }
        if (mean.instances > 0) {
            mean.mean_error_percent = sum / static_cast<double>(mean.instances);
            report.means.push_back(mean);
        }
    }
    return report;
}

void write_rows(std::ostream& out, std::span<const BenchRow> rows) {
    fmt::print(out, "instance\theuristic\tmode\tstart\tlength\toptimum\terror_percent\n");
    for (const BenchRow& r : rows)
        fmt::print(out, "{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.instance, r.heuristic, name(r.mode),
                   name(r.start_policy), r.length, optional_number(r.optimum), optional_number(r.error_percent));
}

void write_report(std::ostream& out, const BenchReport& report) {
    write_rows(out, report.rows);
    for (const MeanRow& m : report.means)
        fmt::print(out, "MEAN\t{}\t-\t-\t-\t{}\t{}\n", m.heuristic, m.instances, m.mean_error_percent);
    for (const std::string& s : report.skipped)
        fmt::print(out, "# skipped {}\n", s);
    for (const std::string& n : report.notes)
        fmt::print(out, "# {}\n", n);
}

std::pair<std::size_t, std::size_t> parse_graph_class(std::string_view spec) {
    const auto number = [&](std::string_view s) {
        std::size_t v = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size() || s.empty())
            throw std::invalid_argument("bad graph class '" + std::string(spec) + "'");
        return v;
    };
    std::pair<std::size_t, std::size_t> range;
    if (spec.starts_with("G_")) {
        range = {3, number(spec.substr(2))};
    } else if (const auto dash = spec.find('-'); dash != std::string_view::npos) {
        range = {number(spec.substr(0, dash)), number(spec.substr(dash + 1))};
    } else {
        throw std::invalid_argument("bad graph class '" + std::string(spec) + "' (expected G_<k> or <min>-<max>)");
    }
    if (range.first < 3 || range.second < range.first)
        throw std::invalid_argument("graph class '" + std::string(spec) + "' needs 3 <= min <= max");
    return range;
}

std::array<WinCount, 2> run_compare(const NamedHeuristic& formula, std::string_view graph_class,
                                    std::size_t count, std::uint64_t seed, StartPolicy policy, unsigned jobs) {
    const auto [n_min, n_max] = parse_graph_class(graph_class);
    std::vector<char> beats_nn(count, 0);
    std::vector<char> beats_mst(count, 0);
    parallel_for(count, jobs, [&](std::size_t k) {
        Rng rng = graph_rng(seed, k);
        const TiGraph g = random_ti_graph(n_min, n_max, rng);
        const double mine = apply(g, formula.heuristic, policy).cycle_length;
        beats_nn[k] = mine < apply(g, Baseline::NearestNeighbor, policy).cycle_length;
        beats_mst[k] = mine < apply(g, Baseline::MinimumSpanningTree, policy).cycle_length;
    });
    const auto wins = [](const std::vector<char>& v) {
        return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
    };
    const std::string cls(graph_class);
    return {WinCount{cls, "NN", wins(beats_nn), count}, WinCount{cls, "MST", wins(beats_mst), count}};
}

void write_win_counts(std::ostream& out, std::span<const WinCount> counts) {
    fmt::print(out, "graph_class\topponent\twins\ttotal\n");
    for (const WinCount& w : counts)
        fmt::print(out, "{}\t{}\t{}\t{}\n", w.graph_class, w.opponent, w.wins, w.total);
}

void write_history(std::ostream& out, const RunHistory& history) {
    fmt::print(out, "generation,best_fitness,mean_fitness,validation_best\n");
    for (const GenerationRecord& r : history.records)
        fmt::print(out, "{},{},{},{}\n", r.generation, r.best_fitness, r.mean_fitness, r.validation_best);
}

EvolutionResult run_evolve(const EvolutionConfig& cfg, std::span<const TiGraph> training,
                           std::span<const TiGraph> validation, const fs::path& out_dir, unsigned jobs,
                           std::ostream* progress) {
    fs::create_directories(out_dir);
    const auto report = [progress](const GenerationRecord& r) {
        if (progress)
            fmt::print(*progress, "generation {}: best {} mean {} validation {}\n", r.generation, r.best_fitness,
                       r.mean_fitness, r.validation_best);
    };
    EvolutionResult result = evolve(cfg, training, validation, jobs, report);

    {
        auto out = open_for_writing(out_dir / "history.csv");
        write_history(out, result.history);
    }
    {
        auto out = open_for_writing(out_dir / "best.formula");
        const EvolvedHeuristic& h = result.heuristic;
        fmt::print(out, "# training_fitness={}\n# validation_fitness={}\n# generation_found={}\n{}\n",
                   h.training_fitness, h.validation_fitness, h.generation_found, format_formula(h.expression));
    }
    {
        auto out = open_for_writing(out_dir / "run.meta");
        out << format_config(cfg);
        fmt::print(out, "training_graphs={}\nvalidation_graphs={}\n", training.size(), validation.size());
    }
    return result;
}

std::vector<ExactResult> run_exact(const fs::path& path, tsplib::RoundingMode mode) {
    const std::string text = read_text(path);
    std::vector<ExactResult> out;
    if (text.starts_with("tigraphs")) {
        const auto graphs = load_graph_set(path);
        for (std::size_t k = 0; k < graphs.size(); ++k)
            out.push_back({fmt::format("graph{}", k), exact_tour(graphs[k])});
    } else {
        const tsplib::Instance inst = tsplib::parse(text);
        out.push_back({inst.name, exact_tour(tsplib::to_tigraph(inst, mode))});
    }
    return out;
}

} // namespace meptsp::bench
