// meptsp: evolve and benchmark MEP path functions for the symmetric TSP.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "meptsp/bench.hpp"
#include "meptsp/errors.hpp"

namespace {

using namespace meptsp;
using namespace meptsp::bench;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    tsplib::RoundingMode mode = tsplib::RoundingMode::Unrounded;
    std::optional<StartPolicy> start;
};

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    write(out);
}

tsplib::OptimaRegistry optima_or_empty(const std::string& path) {
    if (!path.empty())
        return tsplib::load_optima(path);
    const auto bundled = tsplib::default_optima_path();
    return std::filesystem::exists(bundled) ? tsplib::load_optima(bundled) : tsplib::OptimaRegistry{};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolve and benchmark MEP path functions for the TSP"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { global.seed = s; },
                                           "Random seed");
    app.add_option("--jobs", global.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--mode", global.mode, "Distance rounding for TSPLIB instances")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, tsplib::RoundingMode>{{"unrounded", tsplib::RoundingMode::Unrounded},
                                                        {"tsplib", tsplib::RoundingMode::TsplibStandard}}));
    app.add_option_function<StartPolicy>(
           "--start", [&](const StartPolicy& p) { global.start = p; }, "Start node policy")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, StartPolicy>{{"fixed0", StartPolicy::Fixed0}, {"best", StartPolicy::BestOverAll}}));

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a set of random Euclidean graphs");
    std::size_t gen_min = 3, gen_max = 50, gen_count = 30;
    std::string gen_out;
    gen->add_option("n_min", gen_min, "Smallest node count")->required();
    gen->add_option("n_max", gen_max, "Largest node count")->required();
    gen->add_option("count", gen_count, "Number of graphs")->required();
    gen->add_option("out", gen_out, "Output graph-set file")->required();

    // evolve
    auto* evo = app.add_subcommand("evolve", "Evolve a path function");
    std::string evo_config, evo_training, evo_validation, evo_out;
    bool evo_quiet = false;
    evo->add_option("config", evo_config, "key=value configuration file")->required()->check(CLI::ExistingFile);
    evo->add_option("training", evo_training, "Training graph set")->required()->check(CLI::ExistingFile);
    evo->add_option("validation", evo_validation, "Validation graph set")->required()->check(CLI::ExistingFile);
    evo->add_option("out_dir", evo_out, "Directory for run artifacts")->required();
    evo->add_flag("--quiet", evo_quiet, "No per-generation progress on stderr");

    // run
    auto* run = app.add_subcommand("run", "Apply a formula or preset to one TSPLIB instance");
    std::string run_formula, run_instance_path, run_optima;
    run->add_option("formula", run_formula, "Formula file or preset (paper-mep, nn, mst)")->required();
    run->add_option("instance", run_instance_path, "TSPLIB .tsp file")->required()->check(CLI::ExistingFile);
    run->add_option("--optima", run_optima, "Optima registry (default: bundled optima.tsv)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark a formula, NN and MST on a TSPLIB directory");
    std::string bench_formula, bench_dir, bench_optima, bench_out;
    bench_cmd->add_option("formula", bench_formula, "Formula file or preset")->required();
    bench_cmd->add_option("instance_dir", bench_dir, "Directory of .tsp files")->required();
    bench_cmd->add_option("--optima", bench_optima, "Optima registry (default: bundled optima.tsv)");
    bench_cmd->add_option("--out", bench_out, "Report file (default: stdout)");

    // compare
    auto* cmp = app.add_subcommand("compare", "Count wins of a formula over NN and MST on random graphs");
    std::string cmp_formula, cmp_class, cmp_out;
    std::size_t cmp_count = 1000;
    cmp->add_option("formula", cmp_formula, "Formula file or preset")->required();
    cmp->add_option("graph_class", cmp_class, "G_<k> or <min>-<max>")->required();
    cmp->add_option("count", cmp_count, "Number of random graphs")->required();
    cmp->add_option("--out", cmp_out, "Report file (default: stdout)");

    // exact
    auto* exact = app.add_subcommand("exact", "Optimal tour by Held-Karp (at most 18 nodes)");
    std::string exact_path;
    exact->add_option("path", exact_path, "Graph-set file or TSPLIB instance")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : kExitInvalid;
    }

    const std::uint64_t seed = global.seed.value_or(1);
    try {
        if (gen->parsed()) {
            save_graph_set(gen_out, generate_graphs(gen_min, gen_max, gen_count, seed));
            return kExitOk;
        }
        if (evo->parsed()) {
            std::ifstream in(evo_config, std::ios::binary);
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            EvolutionConfig cfg = parse_config(text);
            if (global.seed)
                cfg.rng_seed = *global.seed;
            const auto training = load_graph_set(evo_training);
            const auto validation = load_graph_set(evo_validation);
            const auto result =
                run_evolve(cfg, training, validation, evo_out, global.jobs, evo_quiet ? nullptr : &std::cerr);
            fmt::print("{}\n", format_formula(result.heuristic.expression));
            return kExitOk;
        }
        if (run->parsed()) {
            const NamedHeuristic h = resolve_heuristic(run_formula);
            tsplib::Instance inst = tsplib::load(run_instance_path);
            const auto optima = optima_or_empty(run_optima);
            if (auto it = optima.find(inst.name); it != optima.end())
                inst.known_optimum = it->second;
            const BenchRow row = run_instance(h, inst, global.mode, global.start.value_or(StartPolicy::BestOverAll),
                                              global.jobs);
            write_rows(std::cout, std::span(&row, 1));
            return kExitOk;
        }
        if (bench_cmd->parsed()) {
            const NamedHeuristic h = resolve_heuristic(bench_formula);
            const BenchReport report =
                run_bench(h, bench_dir, global.mode, global.start.value_or(StartPolicy::BestOverAll),
                          optima_or_empty(bench_optima), global.jobs);
            emit(bench_out, [&](std::ostream& out) { write_report(out, report); });
            for (const auto& s : report.skipped)
                fmt::print(stderr, "skipped {}\n", s);
            return report.skipped.empty() && !report.rows.empty() ? kExitOk : kExitPartial;
        }
        if (cmp->parsed()) {
            const NamedHeuristic h = resolve_heuristic(cmp_formula);
            const auto counts =
                run_compare(h, cmp_class, cmp_count, seed, global.start.value_or(StartPolicy::Fixed0), global.jobs);
            emit(cmp_out, [&](std::ostream& out) { write_win_counts(out, counts); });
            return kExitOk;
        }
        if (exact->parsed()) {
            fmt::print("label\tn\tlength\torder\n");
            for (const ExactResult& r : run_exact(exact_path, global.mode))
                fmt::print("{}\t{}\t{}\t{}\n", r.label, r.tour.order.size(), r.tour.cycle_length,
                           fmt::join(r.tour.order, " "));
            return kExitOk;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitInvalid;
    }
    return kExitInvalid;
}
