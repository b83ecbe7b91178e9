// aevo: run evolutionary experiments from the command line.
//
//   aevo run [--problem dot|onemax|royalroad] [--config FILE] [--seed N] [flags...]
//            [num_rects arena_side dot_x dot_y bits pop_size num_gens selection_rate]
//   aevo islands --islands N --policy best|mostdifferent [...]
//   aevo bench [...]
//
// CSV goes to stdout, diagnostics to stderr.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <aevo/experiment.hpp>

namespace {

using aevo::experiment::Setting;

const std::vector<std::string> kKeys = {
    "problem",        "num_rects",     "arena_side",     "bits",       "block_size", "pop_size",
    "max_generations", "selection_rate", "mutation_rate", "crossover_rate", "crossover_points", "flip_count",
    "seed",           "target_fitness", "step",           "policy",     "islands",    "arena_file",
    "repetitions",    "dot_x",          "dot_y",
};


struct Invocation {
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> positional;
    std::string write_arena;
    std::string event_log;
};

std::string flag_name(std::string key) {
    for (auto& c : key) {
        if (c == '_') c = '-';
    }
    return "--" + key;
}

void add_experiment_options(CLI::App& cmd, Invocation& inv, bool positional) {
    cmd.add_option("--config", inv.config_path, "INI file of key = value settings");
    for (const auto& key : kKeys) {
        cmd.add_option(flag_name(key), inv.flags[key], key);
    }
    if (positional) {
        cmd.add_option("args", inv.positional,
                       "num_rects arena_side dot_x dot_y bits pop_size num_gens selection_rate");
    }
    cmd.add_option("--write-arena", inv.write_arena, "write the generated dot arena to this file");
}

int execute(const std::string& mode, aevo::experiment::ExperimentConfig base, const Invocation& inv,
            const CLI::App& cmd) {
    namespace ex = aevo::experiment;
    try {
        std::vector<std::vector<Setting>> layers;
        if (!inv.config_path.empty()) layers.push_back(ex::load_config_file(inv.config_path));

        static const std::vector<std::string> order = {"num_rects", "arena_side", "dot_x",    "dot_y",
                                                       "bits",      "pop_size",   "num_gens", "selection_rate"};
        if (inv.positional.size() > order.size()) {
            throw ex::ConfigError("", 0, "too many positional arguments");
        }
        std::vector<Setting> positional;
        for (std::size_t i = 0; i < inv.positional.size(); ++i) positional.push_back({order[i], inv.positional[i], 0});
        layers.push_back(std::move(positional));

        std::vector<Setting> flags;
        for (const auto& key : kKeys) {
            if (cmd.count(flag_name(key)) > 0) flags.push_back({key, inv.flags.at(key), 0});
        }
        layers.push_back(std::move(flags));

        std::vector<std::string> warnings;
        const auto cfg = ex::build_config(base, layers, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

        if (!inv.write_arena.empty()) {
            if (cfg.problem != ex::ProblemKind::Dot) throw ex::ConfigError("write_arena", 0, "needs the dot problem");
            aevo::RandomSource rng(cfg.seed);
            const auto problem = ex::make_problem(cfg, rng);
            std::ofstream out(inv.write_arena);
            if (!out) throw ex::ConfigError("write_arena", 0, "cannot write '" + inv.write_arena + "'");
            aevo::problems::write_arena(out, *problem.arena);
        }

        if (mode == "bench") return ex::run_bench(cfg, std::cout, std::cerr);
        if (mode == "islands") {
            if (inv.event_log.empty()) return ex::run_islands(cfg, std::cout, std::cerr);
            std::ofstream log(inv.event_log);
            if (!log) throw ex::ConfigError("event_log", 0, "cannot write '" + inv.event_log + "'");
            return ex::run_islands(cfg, std::cout, std::cerr, &log);
        }
        return ex::run_experiment(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ex::Failure;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary algorithm experiments on bitstring problems"};
    app.require_subcommand(1);

    Invocation run_inv;
    auto* run_cmd = app.add_subcommand("run", "run a single-population experiment");
    add_experiment_options(*run_cmd, run_inv, true);

    Invocation islands_inv;
    auto* islands_cmd = app.add_subcommand("islands", "run an island model with migration");
    add_experiment_options(*islands_cmd, islands_inv, false);
    islands_cmd->add_option("--event-log", islands_inv.event_log, "write the scheduler event log to this file");

    Invocation bench_inv;
    auto* bench_cmd = app.add_subcommand("bench", "time repeated runs and report throughput");
    add_experiment_options(*bench_cmd, bench_inv, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : aevo::experiment::Failure;
    }

    if (*run_cmd) return execute("run", {}, run_inv, *run_cmd);
    if (*islands_cmd) {
        aevo::experiment::ExperimentConfig base;
        base.islands = 2;
        return execute("islands", base, islands_inv, *islands_cmd);
    }
    return execute("bench", aevo::experiment::ExperimentConfig::bench_defaults(), bench_inv, *bench_cmd);
}
