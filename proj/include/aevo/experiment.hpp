#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <sstream>
#include <system_error>
#include <variant>
#include <vector>

#include <aevo/engine.hpp>
#include <aevo/islands.hpp>
#include <aevo/problems/arena.hpp>
#include <aevo/problems/benchmarks.hpp>

namespace aevo::experiment {

enum class ProblemKind { Dot, OneMax, RoyalRoad };
enum class StepKind { Easy, Canonical };

/// Everything one invocation needs. Defaults follow the dot-in-rectangles
/// program: 25 rectangles, arena 10, 32 bits, 64 individuals, 50
/// generations, selection rate 0.2, bitflip rate 1, 2-point crossover rate 9.
struct ExperimentConfig {
    ProblemKind problem = ProblemKind::Dot;
    std::size_t num_rects = 25;
    double arena_side = 10.0;
    std::size_t bits = 32;
    std::size_t block_size = 4;
    std::size_t pop_size = 64;
    std::size_t max_generations = 50;
    double selection_rate = 0.2;
    double mutation_rate = 1.0;
    double crossover_rate = 9.0;
    std::size_t crossover_points = 2;
    std::size_t flip_count = 1;
    std::uint64_t seed = 1;
    std::optional<double> target_fitness;
    StepKind step = StepKind::Easy;
    std::optional<std::size_t> islands;
    MigrationPolicy policy = MigrationPolicy::Best;
    std::string arena_file;
    std::size_t repetitions = 5;
    // accepted for command-line compatibility; the search never reads them
    std::optional<double> dot_x;
    std::optional<double> dot_y;

    /// Defaults for the throughput benchmark.
    static ExperimentConfig bench_defaults() {
        ExperimentConfig c;
        c.problem = ProblemKind::OneMax;
        c.bits = 128;
        c.pop_size = 256;
        c.max_generations = 100;
        c.repetitions = 5;
        return c;
    }
};

/// Configuration problem tied to a key and, when read from a file, a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::size_t line, const std::string& message)
        : std::runtime_error(describe(key, line, message)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    /// 0 when the setting did not come from a file.
    std::size_t line() const noexcept { return line_; }

private:
    static std::string describe(const std::string& key, std::size_t line, const std::string& message) {
        std::string s = "configuration error";
        if (line > 0) s += " at line " + std::to_string(line);
        if (!key.empty()) s += " for key '" + key + "'";
        return s + ": " + message;
    }

    std::string key_;
    std::size_t line_;
};

struct Setting {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

template <typename T>
T parse_number(const Setting& s) {
    T value{};
    const char* first = s.value.data();
    const char* last = first + s.value.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError(s.key, s.line, "'" + s.value + "' is not a valid number");
    }
    return value;
}

inline std::size_t parse_count(const Setting& s, std::size_t min_value) {
    if (!s.value.empty() && s.value.front() == '-') {
        throw ConfigError(s.key, s.line, "must be a non-negative integer");
    }
    const auto v = parse_number<std::uint64_t>(s);
    if (v < min_value) {
        throw ConfigError(s.key, s.line, "must be at least " + std::to_string(min_value));
    }
    return static_cast<std::size_t>(v);
}

inline double parse_positive(const Setting& s) {
    const auto v = parse_number<double>(s);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(s.key, s.line, "must be a positive number");
    return v;
}

} // namespace detail

/// Parse `key = value` lines. '#' and ';' start comment lines; blank lines
/// are skipped. Keys may use '-' or '_'.
inline std::vector<Setting> parse_ini(std::istream& in) {
    std::vector<Setting> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", lineno, "expected 'key = value'");
        }
        Setting s{detail::normalize_key(detail::trim(std::string_view(t).substr(0, eq))),
                  detail::trim(std::string_view(t).substr(eq + 1)), lineno};
        if (s.key.empty()) throw ConfigError("", lineno, "missing key");
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<Setting> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", 0, "cannot read file '" + path + "'");
    return parse_ini(in);
}

/// Apply one setting; unknown keys and malformed values raise ConfigError.
/// Returns a warning message for accepted-but-ignored keys.
inline std::optional<std::string> apply_setting(ExperimentConfig& cfg, const Setting& s) {
    const std::string& k = s.key;
    if (k == "problem") {
        if (s.value == "dot") cfg.problem = ProblemKind::Dot;
        else if (s.value == "onemax") cfg.problem = ProblemKind::OneMax;
        else if (s.value == "royalroad") cfg.problem = ProblemKind::RoyalRoad;
        else throw ConfigError(k, s.line, "expected dot, onemax or royalroad");
    } else if (k == "num_rects") {
        cfg.num_rects = detail::parse_count(s, 1);
    } else if (k == "arena_side") {
        cfg.arena_side = detail::parse_positive(s);
    } else if (k == "bits") {
        cfg.bits = detail::parse_count(s, 1);
    } else if (k == "block_size") {
        cfg.block_size = detail::parse_count(s, 1);
    } else if (k == "pop_size") {
        cfg.pop_size = detail::parse_count(s, 2);
    } else if (k == "max_generations" || k == "num_gens") {
        cfg.max_generations = detail::parse_count(s, 1);
    } else if (k == "selection_rate") {
        const auto v = detail::parse_number<double>(s);
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(k, s.line, "must lie strictly between 0 and 1");
        cfg.selection_rate = v;
    } else if (k == "mutation_rate") {
        cfg.mutation_rate = detail::parse_positive(s);
    } else if (k == "crossover_rate") {
        cfg.crossover_rate = detail::parse_positive(s);
    } else if (k == "crossover_points") {
        cfg.crossover_points = detail::parse_count(s, 1);
    } else if (k == "flip_count") {
        cfg.flip_count = detail::parse_count(s, 1);
    } else if (k == "seed") {
        cfg.seed = detail::parse_number<std::uint64_t>(s);
    } else if (k == "target_fitness") {
        cfg.target_fitness = detail::parse_number<double>(s);
    } else if (k == "step") {
        if (s.value == "easy") cfg.step = StepKind::Easy;
        else if (s.value == "canonical") cfg.step = StepKind::Canonical;
        else throw ConfigError(k, s.line, "expected easy or canonical");
    } else if (k == "islands") {
        cfg.islands = detail::parse_count(s, 2);
    } else if (k == "policy") {
        if (s.value == "best") cfg.policy = MigrationPolicy::Best;
        else if (s.value == "mostdifferent") cfg.policy = MigrationPolicy::MostDifferent;
        else throw ConfigError(k, s.line, "expected best or mostdifferent");
    } else if (k == "arena_file") {
        cfg.arena_file = s.value;
    } else if (k == "repetitions") {
        cfg.repetitions = detail::parse_count(s, 1);
    } else if (k == "dot_x" || k == "dot_y") {
        const auto v = detail::parse_number<double>(s);
        (k == "dot_x" ? cfg.dot_x : cfg.dot_y) = v;
        return k + " is accepted for compatibility but ignored by the search";
    } else {
        throw ConfigError(k, s.line, "unknown key");
    }
    return std::nullopt;
}

/// Cross-field checks that single settings cannot catch.
inline void validate(const ExperimentConfig& cfg) {
    if (cfg.problem == ProblemKind::Dot && (cfg.bits < 2 || cfg.bits % 2 != 0)) {
        throw ConfigError("bits", 0, "dot problem needs an even number of bits");
    }
    if (cfg.problem == ProblemKind::Dot && cfg.bits > 126) {
        throw ConfigError("bits", 0, "dot problem supports at most 126 bits");
    }
    if (cfg.problem == ProblemKind::RoyalRoad && cfg.bits % cfg.block_size != 0) {
        throw ConfigError("block_size", 0, "must divide bits");
    }
    if (cfg.crossover_points >= cfg.bits) {
        throw ConfigError("crossover_points", 0, "must be smaller than bits");
    }
    if (cfg.flip_count > cfg.bits) {
        throw ConfigError("flip_count", 0, "must not exceed bits");
    }
    if (replacement_count(cfg.selection_rate, cfg.pop_size) >= cfg.pop_size) {
        throw ConfigError("selection_rate", 0, "would replace the whole population");
    }
}

/// Merge settings in order (later wins) and validate. Warnings for ignored
/// keys are appended to `warnings` when given.
inline ExperimentConfig build_config(ExperimentConfig base, const std::vector<std::vector<Setting>>& layers,
                                     std::vector<std::string>* warnings = nullptr) {
    for (const auto& layer : layers) {
        for (const auto& s : layer) {
            if (auto w = apply_setting(base, s); w && warnings) warnings->push_back(*w);
        }
    }
    validate(base);
    return base;
}

/// Fitness function and the storage it refers to.
struct ProblemInstance {
    FitnessFunction fitness;
    std::size_t genome_length = 0;
    double default_target = 0.0;
    std::shared_ptr<const problems::RectangleArena> arena;
};

/// Build the configured problem. The dot problem draws its arena from `rng`
/// unless an arena file is given.
inline ProblemInstance make_problem(const ExperimentConfig& cfg, RandomSource& rng) {
    ProblemInstance p;
    p.genome_length = cfg.bits;
    switch (cfg.problem) {
    case ProblemKind::Dot: {
        problems::DotProblemConfig dc{cfg.num_rects, cfg.arena_side, cfg.bits};
        if (cfg.arena_file.empty()) {
            p.arena = std::make_shared<const problems::RectangleArena>(problems::generate_random_arena(dc, rng));
        } else {
            std::ifstream in(cfg.arena_file);
            if (!in) throw ConfigError("arena_file", 0, "cannot read '" + cfg.arena_file + "'");
            p.arena = std::make_shared<const problems::RectangleArena>(problems::read_arena(in, cfg.arena_side));
        }
        auto arena = p.arena;
        const problems::DotFitness f(dc, *arena);
        p.fitness = [arena, f](const BitGenome& g) { return f(g); };
        // the original loop stops once the dot sits in num_rects rectangles
        p.default_target = static_cast<double>(cfg.num_rects);
        break;
    }
    case ProblemKind::OneMax:
        p.fitness = [](const BitGenome& g) { return static_cast<double>(problems::onemax(g)); };
        p.default_target = static_cast<double>(cfg.bits);
        break;
    case ProblemKind::RoyalRoad: {
        const std::size_t block = cfg.block_size;
        p.fitness = [block](const BitGenome& g) { return static_cast<double>(problems::royal_road(g, block)); };
        p.default_target = static_cast<double>(cfg.bits / cfg.block_size);
        break;
    }
    }
    return p;
}

inline EasyStepConfig step_config(const ExperimentConfig& cfg) {
    return {cfg.selection_rate,
            {OperatorSpec::bitflip(cfg.mutation_rate, cfg.flip_count),
             OperatorSpec::crossover(cfg.crossover_points, cfg.crossover_rate)}};
}

inline StepVariant make_step(const ExperimentConfig& cfg) {
    if (cfg.step == StepKind::Canonical) return CanonicalStep(step_config(cfg));
    return EasyStep(step_config(cfg));
}

inline std::vector<Terminator> make_terminators(const ExperimentConfig& cfg, const ProblemInstance& p) {
    return {Terminator::max_generations(cfg.max_generations),
            Terminator::target_fitness(cfg.target_fitness.value_or(p.default_target))};
}

enum ExitCode : int { TargetReached = 0, Failure = 1, GenerationLimit = 2 };

namespace detail {

inline std::string fixed3(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

inline std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

} // namespace detail

inline constexpr std::string_view csv_header = "generation,best_fitness,evaluations,elapsed_ms";

/// Single-population run. CSV rows go to `out` as each generation finishes;
/// the last line is a `# best=... generations=... evaluations=... time_ms=...`
/// summary.
inline int run_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Archipelago run with a fully connected topology of `cfg.islands` islands.
inline int run_islands(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err,
                       std::ostream* event_log = nullptr) {
    try {
        validate(cfg);
        const std::size_t count = cfg.islands.value_or(2);
        RandomSource master(cfg.seed);
        const ProblemInstance problem = make_problem(cfg, master);
        const auto terminators = make_terminators(cfg, problem);

        std::vector<std::string> aliases;
        for (std::size_t i = 1; i <= count; ++i) aliases.push_back("node_" + std::to_string(i));
        std::vector<IslandConfig> configs;
        for (const auto& alias : aliases) {
            IslandConfig ic;
            ic.alias = alias;
            ic.peers = peers_of(aliases, alias);
            ic.step = make_step(cfg);
            ic.terminators = terminators;
            ic.policy = cfg.policy;
            ic.seed = master.split();
            ic.fitness = problem.fitness;
            ic.pop_size = cfg.pop_size;
            ic.genome_length = problem.genome_length;
            configs.push_back(std::move(ic));
        }

        out << "island," << csv_header << '\n';
        const auto result = run_archipelago(std::move(configs), [&](const std::string& alias, const GenerationRecord& r) {
            out << alias << ',' << r.generation << ',' << detail::num(r.best_fitness) << ',' << r.evaluations << ','
                << detail::fixed3(r.elapsed_ms) << '\n';
        });

        bool reached = false;
        for (const auto& [alias, island] : result.islands) {
            reached = reached || island.reason == StopReason::TargetFitness;
            out << "# island=" << alias << " best=" << detail::num(island.population.front().fitness_or_throw())
                << " generations=" << island.stats.generations_executed
                << " evaluations=" << island.stats.evaluations
                << " time_ms=" << detail::fixed3(island.stats.wall_time.count()) << '\n';
        }
        out << "# messages_sent=" << result.messages_sent << " messages_delivered=" << result.messages_delivered
            << '\n';
        if (event_log) {
            for (const auto& line : result.log) *event_log << line << '\n';
        }
        return reached ? TargetReached : GenerationLimit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
}

inline int run_experiment(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.islands) return run_islands(cfg, out, err);
    try {
        validate(cfg);
        RandomSource rng(cfg.seed);
        const ProblemInstance problem = make_problem(cfg, rng);
        const auto terminators = make_terminators(cfg, problem);
        Population initial = random_population(cfg.pop_size, problem.genome_length, rng);

        out << csv_header << '\n';
        auto observer = [&](const GenerationRecord& r) {
            out << r.generation << ',' << detail::num(r.best_fitness) << ',' << r.evaluations << ','
                << detail::fixed3(r.elapsed_ms) << '\n';
        };
        const auto step = make_step(cfg);
        const RunResult result = std::visit(
            [&](const auto& s) { return run(std::move(initial), s, problem.fitness, terminators, rng, observer); },
            step);

        out << "# best=" << detail::num(result.population.front().fitness_or_throw())
            << " generations=" << result.stats.generations_executed << " evaluations=" << result.stats.evaluations
            << " time_ms=" << detail::fixed3(result.stats.wall_time.count()) << '\n';
        return result.reason == StopReason::TargetFitness ? TargetReached : GenerationLimit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
}

struct BenchRow {
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    double total_ms = 0.0;
    double mean_generation_ms = 0.0;
    double min_generation_ms = 0.0;
    double evals_per_sec = 0.0;
};

/// Time `cfg.repetitions` runs of exactly `cfg.max_generations` generations.
inline std::vector<BenchRow> bench_rows(const ExperimentConfig& cfg) {
    validate(cfg);
    RandomSource master(cfg.seed);
    std::vector<BenchRow> rows;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        RandomSource rng(master.split());
        const ProblemInstance problem = make_problem(cfg, rng);
        const std::vector<Terminator> terminators{Terminator::max_generations(cfg.max_generations)};
        Population initial = random_population(cfg.pop_size, problem.genome_length, rng);

        double last = 0.0;
        double min_gen = std::numeric_limits<double>::infinity();
        auto observer = [&](const GenerationRecord& r) {
            min_gen = std::min(min_gen, r.elapsed_ms - last);
            last = r.elapsed_ms;
        };
        const auto step = make_step(cfg);
        const RunResult result = std::visit(
            [&](const auto& s) { return run(std::move(initial), s, problem.fitness, terminators, rng, observer); },
            step);

        BenchRow row;
        row.generations = result.stats.generations_executed;
        row.evaluations = result.stats.evaluations;
        row.total_ms = result.stats.wall_time.count();
        row.mean_generation_ms = row.generations ? last / static_cast<double>(row.generations) : 0.0;
        row.min_generation_ms = row.generations ? min_gen : 0.0;
        // guard against a zero reading from a coarse clock
        const double seconds = std::max(row.total_ms, 1e-6) / 1000.0;
        row.evals_per_sec = static_cast<double>(row.evaluations) / seconds;
        rows.push_back(row);
    }
    return rows;
}

inline constexpr std::string_view bench_header =
    "repetition,generations,evaluations,total_ms,mean_generation_ms,min_generation_ms,evals_per_sec";

inline int run_bench(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const auto rows = bench_rows(cfg);
        out << bench_header << '\n';
        BenchRow sum;
        double min_gen = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            out << (i + 1) << ',' << r.generations << ',' << r.evaluations << ',' << detail::fixed3(r.total_ms) << ','
                << detail::fixed3(r.mean_generation_ms) << ',' << detail::fixed3(r.min_generation_ms) << ','
                << detail::fixed3(r.evals_per_sec) << '\n';
            sum.generations += r.generations;
            sum.evaluations += r.evaluations;
            sum.total_ms += r.total_ms;
            sum.mean_generation_ms += r.mean_generation_ms;
            min_gen = std::min(min_gen, r.min_generation_ms);
        }
        const double n = static_cast<double>(rows.size());
        const double eps = static_cast<double>(sum.evaluations) / (std::max(sum.total_ms, 1e-6) / 1000.0);
        out << "summary," << detail::num(static_cast<double>(sum.generations) / n) << ','
            << detail::num(static_cast<double>(sum.evaluations) / n) << ',' << detail::fixed3(sum.total_ms / n) << ','
            << detail::fixed3(sum.mean_generation_ms / n) << ',' << detail::fixed3(min_gen) << ','
            << detail::fixed3(eps) << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
}

} // namespace aevo::experiment
