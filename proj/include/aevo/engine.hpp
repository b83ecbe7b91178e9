#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <aevo/genome.hpp>
#include <aevo/operators.hpp>
#include <aevo/random.hpp>

namespace aevo {

/// Genome → fitness. Larger is better; values must be finite and non-negative.
using FitnessFunction = std::function<double(const BitGenome&)>;

struct Individual {
    BitGenome genome;
    std::optional<double> fitness;

    explicit Individual(BitGenome g, std::optional<double> f = std::nullopt) : genome(std::move(g)), fitness(f) {}

    double fitness_or_throw() const {
        if (!fitness) throw std::logic_error("Individual: fitness not evaluated");
        return *fitness;
    }
};

using Population = std::vector<Individual>;

/// Raised when the fitness function fails or returns an unusable value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(std::size_t index, const std::string& what)
        : std::runtime_error("evaluation of individual " + std::to_string(index) + " failed: " + what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

struct GenerationBest {
    std::size_t generation = 0;
    double fitness = 0.0;

    friend bool operator==(const GenerationBest&, const GenerationBest&) = default;
};

struct RunStats {
    std::size_t generations_executed = 0;
    /// Number of fitness-function invocations.
    std::size_t evaluations = 0;
    /// Entry 0 is the initial population; entry g follows step g.
    std::vector<GenerationBest> best_per_generation;
    std::chrono::duration<double, std::milli> wall_time{0};
};

/// Evaluate every individual whose fitness is unset; cached values are kept.
inline void evaluate_population(Population& pop, const FitnessFunction& f, RunStats& stats) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto& ind = pop[i];
        if (ind.fitness) continue;
        double value = 0.0;
        try {
            value = f(ind.genome);
        } catch (const std::exception& e) {
            throw EvaluationError(i, e.what());
        }
        ++stats.evaluations;
        if (!std::isfinite(value) || value < 0.0) {
            throw EvaluationError(i, "fitness must be finite and non-negative, got " + std::to_string(value));
        }
        ind.fitness = value;
    }
}

/// Stable sort, best first. Equal fitnesses keep their relative order.
inline void sort_population(Population& pop) {
    std::stable_sort(pop.begin(), pop.end(), [](const Individual& a, const Individual& b) {
        return a.fitness_or_throw() > b.fitness_or_throw();
    });
}

inline Population random_population(std::size_t size, std::size_t genome_length, RandomSource& rng) {
    Population pop;
    pop.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        pop.emplace_back(random_genome(genome_length, rng));
    }
    return pop;
}

/// max(1, round(q * N)) with halves rounded up.
inline std::size_t replacement_count(double selection_rate, std::size_t pop_size) {
    const auto r = static_cast<std::size_t>(std::floor(selection_rate * static_cast<double>(pop_size) + 0.5));
    return std::max<std::size_t>(1, r);
}

struct EasyStepConfig {
    double selection_rate = 0.2;
    std::vector<OperatorSpec> operators;

    void validate(std::size_t pop_size) const {
        if (!(selection_rate > 0.0 && selection_rate < 1.0)) {
            throw std::invalid_argument("selection_rate must lie in (0, 1)");
        }
        if (operators.empty()) {
            throw std::invalid_argument("at least one variation operator is required");
        }
        for (const auto& op : operators) {
            if (!(op.rate > 0.0)) throw std::invalid_argument("operator rates must be positive");
        }
        if (pop_size < 2) {
            throw std::invalid_argument("population size must be at least 2");
        }
        if (replacement_count(selection_rate, pop_size) >= pop_size) {
            throw std::invalid_argument("selection_rate replaces the whole population");
        }
    }
};

namespace detail {

/// Roulette-wheel draw over `pool`, optionally skipping one index. Falls
/// back to a uniform draw when the eligible weights sum to zero.
inline std::size_t roulette(std::span<const Individual> pool, RandomSource& rng,
                            std::optional<std::size_t> exclude = std::nullopt) {
    const std::size_t eligible = pool.size() - (exclude ? 1 : 0);
    if (eligible == 0) throw std::invalid_argument("roulette: nothing to select from");

    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i != exclude) total += pool[i].fitness_or_throw();
    }
    if (total <= 0.0) {
        std::size_t k = rng.index(eligible);
        if (exclude && k >= *exclude) ++k;
        return k;
    }
    const double ticket = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i == exclude) continue;
        const double w = pool[i].fitness_or_throw();
        if (w <= 0.0) continue;
        acc += w;
        last = i;
        if (ticket < acc) return i;
    }
    return last;
}

inline Individual make_offspring(std::span<const Individual> parents, std::span<const OperatorSpec> ops,
                                 RandomSource& rng) {
    const auto& op = ops[choose_operator(ops, rng)];
    const std::size_t first = roulette(parents, rng);
    if (const auto* flip = std::get_if<BitFlip>(&op.kind)) {
        return Individual(bitflip(parents[first].genome, flip->flip_count, rng));
    }
    const auto& cx = std::get<NPointCrossover>(op.kind);
    // a single eligible parent is recombined with itself
    const std::size_t second = parents.size() > 1 ? roulette(parents, rng, first) : first;
    return Individual(n_point_crossover(parents[first].genome, parents[second].genome, cx.points, rng));
}

inline void ensure_evaluated_sorted(Population& pop, const FitnessFunction& f, RunStats& stats) {
    evaluate_population(pop, f, stats);
    sort_population(pop);
}

} // namespace detail

/// Steady-state generation: destroy the r worst, refill with offspring of
/// the survivors. Returns the population sorted best first.
inline Population easy_step(Population pop, const EasyStepConfig& cfg, const FitnessFunction& f, RandomSource& rng,
                            RunStats& stats) {
    cfg.validate(pop.size());
    detail::ensure_evaluated_sorted(pop, f, stats);

    const std::size_t n = pop.size();
    const std::size_t r = replacement_count(cfg.selection_rate, n);
    pop.erase(pop.end() - static_cast<std::ptrdiff_t>(r), pop.end());

    Population offspring;
    offspring.reserve(r);
    for (std::size_t k = 0; k < r; ++k) {
        offspring.push_back(detail::make_offspring(pop, cfg.operators, rng));
    }
    evaluate_population(offspring, f, stats);

    for (auto& child : offspring) pop.push_back(std::move(child));
    sort_population(pop);
    return pop;
}

/// Generational replacement with elitism: the best r individuals are copied
/// unchanged and the other N - r slots are offspring of the whole previous
/// population.
inline Population canonical_step(Population pop, const EasyStepConfig& cfg, const FitnessFunction& f,
                                 RandomSource& rng, RunStats& stats) {
    cfg.validate(pop.size());
    detail::ensure_evaluated_sorted(pop, f, stats);

    const std::size_t n = pop.size();
    const std::size_t elites = replacement_count(cfg.selection_rate, n);

    Population next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(elites));
    next.reserve(n);
    Population offspring;
    offspring.reserve(n - elites);
    for (std::size_t k = elites; k < n; ++k) {
        offspring.push_back(detail::make_offspring(pop, cfg.operators, rng));
    }
    evaluate_population(offspring, f, stats);

    for (auto& child : offspring) next.push_back(std::move(child));
    sort_population(next);
    return next;
}

class EasyStep {
public:
    explicit EasyStep(EasyStepConfig cfg) : cfg_(std::move(cfg)) {}

    Population operator()(Population pop, const FitnessFunction& f, RandomSource& rng, RunStats& stats) const {
        return easy_step(std::move(pop), cfg_, f, rng, stats);
    }

    const EasyStepConfig& config() const noexcept { return cfg_; }
    EasyStepConfig& config() noexcept { return cfg_; }

private:
    EasyStepConfig cfg_;
};

class CanonicalStep {
public:
    explicit CanonicalStep(EasyStepConfig cfg) : cfg_(std::move(cfg)) {}

    Population operator()(Population pop, const FitnessFunction& f, RandomSource& rng, RunStats& stats) const {
        return canonical_step(std::move(pop), cfg_, f, rng, stats);
    }

    const EasyStepConfig& config() const noexcept { return cfg_; }
    EasyStepConfig& config() noexcept { return cfg_; }

private:
    EasyStepConfig cfg_;
};

template <typename S>
concept StepStrategy = requires(const S& step, Population pop, const FitnessFunction& f, RandomSource& rng,
                                RunStats& stats) {
    { step(std::move(pop), f, rng, stats) } -> std::same_as<Population>;
};

struct MaxGenerations {
    std::size_t limit = 1;
};

struct TargetFitness {
    double target = 0.0;
};

enum class StopReason { MaxGenerations, TargetFitness };

inline const char* to_string(StopReason r) {
    return r == StopReason::TargetFitness ? "target_fitness" : "max_generations";
}

struct Terminator {
    std::variant<MaxGenerations, TargetFitness> kind;

    static Terminator max_generations(std::size_t limit) {
        if (limit == 0) throw std::invalid_argument("MaxGenerations limit must be at least 1");
        return {MaxGenerations{limit}};
    }
    static Terminator target_fitness(double target) { return {TargetFitness{target}}; }

    /// Reason this terminator fires for the given progress, if it does.
    std::optional<StopReason> check(std::size_t generations_executed, double best_fitness) const {
        if (const auto* m = std::get_if<MaxGenerations>(&kind)) {
            if (generations_executed >= m->limit) return StopReason::MaxGenerations;
            return std::nullopt;
        }
        if (best_fitness >= std::get<TargetFitness>(kind).target) return StopReason::TargetFitness;
        return std::nullopt;
    }
};

/// First firing terminator; a reached target takes precedence over the
/// generation limit when both fire together.
inline std::optional<StopReason> check_terminators(std::span<const Terminator> terms, std::size_t generations,
                                                   double best) {
    std::optional<StopReason> reason;
    for (const auto& t : terms) {
        if (auto r = t.check(generations, best)) {
            if (*r == StopReason::TargetFitness) return r;
            reason = r;
        }
    }
    return reason;
}

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    std::size_t evaluations = 0;
    double elapsed_ms = 0.0;
};

using GenerationObserver = std::function<void(const GenerationRecord&)>;

struct RunResult {
    Population population;
    RunStats stats;
    StopReason reason = StopReason::MaxGenerations;
};

/// Evaluate the initial population, then step until any terminator fires.
/// Terminators are checked before the first step too, so a population that
/// already meets its target runs zero steps. `observer` sees each step.
template <StepStrategy Step>
RunResult run(Population initial, const Step& step, const FitnessFunction& f, std::span<const Terminator> terminators,
              RandomSource& rng, const GenerationObserver& observer = {}) {
    if (terminators.empty()) {
        throw std::invalid_argument("run: at least one terminator is required");
    }
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();

    RunResult result{std::move(initial), {}, StopReason::MaxGenerations};
    auto& stats = result.stats;
    detail::ensure_evaluated_sorted(result.population, f, stats);
    stats.best_per_generation.push_back({0, result.population.front().fitness_or_throw()});

    while (true) {
        const double best = result.population.front().fitness_or_throw();
        if (auto reason = check_terminators(terminators, stats.generations_executed, best)) {
            result.reason = *reason;
            break;
        }
        result.population = step(std::move(result.population), f, rng, stats);
        ++stats.generations_executed;
        const double now_best = result.population.front().fitness_or_throw();
        stats.best_per_generation.push_back({stats.generations_executed, now_best});
        if (observer) {
            const std::chrono::duration<double, std::milli> elapsed = clock::now() - started;
            observer({stats.generations_executed, now_best, stats.evaluations, elapsed.count()});
        }
    }
    stats.wall_time = clock::now() - started;
    return result;
}

} // namespace aevo
