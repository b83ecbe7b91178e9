// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <aevo/aevo.hpp>

namespace {

using namespace aevo;
using clock_type = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
    std::vector<std::string> warnings;
};

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

EasyStepConfig paper_operators(double q = 0.2) {
    return {q, {OperatorSpec::bitflip(1.0), OperatorSpec::crossover(2, 9.0)}};
}

const FitnessFunction kOneMax = [](const BitGenome& g) { return static_cast<double>(problems::onemax(g)); };

Verdict operator_mix() {
    const auto t0 = clock_type::now();
    const std::vector<OperatorSpec> ops{OperatorSpec::bitflip(1.0), OperatorSpec::crossover(2, 9.0)};
    RandomSource rng(2009);
    std::size_t crossover = 0;
    constexpr std::size_t draws = 100000;
    for (std::size_t i = 0; i < draws; ++i) crossover += aevo::choose_operator(ops, rng) == 1 ? 1 : 0;
    const double freq = static_cast<double>(crossover) / draws;
    const double ms = ms_since(t0);
    std::ostringstream d;
    d << "crossover frequency " << freq << " (0.90 +/- 0.01), " << ms << " ms (< 1000)";
    return {std::abs(freq - 0.9) <= 0.01 && ms < 1000.0, d.str(), {}};
}

Verdict dot_reproduction() {
    const problems::DotProblemConfig dc{25, 10.0, 32};
    std::size_t reached = 0;
    std::vector<double> gens_to_level;
    Verdict v;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomSource rng(seed);
        const auto arena = problems::generate_random_arena(dc, rng);
        const double optimum = static_cast<double>(problems::grid_oracle(arena, 200).best_count);
        const double level = 0.9 * optimum;
        const FitnessFunction f = problems::dot_fitness(dc, arena);
        const std::vector<Terminator> terms{Terminator::max_generations(50),
                                            Terminator::target_fitness(static_cast<double>(dc.num_rects))};
        const auto t0 = clock_type::now();
        const auto result = run(random_population(64, dc.bits, rng), EasyStep(paper_operators()), f, terms, rng);
        const double ms = ms_since(t0);
        if (ms >= 1000.0) {
            v.warnings.push_back("seed " + std::to_string(seed) + " took " + std::to_string(ms) + " ms (advisory < 1 s)");
        }
        double first = INFINITY;
        for (const auto& gb : result.stats.best_per_generation) {
            if (gb.fitness >= level) {
                first = static_cast<double>(gb.generation);
                break;
            }
        }
        if (std::isfinite(first)) ++reached;
        gens_to_level.push_back(first);
    }
    // context only: the same protocol over a larger, disjoint block of seeds
    std::size_t wide_reached = 0;
    constexpr std::uint64_t wide_runs = 200;
    for (std::uint64_t seed = 21; seed < 21 + wide_runs; ++seed) {
        RandomSource rng(seed);
        const auto arena = problems::generate_random_arena(dc, rng);
        const double level = 0.9 * static_cast<double>(problems::grid_oracle(arena, 200).best_count);
        const FitnessFunction f = problems::dot_fitness(dc, arena);
        const std::vector<Terminator> terms{Terminator::max_generations(50)};
        const auto result = run(random_population(64, dc.bits, rng), EasyStep(paper_operators()), f, terms, rng);
        wide_reached += result.stats.best_per_generation.back().fitness >= level ? 1 : 0;
    }
    v.warnings.push_back("for context, seeds 21.." + std::to_string(20 + wide_runs) + " reached the level in " +
                         std::to_string(wide_reached) + "/" + std::to_string(wide_runs) + " runs");

    std::sort(gens_to_level.begin(), gens_to_level.end());
    const double median = 0.5 * (gens_to_level[9] + gens_to_level[10]);
    std::ostringstream d;
    d << reached << "/20 runs reached 0.9 x grid optimum (>= 18), median generations " << median << " (<= 40)";
    v.pass = reached >= 18 && median <= 40.0;
    v.detail = d.str();
    return v;
}

Verdict onemax_convergence() {
    std::size_t solved = 0;
    std::vector<std::size_t> gens;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomSource rng(1000 + seed);
        const std::vector<Terminator> terms{Terminator::max_generations(100), Terminator::target_fitness(32)};
        const auto result = run(random_population(64, 32, rng), EasyStep(paper_operators()), kOneMax, terms, rng);
        if (result.reason == StopReason::TargetFitness) ++solved;
        gens.push_back(result.stats.generations_executed);
    }
    std::sort(gens.begin(), gens.end());
    std::ostringstream d;
    d << solved << "/20 runs reached 32 within 100 generations (>= 18), median generations " << gens[10];
    return {solved >= 18, d.str(), {}};
}

Verdict stabbing_equivalence() {
    const auto t0 = clock_type::now();
    RandomSource rng(77);
    std::vector<problems::Rectangle> rects;
    for (std::size_t i = 0; i < 500; ++i) {
        const double x0 = rng.uniform01() * 100, y0 = rng.uniform01() * 100;
        rects.push_back({"r" + std::to_string(i), x0, y0, x0 + rng.uniform01() * 30, y0 + rng.uniform01() * 30});
    }
    const problems::RectangleArena arena(100.0, std::move(rects));
    std::size_t mismatches = 0, hits = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const double x = rng.uniform01() * 110, y = rng.uniform01() * 110;
        const auto indexed = arena.rectangles_containing_dot(x, y);
        const auto brute = arena.brute_force_containing(x, y);
        mismatches += indexed == brute ? 0 : 1;
        hits += brute.size();
    }
    const double ms = ms_since(t0);
    std::ostringstream d;
    d << mismatches << " mismatching queries of 1000 (" << hits << " containments), " << ms << " ms (< 5000)";
    return {mismatches == 0 && ms < 5000.0, d.str(), {}};
}

Verdict evaluation_accounting() {
    std::ostringstream d;
    bool ok = true;
    for (bool canonical : {false, true}) {
        auto calls = std::make_shared<std::size_t>(0);
        const FitnessFunction counted = [calls](const BitGenome& g) {
            ++*calls;
            return static_cast<double>(g.count_ones());
        };
        RandomSource rng(5);
        const std::vector<Terminator> terms{Terminator::max_generations(10)};
        std::vector<std::size_t> per_gen;
        std::size_t last = 64;
        auto observer = [&](const GenerationRecord& r) {
            per_gen.push_back(r.evaluations - last);
            last = r.evaluations;
        };
        const auto cfg = paper_operators();
        const auto result = canonical
                                ? run(random_population(64, 48, rng), CanonicalStep(cfg), counted, terms, rng, observer)
                                : run(random_population(64, 48, rng), EasyStep(cfg), counted, terms, rng, observer);
        const std::size_t offspring_per_gen = canonical ? 64 - replacement_count(0.2, 64) : replacement_count(0.2, 64);
        std::size_t expected = 64;
        for (auto n : per_gen) {
            ok = ok && n == offspring_per_gen;
            expected += n;
        }
        ok = ok && per_gen.size() == 10 && *calls == expected && result.stats.evaluations == expected &&
             expected == 64 + 10 * offspring_per_gen;
        d << (canonical ? "canonical" : "easy") << ": calls " << *calls << " = 64 + 10 x " << offspring_per_gen
          << (canonical ? "" : "; ");
    }
    return {ok, d.str(), {}};
}

std::vector<IslandConfig> figure_three_islands(std::uint64_t seed_base) {
    // two nodes, each listing the other; canonical step on Royal Road
    const std::vector<std::string> nodes{"node_1", "node_2"};
    std::vector<IslandConfig> cfgs;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        IslandConfig c;
        c.alias = nodes[i];
        c.peers = peers_of(nodes, nodes[i]);
        c.step = CanonicalStep(paper_operators());
        c.terminators = {Terminator::max_generations(10)};
        c.seed = seed_base + i;
        c.fitness = [](const BitGenome& g) { return static_cast<double>(problems::royal_road(g, 4)); };
        c.pop_size = 64;
        c.genome_length = 64;
        cfgs.push_back(std::move(c));
    }
    return cfgs;
}

Verdict island_model() {
    Archipelago arch(figure_three_islands(31));
    bool sizes_ok = true;
    while (arch.round()) {
        for (const auto& [alias, r] : arch.result().islands) sizes_ok = sizes_ok && r.population.size() == 64;
    }
    const auto result = arch.result();
    for (const auto& [alias, r] : result.islands) sizes_ok = sizes_ok && r.population.size() == 64;
    const auto& a = result.islands.at("node_1");
    const auto& b = result.islands.at("node_2");
    std::ostringstream d;
    d << "sent " << result.messages_sent << ", delivered " << result.messages_delivered << ", generations "
      << a.stats.generations_executed << "/" << b.stats.generations_executed << ", sizes "
      << (sizes_ok ? "invariant" : "CHANGED");
    const bool ok = result.messages_sent == 20 && result.messages_delivered == 20 &&
                    a.stats.generations_executed == 10 && b.stats.generations_executed == 10 && sizes_ok;
    return {ok, d.str(), {}};
}

Verdict determinism() {
    auto single = [](std::uint64_t seed) {
        RandomSource rng(seed);
        const problems::DotProblemConfig dc{25, 10.0, 32};
        const auto arena = problems::generate_random_arena(dc, rng);
        const FitnessFunction f = problems::dot_fitness(dc, arena);
        const std::vector<Terminator> terms{Terminator::max_generations(50)};
        return run(random_population(64, 32, rng), EasyStep(paper_operators()), f, terms, rng);
    };
    bool ok = true;
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const auto a = single(seed);
        const auto b = single(seed);
        ok = ok && a.stats.best_per_generation == b.stats.best_per_generation &&
             a.population.front().genome == b.population.front().genome;
    }
    auto archipelago = [](MigrationPolicy policy) {
        auto cfgs = figure_three_islands(8);
        for (auto& c : cfgs) c.policy = policy;
        return run_archipelago(std::move(cfgs));
    };
    for (auto policy : {MigrationPolicy::Best, MigrationPolicy::MostDifferent}) {
        const auto a = archipelago(policy);
        const auto b = archipelago(policy);
        ok = ok && a.log == b.log;
        for (const auto& [alias, ra] : a.islands) {
            const auto& rb = b.islands.at(alias);
            ok = ok && ra.stats.best_per_generation == rb.stats.best_per_generation &&
                 ra.population.front().genome == rb.population.front().genome;
        }
    }
    return {ok, "3 single runs and 2 archipelagos repeated with identical histories and best genomes", {}};
}

Verdict monotonicity() {
    RandomSource meta(4242);
    std::size_t violations = 0, runs = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + meta.index(60);
        const std::size_t len = 8 + meta.index(56);
        const EasyStepConfig cfg{0.05 + 0.4 * meta.uniform01(),
                                 {OperatorSpec::bitflip(0.5 + meta.uniform01(), 1 + meta.index(3)),
                                  OperatorSpec::crossover(1 + meta.index(len - 1), 0.5 + 9 * meta.uniform01())}};
        if (replacement_count(cfg.selection_rate, n) >= n) continue;
        const std::size_t problem = meta.index(3);
        const FitnessFunction f = [problem](const BitGenome& g) {
            if (problem == 0) return static_cast<double>(problems::onemax(g));
            if (problem == 1) return static_cast<double>(problems::royal_road(g, 1));
            // deceptive-ish: reward the ones in the first half, penalise the rest
            std::size_t score = 0;
            for (std::size_t i = 0; i < g.size(); ++i) score += (i < g.size() / 2) == g[i] ? 1 : 0;
            return static_cast<double>(score);
        };
        const std::vector<Terminator> terms{Terminator::max_generations(40)};
        const std::uint64_t seed = meta.split();
        for (bool canonical : {false, true}) {
            RandomSource rng(seed);
            const auto result = canonical ? run(random_population(n, len, rng), CanonicalStep(cfg), f, terms, rng)
                                          : run(random_population(n, len, rng), EasyStep(cfg), f, terms, rng);
            const auto& h = result.stats.best_per_generation;
            for (std::size_t i = 1; i < h.size(); ++i) violations += h[i].fitness < h[i - 1].fitness ? 1 : 0;
            ++runs;
        }
    }
    std::ostringstream d;
    d << runs << " runs (easy + canonical), " << violations << " decreases of best fitness";
    return {violations == 0 && runs >= 50, d.str(), {}};
}

Verdict decode_endpoints() {
    bool ok = true;
    for (std::size_t gene_bits : {1u, 4u, 8u, 16u}) {
        for (auto [lo, hi] : {std::pair{0.0, 10.0}, std::pair{-1.25, 3.5}, std::pair{1e-9, 7e9}}) {
            for (double v : decode(BitGenome::zeros(gene_bits * 3), gene_bits, lo, hi)) ok = ok && v == lo;
            for (double v : decode(BitGenome::ones(gene_bits * 3), gene_bits, lo, hi)) ok = ok && v == hi;
        }
    }
    std::size_t checked = 0;
    for (std::size_t gene_bits = 1; gene_bits <= 8; ++gene_bits) {
        double prev = -INFINITY;
        for (std::uint32_t u = 0; u < (1u << gene_bits); ++u) {
            BitGenome g(gene_bits);
            for (std::size_t i = 0; i < gene_bits; ++i) g.set(i, (u >> (gene_bits - 1 - i)) & 1u);
            const double v = decode(g, gene_bits, 0.0, 10.0)[0];
            ok = ok && v > prev;
            prev = v;
            ++checked;
        }
    }
    return {ok, "endpoints exact for gene_bits {1,4,8,16}; " + std::to_string(checked) + " chunks strictly monotone",
            {}};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {"AC1 operator-mix fidelity", operator_mix},
        {"AC2 dot-in-rectangles reproduction", dot_reproduction},
        {"AC3 OneMax convergence", onemax_convergence},
        {"AC4 stabbing-index oracle equivalence", stabbing_equivalence},
        {"AC5 evaluation accounting", evaluation_accounting},
        {"AC6 island model, two nodes", island_model},
        {"AC7 determinism", determinism},
        {"AC8 best-fitness monotonicity", monotonicity},
        {"AC9 decode endpoint exactness", decode_endpoints},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what(), {}};
        }
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << v.detail << '\n';
        for (const auto& w : v.warnings) std::cout << "       note: " << w << '\n';
        failures += v.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
