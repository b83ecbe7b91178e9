#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <aevo/engine.hpp>
#include <aevo/genome.hpp>
#include <aevo/random.hpp>

namespace aevo {

enum class MigrationPolicy { Best, MostDifferent };

inline const char* to_string(MigrationPolicy p) { return p == MigrationPolicy::Best ? "best" : "mostdifferent"; }

/// One individual travelling between islands.
struct MigrantMessage {
    std::string source;
    std::size_t generation = 1;
    Individual individual;
};

using StepVariant = std::variant<EasyStep, CanonicalStep>;

struct IslandConfig {
    std::string alias;
    std::vector<std::string> peers;
    StepVariant step{EasyStep{{}}};
    std::vector<Terminator> terminators;
    MigrationPolicy policy = MigrationPolicy::Best;
    std::uint64_t seed = 0;

    FitnessFunction fitness;
    std::size_t pop_size = 64;
    std::size_t genome_length = 32;
};

/// Per-locus majority genome; a tied locus becomes 1.
inline BitGenome consensus(const Population& pop) {
    if (pop.empty()) throw std::invalid_argument("consensus: empty population");
    const std::size_t len = pop.front().genome.size();
    std::vector<std::size_t> ones(len, 0);
    for (const auto& ind : pop) {
        if (ind.genome.size() != len) throw std::invalid_argument("consensus: genome lengths differ");
        for (std::size_t i = 0; i < len; ++i) ones[i] += ind.genome[i] ? 1 : 0;
    }
    BitGenome c(len);
    for (std::size_t i = 0; i < len; ++i) c.set(i, 2 * ones[i] >= pop.size());
    return c;
}

/// Copy of the individual to send. Best takes the highest fitness (first on
/// ties). MostDifferent takes the largest Hamming distance from the
/// sender's consensus genome; ties go to the later individual, which in a
/// sorted population is the weaker one.
inline Individual select_migrant(MigrationPolicy policy, const Population& pop, RandomSource& /*rng*/) {
    if (pop.empty()) throw std::invalid_argument("select_migrant: empty population");
    if (policy == MigrationPolicy::Best) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pop.size(); ++i) {
            if (pop[i].fitness_or_throw() > pop[best].fitness_or_throw()) best = i;
        }
        return pop[best];
    }
    const BitGenome centre = consensus(pop);
    std::size_t pick = 0;
    std::size_t widest = 0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const std::size_t d = hamming(pop[i].genome, centre);
        if (d >= widest) {
            widest = d;
            pick = i;
        }
    }
    return pop[pick];
}

/// Replace the current worst individual with the migrant, unconditionally.
/// Throws std::invalid_argument on a genome-length mismatch, leaving `pop`
/// untouched.
inline void integrate_migrant(Population& pop, Individual migrant, const FitnessFunction& f, RunStats& stats) {
    if (pop.empty()) throw std::invalid_argument("integrate_migrant: empty population");
    if (migrant.genome.size() != pop.front().genome.size()) {
        throw std::invalid_argument("integrate_migrant: migrant has " + std::to_string(migrant.genome.size()) +
                                    " bits, local genomes have " + std::to_string(pop.front().genome.size()));
    }
    Population incoming;
    incoming.push_back(std::move(migrant));
    evaluate_population(incoming, f, stats);
    sort_population(pop);
    pop.back() = std::move(incoming.front());
    sort_population(pop);
}

struct IslandResult {
    Population population;
    RunStats stats;
    std::optional<StopReason> reason;
    std::size_t sent = 0;
    std::size_t received = 0;
    std::size_t rejected = 0;
};

struct ArchipelagoResult {
    std::map<std::string, IslandResult> islands;
    std::vector<std::string> log;
    std::size_t messages_sent = 0;
    std::size_t messages_delivered = 0;
    std::size_t rounds = 0;
};

using IslandObserver = std::function<void(const std::string& alias, const GenerationRecord&)>;

/// Cooperative round-robin scheduler. Every round steps each live island
/// once, in configuration order, after handing it the messages queued for
/// it. Islands share nothing but their mailboxes.
///
/// Event log lines: `<round> <alias> <step|send|recv> <detail>`.
class Archipelago {
public:
    explicit Archipelago(std::vector<IslandConfig> configs, IslandObserver observer = {})
        : observer_(std::move(observer)) {
        validate(configs);
        islands_.reserve(configs.size());
        for (auto& cfg : configs) {
            index_.emplace(cfg.alias, islands_.size());
            islands_.push_back(Island{std::move(cfg)});
        }
        for (auto& island : islands_) start(island);
    }

    Archipelago(const Archipelago&) = delete;
    Archipelago& operator=(const Archipelago&) = delete;

    bool finished() const {
        for (const auto& island : islands_) {
            if (!island.reason) return false;
        }
        return true;
    }

    /// One scheduling round. Returns false once every island has stopped.
    bool round() {
        if (finished()) return false;
        ++round_;
        for (auto& island : islands_) {
            deliver(island);
            if (!island.reason) island_step(island);
        }
        if (finished()) drain();
        return !finished();
    }

    void run() {
        while (round()) {
        }
    }

    ArchipelagoResult result() const {
        ArchipelagoResult out;
        for (const auto& island : islands_) {
            out.islands.emplace(island.cfg.alias, IslandResult{island.pop, island.stats, island.reason, island.sent,
                                                               island.received, island.rejected});
        }
        out.log = log_;
        out.messages_sent = sent_;
        out.messages_delivered = delivered_;
        out.rounds = round_;
        return out;
    }

    const std::vector<std::string>& log() const noexcept { return log_; }
    std::size_t messages_sent() const noexcept { return sent_; }
    std::size_t messages_delivered() const noexcept { return delivered_; }
    std::size_t pending_messages() const {
        std::size_t n = 0;
        for (const auto& island : islands_) n += island.mailbox.size();
        return n;
    }

private:
    struct Island {
        explicit Island(IslandConfig c) : cfg(std::move(c)), rng(cfg.seed) {}

        IslandConfig cfg;
        RandomSource rng;
        Population pop;
        RunStats stats;
        std::optional<StopReason> reason;
        std::deque<MigrantMessage> mailbox;
        std::size_t sent = 0;
        std::size_t received = 0;
        std::size_t rejected = 0;
    };

    static void validate(const std::vector<IslandConfig>& configs) {
        if (configs.empty()) throw std::invalid_argument("archipelago: at least one island is required");
        std::set<std::string> aliases;
        for (const auto& c : configs) {
            if (!aliases.insert(c.alias).second) {
                throw std::invalid_argument("archipelago: duplicate island alias '" + c.alias + "'");
            }
        }
        for (const auto& c : configs) {
            std::set<std::string> seen;
            for (const auto& p : c.peers) {
                if (p == c.alias) throw std::invalid_argument("island '" + c.alias + "' lists itself as a peer");
                if (!seen.insert(p).second) {
                    throw std::invalid_argument("island '" + c.alias + "' lists peer '" + p + "' twice");
                }
                if (!aliases.count(p)) {
                    throw std::invalid_argument("island '" + c.alias + "' has unknown peer '" + p + "'");
                }
            }
            if (c.terminators.empty()) {
                throw std::invalid_argument("island '" + c.alias + "' has no terminator");
            }
            if (!c.fitness) throw std::invalid_argument("island '" + c.alias + "' has no fitness function");
        }
    }

    void start(Island& island) {
        const auto t0 = std::chrono::steady_clock::now();
        island.pop = random_population(island.cfg.pop_size, island.cfg.genome_length, island.rng);
        detail::ensure_evaluated_sorted(island.pop, island.cfg.fitness, island.stats);
        island.stats.best_per_generation.push_back({0, island.pop.front().fitness_or_throw()});
        island.stats.wall_time += std::chrono::steady_clock::now() - t0;
        check(island);
    }

    void check(Island& island) {
        island.reason =
            check_terminators(island.cfg.terminators, island.stats.generations_executed, best_of(island));
    }

    static double best_of(const Island& island) { return island.pop.front().fitness_or_throw(); }

    void deliver(Island& island) {
        while (!island.mailbox.empty()) {
            MigrantMessage msg = std::move(island.mailbox.front());
            island.mailbox.pop_front();
            ++delivered_;
            ++island.received;
            std::string outcome;
            if (island.reason) {
                outcome = "discarded";
            } else {
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    integrate_migrant(island.pop, std::move(msg.individual), island.cfg.fitness, island.stats);
                    island.stats.wall_time += std::chrono::steady_clock::now() - t0;
                    outcome = "integrated";
                } catch (const std::invalid_argument& e) {
                    ++island.rejected;
                    outcome = std::string("rejected: ") + e.what();
                }
            }
            emit(island.cfg.alias, "recv", "from=" + msg.source + " gen=" + std::to_string(msg.generation) + " " + outcome);
        }
    }

    void island_step(Island& island) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t n = island.pop.size();
        island.pop = std::visit(
            [&](const auto& step) { return step(std::move(island.pop), island.cfg.fitness, island.rng, island.stats); },
            island.cfg.step);
        if (island.pop.size() != n) throw std::logic_error("island step changed the population size");
        const std::size_t gen = ++island.stats.generations_executed;
        const double best = best_of(island);
        island.stats.best_per_generation.push_back({gen, best});
        emit(island.cfg.alias, "step", "gen=" + std::to_string(gen) + " best=" + format(best));

        for (const auto& peer : island.cfg.peers) {
            Individual migrant = select_migrant(island.cfg.policy, island.pop, island.rng);
            const double fit = migrant.fitness_or_throw();
            islands_[index_.at(peer)].mailbox.push_back({island.cfg.alias, gen, std::move(migrant)});
            ++sent_;
            ++island.sent;
            emit(island.cfg.alias, "send", "to=" + peer + " gen=" + std::to_string(gen) + " fitness=" + format(fit));
        }
        island.stats.wall_time += std::chrono::steady_clock::now() - t0;
        check(island);
        if (observer_) {
            observer_(island.cfg.alias, {gen, best, island.stats.evaluations, island.stats.wall_time.count()});
        }
    }

    // Messages posted during the last round land in mailboxes of islands that
    // already stopped; hand them over so nothing stays in flight.
    void drain() {
        if (pending_messages() == 0) return;
        ++round_;
        for (auto& island : islands_) deliver(island);
    }

    void emit(const std::string& alias, const char* event, const std::string& detail) {
        log_.push_back(std::to_string(round_) + ' ' + alias + ' ' + event + ' ' + detail);
    }

    static std::string format(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    std::vector<Island> islands_;
    std::map<std::string, std::size_t> index_;
    IslandObserver observer_;
    std::vector<std::string> log_;
    std::size_t round_ = 0;
    std::size_t sent_ = 0;
    std::size_t delivered_ = 0;
};

inline ArchipelagoResult run_archipelago(std::vector<IslandConfig> configs, IslandObserver observer = {}) {
    Archipelago archipelago(std::move(configs), std::move(observer));
    archipelago.run();
    return archipelago.result();
}

/// Fully connected topology: every island lists all the others as peers.
inline std::vector<std::string> peers_of(const std::vector<std::string>& aliases, const std::string& self) {
    std::vector<std::string> out;
    for (const auto& a : aliases) {
        if (a != self) out.push_back(a);
    }
    return out;
}

} // namespace aevo
