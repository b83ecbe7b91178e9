#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <aevo/genome.hpp>
#include <aevo/random.hpp>

namespace aevo {

/// Invert `flip_count` distinct bits.
struct BitFlip {
    std::size_t flip_count = 1;
};

/// Recombine two parents at `points` distinct cut positions.
struct NPointCrossover {
    std::size_t points = 2;
};

/// A variation operator together with its priority. Priorities are
/// normalised into probabilities each time an operator is picked, so they
/// can be edited between generations.
struct OperatorSpec {
    std::variant<BitFlip, NPointCrossover> kind;
    double rate = 1.0;

    static OperatorSpec bitflip(double rate = 1.0, std::size_t flip_count = 1) {
        return {BitFlip{flip_count}, rate};
    }
    static OperatorSpec crossover(std::size_t points, double rate) { return {NPointCrossover{points}, rate}; }

    bool is_crossover() const noexcept { return std::holds_alternative<NPointCrossover>(kind); }

    /// Number of parents the operator consumes.
    std::size_t arity() const noexcept { return is_crossover() ? 2 : 1; }

    std::string name() const {
        if (const auto* c = std::get_if<NPointCrossover>(&kind)) {
            return "crossover(" + std::to_string(c->points) + ")";
        }
        return "bitflip(" + std::to_string(std::get<BitFlip>(kind).flip_count) + ")";
    }
};

/// Copy of `genome` with exactly `flip_count` distinct, uniformly chosen
/// positions inverted.
inline BitGenome bitflip(const BitGenome& genome, std::size_t flip_count, RandomSource& rng) {
    if (flip_count == 0 || flip_count > genome.size()) {
        throw std::invalid_argument("bitflip: flip_count must be in [1, length]");
    }
    BitGenome child = genome;
    if (flip_count == 1) {
        child.flip(rng.index(genome.size()));
        return child;
    }
    std::vector<std::size_t> all(genome.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> picked;
    picked.reserve(flip_count);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), flip_count, rng);
    for (auto pos : picked) {
        child.flip(pos);
    }
    return child;
}

/// Offspring built from alternating segments of `a` and `b`, starting with
/// `a`. A cut at position c means bit c is the first bit of the next
/// segment. `cuts` must be strictly increasing values in [1, length - 1].
inline BitGenome crossover_at(const BitGenome& a, const BitGenome& b, std::span<const std::size_t> cuts) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("crossover: parent lengths differ");
    }
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        if (cuts[k] == 0 || cuts[k] >= a.size() || (k > 0 && cuts[k] <= cuts[k - 1])) {
            throw std::invalid_argument("crossover: cuts must be strictly increasing in [1, length-1]");
        }
    }
    BitGenome child = a;
    bool from_b = false;
    std::size_t next = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        while (next < cuts.size() && cuts[next] == i) {
            from_b = !from_b;
            ++next;
        }
        if (from_b) child.set(i, b[i]);
    }
    return child;
}

inline BitGenome n_point_crossover(const BitGenome& a, const BitGenome& b, std::size_t points, RandomSource& rng) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("n_point_crossover: parent lengths differ");
    }
    if (points == 0 || points >= a.size()) {
        throw std::invalid_argument("n_point_crossover: points must be in [1, length-1]");
    }
    std::vector<std::size_t> positions(a.size() - 1);
    std::iota(positions.begin(), positions.end(), std::size_t{1});
    std::vector<std::size_t> cuts;
    cuts.reserve(points);
    // std::sample over forward iterators keeps the relative order, so cuts come out sorted
    std::sample(positions.begin(), positions.end(), std::back_inserter(cuts), points, rng);
    return crossover_at(a, b, cuts);
}

/// Index i drawn with probability rate_i / sum(rates).
inline std::size_t choose_operator(std::span<const OperatorSpec> ops, RandomSource& rng) {
    if (ops.empty()) {
        throw std::invalid_argument("choose_operator: no operators");
    }
    double total = 0.0;
    for (const auto& op : ops) {
        if (!(op.rate > 0.0)) {
            throw std::invalid_argument("choose_operator: operator rates must be positive");
        }
        total += op.rate;
    }
    const double ticket = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        acc += ops[i].rate;
        if (ticket < acc) return i;
    }
    return ops.size() - 1;
}

} // namespace aevo
