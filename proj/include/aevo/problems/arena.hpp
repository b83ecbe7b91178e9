#pragma once

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <aevo/genome.hpp>
#include <aevo/random.hpp>

namespace aevo::problems {

/// Axis-aligned rectangle with closed boundaries.
struct Rectangle {
    std::string id;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool contains(double x, double y) const noexcept { return x0 <= x && x <= x1 && y0 <= y && y <= y1; }

    friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

/// Immutable set of rectangles answering point-stabbing queries.
///
/// The index keeps rectangle slots ordered by x0; a query binary-searches
/// the last rectangle starting at or before x and only checks that prefix
/// exactly. Results are reported in insertion order.
class RectangleArena {
public:
    explicit RectangleArena(double arena_side, std::vector<Rectangle> rects = {})
        : side_(arena_side), rects_(std::move(rects)) {
        if (!(arena_side > 0.0)) {
            throw std::invalid_argument("RectangleArena: arena_side must be positive");
        }
        std::unordered_set<std::string> ids;
        for (const auto& r : rects_) {
            if (!(r.x0 <= r.x1 && r.y0 <= r.y1)) {
                throw std::invalid_argument("RectangleArena: rectangle '" + r.id + "' has inverted corners");
            }
            if (!ids.insert(r.id).second) {
                throw std::invalid_argument("RectangleArena: duplicate rectangle id '" + r.id + "'");
            }
        }
        build_index();
    }

    double side() const noexcept { return side_; }
    std::size_t size() const noexcept { return rects_.size(); }
    bool empty() const noexcept { return rects_.empty(); }
    const std::vector<Rectangle>& rectangles() const noexcept { return rects_; }

    /// Positions (insertion indices) of every rectangle containing (x, y).
    std::vector<std::size_t> containing(double x, double y) const {
        const auto end = std::upper_bound(x0_sorted_.begin(), x0_sorted_.end(), x);
        const auto prefix = static_cast<std::size_t>(end - x0_sorted_.begin());
        std::vector<std::size_t> hits;
        for (std::size_t k = 0; k < prefix; ++k) {
            const auto& r = rects_[order_[k]];
            if (x <= r.x1 && r.y0 <= y && y <= r.y1) hits.push_back(order_[k]);
        }
        std::sort(hits.begin(), hits.end());
        return hits;
    }

    std::size_t count_containing(double x, double y) const {
        const auto end = std::upper_bound(x0_sorted_.begin(), x0_sorted_.end(), x);
        const auto prefix = static_cast<std::size_t>(end - x0_sorted_.begin());
        std::size_t n = 0;
        for (std::size_t k = 0; k < prefix; ++k) {
            const auto& r = rects_[order_[k]];
            n += (x <= r.x1 && r.y0 <= y && y <= r.y1) ? 1 : 0;
        }
        return n;
    }

    /// Ids of the rectangles containing (x, y), in insertion order.
    std::vector<std::string> rectangles_containing_dot(double x, double y) const {
        std::vector<std::string> ids;
        for (auto i : containing(x, y)) ids.push_back(rects_[i].id);
        return ids;
    }

    /// Linear scan over every rectangle; reference for the indexed query.
    std::vector<std::string> brute_force_containing(double x, double y) const {
        std::vector<std::string> ids;
        for (const auto& r : rects_) {
            if (r.contains(x, y)) ids.push_back(r.id);
        }
        return ids;
    }

private:
    void build_index() {
        order_.resize(rects_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [this](std::size_t a, std::size_t b) { return rects_[a].x0 < rects_[b].x0; });
        x0_sorted_.clear();
        x0_sorted_.reserve(order_.size());
        for (auto i : order_) x0_sorted_.push_back(rects_[i].x0);
    }

    double side_;
    std::vector<Rectangle> rects_;
    std::vector<std::size_t> order_;
    std::vector<double> x0_sorted_;
};

struct DotProblemConfig {
    std::size_t num_rects = 25;
    double arena_side = 10.0;
    std::size_t bits = 32;

    void validate() const {
        if (num_rects < 1) throw std::invalid_argument("num_rects must be at least 1");
        if (!(arena_side > 0.0)) throw std::invalid_argument("arena_side must be positive");
        if (bits < 2 || bits % 2 != 0) throw std::invalid_argument("bits must be even and at least 2");
        if (bits / 2 > 63) throw std::invalid_argument("bits must be at most 126");
    }
};

/// num_rects + 1 rectangles ("rectangle_0" .. "rectangle_<num_rects>"):
/// lower-left corner uniform in [0, side)^2, width and height uniform in
/// (0, side). Rectangles may extend past the arena.
inline RectangleArena generate_random_arena(const DotProblemConfig& cfg, RandomSource& rng) {
    cfg.validate();
    const double side = cfg.arena_side;
    auto open_side = [&] {
        double v = 0.0;
        while (v == 0.0) v = rng.uniform01() * side;
        return v;
    };
    std::vector<Rectangle> rects;
    rects.reserve(cfg.num_rects + 1);
    for (std::size_t i = 0; i <= cfg.num_rects; ++i) {
        const double x0 = rng.uniform01() * side;
        const double y0 = rng.uniform01() * side;
        const double w = open_side();
        const double h = open_side();
        rects.push_back({"rectangle_" + std::to_string(i), x0, y0, x0 + w, y0 + h});
    }
    return RectangleArena(side, std::move(rects));
}

/// Fitness closure: decode the genome into a dot and count the rectangles
/// that contain it.
class DotFitness {
public:
    DotFitness(DotProblemConfig cfg, const RectangleArena& arena) : cfg_(cfg), arena_(&arena) { cfg_.validate(); }

    std::pair<double, double> dot(const BitGenome& genome) const {
        if (genome.size() != cfg_.bits) {
            throw std::invalid_argument("dot fitness: expected " + std::to_string(cfg_.bits) + " bits, got " +
                                        std::to_string(genome.size()));
        }
        const auto xy = decode(genome, cfg_.bits / 2, 0.0, cfg_.arena_side);
        return {xy[0], xy[1]};
    }

    double operator()(const BitGenome& genome) const {
        const auto [x, y] = dot(genome);
        return static_cast<double>(arena_->count_containing(x, y));
    }

private:
    DotProblemConfig cfg_;
    const RectangleArena* arena_;
};

inline DotFitness dot_fitness(const DotProblemConfig& cfg, const RectangleArena& arena) { return {cfg, arena}; }

struct GridOptimum {
    std::size_t best_count = 0;
    double x = 0.0;
    double y = 0.0;
};

/// Exhaustive containment count over a resolution x resolution grid
/// covering [0, side]^2 (both edges included). Ties go to the lowest grid
/// index, scanning x-major.
inline GridOptimum grid_oracle(const RectangleArena& arena, std::size_t resolution) {
    if (resolution < 2) throw std::invalid_argument("grid_oracle: resolution must be at least 2");
    const double step = arena.side() / static_cast<double>(resolution - 1);
    GridOptimum best;
    bool first = true;
    for (std::size_t i = 0; i < resolution; ++i) {
        const double x = i + 1 == resolution ? arena.side() : static_cast<double>(i) * step;
        for (std::size_t j = 0; j < resolution; ++j) {
            const double y = j + 1 == resolution ? arena.side() : static_cast<double>(j) * step;
            std::size_t n = 0;
            for (const auto& r : arena.rectangles()) n += r.contains(x, y) ? 1 : 0;
            if (first || n > best.best_count) {
                best = {n, x, y};
                first = false;
            }
        }
    }
    return best;
}

/// One rectangle per line: `id x0 y0 x1 y1`.
inline void write_arena(std::ostream& os, const RectangleArena& arena) {
    const auto old = os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : arena.rectangles()) {
        os << r.id << ' ' << r.x0 << ' ' << r.y0 << ' ' << r.x1 << ' ' << r.y1 << '\n';
    }
    os.precision(old);
}

/// Parse the format written by write_arena. Blank lines and lines starting
/// with '#' are skipped.
inline RectangleArena read_arena(std::istream& is, double arena_side) {
    std::vector<Rectangle> rects;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream in(line);
        Rectangle r;
        std::string extra;
        if (!(in >> r.id >> r.x0 >> r.y0 >> r.x1 >> r.y1) || (in >> extra)) {
            throw std::invalid_argument("arena line " + std::to_string(lineno) + ": expected 'id x0 y0 x1 y1'");
        }
        rects.push_back(std::move(r));
    }
    return RectangleArena(arena_side, std::move(rects));
}

} // namespace aevo::problems
