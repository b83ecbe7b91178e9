#pragma once

#include <cstddef>
#include <stdexcept>

#include <aevo/genome.hpp>

namespace aevo::problems {

inline std::size_t onemax(const BitGenome& genome) { return genome.count_ones(); }

/// Number of consecutive, disjoint blocks of `block_size` bits that are all ones.
inline std::size_t royal_road(const BitGenome& genome, std::size_t block_size = 4) {
    if (block_size == 0 || genome.size() % block_size != 0) {
        throw std::invalid_argument("royal_road: block_size must divide the genome length");
    }
    std::size_t complete = 0;
    for (std::size_t start = 0; start < genome.size(); start += block_size) {
        bool all = true;
        for (std::size_t i = start; i < start + block_size && all; ++i) all = genome[i];
        complete += all ? 1 : 0;
    }
    return complete;
}

} // namespace aevo::problems
