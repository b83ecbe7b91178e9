#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <aevo/random.hpp>

namespace aevo {

/// Fixed-length bit vector; the evolvable representation.
class BitGenome {
public:
    explicit BitGenome(std::size_t length) : bits_(check_length(length), 0) {}

    /// Parse a string of '0'/'1' characters. Spaces are ignored so that
    /// "1011 0010" reads naturally in tests.
    static BitGenome from_string(std::string_view text) {
        std::vector<std::uint8_t> bits;
        bits.reserve(text.size());
        for (char c : text) {
            if (c == '0' || c == '1') {
                bits.push_back(static_cast<std::uint8_t>(c - '0'));
            } else if (c != ' ') {
                throw std::invalid_argument("BitGenome: invalid character '" + std::string(1, c) + "'");
            }
        }
        return BitGenome(std::move(bits));
    }

    static BitGenome zeros(std::size_t length) { return BitGenome(length); }
    static BitGenome ones(std::size_t length) {
        BitGenome g(length);
        for (auto& b : g.bits_) b = 1;
        return g;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
    bool at(std::size_t i) const { return bits_.at(i) != 0; }

    void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
    void flip(std::size_t i) { bits_.at(i) ^= 1; }

    std::size_t count_ones() const noexcept {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    BitGenome complement() const {
        BitGenome g = *this;
        for (auto& b : g.bits_) b ^= 1;
        return g;
    }

    std::string to_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            if (bits_[i]) s[i] = '1';
        }
        return s;
    }

    friend bool operator==(const BitGenome&, const BitGenome&) = default;

    friend std::ostream& operator<<(std::ostream& os, const BitGenome& g) { return os << g.to_string(); }

private:
    explicit BitGenome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) { check_length(bits_.size()); }

    static std::size_t check_length(std::size_t length) {
        if (length == 0) {
            throw std::invalid_argument("BitGenome: length must be at least 1");
        }
        return length;
    }

    std::vector<std::uint8_t> bits_;
};

/// Genome with each bit an independent fair coin.
inline BitGenome random_genome(std::size_t length, RandomSource& rng) {
    if (length == 0) {
        throw std::invalid_argument("random_genome: length must be at least 1");
    }
    BitGenome g(length);
    for (std::size_t i = 0; i < length; ++i) {
        g.set(i, rng.coin());
    }
    return g;
}

/// Split the genome into consecutive big-endian chunks of `gene_bits` bits and
/// map each unsigned chunk value u onto [min, max] as
/// min + u / (2^gene_bits - 1) * (max - min).
///
/// The all-zero chunk yields exactly `min` and the all-one chunk exactly `max`.
inline std::vector<double> decode(const BitGenome& genome, std::size_t gene_bits, double min, double max) {
    if (gene_bits == 0 || genome.size() % gene_bits != 0) {
        throw std::invalid_argument("decode: gene_bits must divide the genome length");
    }
    if (gene_bits > 63) {
        throw std::invalid_argument("decode: gene_bits must be at most 63");
    }
    if (!(min < max)) {
        throw std::invalid_argument("decode: min must be less than max");
    }
    const auto top = static_cast<double>((std::uint64_t{1} << gene_bits) - 1);
    const double span = max - min;
    std::vector<double> values;
    values.reserve(genome.size() / gene_bits);
    for (std::size_t start = 0; start < genome.size(); start += gene_bits) {
        std::uint64_t u = 0;
        for (std::size_t i = start; i < start + gene_bits; ++i) {
            u = (u << 1) | static_cast<std::uint64_t>(genome[i]);
        }
        const double t = static_cast<double>(u) / top;
        // t == 1 would otherwise round to something other than max
        values.push_back(t == 1.0 ? max : min + t * span);
    }
    return values;
}

inline std::size_t hamming(const BitGenome& a, const BitGenome& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hamming: genome lengths differ");
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += a[i] != b[i] ? 1 : 0;
    }
    return d;
}

} // namespace aevo
