#include "streamsketch/hashing.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace streamsketch {

PairwiseHash::PairwiseHash(std::uint64_t a, std::uint64_t b, std::size_t range)
    : a_(mod_mersenne61(a)), b_(mod_mersenne61(b)), range_(range) {
    if (range_ == 0) throw std::invalid_argument("hash range must be positive");
    if (a_ == 0) throw std::invalid_argument("hash multiplier must be nonzero mod P");
}

PairwiseHash PairwiseHash::random(std::mt19937_64& rng, std::size_t range) {
    std::uint64_t a = 0;
    while (a == 0) a = (uniform_index(rng, kMersenne61) | 1u);
    const std::uint64_t b = uniform_index(rng, kMersenne61);
    return PairwiseHash(a, b, range);
}

Key key_from_token(std::string_view token) {
    if (!token.empty() && token.size() <= 19) {
        bool digits = true;
        std::uint64_t value = 0;
        for (char c : token) {
            if (c < '0' || c > '9') {
                digits = false;
                break;
            }
            value = value * 10 + static_cast<std::uint64_t>(c - '0');
        }
        if (digits) return value;
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : token) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    // rejection sampling keeps the draw unbiased and platform independent
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

double uniform_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
    // Box-Muller; one variate per call
    double u1 = uniform_real(rng);
    while (u1 <= 0.0) u1 = uniform_real(rng);
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace streamsketch
