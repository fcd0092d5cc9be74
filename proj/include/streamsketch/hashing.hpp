#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace streamsketch {

/// Opaque identifier for nodes, edges and categorical values.
using Key = std::uint64_t;

/// Mersenne prime 2^61 - 1, modulus of the pairwise-independent hash family.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// Reduces x modulo 2^61 - 1.
constexpr std::uint64_t mod_mersenne61(std::uint64_t x) {
    std::uint64_t r = (x & kMersenne61) + (x >> 61);
    return r >= kMersenne61 ? r - kMersenne61 : r;
}

/// h(x) = ((a*x + b) mod P) mod n, P = 2^61 - 1.
class PairwiseHash {
public:
    PairwiseHash() = default;
    PairwiseHash(std::uint64_t a, std::uint64_t b, std::size_t range);

    /// Draws a random odd multiplier and a random offset from `rng`.
    static PairwiseHash random(std::mt19937_64& rng, std::size_t range);

    std::size_t operator()(Key x) const {
        __extension__ using u128 = unsigned __int128;
        const u128 prod = static_cast<u128>(a_) * mod_mersenne61(x) + b_;
        // prod < 2^122, fold twice
        std::uint64_t lo = static_cast<std::uint64_t>(prod & kMersenne61);
        std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
        return static_cast<std::size_t>(mod_mersenne61(lo + mod_mersenne61(hi)) % range_);
    }

    std::uint64_t multiplier() const { return a_; }
    std::uint64_t offset() const { return b_; }
    std::size_t range() const { return range_; }

    bool operator==(const PairwiseHash&) const = default;

private:
    std::uint64_t a_ = 1;
    std::uint64_t b_ = 0;
    std::size_t range_ = 1;
};

/// Bijective 64-bit mixer (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Key for the ordered pair (u, v).
constexpr Key edge_key(Key u, Key v) { return mix64(mix64(u) ^ v); }

/// Decimal integer tokens map to their value; anything else to FNV-1a 64.
Key key_from_token(std::string_view token);

/// Portable uniform helpers over mt19937_64 (whose output sequence is fixed by the standard).
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);
double uniform_real(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);

}  // namespace streamsketch
