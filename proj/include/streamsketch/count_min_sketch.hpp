#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "streamsketch/hashing.hpp"

namespace streamsketch {

/// Count-min sketch with real-valued counters.
///
/// Every row owns an independent pairwise hash. Counters are doubles so that
/// temporal decay can scale them by a fraction; they never go negative.
/// Single-writer: callers serialize updates.
class CountMinSketch {
public:
    static constexpr std::size_t kDefaultRows = 2;
    static constexpr std::size_t kDefaultBuckets = 1024;

    CountMinSketch(std::size_t rows, std::size_t buckets, std::uint64_t seed);

    /// Same rows, buckets and hashes as `layout`, all counters zero.
    static CountMinSketch zeros_like(const CountMinSketch& layout);

    std::size_t rows() const { return rows_; }
    std::size_t buckets() const { return buckets_; }

    std::size_t bucket(std::size_t row, Key key) const { return hashes_[row](key); }
    const PairwiseHash& row_hash(std::size_t row) const { return hashes_[row]; }

    /// Adds w >= 0 to the key's bucket in every row.
    void update(Key key, double w = 1.0);
    /// Minimum over rows of the key's buckets.
    double query(Key key) const;
    /// Overwrites the key's bucket in every row with `value` (score caches).
    void assign(Key key, double value);
    /// Multiplies the key's bucket in every row by factor > 0.
    void scale_key(Key key, double factor);

    /// Multiplies every counter by alpha, 0 < alpha < 1.
    void decay(double alpha);
    void clear();

    double at(std::size_t row, std::size_t bucket) const { return counts_[row * buckets_ + bucket]; }
    /// Direct cell access for detectors that compute their own bucket indices.
    void add_at(std::size_t row, std::size_t bucket, double w);
    std::span<const double> cells() const { return counts_; }

    bool same_layout(const CountMinSketch& other) const;

    /// Header (rows, buckets, per-row a and b) then row-major float64, little endian.
    void serialize(std::ostream& out) const;
    static CountMinSketch deserialize(std::istream& in);

    std::size_t memory_bytes() const {
        return counts_.capacity() * sizeof(double) + hashes_.capacity() * sizeof(PairwiseHash);
    }

    friend void conditional_merge(CountMinSketch& total, const CountMinSketch& current,
                                  const CountMinSketch& scores, double epsilon, std::int64_t tick);

private:
    CountMinSketch(std::size_t rows, std::size_t buckets, std::vector<PairwiseHash> hashes);

    std::size_t rows_;
    std::size_t buckets_;
    std::vector<PairwiseHash> hashes_;
    std::vector<double> counts_;
};

/// End-of-tick merge: bucket-wise, if scores < epsilon then total += current,
/// else if tick != 1 then total += total / (tick - 1). `tick` is the tick that
/// is ending, so `total` holds ticks 1..tick-1.
void conditional_merge(CountMinSketch& total, const CountMinSketch& current,
                       const CountMinSketch& scores, double epsilon, std::int64_t tick);

}  // namespace streamsketch
