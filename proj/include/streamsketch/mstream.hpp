#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "streamsketch/count_min_sketch.hpp"
#include "streamsketch/hashing.hpp"

namespace streamsketch {

/// A record with categorical and numeric aspects. Arity is fixed per detector.
struct MultiAspectRecord {
    std::vector<Key> categorical;
    std::vector<double> numeric;
    std::int64_t tick = 1;
};

/// Running min and max of log-transformed values of one numeric feature.
class StreamingMinMax {
public:
    void observe(double transformed);
    /// (x - min) / (max - min), or 0 while max == min.
    double normalize(double transformed) const;
    bool empty() const { return count_ == 0; }
    double min() const { return min_; }
    double max() const { return max_; }

private:
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
    std::size_t count_ = 0;
};

/// Log-transform, update the running range, min-max normalize and bucketize:
/// floor(x * b) mod b. The running maximum wraps to bucket 0.
std::size_t numeric_feature_hash(double value, StreamingMinMax& range, std::size_t buckets);

/// Bucket of `value` under the current range without observing it.
std::size_t numeric_feature_bucket(double value, const StreamingMinMax& range, std::size_t buckets);

/// k = ceil(log2 b) Gaussian directions; the sign pattern of the projections
/// is read as a k-bit integer (bit id set iff <x, a_id> > 0).
class HyperplaneHash {
public:
    HyperplaneHash(std::size_t dimension, std::size_t buckets, std::mt19937_64& rng);

    std::size_t dimension() const { return dimension_; }
    std::size_t bits() const { return directions_.size(); }
    std::uint64_t operator()(std::span<const double> x) const;

private:
    std::size_t dimension_;
    std::vector<std::vector<double>> directions_;
};

/// (sum_j hash_j(cat_j) + hyperplane(num)) mod b.
std::size_t record_hash(const MultiAspectRecord& r, std::span<const PairwiseHash> categorical_hashes,
                        const HyperplaneHash& hyperplanes, std::size_t buckets);

struct MstreamConfig {
    std::size_t categorical_features = 0;
    std::size_t numeric_features = 0;
    std::size_t rows = 2;
    std::size_t buckets = 1024;
    double alpha = 0.85;
    std::uint64_t seed = 42;
};

struct MstreamScore {
    double total = 0.0;
    double record = 0.0;
    /// One term per feature: categorical features first, then numeric.
    std::vector<double> per_feature;
};

/// Multi-aspect record scorer: one current/total sketch pair per feature and
/// one for the whole record, combined by summing their chi-squared terms.
class MstreamDetector {
public:
    explicit MstreamDetector(const MstreamConfig& config);

    MstreamScore score(const MultiAspectRecord& r);

    const MstreamConfig& config() const { return config_; }
    std::size_t arity() const { return config_.categorical_features + config_.numeric_features; }
    std::size_t memory_bytes() const;

private:
    struct Counter {
        CountMinSketch current;
        CountMinSketch total;
    };

    double bump(Counter& c, std::span<const std::size_t> buckets, double t);

    MstreamConfig config_;
    std::vector<Counter> categorical_;
    std::vector<Counter> numeric_;
    std::vector<StreamingMinMax> ranges_;
    Counter record_;
    std::vector<std::vector<PairwiseHash>> record_cat_hashes_;  // [row][feature]
    std::vector<HyperplaneHash> record_planes_;                 // [row]
    std::int64_t tick_ = 0;
};

}  // namespace streamsketch
