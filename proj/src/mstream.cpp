#include "streamsketch/mstream.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "streamsketch/midas.hpp"

namespace streamsketch {

namespace {

double log_transform(double value) {
    if (!(value > -1.0)) throw std::invalid_argument("numeric feature must exceed -1, got " + std::to_string(value));
    return std::log1p(value);
}

std::size_t bucketize(double normalized, std::size_t buckets) {
    const auto b = static_cast<double>(buckets);
    const auto idx = static_cast<std::size_t>(std::floor(normalized * b));
    return idx % buckets;
}

}  // namespace

void StreamingMinMax::observe(double transformed) {
    min_ = std::min(min_, transformed);
    max_ = std::max(max_, transformed);
    ++count_;
}

double StreamingMinMax::normalize(double transformed) const {
    if (count_ == 0 || max_ == min_) return 0.0;
    return (transformed - min_) / (max_ - min_);
}

std::size_t numeric_feature_hash(double value, StreamingMinMax& range, std::size_t buckets) {
    if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
    const double x = log_transform(value);
    range.observe(x);
    return bucketize(range.normalize(x), buckets);
}

std::size_t numeric_feature_bucket(double value, const StreamingMinMax& range, std::size_t buckets) {
    if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
    return bucketize(range.normalize(log_transform(value)), buckets);
}

HyperplaneHash::HyperplaneHash(std::size_t dimension, std::size_t buckets, std::mt19937_64& rng)
    : dimension_(dimension) {
    if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
    std::size_t k = 0;
    while ((std::uint64_t{1} << k) < buckets) ++k;
    directions_.assign(k, std::vector<double>(dimension));
    for (auto& a : directions_)
        for (double& x : a) x = standard_normal(rng);
}

std::uint64_t HyperplaneHash::operator()(std::span<const double> x) const {
    if (x.size() != dimension_)
        throw std::invalid_argument("hyperplane hash expects dimension " + std::to_string(dimension_) + ", got " +
                                    std::to_string(x.size()));
    std::uint64_t bits = 0;
    for (std::size_t id = 0; id < directions_.size(); ++id) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) dot += x[i] * directions_[id][i];
        if (dot > 0.0) bits |= std::uint64_t{1} << id;
    }
    return bits;
}

std::size_t record_hash(const MultiAspectRecord& r, std::span<const PairwiseHash> categorical_hashes,
                        const HyperplaneHash& hyperplanes, std::size_t buckets) {
    if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
    if (categorical_hashes.size() != r.categorical.size())
        throw std::invalid_argument("record hash: categorical arity mismatch");
    std::uint64_t cat = 0;
    for (std::size_t j = 0; j < r.categorical.size(); ++j) cat = (cat + categorical_hashes[j](r.categorical[j])) % buckets;
    const std::uint64_t num = hyperplanes(r.numeric) % buckets;
    return static_cast<std::size_t>((cat + num) % buckets);
}

MstreamDetector::MstreamDetector(const MstreamConfig& config)
    : config_(config),
      record_{CountMinSketch(config.rows, config.buckets, mix64(config.seed)),
              CountMinSketch(config.rows, config.buckets, mix64(config.seed))} {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("decay factor must lie in (0, 1)");
    if (config.categorical_features + config.numeric_features == 0)
        throw std::invalid_argument("record needs at least one feature");
    std::uint64_t stream = config.seed;
    for (std::size_t j = 0; j < config.categorical_features; ++j) {
        CountMinSketch layout(config.rows, config.buckets, mix64(++stream + 0x100));
        categorical_.push_back(Counter{CountMinSketch::zeros_like(layout), std::move(layout)});
    }
    for (std::size_t j = 0; j < config.numeric_features; ++j) {
        CountMinSketch layout(config.rows, config.buckets, 0);
        numeric_.push_back(Counter{CountMinSketch::zeros_like(layout), std::move(layout)});
    }
    ranges_.resize(config.numeric_features);
    std::mt19937_64 rng(mix64(config.seed ^ 0x7265636f7264ULL));
    for (std::size_t row = 0; row < config.rows; ++row) {
        std::vector<PairwiseHash> hashes;
        for (std::size_t j = 0; j < config.categorical_features; ++j)
            hashes.push_back(PairwiseHash::random(rng, config.buckets));
        record_cat_hashes_.push_back(std::move(hashes));
        record_planes_.emplace_back(config.numeric_features, config.buckets, rng);
    }
}

double MstreamDetector::bump(Counter& c, std::span<const std::size_t> buckets, double t) {
    double a = std::numeric_limits<double>::infinity();
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t row = 0; row < buckets.size(); ++row) {
        c.current.add_at(row, buckets[row], 1.0);
        c.total.add_at(row, buckets[row], 1.0);
        a = std::min(a, c.current.at(row, buckets[row]));
        s = std::min(s, c.total.at(row, buckets[row]));
    }
    return midas_chi_squared(a, s, t);
}

MstreamScore MstreamDetector::score(const MultiAspectRecord& r) {
    if (r.categorical.size() != config_.categorical_features || r.numeric.size() != config_.numeric_features)
        throw std::invalid_argument("record arity does not match the detector");
    if (r.tick < 1) throw std::invalid_argument("record tick must be >= 1");
    if (r.tick < tick_)
        throw std::invalid_argument("tick regression: " + std::to_string(r.tick) + " after " + std::to_string(tick_));
    for (double v : r.numeric) log_transform(v);  // validate before any state changes
    if (tick_ != 0 && r.tick != tick_) {
        for (auto& c : categorical_) c.current.decay(config_.alpha);
        for (auto& c : numeric_) c.current.decay(config_.alpha);
        record_.current.decay(config_.alpha);
    }
    tick_ = r.tick;

    const double t = static_cast<double>(r.tick);
    const std::size_t rows = config_.rows;
    std::vector<std::size_t> buckets(rows);
    MstreamScore out;
    out.per_feature.reserve(arity());

    for (std::size_t j = 0; j < categorical_.size(); ++j) {
        for (std::size_t row = 0; row < rows; ++row) buckets[row] = categorical_[j].total.bucket(row, r.categorical[j]);
        out.per_feature.push_back(bump(categorical_[j], buckets, t));
    }
    for (std::size_t j = 0; j < numeric_.size(); ++j) {
        std::fill(buckets.begin(), buckets.end(), numeric_feature_hash(r.numeric[j], ranges_[j], config_.buckets));
        out.per_feature.push_back(bump(numeric_[j], buckets, t));
    }
    for (std::size_t row = 0; row < rows; ++row)
        buckets[row] = record_hash(r, record_cat_hashes_[row], record_planes_[row], config_.buckets);
    out.record = bump(record_, buckets, t);

    out.total = out.record;
    for (double f : out.per_feature) out.total += f;
    return out;
}

std::size_t MstreamDetector::memory_bytes() const {
    return (categorical_.size() + numeric_.size() + 1) * 2 * record_.total.memory_bytes();
}

}  // namespace streamsketch
