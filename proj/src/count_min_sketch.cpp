#include "streamsketch/count_min_sketch.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace streamsketch {

namespace {

void check_weight(double w) {
    if (!(w >= 0.0)) throw std::invalid_argument("sketch update weight must be >= 0");
}

void check_decay(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("decay factor must lie in (0, 1), got " + std::to_string(alpha));
}

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "little-endian host expected");
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) throw std::runtime_error("sketch snapshot truncated");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

CountMinSketch::CountMinSketch(std::size_t rows, std::size_t buckets, std::uint64_t seed)
    : rows_(rows), buckets_(buckets) {
    if (rows == 0 || buckets == 0) throw std::invalid_argument("sketch needs rows > 0 and buckets > 0");
    std::mt19937_64 rng(seed);
    hashes_.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) hashes_.push_back(PairwiseHash::random(rng, buckets));
    counts_.assign(rows * buckets, 0.0);
}

CountMinSketch::CountMinSketch(std::size_t rows, std::size_t buckets, std::vector<PairwiseHash> hashes)
    : rows_(rows), buckets_(buckets), hashes_(std::move(hashes)), counts_(rows * buckets, 0.0) {}

CountMinSketch CountMinSketch::zeros_like(const CountMinSketch& layout) {
    return CountMinSketch(layout.rows_, layout.buckets_, layout.hashes_);
}

void CountMinSketch::update(Key key, double w) {
    check_weight(w);
    for (std::size_t r = 0; r < rows_; ++r) counts_[r * buckets_ + hashes_[r](key)] += w;
}

double CountMinSketch::query(Key key) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows_; ++r) best = std::min(best, counts_[r * buckets_ + hashes_[r](key)]);
    return best;
}

void CountMinSketch::assign(Key key, double value) {
    for (std::size_t r = 0; r < rows_; ++r) counts_[r * buckets_ + hashes_[r](key)] = value;
}

void CountMinSketch::scale_key(Key key, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    for (std::size_t r = 0; r < rows_; ++r) counts_[r * buckets_ + hashes_[r](key)] *= factor;
}

void CountMinSketch::decay(double alpha) {
    check_decay(alpha);
    for (double& c : counts_) c *= alpha;
}

void CountMinSketch::clear() { std::fill(counts_.begin(), counts_.end(), 0.0); }

void CountMinSketch::add_at(std::size_t row, std::size_t bucket, double w) {
    check_weight(w);
    counts_.at(row * buckets_ + bucket) += w;
}

bool CountMinSketch::same_layout(const CountMinSketch& other) const {
    return rows_ == other.rows_ && buckets_ == other.buckets_ && hashes_ == other.hashes_;
}

void CountMinSketch::serialize(std::ostream& out) const {
    write_le<std::uint64_t>(out, rows_);
    write_le<std::uint64_t>(out, buckets_);
    for (const auto& h : hashes_) {
        write_le<std::uint64_t>(out, h.multiplier());
        write_le<std::uint64_t>(out, h.offset());
    }
    for (double c : counts_) write_le<double>(out, c);
}

CountMinSketch CountMinSketch::deserialize(std::istream& in) {
    const auto rows = read_le<std::uint64_t>(in);
    const auto buckets = read_le<std::uint64_t>(in);
    if (rows == 0 || buckets == 0) throw std::runtime_error("sketch snapshot: empty shape");
    std::vector<PairwiseHash> hashes;
    for (std::uint64_t r = 0; r < rows; ++r) {
        const auto a = read_le<std::uint64_t>(in);
        const auto b = read_le<std::uint64_t>(in);
        hashes.emplace_back(a, b, buckets);
    }
    CountMinSketch sketch(rows, buckets, std::move(hashes));
    for (double& c : sketch.counts_) c = read_le<double>(in);
    return sketch;
}

void conditional_merge(CountMinSketch& total, const CountMinSketch& current,
                       const CountMinSketch& scores, double epsilon, std::int64_t tick) {
    if (!total.same_layout(current) || !total.same_layout(scores))
        throw std::invalid_argument("conditional merge needs sketches with one shared layout");
    if (!(epsilon > 0.0)) throw std::invalid_argument("merge threshold must be positive");
    if (tick < 1) throw std::invalid_argument("merge tick must be >= 1");
    const double mean_scale = tick != 1 ? 1.0 / static_cast<double>(tick - 1) : 0.0;
    for (std::size_t i = 0; i < total.counts_.size(); ++i) {
        if (scores.counts_[i] < epsilon)
            total.counts_[i] += current.counts_[i];
        else
            total.counts_[i] += total.counts_[i] * mean_scale;
    }
}

}  // namespace streamsketch
