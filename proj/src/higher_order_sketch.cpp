#include "streamsketch/higher_order_sketch.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace streamsketch {

HigherOrderSketch::HigherOrderSketch(std::size_t layers, std::size_t buckets, std::uint64_t seed,
                                     bool distinct_column_hash)
    : layers_(layers), buckets_(buckets) {
    if (layers == 0 || buckets == 0)
        throw std::invalid_argument("higher-order sketch needs layers > 0 and buckets > 0");
    std::mt19937_64 rng(seed);
    for (std::size_t j = 0; j < layers; ++j) row_hashes_.push_back(PairwiseHash::random(rng, buckets));
    if (distinct_column_hash) {
        for (std::size_t j = 0; j < layers; ++j) col_hashes_.push_back(PairwiseHash::random(rng, buckets));
    } else {
        col_hashes_ = row_hashes_;
    }
    cells_.assign(layers * buckets * buckets, 0.0);
}

void HigherOrderSketch::update(Key u, Key v, double w) {
    if (!(w >= 0.0)) throw std::invalid_argument("sketch update weight must be >= 0");
    for (std::size_t j = 0; j < layers_; ++j)
        cells_[(j * buckets_ + row_hashes_[j](u)) * buckets_ + col_hashes_[j](v)] += w;
}

double HigherOrderSketch::estimate(Key u, Key v) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < layers_; ++j) best = std::min(best, at(j, row_index(j, u), col_index(j, v)));
    return best;
}

void HigherOrderSketch::decay(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("decay factor must lie in (0, 1), got " + std::to_string(alpha));
    for (double& c : cells_) c *= alpha;
}

void HigherOrderSketch::reset() { std::fill(cells_.begin(), cells_.end(), 0.0); }

void HigherOrderSketch::scale_row(std::size_t layer, std::size_t r, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    for (std::size_t c = 0; c < buckets_; ++c) cells_[(layer * buckets_ + r) * buckets_ + c] *= factor;
}

void HigherOrderSketch::scale_col(std::size_t layer, std::size_t c, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    for (std::size_t r = 0; r < buckets_; ++r) cells_[(layer * buckets_ + r) * buckets_ + c] *= factor;
}

void HigherOrderSketch::scale_cell(std::size_t layer, std::size_t r, std::size_t c, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    cells_[(layer * buckets_ + r) * buckets_ + c] *= factor;
}

}  // namespace streamsketch
