#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamsketch/hashing.hpp"

namespace streamsketch {

/// Read-only view of a row-major n x n matrix.
class MatrixView {
public:
    MatrixView(std::span<const double> data, std::size_t n) : data_(data), n_(n) {
        if (data.size() != n * n) throw std::invalid_argument("matrix view: size mismatch");
    }

    std::size_t size() const { return n_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    std::span<const double> row(std::size_t r) const { return data_.subspan(r * n_, n_); }
    std::span<const double> data() const { return data_; }

private:
    std::span<const double> data_;
    std::size_t n_;
};

/// Higher-order count-min sketch: each layer is an n_b x n_b matrix, the
/// source hashes to a row and the destination to a column, so dense subgraphs
/// stay dense submatrices.
class HigherOrderSketch {
public:
    static constexpr std::size_t kDefaultRows = 2;
    static constexpr std::size_t kDefaultBuckets = 32;

    /// Row and column hashes share parameters unless `distinct_column_hash`.
    HigherOrderSketch(std::size_t layers, std::size_t buckets, std::uint64_t seed,
                      bool distinct_column_hash = false);

    std::size_t layers() const { return layers_; }
    std::size_t buckets() const { return buckets_; }

    std::size_t row_index(std::size_t layer, Key u) const { return row_hashes_[layer](u); }
    std::size_t col_index(std::size_t layer, Key v) const { return col_hashes_[layer](v); }

    void update(Key u, Key v, double w = 1.0);
    /// min over layers of M_j[row(u)][col(v)]
    double estimate(Key u, Key v) const;
    void decay(double alpha);
    void reset();

    MatrixView layer(std::size_t j) const {
        return MatrixView(std::span<const double>(cells_).subspan(j * buckets_ * buckets_,
                                                                  buckets_ * buckets_),
                          buckets_);
    }
    double at(std::size_t layer, std::size_t r, std::size_t c) const {
        return cells_[(layer * buckets_ + r) * buckets_ + c];
    }
    /// Multiplies a whole row / column of every layer's matrix by factor > 0.
    void scale_row(std::size_t layer, std::size_t r, double factor);
    void scale_col(std::size_t layer, std::size_t c, double factor);
    void scale_cell(std::size_t layer, std::size_t r, std::size_t c, double factor);

    std::size_t memory_bytes() const { return cells_.capacity() * sizeof(double); }

private:
    std::size_t layers_;
    std::size_t buckets_;
    std::vector<PairwiseHash> row_hashes_;
    std::vector<PairwiseHash> col_hashes_;
    std::vector<double> cells_;
};

}  // namespace streamsketch
