#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "streamsketch/edge_event.hpp"
#include "streamsketch/higher_order_sketch.hpp"

namespace streamsketch {

/// Sum of M over rows x cols divided by sqrt(|rows| |cols|). Both sets must be
/// nonempty.
double submatrix_density(MatrixView m, std::span<const std::size_t> rows, std::span<const std::size_t> cols);

/// Greedy expansion from the 1x1 seed (row, col): repeatedly add the remaining
/// row or column with the largest sum against the current submatrix (a row
/// only when its sum is strictly larger) and return the best density seen.
double edge_submatrix_density(MatrixView m, std::size_t row, std::size_t col);

/// One state of the greedy peel, reported to an observer.
struct PeelStep {
    std::vector<bool> rows;
    std::vector<bool> cols;
    double mass = 0.0;
    double density = 0.0;
};

/// Greedy peel from the full matrix: repeatedly drop the row with the smallest
/// row sum or the column with the smallest column sum (the row only when its
/// sum is strictly smaller) and return the best density seen. At least half
/// of the densest submatrix.
double anograph_density(MatrixView m, const std::function<void(const PeelStep&)>& observer = {});

/// Best edge_submatrix_density over the K largest cells (ties in row-major order).
double anograph_k_density(MatrixView m, std::size_t k);

enum class GraphDensity { full, top_k };

/// Per-layer statistic, minimum across layers.
double anograph_score(const HigherOrderSketch& sketch, GraphDensity variant, std::size_t k = 5);

struct DenseGraphConfig {
    std::size_t rows = HigherOrderSketch::kDefaultRows;
    std::size_t buckets = HigherOrderSketch::kDefaultBuckets;
    double alpha = 0.9;
    std::size_t k = 5;
    bool distinct_column_hash = false;
    std::uint64_t seed = 42;
};

/// Edge scorer over a temporally decaying H-CMS: score is the density of the
/// greedily grown submatrix around the edge's cell.
class AnoEdgeGlobal {
public:
    explicit AnoEdgeGlobal(const DenseGraphConfig& config = {});

    double score(const EdgeEvent& e);
    const HigherOrderSketch& sketch() const { return sketch_; }
    std::size_t memory_bytes() const { return sketch_.memory_bytes(); }

private:
    DenseGraphConfig config_;
    HigherOrderSketch sketch_;
    std::int64_t tick_ = 0;
};

/// Incrementally maintained dense submatrix of one sketch layer.
class LocalDenseState {
public:
    LocalDenseState(std::size_t buckets, std::size_t row, std::size_t col);

    /// Mirrors a cell update of the layer matrix.
    void on_update(std::size_t r, std::size_t c, double w);
    void on_decay(double alpha);
    /// Add row r / column c when that raises the density, then drop min-sum
    /// rows or columns while that raises it.
    void expand(MatrixView m, std::size_t r, std::size_t c);
    void condense(MatrixView m);
    /// Mean of M over S x {c} union {r} x T.
    double likelihood(MatrixView m, std::size_t r, std::size_t c) const;

    double density() const;
    double mass() const { return mass_; }
    bool has_row(std::size_t r) const { return in_rows_[r]; }
    bool has_col(std::size_t c) const { return in_cols_[c]; }
    std::size_t row_count() const { return n_rows_; }
    std::size_t col_count() const { return n_cols_; }

private:
    void add_row(MatrixView m, std::size_t r);
    void add_col(MatrixView m, std::size_t c);
    void remove_row(MatrixView m, std::size_t r);
    void remove_col(MatrixView m, std::size_t c);

    std::vector<bool> in_rows_;
    std::vector<bool> in_cols_;
    std::vector<double> row_sums_;  // R(M, s, T) for every row s
    std::vector<double> col_sums_;  // C(M, S, t) for every column t
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    double mass_ = 0.0;
};

/// Edge scorer that keeps one local dense submatrix per layer and reports the
/// edge cell's likelihood against it.
class AnoEdgeLocal {
public:
    explicit AnoEdgeLocal(const DenseGraphConfig& config = {});

    double score(const EdgeEvent& e);
    const HigherOrderSketch& sketch() const { return sketch_; }
    const LocalDenseState& state(std::size_t layer) const { return states_[layer]; }
    std::size_t memory_bytes() const;

private:
    DenseGraphConfig config_;
    HigherOrderSketch sketch_;
    std::vector<LocalDenseState> states_;
    std::int64_t tick_ = 0;
};

/// One batch of edges accumulated into a freshly reset sketch.
struct GraphWindow {
    HigherOrderSketch sketch;
    std::size_t edge_count = 0;

    explicit GraphWindow(const DenseGraphConfig& config);
    void add(const EdgeEvent& e);
    void reset();
};

/// Graph scorer: resets the sketch per window and scores its densest submatrix.
class AnoGraph {
public:
    AnoGraph(const DenseGraphConfig& config, GraphDensity variant);

    double score_window(std::span<const EdgeEvent> edges);
    /// Scores a sealed window without touching detector state.
    double score(const GraphWindow& window) const;

private:
    DenseGraphConfig config_;
    GraphDensity variant_;
    GraphWindow window_;
};

}  // namespace streamsketch
