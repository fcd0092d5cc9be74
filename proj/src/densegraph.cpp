#include "streamsketch/densegraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace streamsketch {

namespace {

void check_tick(std::int64_t tick, std::int64_t previous) {
    if (tick < 1) throw std::invalid_argument("edge tick must be >= 1");
    if (tick < previous)
        throw std::invalid_argument("tick regression: " + std::to_string(tick) + " after " +
                                    std::to_string(previous));
}

double density_of(double mass, std::size_t rows, std::size_t cols) {
    return mass / std::sqrt(static_cast<double>(rows) * static_cast<double>(cols));
}

}  // namespace

double submatrix_density(MatrixView m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    if (rows.empty() || cols.empty()) throw std::invalid_argument("submatrix density needs nonempty rows and cols");
    double mass = 0.0;
    for (std::size_t r : rows)
        for (std::size_t c : cols) mass += m(r, c);
    return density_of(mass, rows.size(), cols.size());
}

double edge_submatrix_density(MatrixView m, std::size_t row, std::size_t col) {
    const std::size_t n = m.size();
    if (row >= n || col >= n) throw std::out_of_range("seed cell outside the matrix");

    // Sums of each remaining row against T_cur and each remaining column
    // against S_cur; rows and columns already taken hold -inf so they never win
    // the argmax and absorb later additions.
    constexpr double taken = -std::numeric_limits<double>::infinity();
    std::vector<double> row_sums(n), col_sums(n);
    for (std::size_t i = 0; i < n; ++i) {
        row_sums[i] = m(i, col);
        col_sums[i] = m(row, i);
    }
    row_sums[row] = taken;
    col_sums[col] = taken;
    double mass = m(row, col);
    std::size_t n_rows = 1, n_cols = 1;
    double best = mass;

    while (n_rows < n || n_cols < n) {
        const auto up = static_cast<std::size_t>(std::max_element(row_sums.begin(), row_sums.end()) - row_sums.begin());
        const auto vp = static_cast<std::size_t>(std::max_element(col_sums.begin(), col_sums.end()) - col_sums.begin());
        const bool take_row = n_cols == n || (n_rows < n && row_sums[up] > col_sums[vp]);
        if (take_row) {
            mass += row_sums[up];
            row_sums[up] = taken;
            ++n_rows;
            const auto added = m.row(up);
            for (std::size_t t = 0; t < n; ++t) col_sums[t] += added[t];
        } else {
            mass += col_sums[vp];
            col_sums[vp] = taken;
            ++n_cols;
            for (std::size_t s = 0; s < n; ++s) row_sums[s] += m(s, vp);
        }
        best = std::max(best, density_of(mass, n_rows, n_cols));
    }
    return best;
}

double anograph_density(MatrixView m, const std::function<void(const PeelStep&)>& observer) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("anograph density of an empty matrix");

    PeelStep step;
    step.rows.assign(n, true);
    step.cols.assign(n, true);
    std::vector<double> row_sums(n, 0.0), col_sums(n, 0.0);
    double mass = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            row_sums[r] += m(r, c);
            col_sums[c] += m(r, c);
        }
        mass += row_sums[r];
    }
    std::size_t n_rows = n, n_cols = n;
    double best = density_of(mass, n_rows, n_cols);
    auto report = [&](double density) {
        if (!observer) return;
        step.mass = mass;
        step.density = density;
        observer(step);
    };
    report(best);

    while (true) {
        std::size_t up = n, vp = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (step.rows[i] && (up == n || row_sums[i] < row_sums[up])) up = i;
            if (step.cols[i] && (vp == n || col_sums[i] < col_sums[vp])) vp = i;
        }
        if (row_sums[up] < col_sums[vp]) {
            mass -= row_sums[up];
            step.rows[up] = false;
            --n_rows;
            const auto removed = m.row(up);
            for (std::size_t t = 0; t < n; ++t)
                if (step.cols[t]) col_sums[t] -= removed[t];
        } else {
            mass -= col_sums[vp];
            step.cols[vp] = false;
            --n_cols;
            for (std::size_t s = 0; s < n; ++s)
                if (step.rows[s]) row_sums[s] -= m(s, vp);
        }
        if (n_rows == 0 || n_cols == 0) break;
        const double d = density_of(mass, n_rows, n_cols);
        best = std::max(best, d);
        report(d);
    }
    return best;
}

double anograph_k_density(MatrixView m, std::size_t k) {
    if (k < 1) throw std::invalid_argument("K must be >= 1");
    const auto cells = m.data();
    if (cells.empty()) throw std::invalid_argument("anograph-K density of an empty matrix");
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return cells[a] != cells[b] ? cells[a] > cells[b] : a < b;
                      });
    double best = 0.0;
    for (std::size_t i = 0; i < take; ++i)
        best = std::max(best, edge_submatrix_density(m, order[i] / m.size(), order[i] % m.size()));
    return best;
}

double anograph_score(const HigherOrderSketch& sketch, GraphDensity variant, std::size_t k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sketch.layers(); ++j) {
        const double d = variant == GraphDensity::full ? anograph_density(sketch.layer(j))
                                                       : anograph_k_density(sketch.layer(j), k);
        best = std::min(best, d);
    }
    return best;
}

AnoEdgeGlobal::AnoEdgeGlobal(const DenseGraphConfig& config)
    : config_(config), sketch_(config.rows, config.buckets, config.seed, config.distinct_column_hash) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("decay factor must lie in (0, 1)");
}

double AnoEdgeGlobal::score(const EdgeEvent& e) {
    check_tick(e.tick, tick_);
    if (tick_ != 0 && e.tick != tick_) sketch_.decay(config_.alpha);
    tick_ = e.tick;
    sketch_.update(e.source, e.dest, e.weight);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sketch_.layers(); ++j)
        best = std::min(best, edge_submatrix_density(sketch_.layer(j), sketch_.row_index(j, e.source),
                                                     sketch_.col_index(j, e.dest)));
    return best;
}

LocalDenseState::LocalDenseState(std::size_t buckets, std::size_t row, std::size_t col)
    : in_rows_(buckets, false), in_cols_(buckets, false), row_sums_(buckets, 0.0), col_sums_(buckets, 0.0) {
    if (row >= buckets || col >= buckets) throw std::out_of_range("initial cell outside the matrix");
    in_rows_[row] = true;
    in_cols_[col] = true;
    n_rows_ = n_cols_ = 1;
}

double LocalDenseState::density() const { return density_of(mass_, n_rows_, n_cols_); }

void LocalDenseState::on_update(std::size_t r, std::size_t c, double w) {
    if (in_cols_[c]) row_sums_[r] += w;
    if (in_rows_[r]) col_sums_[c] += w;
    if (in_rows_[r] && in_cols_[c]) mass_ += w;
}

void LocalDenseState::on_decay(double alpha) {
    for (double& s : row_sums_) s *= alpha;
    for (double& s : col_sums_) s *= alpha;
    mass_ *= alpha;
}

void LocalDenseState::add_row(MatrixView m, std::size_t r) {
    mass_ += row_sums_[r];
    in_rows_[r] = true;
    ++n_rows_;
    const auto added = m.row(r);
    for (std::size_t t = 0; t < added.size(); ++t) col_sums_[t] += added[t];
}

void LocalDenseState::add_col(MatrixView m, std::size_t c) {
    mass_ += col_sums_[c];
    in_cols_[c] = true;
    ++n_cols_;
    for (std::size_t s = 0; s < m.size(); ++s) row_sums_[s] += m(s, c);
}

void LocalDenseState::remove_row(MatrixView m, std::size_t r) {
    mass_ -= row_sums_[r];
    in_rows_[r] = false;
    --n_rows_;
    const auto removed = m.row(r);
    for (std::size_t t = 0; t < removed.size(); ++t) col_sums_[t] -= removed[t];
}

void LocalDenseState::remove_col(MatrixView m, std::size_t c) {
    mass_ -= col_sums_[c];
    in_cols_[c] = false;
    --n_cols_;
    for (std::size_t s = 0; s < m.size(); ++s) row_sums_[s] -= m(s, c);
}

void LocalDenseState::expand(MatrixView m, std::size_t r, std::size_t c) {
    if (!in_rows_[r] && density_of(mass_ + row_sums_[r], n_rows_ + 1, n_cols_) > density()) add_row(m, r);
    if (!in_cols_[c] && density_of(mass_ + col_sums_[c], n_rows_, n_cols_ + 1) > density()) add_col(m, c);
}

void LocalDenseState::condense(MatrixView m) {
    const std::size_t n = in_rows_.size();
    while (true) {
        const double current = density();
        std::size_t rp = n, cp = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_rows_[i] && (rp == n || row_sums_[i] < row_sums_[rp])) rp = i;
            if (in_cols_[i] && (cp == n || col_sums_[i] < col_sums_[cp])) cp = i;
        }
        const double drop_row = n_rows_ > 1 ? density_of(mass_ - row_sums_[rp], n_rows_ - 1, n_cols_) : -1.0;
        const double drop_col = n_cols_ > 1 ? density_of(mass_ - col_sums_[cp], n_rows_, n_cols_ - 1) : -1.0;
        if (drop_col > current && drop_col >= drop_row) {
            remove_col(m, cp);
        } else if (drop_row > current) {
            remove_row(m, rp);
        } else {
            break;
        }
    }
}

double LocalDenseState::likelihood(MatrixView m, std::size_t r, std::size_t c) const {
    const bool overlap = in_rows_[r] && in_cols_[c];
    const double sum = col_sums_[c] + row_sums_[r] - (overlap ? m(r, c) : 0.0);
    const std::size_t count = n_rows_ + n_cols_ - (overlap ? 1 : 0);
    return sum / static_cast<double>(count);
}

AnoEdgeLocal::AnoEdgeLocal(const DenseGraphConfig& config)
    : config_(config), sketch_(config.rows, config.buckets, config.seed, config.distinct_column_hash) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("decay factor must lie in (0, 1)");
    std::mt19937_64 rng(mix64(config.seed ^ 0x5eed5eedULL));
    for (std::size_t j = 0; j < config.rows; ++j) {
        const auto r = static_cast<std::size_t>(uniform_index(rng, config.buckets));
        const auto c = static_cast<std::size_t>(uniform_index(rng, config.buckets));
        states_.emplace_back(config.buckets, r, c);
    }
}

double AnoEdgeLocal::score(const EdgeEvent& e) {
    check_tick(e.tick, tick_);
    if (tick_ != 0 && e.tick != tick_) {
        sketch_.decay(config_.alpha);
        for (auto& s : states_) s.on_decay(config_.alpha);
    }
    tick_ = e.tick;
    sketch_.update(e.source, e.dest, e.weight);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sketch_.layers(); ++j) {
        const std::size_t r = sketch_.row_index(j, e.source);
        const std::size_t c = sketch_.col_index(j, e.dest);
        const MatrixView m = sketch_.layer(j);
        auto& state = states_[j];
        state.on_update(r, c, e.weight);
        state.expand(m, r, c);
        state.condense(m);
        best = std::min(best, state.likelihood(m, r, c));
    }
    return best;
}

std::size_t AnoEdgeLocal::memory_bytes() const {
    return sketch_.memory_bytes() + states_.size() * config_.buckets * (2 * sizeof(double) + 2);
}

GraphWindow::GraphWindow(const DenseGraphConfig& config)
    : sketch(config.rows, config.buckets, config.seed, config.distinct_column_hash) {}

void GraphWindow::add(const EdgeEvent& e) {
    sketch.update(e.source, e.dest, e.weight);
    ++edge_count;
}

void GraphWindow::reset() {
    sketch.reset();
    edge_count = 0;
}

AnoGraph::AnoGraph(const DenseGraphConfig& config, GraphDensity variant)
    : config_(config), variant_(variant), window_(config) {
    if (variant == GraphDensity::top_k && config.k < 1) throw std::invalid_argument("K must be >= 1");
}

double AnoGraph::score_window(std::span<const EdgeEvent> edges) {
    window_.reset();
    for (const auto& e : edges) window_.add(e);
    return score(window_);
}

double AnoGraph::score(const GraphWindow& window) const {
    if (window.edge_count == 0) return 0.0;
    return anograph_score(window.sketch, variant_, config_.k);
}

}  // namespace streamsketch
