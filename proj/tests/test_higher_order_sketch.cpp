#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "streamsketch/higher_order_sketch.hpp"

using namespace streamsketch;

TEST(HigherOrderSketch, SingleUpdateIsExact) {
    HigherOrderSketch h(2, 32, 1);
    h.update(10, 20, 3.0);
    EXPECT_DOUBLE_EQ(h.estimate(10, 20), 3.0);
}

TEST(HigherOrderSketch, SameSourceSharesRowNotColumn) {
    HigherOrderSketch h(2, 1024, 3);
    // Pick destinations landing in distinct columns in both layers.
    Key v2 = 2;
    while (h.col_index(0, v2) == h.col_index(0, 1) || h.col_index(1, v2) == h.col_index(1, 1)) ++v2;
    h.update(5, 1, 1.0);
    h.update(5, v2, 1.0);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto r = h.row_index(j, 5);
        EXPECT_EQ(h.at(j, r, h.col_index(j, 1)), 1.0);
        EXPECT_EQ(h.at(j, r, h.col_index(j, v2)), 1.0);
    }
}

TEST(HigherOrderSketch, SharedHashesByDefaultDistinctOnRequest) {
    HigherOrderSketch shared(3, 64, 7);
    HigherOrderSketch distinct(3, 64, 7, true);
    int differs = 0;
    for (Key k = 0; k < 100; ++k) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(shared.row_index(j, k), shared.col_index(j, k));
            differs += distinct.row_index(j, k) != distinct.col_index(j, k);
        }
    }
    EXPECT_GT(differs, 200);
}

TEST(HigherOrderSketch, EstimateBoundsAgainstExactOracle) {
    // 500 random edges, n_r = 2, n_b = 32.
    std::mt19937_64 rng(5);
    HigherOrderSketch h(2, 32, 6);
    std::map<std::pair<Key, Key>, double> exact;
    for (int i = 0; i < 500; ++i) {
        const Key u = uniform_index(rng, 200), v = uniform_index(rng, 200);
        h.update(u, v, 1.0);
        exact[{u, v}] += 1.0;
    }
    const double slack = std::numbers::e / 32.0 * 500.0;
    std::size_t over = 0;
    for (const auto& [uv, c] : exact) {
        const double est = h.estimate(uv.first, uv.second);
        EXPECT_GE(est, c);
        over += est > c + slack;
    }
    EXPECT_LE(static_cast<double>(over) / static_cast<double>(exact.size()), std::exp(-2.0));
}

TEST(HigherOrderSketch, EstimateIsMinimumOverLayers) {
    std::mt19937_64 rng(1);
    HigherOrderSketch h(3, 8, 2);
    for (int i = 0; i < 300; ++i) h.update(uniform_index(rng, 40), uniform_index(rng, 40), 1.0);
    for (Key u = 0; u < 40; ++u) {
        for (Key v = 0; v < 40; v += 7) {
            double best = h.at(0, h.row_index(0, u), h.col_index(0, v));
            for (std::size_t j = 1; j < 3; ++j) best = std::min(best, h.at(j, h.row_index(j, u), h.col_index(j, v)));
            EXPECT_EQ(h.estimate(u, v), best);
        }
    }
}

TEST(HigherOrderSketch, DecayResetAndValidation) {
    HigherOrderSketch h(2, 16, 1);
    h.update(1, 2, 10.0);
    h.decay(0.9);
    EXPECT_DOUBLE_EQ(h.estimate(1, 2), 9.0);
    h.reset();
    for (Key u = 0; u < 20; ++u)
        for (Key v = 0; v < 20; ++v) EXPECT_EQ(h.estimate(u, v), 0.0);
    EXPECT_THROW(h.decay(1.0), std::invalid_argument);
    EXPECT_THROW(h.decay(0.0), std::invalid_argument);
    EXPECT_THROW(h.update(1, 2, -1.0), std::invalid_argument);
    EXPECT_THROW(HigherOrderSketch(0, 4, 1), std::invalid_argument);
    EXPECT_THROW(HigherOrderSketch(2, 0, 1), std::invalid_argument);
}

TEST(HigherOrderSketch, DecayPreservesArgmaxPerLayer) {
    std::mt19937_64 rng(9);
    HigherOrderSketch h(2, 16, 4);
    for (int i = 0; i < 400; ++i) h.update(uniform_index(rng, 30), uniform_index(rng, 30), uniform_real(rng));
    auto argmax = [&](std::size_t j) {
        const auto m = h.layer(j);
        std::size_t best = 0;
        for (std::size_t i = 1; i < m.data().size(); ++i)
            if (m.data()[i] > m.data()[best]) best = i;
        return best;
    };
    const auto a0 = argmax(0), a1 = argmax(1);
    h.decay(0.37);
    EXPECT_EQ(argmax(0), a0);
    EXPECT_EQ(argmax(1), a1);
}

TEST(HigherOrderSketch, ScalingRowsColumnsAndCells) {
    HigherOrderSketch h(1, 4, 1);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) h.update(uniform_index(rng, 50), uniform_index(rng, 50), 1.0);
    const auto data = h.layer(0).data();
    const std::vector<double> before(data.begin(), data.end());
    h.scale_row(0, 1, 2.0);
    h.scale_col(0, 3, 3.0);
    h.scale_cell(0, 0, 0, 0.5);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            double factor = (r == 1 ? 2.0 : 1.0) * (c == 3 ? 3.0 : 1.0);
            if (r == 0 && c == 0) factor *= 0.5;
            EXPECT_DOUBLE_EQ(h.at(0, r, c), before[r * 4 + c] * factor);
        }
    }
    EXPECT_THROW(h.scale_row(0, 1, 0.0), std::invalid_argument);
    EXPECT_THROW(h.scale_col(0, 1, -1.0), std::invalid_argument);
    EXPECT_THROW(h.scale_cell(0, 1, 1, 0.0), std::invalid_argument);
}

TEST(MatrixView, RejectsWrongSize) {
    std::vector<double> cells(5);
    EXPECT_THROW(MatrixView(cells, 2), std::invalid_argument);
}
