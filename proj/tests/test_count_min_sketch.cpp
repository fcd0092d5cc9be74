#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "streamsketch/count_min_sketch.hpp"

using namespace streamsketch;

TEST(CountMinSketch, RepeatedUpdatesOfOneKeyAreExact) {
    CountMinSketch s(2, 1024, 1);
    const Key a = key_from_token("a");
    for (int i = 0; i < 3; ++i) s.update(a, 1.0);
    EXPECT_DOUBLE_EQ(s.query(a), 3.0);
}

TEST(CountMinSketch, SingleBucketCollidesEverything) {
    CountMinSketch s(2, 1, 1);
    s.update(key_from_token("a"), 1.0);
    s.update(key_from_token("b"), 1.0);
    EXPECT_DOUBLE_EQ(s.query(key_from_token("a")), 2.0);
}

TEST(CountMinSketch, UpdateTouchesExactlyOneCellPerRow) {
    CountMinSketch s(3, 64, 7);
    s.update(99, 2.5);
    double total = 0.0;
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t b = 0; b < s.buckets(); ++b) {
            const double expected = b == s.bucket(r, 99) ? 2.5 : 0.0;
            EXPECT_EQ(s.at(r, b), expected);
            total += s.at(r, b);
        }
    }
    EXPECT_DOUBLE_EQ(total, 7.5);
}

TEST(CountMinSketch, EmptyQueryIsZeroAndFractionalWeightsAreKept) {
    CountMinSketch s(2, 1024, 3);
    EXPECT_EQ(s.query(5), 0.0);
    s.update(5, 2.5);
    EXPECT_DOUBLE_EQ(s.query(5), 2.5);
}

TEST(CountMinSketch, RejectsNegativeWeightAndEmptyShape) {
    CountMinSketch s(2, 16, 3);
    EXPECT_THROW(s.update(1, -1.0), std::invalid_argument);
    EXPECT_THROW(s.update(1, std::nan("")), std::invalid_argument);
    EXPECT_THROW(CountMinSketch(0, 16, 1), std::invalid_argument);
    EXPECT_THROW(CountMinSketch(2, 0, 1), std::invalid_argument);
}

TEST(CountMinSketch, QueryNeverUnderestimatesAndErrorIsBounded) {
    // 1000 random keys against an exact counter.
    std::mt19937_64 rng(11);
    CountMinSketch s(2, 1024, 12);
    std::unordered_map<Key, double> exact;
    for (int i = 0; i < 1000; ++i) {
        const Key k = rng();
        s.update(k, 1.0);
        exact[k] += 1.0;
    }
    const double slack = std::numbers::e / 1024.0 * 1000.0;
    std::size_t within = 0;
    for (const auto& [k, c] : exact) {
        EXPECT_GE(s.query(k), c);
        within += s.query(k) <= c + slack;
    }
    EXPECT_GE(static_cast<double>(within), 0.99 * static_cast<double>(exact.size()));
}

TEST(CountMinSketch, AdversarialCollisionsNeverUnderestimate) {
    // Keys forced into few buckets so every query collides heavily.
    CountMinSketch s(3, 4, 5);
    std::unordered_map<Key, double> exact;
    std::mt19937_64 rng(6);
    for (int i = 0; i < 5000; ++i) {
        const Key k = uniform_index(rng, 40);
        const double w = static_cast<double>(uniform_index(rng, 5));
        s.update(k, w);
        exact[k] += w;
    }
    for (const auto& [k, c] : exact) EXPECT_GE(s.query(k), c);
}

TEST(CountMinSketch, QueryIsMinimumOverRows) {
    CountMinSketch s(4, 8, 21);
    std::mt19937_64 rng(22);
    for (int i = 0; i < 300; ++i) s.update(uniform_index(rng, 100), 1.0);
    for (Key k = 0; k < 100; ++k) {
        double best = s.at(0, s.bucket(0, k));
        for (std::size_t r = 1; r < s.rows(); ++r) best = std::min(best, s.at(r, s.bucket(r, k)));
        EXPECT_EQ(s.query(k), best);
    }
}

TEST(CountMinSketch, DecayScalesEveryCell) {
    CountMinSketch s(2, 8, 1);
    s.update(3, 10.0);
    s.decay(0.5);
    EXPECT_DOUBLE_EQ(s.query(3), 5.0);
    for (int i = 0; i < 50; ++i) s.decay(0.5);
    EXPECT_GE(s.query(3), 0.0);
    EXPECT_THROW(s.decay(0.0), std::invalid_argument);
    EXPECT_THROW(s.decay(1.0), std::invalid_argument);
    EXPECT_THROW(s.decay(-0.2), std::invalid_argument);
}

TEST(CountMinSketch, DecayCommutesWithQueryScaling) {
    CountMinSketch s(3, 32, 2);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) s.update(uniform_index(rng, 50), 1.0);
    std::vector<double> before;
    for (Key k = 0; k < 50; ++k) before.push_back(s.query(k));
    s.decay(0.3);
    for (Key k = 0; k < 50; ++k) EXPECT_NEAR(s.query(k), 0.3 * before[k], 1e-12);
}

TEST(CountMinSketch, ClearZeroesEverything) {
    CountMinSketch s(2, 8, 1);
    s.update(1, 4.0);
    s.clear();
    for (double c : s.cells()) EXPECT_EQ(c, 0.0);
}

TEST(CountMinSketch, AssignOverwritesAndScaleKeyMultiplies) {
    CountMinSketch s(2, 1 << 16, 1);
    s.update(7, 3.0);
    s.assign(7, 11.0);
    EXPECT_DOUBLE_EQ(s.query(7), 11.0);
    s.scale_key(7, 0.5);
    EXPECT_DOUBLE_EQ(s.query(7), 5.5);
    EXPECT_THROW(s.scale_key(7, 0.0), std::invalid_argument);
}

TEST(CountMinSketch, ZerosLikeSharesHashes) {
    CountMinSketch a(3, 100, 8);
    a.update(1, 1.0);
    const auto b = CountMinSketch::zeros_like(a);
    EXPECT_TRUE(a.same_layout(b));
    for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(a.row_hash(r), b.row_hash(r));
    for (double c : b.cells()) EXPECT_EQ(c, 0.0);
    EXPECT_FALSE(a.same_layout(CountMinSketch(3, 100, 9)));
}

TEST(CountMinSketch, SameSeedSameLayout) {
    EXPECT_TRUE(CountMinSketch(2, 64, 5).same_layout(CountMinSketch(2, 64, 5)));
}

TEST(CountMinSketch, SerializationRoundTrips) {
    CountMinSketch s(2, 33, 4);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) s.update(rng(), uniform_real(rng));
    std::stringstream buf;
    s.serialize(buf);
    const auto t = CountMinSketch::deserialize(buf);
    EXPECT_TRUE(s.same_layout(t));
    ASSERT_EQ(s.cells().size(), t.cells().size());
    for (std::size_t i = 0; i < s.cells().size(); ++i) EXPECT_EQ(s.cells()[i], t.cells()[i]);
}

TEST(CountMinSketch, TruncatedSnapshotIsRejected) {
    CountMinSketch s(2, 8, 4);
    std::stringstream buf;
    s.serialize(buf);
    std::string bytes = buf.str();
    bytes.resize(bytes.size() - 3);
    std::stringstream cut(bytes);
    EXPECT_THROW(CountMinSketch::deserialize(cut), std::runtime_error);
}

TEST(ConditionalMerge, AddsCurrentWhenScoreIsLow) {
    CountMinSketch total(2, 1 << 16, 1);
    auto current = CountMinSketch::zeros_like(total);
    auto scores = CountMinSketch::zeros_like(total);
    total.update(1, 4.0);
    current.update(1, 3.0);
    scores.assign(1, 10.0);
    conditional_merge(total, current, scores, 1000.0, 3);
    EXPECT_DOUBLE_EQ(total.query(1), 7.0);
}

TEST(ConditionalMerge, AddsMeanWhenScoreIsHigh) {
    CountMinSketch total(2, 1 << 16, 1);
    auto current = CountMinSketch::zeros_like(total);
    auto scores = CountMinSketch::zeros_like(total);
    total.update(1, 4.0);
    current.update(1, 50.0);
    scores.assign(1, 5000.0);
    conditional_merge(total, current, scores, 1000.0, 3);
    EXPECT_DOUBLE_EQ(total.query(1), 6.0);  // 4 + 4 / (3 - 1)
}

TEST(ConditionalMerge, FirstTickAnomalyAddsNothing) {
    CountMinSketch total(2, 64, 1);
    auto current = CountMinSketch::zeros_like(total);
    auto scores = CountMinSketch::zeros_like(total);
    current.update(1, 50.0);
    scores.assign(1, 5000.0);
    conditional_merge(total, current, scores, 1000.0, 1);
    EXPECT_EQ(total.query(1), 0.0);
}

TEST(ConditionalMerge, ValidatesArguments) {
    CountMinSketch total(2, 64, 1);
    auto current = CountMinSketch::zeros_like(total);
    auto scores = CountMinSketch::zeros_like(total);
    CountMinSketch other(2, 64, 2);
    EXPECT_THROW(conditional_merge(total, other, scores, 1.0, 2), std::invalid_argument);
    EXPECT_THROW(conditional_merge(total, current, scores, 0.0, 2), std::invalid_argument);
    EXPECT_THROW(conditional_merge(total, current, scores, 1.0, 0), std::invalid_argument);
}

TEST(ConditionalMerge, TotalsNeverDecrease) {
    CountMinSketch total(2, 16, 1);
    auto current = CountMinSketch::zeros_like(total);
    auto scores = CountMinSketch::zeros_like(total);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        total.update(uniform_index(rng, 30), 1.0);
        current.update(uniform_index(rng, 30), 1.0);
        scores.assign(uniform_index(rng, 30), 2000.0 * uniform_real(rng));
    }
    const std::vector<double> before(total.cells().begin(), total.cells().end());
    conditional_merge(total, current, scores, 1000.0, 4);
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_GE(total.cells()[i], before[i]);
}
