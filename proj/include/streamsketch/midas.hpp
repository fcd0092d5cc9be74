#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "streamsketch/count_min_sketch.hpp"
#include "streamsketch/edge_event.hpp"

namespace streamsketch {

enum class MidasVariant { plain, relational, filtering };
enum class ScoreCombine { max, sum };

/// Chi-squared statistic of current count `a` against total `s` at tick t:
/// (a - s/t)^2 * t^2 / (s (t - 1)). Zero when t <= 1 or s <= 0.
double midas_chi_squared(double a, double s, double t);

/// Filtering statistic where `s` excludes the current tick:
/// (a + s - a t)^2 / (s (t - 1)). Zero when t <= 1 or s <= 0.
double filtered_chi_squared(double a, double s, double t);

struct MidasConfig {
    MidasVariant variant = MidasVariant::relational;
    std::size_t rows = CountMinSketch::kDefaultRows;
    std::size_t buckets = CountMinSketch::kDefaultBuckets;
    double alpha = 0.5;
    double merge_threshold = 1000.0;
    ScoreCombine combine = ScoreCombine::max;
    std::uint64_t seed = 42;
};

/// Edge, source and destination components of one edge's score. Plain MIDAS
/// only fills `edge`.
struct MidasComponents {
    double edge = 0.0;
    double source = 0.0;
    double dest = 0.0;

    double combined(ScoreCombine mode) const {
        return mode == ScoreCombine::max ? std::max({edge, source, dest}) : edge + source + dest;
    }
};

/// Counts the detector saw for the last edge, after its own update.
struct EdgeCounts {
    double current = 0.0;
    double total = 0.0;
    std::int64_t tick = 0;
    double tick_volume = 0.0;
};

/// MIDAS, MIDAS-R and MIDAS-F streaming edge scorers.
///
/// Plain clears the current-count sketches when the tick advances, the other
/// variants scale them by alpha. Filtering keeps the current tick out of the
/// totals and folds it in with a conditional merge when the tick advances.
/// Decay, clear and merge run once per observed tick change regardless of how
/// far the tick jumps.
class MidasDetector {
public:
    explicit MidasDetector(const MidasConfig& config = {});

    /// Scores `e` and returns the configured combination of its components.
    double score(const EdgeEvent& e);
    double score(const EdgeEvent& e, ScoreCombine mode);

    const MidasComponents& last_components() const { return last_; }
    const EdgeCounts& last_edge_counts() const { return last_counts_; }

    const MidasConfig& config() const { return config_; }
    std::int64_t tick() const { return tick_; }
    /// Total weight in the current edge-count sketch, decayed residue included.
    double tick_volume() const { return volume_; }

    CountMinSketch& edge_total() { return edge_.total; }
    CountMinSketch& edge_current() { return edge_.current; }
    const CountMinSketch& edge_total() const { return edge_.total; }
    const CountMinSketch& edge_current() const { return edge_.current; }

    std::size_t memory_bytes() const;

private:
    struct Group {
        CountMinSketch total;
        CountMinSketch current;
        CountMinSketch scores;
        explicit Group(CountMinSketch layout);
    };

    void advance_tick(std::int64_t tick);
    double group_score(Group& g, Key key, double w, double t);

    MidasConfig config_;
    Group edge_;
    std::optional<Group> source_;
    std::optional<Group> dest_;
    std::int64_t tick_ = 0;
    double volume_ = 0.0;
    MidasComponents last_;
    EdgeCounts last_counts_;
};

/// Binary decision with a bounded false-positive probability. The threshold is
/// the (1 - epsilon/2) quantile of a 1-dof chi-squared variable; the current
/// count is first reduced by nu * N_t, nu = e / n_b.
class DecisionRule {
public:
    DecisionRule(double false_positive_rate, std::size_t buckets);

    double false_positive_rate() const { return epsilon_; }
    double nu() const { return nu_; }
    double threshold() const { return threshold_; }

    /// Adjusted statistic for counts already observed by a detector.
    double adjusted_statistic(const EdgeCounts& counts, MidasVariant variant) const;
    /// Scores `e` with `detector` and reports whether it is flagged.
    bool flag(MidasDetector& detector, const EdgeEvent& e) const;

private:
    double epsilon_;
    double nu_;
    double threshold_;
};

/// Inverse standard normal CDF (rational approximation plus one Newton step).
double inverse_normal_cdf(double p);
/// Quantile of the chi-squared distribution with one degree of freedom.
double chi_squared_1dof_quantile(double level);

}  // namespace streamsketch
