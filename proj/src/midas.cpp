#include "streamsketch/midas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace streamsketch {

double midas_chi_squared(double a, double s, double t) {
    if (t <= 1.0 || s <= 0.0) return 0.0;
    const double diff = a - s / t;
    return diff * diff * t * t / (s * (t - 1.0));
}

double filtered_chi_squared(double a, double s, double t) {
    if (t <= 1.0 || s <= 0.0) return 0.0;
    const double diff = a + s - a * t;
    return diff * diff / (s * (t - 1.0));
}

MidasDetector::Group::Group(CountMinSketch layout)
    : total(CountMinSketch::zeros_like(layout)),
      current(CountMinSketch::zeros_like(layout)),
      scores(std::move(layout)) {}

MidasDetector::MidasDetector(const MidasConfig& config)
    : config_(config), edge_(CountMinSketch(config.rows, config.buckets, mix64(config.seed))) {
    if (config.variant != MidasVariant::plain && !(config.alpha > 0.0 && config.alpha < 1.0))
        throw std::invalid_argument("MIDAS decay factor must lie in (0, 1)");
    if (config.variant == MidasVariant::filtering && !(config.merge_threshold > 0.0))
        throw std::invalid_argument("MIDAS-F merge threshold must be positive");
    if (config.variant == MidasVariant::plain && config.combine == ScoreCombine::sum)
        throw std::invalid_argument("sum combination needs node sketches (relational or filtering)");
    if (config.variant != MidasVariant::plain) {
        source_.emplace(CountMinSketch(config.rows, config.buckets, mix64(config.seed + 1)));
        dest_.emplace(CountMinSketch(config.rows, config.buckets, mix64(config.seed + 2)));
    }
}

void MidasDetector::advance_tick(std::int64_t tick) {
    if (tick_ != 0) {
        switch (config_.variant) {
            case MidasVariant::plain:
                edge_.current.clear();
                volume_ = 0.0;
                break;
            case MidasVariant::filtering:
                for (Group* g : {&edge_, &*source_, &*dest_}) {
                    conditional_merge(g->total, g->current, g->scores, config_.merge_threshold, tick_);
                    g->current.decay(config_.alpha);
                }
                volume_ *= config_.alpha;
                break;
            case MidasVariant::relational:
                for (Group* g : {&edge_, &*source_, &*dest_}) g->current.decay(config_.alpha);
                volume_ *= config_.alpha;
                break;
        }
    }
    tick_ = tick;
}

double MidasDetector::group_score(Group& g, Key key, double w, double t) {
    g.current.update(key, w);
    if (config_.variant == MidasVariant::filtering) {
        const double score = filtered_chi_squared(g.current.query(key), g.total.query(key), t);
        g.scores.assign(key, score);
        return score;
    }
    g.total.update(key, w);
    return midas_chi_squared(g.current.query(key), g.total.query(key), t);
}

double MidasDetector::score(const EdgeEvent& e) { return score(e, config_.combine); }

double MidasDetector::score(const EdgeEvent& e, ScoreCombine mode) {
    if (config_.variant == MidasVariant::plain && mode == ScoreCombine::sum)
        throw std::invalid_argument("sum combination needs node sketches (relational or filtering)");
    if (e.tick < 1) throw std::invalid_argument("edge tick must be >= 1");
    if (e.tick < tick_)
        throw std::invalid_argument("tick regression: " + std::to_string(e.tick) + " after " +
                                    std::to_string(tick_));
    if (!(e.weight >= 0.0)) throw std::invalid_argument("edge weight must be >= 0");
    if (e.tick != tick_) advance_tick(e.tick);

    const double t = static_cast<double>(e.tick);
    const Key ek = edge_key(e.source, e.dest);
    last_ = MidasComponents{};
    last_.edge = group_score(edge_, ek, e.weight, t);
    if (source_) {
        last_.source = group_score(*source_, e.source, e.weight, t);
        last_.dest = group_score(*dest_, e.dest, e.weight, t);
    }
    volume_ += e.weight;
    last_counts_ = EdgeCounts{edge_.current.query(ek), edge_.total.query(ek), e.tick, volume_};
    return last_.combined(mode);
}

std::size_t MidasDetector::memory_bytes() const {
    std::size_t bytes = 3 * edge_.total.memory_bytes();
    if (source_) bytes *= 3;
    return bytes;
}

// Acklam's rational approximation for the inverse normal CDF.
double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile level must lie in (0, 1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    // 1 - p is exact for p >= 0.5, so the upper half reuses the accurate lower tail.
    if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // Newton step on Phi(x) - p
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return x - (cdf - p) / pdf;
}

double chi_squared_1dof_quantile(double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("chi-squared level must lie in (0, 1)");
    const double z = inverse_normal_cdf(0.5 * (1.0 + level));
    return z * z;
}

DecisionRule::DecisionRule(double false_positive_rate, std::size_t buckets)
    : epsilon_(false_positive_rate) {
    if (!(false_positive_rate > 0.0 && false_positive_rate < 1.0))
        throw std::invalid_argument("false positive rate must lie in (0, 1)");
    if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
    nu_ = std::numbers::e / static_cast<double>(buckets);
    threshold_ = chi_squared_1dof_quantile(1.0 - false_positive_rate / 2.0);
}

double DecisionRule::adjusted_statistic(const EdgeCounts& counts, MidasVariant variant) const {
    const double adjusted = counts.current - nu_ * counts.tick_volume;
    const double t = static_cast<double>(counts.tick);
    return variant == MidasVariant::filtering ? filtered_chi_squared(adjusted, counts.total, t)
                                              : midas_chi_squared(adjusted, counts.total, t);
}

bool DecisionRule::flag(MidasDetector& detector, const EdgeEvent& e) const {
    if (std::numbers::e / static_cast<double>(detector.config().buckets) != nu_)
        throw std::invalid_argument("decision rule sized for a different bucket count");
    detector.score(e);
    return adjusted_statistic(detector.last_edge_counts(), detector.config().variant) > threshold_;
}

}  // namespace streamsketch
