#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "streamsketch/edge_event.hpp"
#include "streamsketch/hashing.hpp"
#include "streamsketch/higher_order_sketch.hpp"
#include "streamsketch/midas.hpp"

namespace streamsketch {

/// Multipliers for labeled feedback. Normal labels multiply the total count
/// by lambda and the current count by mu; anomalous labels do the opposite.
struct SharpeningParams {
    double lambda = 2.0;
    double mu = 0.3;

    /// Throws unless lambda > 1 and 0 < mu < 1.
    void validate() const;
};

enum class FeedbackTarget { edge, node };
enum class Label : int { normal = 0, anomalous = 1 };

struct FeedbackEvent {
    FeedbackTarget target = FeedbackTarget::edge;
    Key source = 0;  ///< node id for node feedback
    Key dest = 0;
    Label label = Label::normal;
    std::int64_t tick = 0;

    static FeedbackEvent for_edge(const EdgeEvent& e, Label label) {
        return FeedbackEvent{FeedbackTarget::edge, e.source, e.dest, label, e.tick};
    }
    static FeedbackEvent for_node(Key node, Label label, std::int64_t tick = 0) {
        return FeedbackEvent{FeedbackTarget::node, node, node, label, tick};
    }
};

/// Rescales the edge's total and current buckets of a MIDAS detector in every
/// hash row. Node feedback is rejected: MIDAS hashes edges and nodes into
/// unrelated sketches, so there is no node cell to sharpen.
void sess_update(MidasDetector& detector, const FeedbackEvent& f, const SharpeningParams& params = {});

/// Semi-supervised scorer on the higher-order layout: the edge statistic uses
/// the cell estimate and the node statistics use the row (source) and column
/// (destination) sums, so node feedback can rescale whole rows or columns.
class Sess3dDetector {
public:
    struct Config {
        std::size_t layers = 2;
        std::size_t buckets = 32;
        double alpha = 0.5;
        ScoreCombine combine = ScoreCombine::max;
        std::uint64_t seed = 42;
    };

    explicit Sess3dDetector(const Config& config);
    Sess3dDetector() : Sess3dDetector(Config{}) {}

    double score(const EdgeEvent& e);
    /// Edge feedback rescales the edge's cell in every layer. Node feedback
    /// rescales the node's row (as a source) and its column (as a destination).
    void feedback(const FeedbackEvent& f, const SharpeningParams& params = {});

    const MidasComponents& last_components() const { return last_; }
    const HigherOrderSketch& current() const { return current_; }
    const HigherOrderSketch& total() const { return total_; }
    std::size_t memory_bytes() const { return current_.memory_bytes() + total_.memory_bytes(); }

private:
    double row_mass(const HigherOrderSketch& h, Key u) const;
    double col_mass(const HigherOrderSketch& h, Key v) const;

    Config config_;
    HigherOrderSketch current_;
    HigherOrderSketch total_;
    std::int64_t tick_ = 0;
    MidasComponents last_;
};

enum class ChainState : int { normal = 0, anomalous = 1 };

/// Two-state Markov chain: N -> A with probability p, A -> N with probability q.
class TwoStateProcess {
public:
    TwoStateProcess(double p, double q, std::uint64_t seed);

    double p() const { return p_; }
    double q() const { return q_; }
    ChainState state() const { return state_; }
    /// One transition; returns the new state.
    ChainState step();
    /// Long-run fraction of time in A: p / (p + q).
    double stationary_anomalous() const { return p_ / (p_ + q_); }
    std::mt19937_64& rng() { return rng_; }

private:
    double p_;
    double q_;
    ChainState state_ = ChainState::normal;
    std::mt19937_64 rng_;
};

enum class PredictorKind { imitate, opt };
enum class Sidedness { one_sided, two_sided };

struct PredictorConfig {
    PredictorKind kind = PredictorKind::opt;
    double p_hat = 0.001;
    double q_hat = 0.02;
    /// Wait length for Opt; ceil(1 / q_hat) when unset.
    std::optional<std::int64_t> wait_length;
    double feedback_prob = 0.0;
    Sidedness sidedness = Sidedness::two_sided;

    std::int64_t effective_wait_length() const;
};

/// Runs the chain for `steps` transitions and returns the fraction of steps
/// where the prediction matched the true state. Each step: transition, record
/// the prediction, then maybe deliver feedback (used from the next step on).
double pomdp_run(TwoStateProcess& process, const PredictorConfig& predictor, std::int64_t steps);

/// Fraction of `steps` transitions spent in A.
double pomdp_anomalous_fraction(TwoStateProcess& process, std::int64_t steps);

/// Closed-form expected accuracy of Opt with wait length L under feedback
/// probability phi. With two-sided feedback the feedback term is scaled by the
/// share r of anomalous labels, p / (p + q) unless given.
double pomdp_expected_accuracy(double p, double q, std::int64_t L, double phi,
                               Sidedness sidedness = Sidedness::one_sided, std::optional<double> r = std::nullopt);

}  // namespace streamsketch
