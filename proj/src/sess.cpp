#include "streamsketch/sess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace streamsketch {

void SharpeningParams::validate() const {
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda must exceed 1, got " + std::to_string(lambda));
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1), got " + std::to_string(mu));
}

namespace {

/// (total factor, current factor) for a label.
std::pair<double, double> factors(Label label, const SharpeningParams& params) {
    return label == Label::normal ? std::pair{params.lambda, params.mu} : std::pair{params.mu, params.lambda};
}

void check_probability(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

void sess_update(MidasDetector& detector, const FeedbackEvent& f, const SharpeningParams& params) {
    params.validate();
    if (f.target != FeedbackTarget::edge)
        throw std::invalid_argument("node feedback needs the higher-order layout; MIDAS accepts edge feedback only");
    const auto [total_factor, current_factor] = factors(f.label, params);
    const Key key = edge_key(f.source, f.dest);
    detector.edge_total().scale_key(key, total_factor);
    detector.edge_current().scale_key(key, current_factor);
}

Sess3dDetector::Sess3dDetector(const Config& config)
    : config_(config),
      current_(config.layers, config.buckets, config.seed, true),
      total_(config.layers, config.buckets, config.seed, true) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("decay factor must lie in (0, 1)");
}

double Sess3dDetector::row_mass(const HigherOrderSketch& h, Key u) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < h.layers(); ++j) {
        double sum = 0.0;
        for (double x : h.layer(j).row(h.row_index(j, u))) sum += x;
        best = std::min(best, sum);
    }
    return best;
}

double Sess3dDetector::col_mass(const HigherOrderSketch& h, Key v) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < h.layers(); ++j) {
        const std::size_t c = h.col_index(j, v);
        double sum = 0.0;
        for (std::size_t r = 0; r < h.buckets(); ++r) sum += h.at(j, r, c);
        best = std::min(best, sum);
    }
    return best;
}

double Sess3dDetector::score(const EdgeEvent& e) {
    if (e.tick < 1) throw std::invalid_argument("edge tick must be >= 1");
    if (e.tick < tick_)
        throw std::invalid_argument("tick regression: " + std::to_string(e.tick) + " after " + std::to_string(tick_));
    if (e.weight < 0.0) throw std::invalid_argument("edge weight must be non-negative");
    if (tick_ != 0 && e.tick != tick_) current_.decay(config_.alpha);
    tick_ = e.tick;

    current_.update(e.source, e.dest, e.weight);
    total_.update(e.source, e.dest, e.weight);
    const double t = static_cast<double>(e.tick);
    last_.edge = midas_chi_squared(current_.estimate(e.source, e.dest), total_.estimate(e.source, e.dest), t);
    last_.source = midas_chi_squared(row_mass(current_, e.source), row_mass(total_, e.source), t);
    last_.dest = midas_chi_squared(col_mass(current_, e.dest), col_mass(total_, e.dest), t);
    return last_.combined(config_.combine);
}

void Sess3dDetector::feedback(const FeedbackEvent& f, const SharpeningParams& params) {
    params.validate();
    const auto [total_factor, current_factor] = factors(f.label, params);
    for (std::size_t j = 0; j < config_.layers; ++j) {
        if (f.target == FeedbackTarget::edge) {
            const std::size_t r = total_.row_index(j, f.source);
            const std::size_t c = total_.col_index(j, f.dest);
            total_.scale_cell(j, r, c, total_factor);
            current_.scale_cell(j, r, c, current_factor);
        } else {
            const std::size_t r = total_.row_index(j, f.source);
            const std::size_t c = total_.col_index(j, f.source);
            total_.scale_row(j, r, total_factor);
            current_.scale_row(j, r, current_factor);
            total_.scale_col(j, c, total_factor);
            current_.scale_col(j, c, current_factor);
        }
    }
}

TwoStateProcess::TwoStateProcess(double p, double q, std::uint64_t seed) : p_(p), q_(q), rng_(seed) {
    check_probability(p, "p");
    check_probability(q, "q");
    if (!(p + q < 1.0)) throw std::invalid_argument("p + q must be below 1");
}

ChainState TwoStateProcess::step() {
    const double u = uniform_real(rng_);
    if (state_ == ChainState::normal) {
        if (u < p_) state_ = ChainState::anomalous;
    } else if (u < q_) {
        state_ = ChainState::normal;
    }
    return state_;
}

std::int64_t PredictorConfig::effective_wait_length() const {
    if (wait_length) {
        if (*wait_length < 1) throw std::invalid_argument("wait length L must be positive");
        return *wait_length;
    }
    check_probability(q_hat, "q_hat");
    return static_cast<std::int64_t>(std::ceil(1.0 / q_hat));
}

double pomdp_run(TwoStateProcess& process, const PredictorConfig& predictor, std::int64_t steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!(predictor.feedback_prob >= 0.0 && predictor.feedback_prob <= 1.0))
        throw std::invalid_argument("feedback probability must lie in [0, 1]");
    const bool imitate = predictor.kind == PredictorKind::imitate;
    if (imitate) {
        check_probability(predictor.p_hat, "p_hat");
        check_probability(predictor.q_hat, "q_hat");
    }
    const std::int64_t wait = imitate ? 0 : predictor.effective_wait_length();
    auto& rng = process.rng();

    ChainState guess = ChainState::normal;  // imitate's own chain
    std::int64_t anomalous_left = 0;        // opt: remaining steps predicting A
    std::int64_t correct = 0;
    for (std::int64_t i = 0; i < steps; ++i) {
        const ChainState truth = process.step();
        ChainState prediction;
        if (imitate) {
            const double u = uniform_real(rng);
            if (guess == ChainState::normal) {
                if (u < predictor.p_hat) guess = ChainState::anomalous;
            } else if (u < predictor.q_hat) {
                guess = ChainState::normal;
            }
            prediction = guess;
        } else {
            prediction = anomalous_left > 0 ? ChainState::anomalous : ChainState::normal;
            if (anomalous_left > 0) --anomalous_left;
        }
        if (prediction == truth) ++correct;

        const bool offered = uniform_real(rng) < predictor.feedback_prob;
        const bool visible = predictor.sidedness == Sidedness::two_sided || truth == ChainState::anomalous;
        if (offered && visible) {
            if (imitate)
                guess = truth;
            else
                anomalous_left = truth == ChainState::anomalous ? wait : 0;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(steps);
}

double pomdp_anomalous_fraction(TwoStateProcess& process, std::int64_t steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < steps; ++i) hits += process.step() == ChainState::anomalous;
    return static_cast<double>(hits) / static_cast<double>(steps);
}

double pomdp_expected_accuracy(double p, double q, std::int64_t L, double phi, Sidedness sidedness,
                               std::optional<double> r) {
    check_probability(p, "p");
    check_probability(q, "q");
    check_probability(phi, "phi");
    if (L < 1) throw std::invalid_argument("wait length L must be positive");
    const double l = static_cast<double>(L);
    if (!(l < 1.0 / phi)) throw std::invalid_argument("requires L < 1/phi");
    if (!(l < 1.0 / p)) throw std::invalid_argument("requires L < 1/p");
    double mix = 1.0;
    if (sidedness == Sidedness::two_sided) {
        mix = r.value_or(p / (p + q));
        if (!(mix >= 0.0 && mix <= 1.0)) throw std::invalid_argument("label share r must lie in [0, 1]");
    }
    const double base = q / (p + q);
    if (l <= 1.0 / q) return base + mix * phi * l * p / (p + q);
    return base + mix * phi * (1.0 / q - q * l / (p + q));
}

}  // namespace streamsketch
