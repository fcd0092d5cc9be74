#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamsketch/densegraph.hpp"
#include "streamsketch/edge_event.hpp"
#include "streamsketch/mstream.hpp"
#include "streamsketch/sess.hpp"

namespace streamsketch {

/// Malformed input; `line()` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct EdgeStreamOptions {
    char delimiter = ',';
    /// Whether rows carry a weight column; inferred per row from the arity when unset.
    std::optional<bool> has_weight;
    /// Without a tick column, tick = 1 + row / records_per_tick.
    bool has_tick = true;
    std::size_t records_per_tick = 1000;
};

/// Rows `u,v,t` or `u,v,w,t`. Ticks must be non-decreasing and >= 1, weights
/// non-negative. Blank lines are skipped.
std::vector<EdgeEvent> parse_edge_stream(std::istream& in, const EdgeStreamOptions& options = {});

struct RecordSchema {
    std::vector<std::string> categorical;
    std::vector<std::string> numeric;
    bool has_tick = false;
};

struct RecordStream {
    RecordSchema schema;
    std::vector<MultiAspectRecord> records;
};

/// Header of `cat:NAME`, `num:NAME` and optionally `tick` columns, then rows.
/// Without a tick column, tick = 1 + row / records_per_tick.
RecordStream parse_record_stream(std::istream& in, std::size_t records_per_tick = 1000, char delimiter = ',');

/// One 0/1 label per line.
std::vector<int> parse_labels(std::istream& in);
/// One real per line.
std::vector<double> parse_scores(std::istream& in);

/// Either `index,label` (edge at 0-based stream position) or `node,<id>,<label>`.
struct FeedbackLine {
    FeedbackTarget target = FeedbackTarget::edge;
    std::size_t index = 0;
    Key node = 0;
    Label label = Label::normal;
};
std::vector<FeedbackLine> parse_feedback(std::istream& in);

/// Rank-based ROC-AUC with tied scores given averaged ranks.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct WindowSpec {
    std::int64_t window_ticks = 30;
    std::size_t anomaly_edge_threshold = 50;
};

struct LabeledWindow {
    std::int64_t index = 0;  ///< floor(tick / window_ticks)
    GraphWindow window;
    std::size_t positives = 0;
    int label = 0;
};

/// Groups consecutive edges by floor(tick / window_ticks). A window is
/// anomalous iff it holds at least `anomaly_edge_threshold` positive edges.
std::vector<LabeledWindow> window_aggregate(std::span<const EdgeEvent> edges, std::span<const int> labels,
                                            const WindowSpec& spec, const DenseGraphConfig& config = {});

struct LabeledEdges {
    std::vector<EdgeEvent> edges;
    std::vector<int> labels;
};

struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t n_background = 10000;
    /// Edges per burst.
    std::size_t n_burst = 500;
    std::size_t n_nodes = 100;
    std::int64_t burst_tick = 10;
    std::int64_t n_ticks = 20;
    /// Distinct (source, destination) pairs sharing each burst.
    std::size_t burst_pairs = 1;
    /// Bursts recur every `burst_period` ticks starting at `burst_tick`, all on
    /// the same attacker pairs.
    std::size_t n_bursts = 1;
    std::int64_t burst_period = 10;
    /// Normal edges each attacker pair emits per tick (part of n_background).
    std::size_t attacker_regular_per_tick = 0;
};

/// Background edges uniform over node pairs, spread evenly over ticks
/// 1..n_ticks. The attacker pairs also carry a steady trickle of normal edges
/// every tick; their burst edges are shuffled into the burst tick.
LabeledEdges synth_burst_stream(const SynthConfig& config = {});

/// Planted dense block in one of `n_windows` windows of uniform background edges.
struct PlantedGraphConfig {
    std::uint64_t seed = 42;
    std::size_t n_windows = 20;
    std::size_t edges_per_window = 2000;
    std::size_t n_nodes = 1000;
    std::size_t planted_window = 7;
    std::size_t block_sources = 5;
    std::size_t block_dests = 5;
    std::size_t block_edges = 400;
};
LabeledEdges planted_block_stream(const PlantedGraphConfig& config = {});

/// Endless stream with `edges_per_tick` uniformly random edges per tick.
class UniformEdgeSource {
public:
    UniformEdgeSource(std::uint64_t seed, std::size_t n_nodes, std::size_t edges_per_tick);
    EdgeEvent next();

private:
    std::mt19937_64 rng_;
    std::size_t n_nodes_;
    std::size_t edges_per_tick_;
    std::size_t emitted_ = 0;
};

/// Stationary stream: each of `n_pairs` pairs emits Poisson(rate) edges per
/// tick, in random order within the tick.
std::vector<EdgeEvent> stationary_poisson_stream(std::uint64_t seed, std::size_t n_pairs, double rate,
                                                 std::int64_t n_ticks);

/// Knuth's product method; exact for the small rates used here.
std::uint64_t poisson_sample(std::mt19937_64& rng, double rate);

/// Marks each edge as revealed with probability `fraction`; one-sided only
/// reveals positives. Returns stream positions in order.
std::vector<std::size_t> sample_feedback(std::span<const int> labels, double fraction, Sidedness sidedness,
                                         std::uint64_t seed);

/// Resident set size of this process, from /proc/self/status (0 if unavailable).
std::size_t current_rss_bytes();

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

}  // namespace streamsketch
