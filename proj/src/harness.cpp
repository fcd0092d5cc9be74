#include "streamsketch/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <string_view>

namespace streamsketch {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

double parse_real(std::string_view field, std::size_t line, const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
    return value;
}

std::int64_t parse_int(std::string_view field, std::size_t line, const char* what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
    return value;
}

Key parse_node(std::string_view field, std::size_t line) {
    if (field.empty()) throw ParseError(line, "empty node id");
    return key_from_token(field);
}

int parse_label(std::string_view field, std::size_t line) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw ParseError(line, "label must be 0 or 1, got '" + std::string(field) + "'");
}

}  // namespace

std::vector<EdgeEvent> parse_edge_stream(std::istream& in, const EdgeStreamOptions& options) {
    if (options.records_per_tick == 0) throw std::invalid_argument("records per tick must be positive");
    std::vector<EdgeEvent> edges;
    std::string line;
    std::size_t line_no = 0;
    std::int64_t last_tick = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, options.delimiter);
        const std::size_t base = options.has_tick ? 3 : 2;
        bool weighted;
        if (options.has_weight) {
            weighted = *options.has_weight;
            if (fields.size() != base + (weighted ? 1 : 0))
                throw ParseError(line_no, "expected " + std::to_string(base + (weighted ? 1 : 0)) + " fields, got " +
                                              std::to_string(fields.size()));
        } else {
            if (fields.size() != base && fields.size() != base + 1)
                throw ParseError(line_no, "expected " + std::to_string(base) + " or " + std::to_string(base + 1) +
                                              " fields, got " + std::to_string(fields.size()));
            weighted = fields.size() == base + 1;
        }
        EdgeEvent e;
        e.source = parse_node(fields[0], line_no);
        e.dest = parse_node(fields[1], line_no);
        if (weighted) {
            e.weight = parse_real(fields[2], line_no, "weight");
            if (e.weight < 0.0) throw ParseError(line_no, "negative weight");
        }
        if (options.has_tick) {
            e.tick = parse_int(fields.back(), line_no, "tick");
            if (e.tick < 1) throw ParseError(line_no, "tick must be >= 1");
        } else {
            e.tick = 1 + static_cast<std::int64_t>(edges.size() / options.records_per_tick);
        }
        if (e.tick < last_tick)
            throw ParseError(line_no, "tick " + std::to_string(e.tick) + " decreases from " + std::to_string(last_tick));
        last_tick = e.tick;
        edges.push_back(e);
    }
    return edges;
}

RecordStream parse_record_stream(std::istream& in, std::size_t records_per_tick, char delimiter) {
    if (records_per_tick == 0) throw std::invalid_argument("records per tick must be positive");
    RecordStream out;
    std::string line;
    std::size_t line_no = 0;
    enum class Column { cat, num, tick };
    std::vector<Column> columns;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError(line_no, "missing header");
    for (auto tag : split(line, delimiter)) {
        if (tag == "tick") {
            if (out.schema.has_tick) throw ParseError(line_no, "duplicate tick column");
            out.schema.has_tick = true;
            columns.push_back(Column::tick);
        } else if (tag.starts_with("cat:")) {
            out.schema.categorical.emplace_back(tag.substr(4));
            columns.push_back(Column::cat);
        } else if (tag.starts_with("num:")) {
            out.schema.numeric.emplace_back(tag.substr(4));
            columns.push_back(Column::num);
        } else {
            throw ParseError(line_no, "header column '" + std::string(tag) + "' is not cat:NAME, num:NAME or tick");
        }
    }
    if (out.schema.categorical.empty() && out.schema.numeric.empty())
        throw ParseError(line_no, "header declares no features");

    std::int64_t last_tick = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, delimiter);
        if (fields.size() != columns.size())
            throw ParseError(line_no, "expected " + std::to_string(columns.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        MultiAspectRecord r;
        r.tick = 1 + static_cast<std::int64_t>(out.records.size() / records_per_tick);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            switch (columns[i]) {
                case Column::cat:
                    r.categorical.push_back(key_from_token(fields[i]));
                    break;
                case Column::num: {
                    const double x = parse_real(fields[i], line_no, "numeric value");
                    if (!(x > -1.0)) throw ParseError(line_no, "numeric value must exceed -1");
                    r.numeric.push_back(x);
                    break;
                }
                case Column::tick:
                    r.tick = parse_int(fields[i], line_no, "tick");
                    if (r.tick < 1) throw ParseError(line_no, "tick must be >= 1");
                    break;
            }
        }
        if (r.tick < last_tick)
            throw ParseError(line_no, "tick " + std::to_string(r.tick) + " decreases from " + std::to_string(last_tick));
        last_tick = r.tick;
        out.records.push_back(std::move(r));
    }
    return out;
}

std::vector<int> parse_labels(std::istream& in) {
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto field = trim(line);
        if (field.empty()) continue;
        labels.push_back(parse_label(field, line_no));
    }
    return labels;
}

std::vector<double> parse_scores(std::istream& in) {
    std::vector<double> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto field = trim(line);
        if (field.empty()) continue;
        scores.push_back(parse_real(field, line_no, "score"));
    }
    return scores;
}

std::vector<FeedbackLine> parse_feedback(std::istream& in) {
    std::vector<FeedbackLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        FeedbackLine f;
        if (fields.size() == 3 && fields[0] == "node") {
            f.target = FeedbackTarget::node;
            f.node = parse_node(fields[1], line_no);
            f.label = static_cast<Label>(parse_label(fields[2], line_no));
        } else if (fields.size() == 2) {
            const auto index = parse_int(fields[0], line_no, "edge index");
            if (index < 0) throw ParseError(line_no, "edge index must be non-negative");
            f.index = static_cast<std::size_t>(index);
            f.label = static_cast<Label>(parse_label(fields[1], line_no));
        } else {
            throw ParseError(line_no, "expected 'index,label' or 'node,<id>,<label>'");
        }
        out.push_back(f);
    }
    return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::size_t tied_positives = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            const int l = labels[order[j]];
            if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 or 1");
            tied_positives += static_cast<std::size_t>(l);
            ++j;
        }
        // 1-based ranks i+1 .. j share their mean.
        const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        positive_rank_sum += mean_rank * static_cast<double>(tied_positives);
        positives += tied_positives;
        i = j;
    }
    const std::size_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) throw std::invalid_argument("AUC needs both positive and negative labels");
    const double np = static_cast<double>(positives);
    const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(negatives));
}

std::vector<LabeledWindow> window_aggregate(std::span<const EdgeEvent> edges, std::span<const int> labels,
                                            const WindowSpec& spec, const DenseGraphConfig& config) {
    if (edges.size() != labels.size()) throw std::invalid_argument("labels are not aligned with edges");
    if (spec.window_ticks < 1) throw std::invalid_argument("window length must be positive");
    if (spec.anomaly_edge_threshold < 1) throw std::invalid_argument("anomaly edge threshold must be positive");
    std::vector<LabeledWindow> windows;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::int64_t index = edges[i].tick / spec.window_ticks;
        if (windows.empty() || windows.back().index != index)
            windows.push_back(LabeledWindow{index, GraphWindow(config), 0, 0});
        auto& w = windows.back();
        w.window.add(edges[i]);
        w.positives += labels[i] != 0;
    }
    for (auto& w : windows) w.label = w.positives >= spec.anomaly_edge_threshold ? 1 : 0;
    return windows;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

LabeledEdges synth_burst_stream(const SynthConfig& config) {
    if (config.n_nodes < 2 || config.n_ticks < 1 || config.burst_tick < 1 || config.burst_pairs < 1 ||
        config.burst_period < 1)
        throw std::invalid_argument("synthetic stream parameters must be positive");
    std::mt19937_64 rng(config.seed);
    const auto ticks = static_cast<std::size_t>(config.n_ticks);
    // (edge, label) grouped by tick.
    std::vector<std::vector<std::pair<EdgeEvent, int>>> per_tick(ticks);
    // Attackers are ordinary hosts: distinct random pairs of background nodes.
    std::vector<std::pair<Key, Key>> attackers;
    while (attackers.size() < config.burst_pairs) {
        const Key u = uniform_index(rng, config.n_nodes);
        const Key v = uniform_index(rng, config.n_nodes);
        if (u == v || std::find(attackers.begin(), attackers.end(), std::pair{u, v}) != attackers.end()) continue;
        attackers.emplace_back(u, v);
    }
    // The attacker pairs' regular traffic is part of the normal background.
    std::size_t regular = 0;
    for (std::int64_t t = 1; t <= config.n_ticks; ++t)
        for (const auto& [u, v] : attackers)
            for (std::size_t k = 0; k < config.attacker_regular_per_tick && regular < config.n_background; ++k, ++regular)
                per_tick[static_cast<std::size_t>(t - 1)].emplace_back(EdgeEvent{u, v, 1.0, t}, 0);
    const std::size_t uniform = config.n_background - regular;
    for (std::size_t i = 0; i < uniform; ++i) {
        const auto tick = static_cast<std::int64_t>(i * ticks / uniform) + 1;
        EdgeEvent e{uniform_index(rng, config.n_nodes), uniform_index(rng, config.n_nodes), 1.0, tick};
        per_tick[static_cast<std::size_t>(tick - 1)].emplace_back(e, 0);
    }
    for (std::size_t b = 0; b < config.n_bursts; ++b) {
        const std::int64_t tick = config.burst_tick + static_cast<std::int64_t>(b) * config.burst_period;
        if (tick > config.n_ticks) throw std::invalid_argument("burst tick beyond the stream");
        for (std::size_t i = 0; i < config.n_burst; ++i) {
            const auto& [u, v] = attackers[i % attackers.size()];
            per_tick[static_cast<std::size_t>(tick - 1)].emplace_back(EdgeEvent{u, v, 1.0, tick}, 1);
        }
    }
    LabeledEdges out;
    for (auto& bucket : per_tick) {
        shuffle(bucket, rng);
        for (const auto& [e, label] : bucket) {
            out.edges.push_back(e);
            out.labels.push_back(label);
        }
    }
    return out;
}

LabeledEdges planted_block_stream(const PlantedGraphConfig& config) {
    if (config.n_windows < 1 || config.planted_window >= config.n_windows || config.n_nodes < 1 ||
        config.block_sources < 1 || config.block_dests < 1)
        throw std::invalid_argument("planted stream parameters out of range");
    std::mt19937_64 rng(config.seed);
    LabeledEdges out;
    for (std::size_t w = 0; w < config.n_windows; ++w) {
        std::vector<std::pair<EdgeEvent, int>> batch;
        const auto tick = static_cast<std::int64_t>(w + 1);
        for (std::size_t i = 0; i < config.edges_per_window; ++i)
            batch.emplace_back(EdgeEvent{uniform_index(rng, config.n_nodes), uniform_index(rng, config.n_nodes), 1.0, tick},
                               0);
        if (w == config.planted_window) {
            for (std::size_t i = 0; i < config.block_edges; ++i) {
                const Key u = config.n_nodes + uniform_index(rng, config.block_sources);
                const Key v = config.n_nodes + config.block_sources + uniform_index(rng, config.block_dests);
                batch.emplace_back(EdgeEvent{u, v, 1.0, tick}, 1);
            }
        }
        shuffle(batch, rng);
        for (const auto& [e, label] : batch) {
            out.edges.push_back(e);
            out.labels.push_back(label);
        }
    }
    return out;
}

UniformEdgeSource::UniformEdgeSource(std::uint64_t seed, std::size_t n_nodes, std::size_t edges_per_tick)
    : rng_(seed), n_nodes_(n_nodes), edges_per_tick_(edges_per_tick) {
    if (n_nodes == 0 || edges_per_tick == 0) throw std::invalid_argument("uniform source parameters must be positive");
}

EdgeEvent UniformEdgeSource::next() {
    const auto tick = static_cast<std::int64_t>(emitted_ / edges_per_tick_) + 1;
    ++emitted_;
    const Key u = uniform_index(rng_, n_nodes_);
    const Key v = uniform_index(rng_, n_nodes_);
    return EdgeEvent{u, v, 1.0, tick};
}

std::uint64_t poisson_sample(std::mt19937_64& rng, double rate) {
    if (!(rate >= 0.0) || rate > 500.0) throw std::invalid_argument("Poisson rate must lie in [0, 500]");
    const double limit = std::exp(-rate);
    std::uint64_t k = 0;
    double product = uniform_real(rng);
    while (product > limit) {
        ++k;
        product *= uniform_real(rng);
    }
    return k;
}

std::vector<EdgeEvent> stationary_poisson_stream(std::uint64_t seed, std::size_t n_pairs, double rate,
                                                 std::int64_t n_ticks) {
    if (n_pairs == 0 || n_ticks < 1) throw std::invalid_argument("stationary stream parameters must be positive");
    std::mt19937_64 rng(seed);
    std::vector<EdgeEvent> out;
    std::vector<EdgeEvent> batch;
    for (std::int64_t t = 1; t <= n_ticks; ++t) {
        batch.clear();
        for (std::size_t k = 0; k < n_pairs; ++k) {
            const auto n = poisson_sample(rng, rate);
            for (std::uint64_t i = 0; i < n; ++i) batch.push_back(EdgeEvent{2 * k, 2 * k + 1, 1.0, t});
        }
        shuffle(batch, rng);
        out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
}

std::vector<std::size_t> sample_feedback(std::span<const int> labels, double fraction, Sidedness sidedness,
                                         std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("feedback fraction must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool offered = uniform_real(rng) < fraction;
        if (offered && (sidedness == Sidedness::two_sided || labels[i] == 1)) out.push_back(i);
    }
    return out;
}

std::size_t current_rss_bytes() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmRSS:", 0) == 0) {
            std::size_t kb = 0;
            const auto digits = line.find_first_of("0123456789");
            if (digits == std::string::npos) return 0;
            std::from_chars(line.data() + digits, line.data() + line.size(), kb);
            return kb * 1024;
        }
    }
    return 0;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs >= 2 aligned points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear fit needs distinct x values");
    if (syy == 0.0) return 1.0;
    return sxy * sxy / (sxx * syy);
}

}  // namespace streamsketch
