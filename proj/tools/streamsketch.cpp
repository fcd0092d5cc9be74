#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamsketch/densegraph.hpp"
#include "streamsketch/harness.hpp"
#include "streamsketch/midas.hpp"
#include "streamsketch/mstream.hpp"
#include "streamsketch/sess.hpp"

namespace ss = streamsketch;
using json = nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

/// Error raised for bad input files or invalid parameter values.
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("STREAMSKETCH_SEED")) {
        try {
            std::size_t used = 0;
            const auto seed = std::stoull(env, &used);
            if (used == std::string(env).size()) return seed;
        } catch (const std::exception&) {
        }
        throw RunError(std::string("STREAMSKETCH_SEED is not an unsigned integer: '") + env + "'");
    }
    return 42;
}

/// Input stream that is either standard input ("-") or a file.
class Input {
public:
    explicit Input(const std::string& path) {
        if (path == "-") return;
        file_.open(path);
        if (!file_) throw RunError("cannot open '" + path + "' for reading");
    }
    std::istream& get() { return file_.is_open() ? static_cast<std::istream&>(file_) : std::cin; }

private:
    std::ifstream file_;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path == "-") return;
        file_.open(path);
        if (!file_) throw RunError("cannot open '" + path + "' for writing");
    }
    std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::string format_score(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

template <typename Parse>
auto with_file_context(const std::string& path, Parse&& parse) {
    try {
        return parse();
    } catch (const ss::ParseError& e) {
        throw RunError((path == "-" ? std::string("<stdin>") : path) + ": " + e.what());
    }
}

std::vector<int> read_labels(const std::string& path) {
    Input in(path);
    return with_file_context(path, [&] { return ss::parse_labels(in.get()); });
}

/// Options shared by every scoring subcommand.
struct CommonOptions {
    std::string input = "-";
    std::string output = "-";
    std::string labels;
    bool eval = false;
    std::uint64_t seed = 42;

    void attach(CLI::App* cmd) {
        cmd->add_option("-i,--input", input, "Input CSV ('-' for stdin)");
        cmd->add_option("-o,--output", output, "Output file ('-' for stdout)");
        cmd->add_option("--labels", labels, "Label file, one 0/1 per input row (required by --eval)");
        cmd->add_flag("--eval", eval, "Write metrics JSON instead of scores");
        cmd->add_option("--seed", seed, "RNG seed (default 42 or $STREAMSKETCH_SEED)");
    }
};

/// Writes the scores, or the metrics JSON when --eval is set.
void emit(const CommonOptions& opts, const std::vector<double>& scores, double seconds,
          const std::vector<int>* labels_override = nullptr) {
    Output out(opts.output);
    if (!opts.eval) {
        auto& os = out.get();
        for (double s : scores) os << format_score(s) << '\n';
        return;
    }
    if (opts.labels.empty() && labels_override == nullptr) throw RunError("--eval needs --labels");
    const std::vector<int> labels = labels_override ? *labels_override : read_labels(opts.labels);
    if (labels.size() != scores.size())
        throw RunError("label count " + std::to_string(labels.size()) + " does not match score count " +
                       std::to_string(scores.size()));
    json metrics{{"auc", ss::roc_auc(scores, labels)}, {"count", scores.size()}, {"seconds", seconds}};
    out.get() << metrics.dump() << '\n';
}

std::vector<ss::EdgeEvent> read_edges(const std::string& path) {
    Input in(path);
    return with_file_context(path, [&] { return ss::parse_edge_stream(in.get()); });
}

template <typename Score>
std::vector<double> score_all(const std::vector<ss::EdgeEvent>& edges, Score&& score, double& seconds) {
    std::vector<double> scores;
    scores.reserve(edges.size());
    const auto start = std::chrono::steady_clock::now();
    for (const auto& e : edges) scores.push_back(score(e));
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return scores;
}

ss::ScoreCombine parse_combine(const std::string& s) {
    if (s == "max") return ss::ScoreCombine::max;
    if (s == "sum") return ss::ScoreCombine::sum;
    throw RunError("--combine must be max or sum");
}

std::vector<double> parse_list(const std::string& text, const char* name) {
    std::vector<double> values;
    std::stringstream ss_(text);
    std::string item;
    while (std::getline(ss_, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw RunError(std::string("--") + name + ": '" + item + "' is not a number");
        }
    }
    if (values.empty()) throw RunError(std::string("--") + name + " is empty");
    return values;
}

/// Appends `--key value` pairs from a key=value config file for every key not
/// already given on the command line, so flags take precedence.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream file(path);
    if (!file) throw RunError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw RunError(path + ": line " + std::to_string(line_no) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given) continue;
        if (value == "true") {
            args.push_back(flag);
        } else if (value != "false") {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming anomaly detection on edge and record streams", "streamsketch"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    app.footer(
        "Any subcommand also accepts --config FILE: key=value lines (e.g. buckets=2048, eval=true) applied as\n"
        "flags unless the same flag is given on the command line. Exit codes: 0 ok, 1 input or runtime error,\n"
        "2 usage error.");

    CommonOptions common;
    std::uint64_t seed_default = 42;
    std::function<void()> run;

    // MIDAS family.
    std::size_t rows = ss::CountMinSketch::kDefaultRows;
    std::size_t buckets = ss::CountMinSketch::kDefaultBuckets;
    double alpha = 0.5;
    double merge_threshold = 1000.0;
    std::string combine = "max";
    double fp_rate = 0.0;
    struct MidasCommand {
        const char* name;
        ss::MidasVariant variant;
        const char* help;
    };
    for (const MidasCommand mc : {MidasCommand{"midas", ss::MidasVariant::plain, "Plain MIDAS edge scores"},
                                  MidasCommand{"midas-r", ss::MidasVariant::relational, "MIDAS-R edge scores"},
                                  MidasCommand{"midas-f", ss::MidasVariant::filtering, "MIDAS-F edge scores"}}) {
        auto* cmd = app.add_subcommand(mc.name, mc.help);
        common.attach(cmd);
        cmd->add_option("--rows", rows, "Hash functions per sketch");
        cmd->add_option("--buckets", buckets, "Buckets per hash function");
        if (mc.variant != ss::MidasVariant::plain) {
            cmd->add_option("--alpha", alpha, "Decay factor for current counts, in (0,1)");
            cmd->add_option("--combine", combine, "Edge/source/destination combination: max or sum");
        }
        if (mc.variant == ss::MidasVariant::filtering)
            cmd->add_option("--threshold", merge_threshold, "Score above which a tick is not merged");
        cmd->add_option("--fp-rate", fp_rate, "Also print a 0/1 flag with this false-positive bound");
        const auto variant = mc.variant;
        cmd->callback([&, variant] {
            run = [&, variant] {
                ss::MidasConfig config;
                config.variant = variant;
                config.rows = rows;
                config.buckets = buckets;
                config.alpha = alpha;
                config.merge_threshold = merge_threshold;
                config.combine = parse_combine(combine);
                config.seed = common.seed;
                ss::MidasDetector detector(config);
                const auto edges = read_edges(common.input);
                if (fp_rate > 0.0 && !common.eval) {
                    const ss::DecisionRule rule(fp_rate, buckets);
                    Output out(common.output);
                    for (const auto& e : edges) {
                        const bool flagged = rule.flag(detector, e);
                        out.get() << format_score(detector.last_components().combined(config.combine)) << ','
                                  << (flagged ? 1 : 0) << '\n';
                    }
                    return;
                }
                double seconds = 0.0;
                const auto scores = score_all(edges, [&](const ss::EdgeEvent& e) { return detector.score(e); }, seconds);
                emit(common, scores, seconds);
            };
        });
    }

    // Dense-submatrix edge and graph scorers.
    std::size_t hrows = 2;
    std::size_t hbuckets = 32;
    double halpha = 0.9;
    std::size_t k = 5;
    std::int64_t window_ticks = 30;
    std::size_t edge_threshold = 50;
    auto dense_config = [&] {
        ss::DenseGraphConfig c;
        c.rows = hrows;
        c.buckets = hbuckets;
        c.alpha = halpha;
        c.k = k;
        c.seed = common.seed;
        return c;
    };
    for (const char* name : {"anoedge-g", "anoedge-l"}) {
        auto* cmd = app.add_subcommand(name, std::string(name) == "anoedge-g" ? "AnoEdge-G edge scores"
                                                                              : "AnoEdge-L edge scores");
        common.attach(cmd);
        cmd->add_option("--rows", hrows, "Sketch layers");
        cmd->add_option("--buckets", hbuckets, "Buckets per dimension (matrix is buckets x buckets)");
        cmd->add_option("--alpha", halpha, "Decay factor per tick, in (0,1)");
        const bool global = std::string(name) == "anoedge-g";
        cmd->callback([&, global] {
            run = [&, global] {
                const auto edges = read_edges(common.input);
                double seconds = 0.0;
                std::vector<double> scores;
                if (global) {
                    ss::AnoEdgeGlobal detector(dense_config());
                    scores = score_all(edges, [&](const ss::EdgeEvent& e) { return detector.score(e); }, seconds);
                } else {
                    ss::AnoEdgeLocal detector(dense_config());
                    scores = score_all(edges, [&](const ss::EdgeEvent& e) { return detector.score(e); }, seconds);
                }
                emit(common, scores, seconds);
            };
        });
    }
    for (const char* name : {"anograph", "anograph-k"}) {
        const bool top_k = std::string(name) == "anograph-k";
        auto* cmd = app.add_subcommand(name, top_k ? "AnoGraph-K window scores" : "AnoGraph window scores");
        common.attach(cmd);
        cmd->add_option("--rows", hrows, "Sketch layers");
        cmd->add_option("--buckets", hbuckets, "Buckets per dimension");
        if (top_k) cmd->add_option("--k", k, "Number of seed cells");
        cmd->add_option("--window-ticks", window_ticks, "Ticks per window");
        cmd->add_option("--edge-threshold", edge_threshold, "Positive edges that make a window anomalous (--eval)");
        cmd->callback([&, top_k] {
            run = [&, top_k] {
                const auto edges = read_edges(common.input);
                std::vector<int> edge_labels(edges.size(), 0);
                if (common.eval) {
                    if (common.labels.empty()) throw RunError("--eval needs --labels");
                    edge_labels = read_labels(common.labels);
                }
                const auto windows = ss::window_aggregate(edges, edge_labels, ss::WindowSpec{window_ticks, edge_threshold},
                                                          dense_config());
                const ss::AnoGraph detector(dense_config(), top_k ? ss::GraphDensity::top_k : ss::GraphDensity::full);
                std::vector<double> scores;
                std::vector<int> window_labels;
                const auto start = std::chrono::steady_clock::now();
                for (const auto& w : windows) {
                    scores.push_back(detector.score(w.window));
                    window_labels.push_back(w.label);
                }
                const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                emit(common, scores, seconds, &window_labels);
            };
        });
    }

    // Multi-aspect records.
    std::size_t records_per_tick = 1000;
    bool explain = false;
    {
        auto* cmd = app.add_subcommand("mstream", "Multi-aspect record scores");
        common.attach(cmd);
        cmd->add_option("--rows", rows, "Hash functions per sketch");
        cmd->add_option("--buckets", buckets, "Buckets per hash function");
        auto* malpha = cmd->add_option("--alpha", alpha, "Decay factor for current counts (default 0.85)");
        cmd->add_option("--records-per-tick", records_per_tick, "Decay period when the input has no tick column");
        cmd->add_flag("--explain", explain, "Print total,record,<per-feature...> score columns");
        cmd->callback([&, malpha] {
            run = [&, malpha] {
                Input in(common.input);
                const auto stream = with_file_context(
                    common.input, [&] { return ss::parse_record_stream(in.get(), records_per_tick); });
                ss::MstreamConfig config;
                config.categorical_features = stream.schema.categorical.size();
                config.numeric_features = stream.schema.numeric.size();
                config.rows = rows;
                config.buckets = buckets;
                config.alpha = malpha->count() > 0 ? alpha : 0.85;
                config.seed = common.seed;
                ss::MstreamDetector detector(config);
                std::vector<double> scores;
                std::vector<std::vector<double>> parts;
                const auto start = std::chrono::steady_clock::now();
                for (const auto& r : stream.records) {
                    auto s = detector.score(r);
                    scores.push_back(s.total);
                    if (explain) {
                        s.per_feature.insert(s.per_feature.begin(), s.record);
                        parts.push_back(std::move(s.per_feature));
                    }
                }
                const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (explain && !common.eval) {
                    Output out(common.output);
                    for (std::size_t i = 0; i < scores.size(); ++i) {
                        out.get() << format_score(scores[i]);
                        for (double p : parts[i]) out.get() << ',' << format_score(p);
                        out.get() << '\n';
                    }
                    return;
                }
                emit(common, scores, seconds);
            };
        });
    }

    // Semi-supervised scoring.
    std::string feedback_path;
    double lambda = 2.0;
    double mu = 0.3;
    std::string layout = "midas";
    {
        auto* cmd = app.add_subcommand("sess", "MIDAS-R or higher-order scores with label feedback");
        common.attach(cmd);
        cmd->add_option("--feedback", feedback_path, "Feedback file: 'index,label' or 'node,<id>,<label>' lines")
            ->required();
        cmd->add_option("--lambda", lambda, "Multiplier > 1");
        cmd->add_option("--mu", mu, "Multiplier in (0,1)");
        cmd->add_option("--layout", layout, "midas (edge sketches) or 3d (higher-order sketch, node feedback)");
        cmd->add_option("--rows", rows, "Hash functions (midas) or layers (3d)");
        auto* sb = cmd->add_option("--buckets", buckets, "Buckets (default 1024 for midas, 32 for 3d)");
        cmd->add_option("--alpha", alpha, "Decay factor for current counts");
        cmd->callback([&, sb] {
            run = [&, sb] {
                const auto edges = read_edges(common.input);
                Input fin(feedback_path);
                auto feedback = with_file_context(feedback_path, [&] { return ss::parse_feedback(fin.get()); });
                std::stable_sort(feedback.begin(), feedback.end(),
                                 [](const auto& a, const auto& b) { return a.index < b.index; });
                const ss::SharpeningParams params{lambda, mu};
                params.validate();
                std::function<double(const ss::EdgeEvent&)> score;
                std::function<void(const ss::FeedbackEvent&)> apply;
                std::unique_ptr<ss::MidasDetector> midas;
                std::unique_ptr<ss::Sess3dDetector> cube;
                if (layout == "midas") {
                    ss::MidasConfig config;
                    config.rows = rows;
                    config.buckets = buckets;
                    config.alpha = alpha;
                    config.seed = common.seed;
                    midas = std::make_unique<ss::MidasDetector>(config);
                    score = [&](const ss::EdgeEvent& e) { return midas->score(e); };
                    apply = [&](const ss::FeedbackEvent& f) { ss::sess_update(*midas, f, params); };
                } else if (layout == "3d") {
                    ss::Sess3dDetector::Config config;
                    config.layers = rows;
                    config.buckets = sb->count() > 0 ? buckets : 32;
                    config.alpha = alpha;
                    config.seed = common.seed;
                    cube = std::make_unique<ss::Sess3dDetector>(config);
                    score = [&](const ss::EdgeEvent& e) { return cube->score(e); };
                    apply = [&](const ss::FeedbackEvent& f) { cube->feedback(f, params); };
                } else {
                    throw RunError("--layout must be midas or 3d");
                }
                for (const auto& f : feedback) {
                    if (f.target == ss::FeedbackTarget::node && layout != "3d")
                        throw RunError(feedback_path + ": node feedback needs --layout 3d");
                    if (f.target == ss::FeedbackTarget::edge && f.index >= edges.size())
                        throw RunError(feedback_path + ": edge index " + std::to_string(f.index) + " beyond the stream");
                }
                // Node feedback has no stream position; it applies before the first edge.
                std::vector<double> scores;
                scores.reserve(edges.size());
                std::size_t next = 0;
                const auto start = std::chrono::steady_clock::now();
                for (const auto& f : feedback)
                    if (f.target == ss::FeedbackTarget::node) apply(ss::FeedbackEvent::for_node(f.node, f.label));
                for (std::size_t i = 0; i < edges.size(); ++i) {
                    scores.push_back(score(edges[i]));
                    for (; next < feedback.size() && feedback[next].index <= i; ++next)
                        if (feedback[next].target == ss::FeedbackTarget::edge && feedback[next].index == i)
                            apply(ss::FeedbackEvent::for_edge(edges[i], feedback[next].label));
                }
                const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                emit(common, scores, seconds);
            };
        });
    }

    // Two-state simulator.
    double p = 0.001, q = 0.02;
    std::string predictor = "opt";
    std::string p_hat, q_hat, wait, phi = "0";
    std::int64_t steps = 1000000;
    std::size_t seeds = 10;
    std::string sided = "two";
    unsigned threads = 1;
    std::string output = "-";
    std::uint64_t seed = 42;
    {
        auto* cmd = app.add_subcommand("pomdp", "Two-state feedback simulator; prints a CSV of mean accuracies");
        cmd->add_option("--p", p, "P[N -> A]");
        cmd->add_option("--q", q, "P[A -> N]");
        cmd->add_option("--predictor", predictor, "imitate or opt");
        cmd->add_option("--p-hat", p_hat, "Imitate's estimate of p (default p)");
        cmd->add_option("--q-hat", q_hat, "Imitate's estimate of q, comma-separated list allowed (default q)");
        cmd->add_option("--L", wait, "Opt wait lengths, comma-separated (default ceil(1/q))");
        cmd->add_option("--phi", phi, "Feedback probabilities, comma-separated");
        cmd->add_option("--steps", steps, "Transitions per run");
        cmd->add_option("--seeds", seeds, "Runs per table cell");
        cmd->add_option("--sided", sided, "one or two");
        cmd->add_option("--threads", threads, "Worker threads across seeds");
        cmd->add_option("-o,--output", output, "Output CSV ('-' for stdout)");
        cmd->add_option("--seed", seed, "Base RNG seed (default 42 or $STREAMSKETCH_SEED)");
        cmd->callback([&, cmd] {
            run = [&, cmd] {
                if (predictor != "imitate" && predictor != "opt") throw RunError("--predictor must be imitate or opt");
                if (sided != "one" && sided != "two") throw RunError("--sided must be one or two");
                if (seeds < 1 || threads < 1) throw RunError("--seeds and --threads must be positive");
                const bool imitate = predictor == "imitate";
                const std::uint64_t base_seed = cmd->count("--seed") > 0 ? seed : seed_default;
                const auto phis = parse_list(phi, "phi");
                const auto axis = imitate ? parse_list(q_hat.empty() ? std::to_string(q) : q_hat, "q-hat")
                                          : parse_list(wait.empty() ? std::to_string(std::ceil(1.0 / q)) : wait, "L");
                const double ph = p_hat.empty() ? p : parse_list(p_hat, "p-hat").front();
                Output out(output);
                out.get() << (imitate ? "q_hat" : "L") << ",phi,mean,std\n";
                for (double a : axis) {
                    for (double f : phis) {
                        ss::PredictorConfig pc;
                        pc.kind = imitate ? ss::PredictorKind::imitate : ss::PredictorKind::opt;
                        pc.p_hat = ph;
                        pc.q_hat = imitate ? a : q;
                        if (!imitate) {
                            if (a < 1 || a != std::floor(a)) throw RunError("--L values must be positive integers");
                            pc.wait_length = static_cast<std::int64_t>(a);
                        }
                        pc.feedback_prob = f;
                        pc.sidedness = sided == "one" ? ss::Sidedness::one_sided : ss::Sidedness::two_sided;
                        std::vector<double> acc(seeds);
                        std::vector<std::string> errors(threads);
                        std::vector<std::thread> pool;
                        for (unsigned w = 0; w < threads; ++w) {
                            pool.emplace_back([&, w] {
                                try {
                                    for (std::size_t s = w; s < seeds; s += threads) {
                                        ss::TwoStateProcess process(p, q, ss::mix64(base_seed + s));
                                        acc[s] = ss::pomdp_run(process, pc, steps);
                                    }
                                } catch (const std::exception& e) {
                                    errors[w] = e.what();
                                }
                            });
                        }
                        for (auto& t : pool) t.join();
                        for (const auto& e : errors)
                            if (!e.empty()) throw RunError(e);
                        double mean = 0.0;
                        for (double x : acc) mean += x;
                        mean /= static_cast<double>(seeds);
                        double var = 0.0;
                        for (double x : acc) var += (x - mean) * (x - mean);
                        const double sd = seeds > 1 ? std::sqrt(var / static_cast<double>(seeds - 1)) : 0.0;
                        out.get() << format_score(a) << ',' << format_score(f) << ',' << format_score(mean) << ','
                                  << format_score(sd) << '\n';
                    }
                }
            };
        });
    }

    // Synthetic burst stream (shares --output and --seed storage with pomdp).
    ss::SynthConfig sc;
    std::string labels_out;
    {
        auto* cmd = app.add_subcommand("synth", "Write a labeled synthetic burst stream");
        cmd->add_option("-o,--output", output, "Edge CSV ('-' for stdout)");
        cmd->add_option("--labels-out", labels_out, "Label file");
        cmd->add_option("--seed", seed, "RNG seed (default 42 or $STREAMSKETCH_SEED)");
        cmd->add_option("--n-background", sc.n_background, "Background edges");
        cmd->add_option("--n-burst", sc.n_burst, "Edges per burst");
        cmd->add_option("--n-nodes", sc.n_nodes, "Background node count");
        cmd->add_option("--burst-tick", sc.burst_tick, "Tick of the first burst");
        cmd->add_option("--n-ticks", sc.n_ticks, "Stream length in ticks");
        cmd->add_option("--burst-pairs", sc.burst_pairs, "Attacker pairs per burst");
        cmd->add_option("--n-bursts", sc.n_bursts, "Number of bursts");
        cmd->add_option("--burst-period", sc.burst_period, "Ticks between bursts");
        cmd->callback([&, cmd] {
            run = [&, cmd] {
                ss::SynthConfig config = sc;
                config.seed = cmd->count("--seed") > 0 ? seed : seed_default;
                const auto stream = ss::synth_burst_stream(config);
                Output out(output);
                for (const auto& e : stream.edges) out.get() << e.source << ',' << e.dest << ',' << e.tick << '\n';
                if (!labels_out.empty()) {
                    Output lab(labels_out);
                    for (int l : stream.labels) lab.get() << l << '\n';
                }
            };
        });
    }

    // Metrics from score and label files.
    std::string scores_path, labels_path;
    {
        auto* cmd = app.add_subcommand("eval", "ROC-AUC of a score file against a label file");
        cmd->add_option("--scores", scores_path, "Score file, one per line")->required();
        cmd->add_option("--labels", labels_path, "Label file, one 0/1 per line")->required();
        cmd->add_option("-o,--output", output, "Output JSON ('-' for stdout)");
        cmd->callback([&] {
            run = [&] {
                Input in(scores_path);
                const auto scores = with_file_context(scores_path, [&] { return ss::parse_scores(in.get()); });
                const auto labels = read_labels(labels_path);
                if (labels.size() != scores.size())
                    throw RunError("label count " + std::to_string(labels.size()) + " does not match score count " +
                                   std::to_string(scores.size()));
                Output out(output);
                out.get() << json{{"auc", ss::roc_auc(scores, labels)}, {"count", scores.size()}}.dump() << '\n';
            };
        });
    }

    try {
        seed_default = default_seed();
        common.seed = seed_default;
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }

    try {
        if (run) run();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
