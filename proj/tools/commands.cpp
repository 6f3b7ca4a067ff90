#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "evdenoise/baseline.hpp"
#include "evdenoise/errors.hpp"
#include "evdenoise/event_io.hpp"
#include "evdenoise/file_util.hpp"
#include "evdenoise/hw_model.hpp"
#include "evdenoise/metrics.hpp"
#include "evdenoise/snn.hpp"
#include "evdenoise/synth.hpp"
#include "evdenoise/trainer.hpp"

namespace evdenoise::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- helpers

EventFormat resolve_format(const std::string& name, const fs::path& path) {
    return name.empty() ? format_from_path(path) : parse_event_format(name);
}

void write_json(const fs::path& path, const json& j) {
    write_file_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; }, false);
}

fs::path sidecar(const fs::path& path, const std::string& suffix) {
    return fs::path(path.string() + suffix);
}

void require_output(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("missing required output ") + what);
}

void require_input(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("missing required input ") + what);
    if (!fs::exists(path)) throw IoError(std::string(what) + " not found: " + path);
}

template <typename T>
void take(const json& j, const char* key, T& value) {
    if (j.contains(key) && !j.at(key).is_null()) value = j.at(key).get<T>();
}

// "-inf", "+inf"/"inf" or an integer.
ClassificationThreshold parse_theta(const std::string& s) {
    if (s == "-inf") return ClassificationThreshold::accept_all();
    if (s == "inf" || s == "+inf") return ClassificationThreshold::reject_all();
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("theta must be an integer, -inf or +inf, got '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("theta must be an integer, -inf or +inf, got '" + s + "'");
    return {v};
}

std::string theta_string(ClassificationThreshold t) {
    if (t.theta == ClassificationThreshold::accept_all().theta) return "-inf";
    if (t.theta == ClassificationThreshold::reject_all().theta) return "+inf";
    return std::to_string(t.theta);
}

// EBBI and patch parameters shared by train, eval and filter.
struct Pipeline {
    int n_ebbi = 2;
    int patch = 5;
    std::uint64_t window_us = 25'000;
    std::uint64_t window_events = 0;  // > 0 selects fixed-count windows

    WindowPolicy policy() const {
        return window_events > 0 ? WindowPolicy::fixed_count(window_events) : WindowPolicy::fixed_time(window_us);
    }
    void validate() const {
        if (n_ebbi < 1) throw ConfigError("n_ebbi must be >= 1");
        if (patch < 1 || patch % 2 == 0) throw ConfigError("patch must be a positive odd number");
        if (window_events == 0 && window_us == 0) throw ConfigError("window length must be positive");
    }
    json to_json() const {
        return {{"n_ebbi", n_ebbi}, {"patch", patch}, {"window_us", window_us}, {"window_events", window_events}};
    }
    void from_json(const json& j) {
        take(j, "n_ebbi", n_ebbi);
        take(j, "patch", patch);
        take(j, "window_us", window_us);
        take(j, "window_events", window_events);
    }
    void add_options(CLI::App* app) {
        app->add_option("--n-ebbi", n_ebbi, "EBBI pairs used per classification")->capture_default_str();
        app->add_option("--patch", patch, "Patch side n (odd)")->capture_default_str();
        app->add_option("--window-us", window_us, "Fixed-time EBBI window (us)")->capture_default_str();
        app->add_option("--window-events", window_events, "Fixed-count EBBI window (events); overrides --window-us");
    }
};

// Finds "--config <path>" or "--config=<path>" ahead of the real parse so
// the file supplies defaults that flags then override.
json preload_config(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
        if (!path.empty()) {
            try {
                return json::parse(read_text_file(path));
            } catch (const json::parse_error& e) {
                throw ConfigError("config " + path + " is not valid JSON: " + e.what());
            }
        }
    }
    return json::object();
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    SynthConfig scene = benchmark_scene();
    std::string out;
    std::string format;
    std::string shot_rate = "match";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> duration_us;
    std::optional<int> width;
    std::optional<int> height;
    std::optional<double> edge_speed;
    std::optional<double> edge_rpc;
    std::optional<double> bar_width;
    std::optional<double> leak_rate;
    std::optional<double> leak_dispersion;
    bool no_edges = false;

    void from_json(const json& j) {
        if (j.contains("scene")) scene = j.at("scene").get<SynthConfig>();
        take(j, "out", out);
        take(j, "format", format);
        if (j.contains("shot_rate")) {
            const auto& v = j.at("shot_rate");
            shot_rate = v.is_string() ? v.get<std::string>() : v.dump();
        }
        auto opt = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
        };
        opt("seed", seed);
        opt("duration_us", duration_us);
        opt("width", width);
        opt("height", height);
        opt("edge_speed", edge_speed);
        opt("edge_rpc", edge_rpc);
        opt("bar_width", bar_width);
        opt("leak_rate", leak_rate);
        opt("leak_dispersion", leak_dispersion);
        take(j, "no_edges", no_edges);
    }

    SynthConfig resolve() const {
        SynthConfig c = scene;
        if (no_edges) c.edges.clear();
        if (duration_us) c.duration_us = *duration_us;
        if (width) c.geometry.width = static_cast<std::uint16_t>(*width);
        if (height) c.geometry.height = static_cast<std::uint16_t>(*height);
        for (auto& e : c.edges) {
            if (edge_speed) e.speed = *edge_speed;
            if (edge_rpc) e.event_rate_per_crossing = *edge_rpc;
            if (bar_width) e.bar_width = *bar_width;
        }
        if (seed) {
            for (std::size_t i = 0; i < c.edges.size(); ++i) c.edges[i].seed = *seed * 7 + 1 + i;
            if (c.shot) c.shot->seed = *seed * 7 + 3;
            if (c.leak) c.leak->seed = *seed * 7 + 4;
        }
        if (leak_rate || leak_dispersion) {
            LeakNoiseConfig l = c.leak.value_or(LeakNoiseConfig{});
            if (leak_rate) l.mean_rate_hz = *leak_rate;
            if (leak_dispersion) l.dispersion = *leak_dispersion;
            if (seed) l.seed = *seed * 7 + 4;
            c.leak = l;
        }
        ShotNoiseConfig shot = c.shot.value_or(ShotNoiseConfig{});
        if (seed) shot.seed = *seed * 7 + 3;
        if (shot_rate == "match") {
            shot.rate_hz = matched_shot_rate(c);
        } else {
            try {
                std::size_t used = 0;
                shot.rate_hz = std::stod(shot_rate, &used);
                if (used != shot_rate.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ConfigError("--shot-rate must be a number or 'match'");
            }
        }
        if (shot.rate_hz > 0.0) {
            c.shot = shot;
        } else {
            c.shot.reset();
        }
        return c;
    }
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    require_output(a.out, "--out");
    const SynthConfig scene = a.resolve();
    const EventStream stream = synthesize(scene);
    write_events(stream, a.out, resolve_format(a.format, a.out));
    write_json(sidecar(a.out, ".config.json"), {{"command", "synth"}, {"scene", scene}, {"format", a.format}});
    std::size_t signal = 0;
    for (const auto& e : stream) signal += e.label == Label::kSignal;
    out << "wrote " << stream.size() << " events (" << signal << " signal) to " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------- mix

struct MixArgs {
    std::string signal;
    std::string noise;
    std::string out;
    std::string format;
    bool keep_labels = false;

    void from_json(const json& j) {
        take(j, "signal", signal);
        take(j, "noise", noise);
        take(j, "out", out);
        take(j, "format", format);
        take(j, "keep_labels", keep_labels);
    }
    json to_json() const {
        return {{"signal", signal}, {"noise", noise}, {"out", out}, {"format", format}, {"keep_labels", keep_labels}};
    }
};

EventStream relabel(const EventStream& s, Label label) {
    std::vector<Event> events(s.begin(), s.end());
    for (auto& e : events) e.label = label;
    return EventStream(s.geometry(), std::move(events));
}

int cmd_mix(const MixArgs& a, std::ostream& out) {
    require_input(a.signal, "--signal");
    require_input(a.noise, "--noise");
    require_output(a.out, "--out");
    auto sig = read_events(a.signal, format_from_path(a.signal));
    auto noise = read_events(a.noise, format_from_path(a.noise));
    if (!a.keep_labels) {
        sig = relabel(sig, Label::kSignal);
        noise = relabel(noise, Label::kNoise);
    }
    const EventStream mixed = merge_streams(sig, noise);
    write_events(mixed, a.out, resolve_format(a.format, a.out));
    write_json(sidecar(a.out, ".config.json"), {{"command", "mix"}, {"args", a.to_json()}});
    out << "wrote " << mixed.size() << " events to " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string input;
    std::string out;
    Pipeline pipeline;
    TrainConfig train;

    void from_json(const json& j) {
        take(j, "input", input);
        take(j, "out", out);
        pipeline.from_json(j);
        take(j, "n_hidden", train.n_hidden);
        take(j, "learning_rate", train.learning_rate);
        take(j, "epochs", train.epochs);
        take(j, "batch_size", train.batch_size);
        take(j, "surrogate_slope", train.surrogate.slope);
        take(j, "surrogate_width", train.surrogate.width);
        take(j, "train_fraction", train.train_fraction);
        take(j, "init_scale", train.init_scale);
        take(j, "seed", train.seed);
    }
    json to_json() const {
        json j = pipeline.to_json();
        j.update({{"input", input},
                  {"out", out},
                  {"n_hidden", train.n_hidden},
                  {"learning_rate", train.learning_rate},
                  {"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"surrogate_slope", train.surrogate.slope},
                  {"surrogate_width", train.surrogate.width},
                  {"train_fraction", train.train_fraction},
                  {"init_scale", train.init_scale},
                  {"seed", train.seed}});
        return j;
    }
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    require_input(a.input, "--input");
    require_output(a.out, "--out");
    a.pipeline.validate();
    a.train.validate();
    const EventStream stream = read_events(a.input, format_from_path(a.input));
    const auto samples = build_dataset(stream, a.pipeline.n_ebbi, a.pipeline.policy(), a.pipeline.patch);
    const auto split = split_chronological(samples, a.train.train_fraction);
    std::vector<EpochLog> log;
    const FloatFcsnn net = train(split.train, a.train, split.test, &log);
    const QuantizedFcsnn q = quantize(net);
    const ClassificationThreshold theta = suggested_threshold(net, q);

    std::vector<Label> test_labels;
    for (const auto& s : split.test) test_labels.push_back(s.label);
    const auto scores = score_samples(q, split.test);
    const RocCurve roc = roc_from_scores(std::span<const std::int64_t>(scores), test_labels);
    std::vector<Decision> decisions;
    for (auto s : scores) decisions.push_back(s >= theta.theta ? Decision::kSignal : Decision::kNoise);
    const ConfusionCounts counts = confusion(decisions, test_labels);

    const fs::path model = a.out;
    save_network(q, model);
    save_float_checkpoint(net, sidecar(model, ".f32"));
    write_file_atomic(sidecar(model, ".log.csv"), [&](std::ostream& o) { write_training_log_csv(log, o); }, false);
    write_file_atomic(sidecar(model, ".roc.csv"), [&](std::ostream& o) { write_roc_csv(roc, o); }, false);
    write_json(sidecar(model, ".json"),
               {{"command", "train"},
                {"config", a.to_json()},
                {"train_samples", split.train.size()},
                {"test_samples", split.test.size()},
                {"test_auc", roc.auc},
                {"float_test_auc", log.empty() ? 0.0 : log.back().test_auc},
                {"suggested_theta", theta.theta},
                {"test_counts_at_theta", to_json(counts)},
                {"v_th", q.v_th},
                {"beta_shift", q.beta_shift},
                {"s1", q.s1},
                {"s2", q.s2}});
    out << "train samples " << split.train.size() << ", test samples " << split.test.size() << '\n';
    out << "test AUC " << roc.auc << " (theta " << theta.theta << ")\n";
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string input;
    std::string filter = "snnf";
    std::string model;
    std::string theta = "auto";
    int k = 4;
    std::uint64_t tau_us = 10'000;
    int tau_points = 25;
    std::vector<std::uint64_t> taus;
    bool polarity_split = false;
    std::string split = "all";
    double train_fraction = 0.8;
    std::string out_dir;
    std::string decisions;
    Pipeline pipeline;

    void from_json(const json& j) {
        take(j, "input", input);
        take(j, "filter", filter);
        take(j, "model", model);
        if (j.contains("theta")) {
            const auto& v = j.at("theta");
            theta = v.is_string() ? v.get<std::string>() : v.dump();
        }
        take(j, "k", k);
        take(j, "tau_us", tau_us);
        take(j, "tau_points", tau_points);
        take(j, "taus", taus);
        take(j, "polarity_split", polarity_split);
        take(j, "split", split);
        take(j, "train_fraction", train_fraction);
        take(j, "out_dir", out_dir);
        take(j, "decisions", decisions);
        pipeline.from_json(j);
    }
    json to_json() const {
        json j = pipeline.to_json();
        j.update({{"input", input},
                  {"filter", filter},
                  {"model", model},
                  {"theta", theta},
                  {"k", k},
                  {"tau_us", tau_us},
                  {"tau_points", tau_points},
                  {"taus", taus},
                  {"polarity_split", polarity_split},
                  {"split", split},
                  {"train_fraction", train_fraction},
                  {"out_dir", out_dir},
                  {"decisions", decisions}});
        return j;
    }
};

// Theta from the flag, or the trained model's recorded suggestion.
ClassificationThreshold resolve_theta(const std::string& theta, const std::string& model) {
    if (theta != "auto") return parse_theta(theta);
    const fs::path report = sidecar(model, ".json");
    if (fs::exists(report)) {
        const json j = json::parse(read_text_file(report));
        if (j.contains("suggested_theta")) return {j.at("suggested_theta").get<std::int64_t>()};
    }
    return {0};
}

std::size_t split_start(const std::string& split, double fraction, std::size_t n) {
    if (split == "all") return 0;
    if (split == "test") {
        if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
        return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
    }
    throw ConfigError("--split must be 'all' or 'test'");
}

void write_decisions(const fs::path& path, std::span<const Decision> decisions,
                     const std::vector<std::int64_t>* scores) {
    write_file_atomic(path, [&](std::ostream& o) {
        o << (scores ? "index,decision,score\n" : "index,decision\n");
        for (std::size_t i = 0; i < decisions.size(); ++i) {
            o << i << ',' << (decisions[i] == Decision::kSignal ? 1 : 0);
            if (scores) o << ',' << (*scores)[i];
            o << '\n';
        }
    }, false);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    require_input(a.input, "--input");
    require_output(a.out_dir, "--out-dir");
    a.pipeline.validate();
    const EventStream stream = read_events(a.input, format_from_path(a.input));
    if (!stream.fully_labeled()) throw ValidationError("eval needs a fully labeled event file");
    const std::size_t first = split_start(a.split, a.train_fraction, stream.size());
    std::vector<Label> labels;
    for (std::size_t i = first; i < stream.size(); ++i) labels.push_back(stream[i].label);

    RocCurve roc;
    ConfusionCounts counts;
    json operating;
    std::vector<Decision> decisions;
    std::vector<std::int64_t> scores;
    if (a.filter == "snnf") {
        require_input(a.model, "--model");
        const QuantizedFcsnn net = load_network(a.model);
        const ClassificationThreshold theta = resolve_theta(a.theta, a.model);
        scores = score_stream(net, stream, a.pipeline.n_ebbi, a.pipeline.policy(), a.pipeline.patch);
        const std::span<const std::int64_t> tail(scores.data() + first, scores.size() - first);
        roc = roc_from_scores(tail, labels);
        for (auto s : scores) decisions.push_back(s >= theta.theta ? Decision::kSignal : Decision::kNoise);
        counts = confusion(std::span<const Decision>(decisions).subspan(first), labels);
        operating = {{"theta", theta_string(theta)}};
    } else {
        const FilterKind kind = parse_filter_kind(a.filter);
        BaselineOptions opts;
        opts.k = a.k;
        opts.polarity_split = a.polarity_split;
        opts.score_from = first;
        const auto taus = a.taus.empty() ? default_tau_grid(a.tau_points) : a.taus;
        roc = roc_by_tau(kind, stream, taus, opts);
        decisions = run_filter(kind, stream, a.tau_us, opts);
        counts = confusion(std::span<const Decision>(decisions).subspan(first), labels);
        operating = {{"tau_us", a.tau_us}};
    }
    operating["counts"] = to_json(counts);
    operating["fpr"] = counts.fpr();
    operating["tpr"] = counts.tpr();

    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    write_file_atomic(dir / "roc.csv", [&](std::ostream& o) { write_roc_csv(roc, o); }, false);
    json summary = summary_json(roc);
    summary.update({{"filter", a.filter},
                    {"events", labels.size()},
                    {"signal_events", counts.positives()},
                    {"noise_events", counts.negatives()},
                    {"operating_point", operating}});
    write_json(dir / "summary.json", summary);
    write_json(dir / "config.json", {{"command", "eval"}, {"args", a.to_json()}});
    if (!a.decisions.empty()) write_decisions(a.decisions, decisions, a.filter == "snnf" ? &scores : nullptr);
    out << a.filter << " AUC " << roc.auc << " over " << labels.size() << " events\n";
    return 0;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
    std::string input;
    std::string model;
    std::string theta = "auto";
    std::string out;
    std::string format;
    std::string decisions;
    Pipeline pipeline;

    void from_json(const json& j) {
        take(j, "input", input);
        take(j, "model", model);
        if (j.contains("theta")) {
            const auto& v = j.at("theta");
            theta = v.is_string() ? v.get<std::string>() : v.dump();
        }
        take(j, "out", out);
        take(j, "format", format);
        take(j, "decisions", decisions);
        pipeline.from_json(j);
    }
    json to_json() const {
        json j = pipeline.to_json();
        j.update({{"input", input},
                  {"model", model},
                  {"theta", theta},
                  {"out", out},
                  {"format", format},
                  {"decisions", decisions}});
        return j;
    }
};

int cmd_filter(const FilterArgs& a, std::ostream& out) {
    require_input(a.input, "--input");
    require_input(a.model, "--model");
    require_output(a.out, "--out");
    a.pipeline.validate();
    const EventStream stream = read_events(a.input, format_from_path(a.input));
    const QuantizedFcsnn net = load_network(a.model);
    const ClassificationThreshold theta = resolve_theta(a.theta, a.model);
    const auto scores = score_stream(net, stream, a.pipeline.n_ebbi, a.pipeline.policy(), a.pipeline.patch);
    std::vector<Event> kept;
    std::vector<Decision> decisions;
    decisions.reserve(scores.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const bool keep = scores[i] >= theta.theta;
        decisions.push_back(keep ? Decision::kSignal : Decision::kNoise);
        if (keep) kept.push_back(stream[i]);
    }
    const EventStream filtered(stream.geometry(), std::move(kept));
    write_events(filtered, a.out, resolve_format(a.format, a.out));
    write_json(sidecar(a.out, ".config.json"),
               {{"command", "filter"}, {"args", a.to_json()}, {"theta", theta_string(theta)}});
    if (!a.decisions.empty()) write_decisions(a.decisions, decisions, &scores);
    out << "kept " << filtered.size() << " of " << stream.size() << " events (theta " << theta_string(theta)
        << ")\n";
    return 0;
}

// ---------------------------------------------------------------- hwreport

struct HwArgs {
    HwReportConfig report;
    std::string out;
    std::string sweep_csv;
    std::optional<int> width;
    std::optional<int> height;
    std::string mode;
    std::string accounting;

    void from_json(const json& j) {
        report = j.get<HwReportConfig>();
        take(j, "out", out);
        take(j, "sweep_csv", sweep_csv);
    }
};

int cmd_hwreport(HwArgs a, std::ostream& out) {
    if (a.width) a.report.geometry.width = static_cast<std::uint16_t>(*a.width);
    if (a.height) a.report.geometry.height = static_cast<std::uint16_t>(*a.height);
    if (!a.mode.empty()) {
        if (a.mode == "pipelined") {
            a.report.pipeline.mode = PipelineConfig::Mode::kPipelined;
        } else if (a.mode == "serial") {
            a.report.pipeline.mode = PipelineConfig::Mode::kSerial;
        } else {
            throw ConfigError("--mode must be 'pipelined' or 'serial'");
        }
    }
    if (!a.accounting.empty()) {
        if (a.accounting == "asic") {
            a.report.pipeline.accounting = PipelineConfig::SerialAccounting::kAsic;
        } else if (a.accounting == "fpga") {
            a.report.pipeline.accounting = PipelineConfig::SerialAccounting::kFpga;
        } else {
            throw ConfigError("--accounting must be 'asic' or 'fpga'");
        }
    }
    a.report.shape.n_ebbi = a.report.pipeline.n_ebbi;
    const json report = hw_report(a.report);
    if (a.out.empty()) {
        out << report.dump(2) << '\n';
    } else {
        write_json(a.out, report);
        out << "wrote " << a.out << '\n';
    }
    if (!a.sweep_csv.empty()) {
        const auto geometries = default_sweep_geometries();
        write_file_atomic(a.sweep_csv, [&](std::ostream& o) { write_hw_sweep_csv(a.report, geometries, o); }, false);
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event-camera background-activity denoising toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    json config;
    try {
        config = preload_config(args);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config; flags override its values");
    };

    SynthArgs synth;
    MixArgs mix;
    TrainArgs trn;
    EvalArgs ev;
    FilterArgs flt;
    HwArgs hw;
    // Config values land in the structs before CLI11 parses, so flags win.
    const std::string command = args.empty() ? "" : args.front();
    try {
        if (command == "synth") synth.from_json(config);
        if (command == "mix") mix.from_json(config);
        if (command == "train") trn.from_json(config);
        if (command == "eval") ev.from_json(config);
        if (command == "filter") flt.from_json(config);
        if (command == "hwreport") hw.from_json(config);
    } catch (const std::exception& e) {
        err << "error: bad config: " << e.what() << '\n';
        return 1;
    }

    auto* s = app.add_subcommand("synth", "Generate a labeled synthetic event stream");
    add_config(s);
    s->add_option("--out", synth.out, "Output event file");
    s->add_option("--format", synth.format, "csv or packed (default: from extension)");
    s->add_option("--shot-rate", synth.shot_rate, "Shot noise Hz per pixel, or 'match' for 1:1")->capture_default_str();
    s->add_option("--seed", synth.seed, "Reseed every generator");
    s->add_option("--duration-us", synth.duration_us, "Stream length (us)");
    s->add_option("--width", synth.width, "Sensor width");
    s->add_option("--height", synth.height, "Sensor height");
    s->add_option("--edge-speed", synth.edge_speed, "Override edge speed (px/s)");
    s->add_option("--edge-rpc", synth.edge_rpc, "Override events per pixel crossing");
    s->add_option("--bar-width", synth.bar_width, "Override bar width (px)");
    s->add_option("--leak-rate", synth.leak_rate, "Leak noise mean Hz per pixel");
    s->add_option("--leak-dispersion", synth.leak_dispersion, "Leak rate log-normal sigma");
    s->add_flag("--no-edges", synth.no_edges, "Emit noise only");

    auto* m = app.add_subcommand("mix", "Merge a signal file and a noise file into one labeled stream");
    add_config(m);
    m->add_option("--signal", mix.signal, "Signal event file");
    m->add_option("--noise", mix.noise, "Noise event file");
    m->add_option("--out", mix.out, "Output event file");
    m->add_option("--format", mix.format, "csv or packed (default: from extension)");
    m->add_flag("--keep-labels", mix.keep_labels, "Keep input labels instead of forcing signal/noise");

    auto* t = app.add_subcommand("train", "Train, quantize and evaluate the spiking classifier");
    add_config(t);
    t->add_option("--input", trn.input, "Labeled event file");
    t->add_option("--out", trn.out, "Output network file");
    trn.pipeline.add_options(t);
    t->add_option("--hidden", trn.train.n_hidden, "Hidden LIF neurons")->capture_default_str();
    t->add_option("--lr", trn.train.learning_rate, "SGD learning rate")->capture_default_str();
    t->add_option("--epochs", trn.train.epochs, "Training epochs")->capture_default_str();
    t->add_option("--batch", trn.train.batch_size, "Minibatch size")->capture_default_str();
    t->add_option("--surrogate-slope", trn.train.surrogate.slope, "Boxcar surrogate height")->capture_default_str();
    t->add_option("--surrogate-width", trn.train.surrogate.width, "Boxcar surrogate width")->capture_default_str();
    t->add_option("--train-fraction", trn.train.train_fraction, "Chronological train share")->capture_default_str();
    t->add_option("--init-scale", trn.train.init_scale, "Uniform init half-width")->capture_default_str();
    t->add_option("--seed", trn.train.seed, "Init and shuffle seed")->capture_default_str();

    auto* e = app.add_subcommand("eval", "ROC/AUC of a filter on a labeled event file");
    add_config(e);
    e->add_option("--input", ev.input, "Labeled event file");
    e->add_option("--filter", ev.filter, "snnf, baf, stcf or onf")->capture_default_str();
    e->add_option("--model", ev.model, "Network file (snnf)");
    e->add_option("--theta", ev.theta, "snnf operating threshold: integer, -inf, +inf or auto")->capture_default_str();
    e->add_option("--k", ev.k, "STCF support count")->capture_default_str();
    e->add_option("--tau-us", ev.tau_us, "Baseline operating tau (us)")->capture_default_str();
    e->add_option("--tau-points", ev.tau_points, "Points in the log tau grid")->capture_default_str();
    e->add_option("--taus", ev.taus, "Explicit tau list (us)");
    e->add_flag("--polarity-split", ev.polarity_split, "Separate timestamp maps per polarity");
    e->add_option("--split", ev.split, "all or test (trailing chronological share)")->capture_default_str();
    e->add_option("--train-fraction", ev.train_fraction, "Share excluded by --split test")->capture_default_str();
    e->add_option("--out-dir", ev.out_dir, "Report directory");
    e->add_option("--decisions", ev.decisions, "Per-event decision CSV");
    ev.pipeline.add_options(e);

    auto* f = app.add_subcommand("filter", "Drop events the network classifies as noise");
    add_config(f);
    f->add_option("--input", flt.input, "Event file");
    f->add_option("--model", flt.model, "Network file");
    f->add_option("--theta", flt.theta, "Threshold: integer, -inf, +inf or auto")->capture_default_str();
    f->add_option("--out", flt.out, "Output event file");
    f->add_option("--format", flt.format, "csv or packed (default: from extension)");
    f->add_option("--decisions", flt.decisions, "Per-event decision CSV");
    flt.pipeline.add_options(f);

    auto* h = app.add_subcommand("hwreport", "Memory, timing and energy model report");
    add_config(h);
    h->add_option("--out", hw.out, "JSON report path (default: stdout)");
    h->add_option("--sweep-csv", hw.sweep_csv, "Geometry sweep CSV path");
    h->add_option("--width", hw.width, "Sensor width");
    h->add_option("--height", hw.height, "Sensor height");
    h->add_option("--n-ebbi", hw.report.pipeline.n_ebbi, "EBBI pairs")->capture_default_str();
    h->add_option("--mode", hw.mode, "pipelined or serial");
    h->add_option("--accounting", hw.accounting, "asic (latency) or fpga (latency + 1) serial cycles");
    h->add_option("--clock-hz", hw.report.power.clock_hz, "Clock frequency")->capture_default_str();
    h->add_option("--dynamic-power-mw", hw.report.power.dynamic_power_mw, "Dynamic power")->capture_default_str();
    h->add_option("--leakage-mw", hw.report.power.leakage_mw, "Leakage power")->capture_default_str();
    h->add_option("--event-rate", hw.report.event_rate_hz, "Event rate (Hz)")->capture_default_str();
    h->add_option("--word-bits", hw.report.shape.word_bits, "Memory word width")->capture_default_str();
    h->add_option("--banks", hw.report.shape.n_banks, "Memory banks")->capture_default_str();
    h->add_option("--hidden", hw.report.shape.n_hidden, "Hidden neurons")->capture_default_str();
    h->add_option("--patch", hw.report.shape.patch, "Patch side n")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& pe) {
        // Help requests exit 0; real usage errors map to 2.
        return app.exit(pe, out, err) == 0 ? 0 : 2;
    }

    try {
        if (s->parsed()) return cmd_synth(synth, out);
        if (m->parsed()) return cmd_mix(mix, out);
        if (t->parsed()) return cmd_train(trn, out);
        if (e->parsed()) return cmd_eval(ev, out);
        if (f->parsed()) return cmd_filter(flt, out);
        if (h->parsed()) return cmd_hwreport(hw, out);
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace evdenoise::cli
