#include "evdenoise/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "evdenoise/errors.hpp"
#include "evdenoise/file_util.hpp"
#include "evdenoise/rng.hpp"
#include "le_io.hpp"
#include "parallel.hpp"

namespace evdenoise {

namespace {

constexpr std::string_view kCheckpointMagic = "SNNFF32";
constexpr std::size_t kChunks = 64;

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double sigmoid(double z) {
    return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double target(Label label) {
    switch (label) {
        case Label::kSignal:
            return 1.0;
        case Label::kNoise:
            return 0.0;
        default:
            throw ValidationError("unlabeled training sample");
    }
}

double sample_weight(const ClassWeights& w, Label label) {
    return label == Label::kSignal ? w.signal : w.noise;
}

// Per-sample activations kept for the backward pass.
struct Trace {
    std::vector<std::vector<int>> active;  // active input indices per step
    std::vector<double> v;                 // steps x n_hidden membranes
    std::vector<double> s;                 // steps x n_hidden spikes
    std::vector<double> dv;
    std::vector<double> dv_next;
};

double spike_value(double v, double v_th, SpikeFunction f, const SurrogateConfig& sg) {
    if (f == SpikeFunction::kHeaviside) return v >= v_th ? 1.0 : 0.0;
    return sg.slope * std::clamp(v - v_th + sg.width / 2, 0.0, sg.width);
}

double spike_derivative(double v, double v_th, const SurrogateConfig& sg) {
    return std::abs(v - v_th) < sg.width / 2 ? sg.slope : 0.0;
}

// Returns the logit (readout + bias).
double forward(const FloatFcsnn& net, const PatchSequence& seq, SpikeFunction f, const SurrogateConfig& sg,
               Trace& tr) {
    if (seq.dim() != net.input_dim) {
        throw ConfigError("sequence vectors have " + std::to_string(seq.dim()) + " entries, network expects " +
                          std::to_string(net.input_dim));
    }
    const int steps = seq.steps();
    const auto h = static_cast<std::size_t>(net.n_hidden);
    const auto in = static_cast<std::size_t>(net.input_dim);
    tr.active.resize(static_cast<std::size_t>(steps));
    tr.v.assign(static_cast<std::size_t>(steps) * h, 0.0);
    tr.s.assign(static_cast<std::size_t>(steps) * h, 0.0);
    for (int t = 0; t < steps; ++t) {
        auto& act = tr.active[static_cast<std::size_t>(t)];
        act.clear();
        const auto x = seq.step(t);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i]) act.push_back(static_cast<int>(i));
        }
        double* v = tr.v.data() + static_cast<std::size_t>(t) * h;
        double* s = tr.s.data() + static_cast<std::size_t>(t) * h;
        const double* v_prev = t > 0 ? v - h : nullptr;
        const double* s_prev = t > 0 ? s - h : nullptr;
        for (std::size_t j = 0; j < h; ++j) {
            double current = 0.0;
            const double* row = net.w1.data() + j * in;
            for (int i : act) current += row[i];
            const double carried = t > 0 ? net.beta * v_prev[j] * (1.0 - s_prev[j]) : 0.0;
            v[j] = carried + current;
            s[j] = spike_value(v[j], net.v_th, f, sg);
        }
    }
    double score = net.bias;
    if (steps > 0) {
        const double* s_last = tr.s.data() + static_cast<std::size_t>(steps - 1) * h;
        for (std::size_t j = 0; j < h; ++j) score += net.w2[j] * s_last[j];
    }
    return score;
}

// Accumulates d(loss)/d(params) scaled by `g_logit` into `grad`.
void backward(const FloatFcsnn& net, const Trace& tr, int steps, double g_logit, const SurrogateConfig& sg,
              Trace& scratch, FloatFcsnn& grad) {
    const auto h = static_cast<std::size_t>(net.n_hidden);
    const auto in = static_cast<std::size_t>(net.input_dim);
    grad.bias += g_logit;
    if (steps == 0) return;
    const double* s_last = tr.s.data() + static_cast<std::size_t>(steps - 1) * h;
    for (std::size_t j = 0; j < h; ++j) grad.w2[j] += g_logit * s_last[j];

    auto& dv = scratch.dv;
    auto& dv_next = scratch.dv_next;
    dv.assign(h, 0.0);
    dv_next.assign(h, 0.0);
    for (int t = steps - 1; t >= 0; --t) {
        const double* v = tr.v.data() + static_cast<std::size_t>(t) * h;
        const double* s = tr.s.data() + static_cast<std::size_t>(t) * h;
        const bool last = t == steps - 1;
        for (std::size_t j = 0; j < h; ++j) {
            // V[t+1] = beta * V[t] * (1 - s[t]) + I[t+1]
            double g_s = last ? g_logit * net.w2[j] : -net.beta * v[j] * dv_next[j];
            double g_v = g_s * spike_derivative(v[j], net.v_th, sg);
            if (!last) g_v += dv_next[j] * net.beta * (1.0 - s[j]);
            dv[j] = g_v;
        }
        const auto& act = tr.active[static_cast<std::size_t>(t)];
        for (std::size_t j = 0; j < h; ++j) {
            if (dv[j] == 0.0) continue;
            double* row = grad.w1.data() + j * in;
            for (int i : act) row[i] += dv[j];
        }
        std::swap(dv, dv_next);
    }
}

FloatFcsnn zeros_like(const FloatFcsnn& net) {
    FloatFcsnn g;
    g.input_dim = net.input_dim;
    g.n_hidden = net.n_hidden;
    g.w1.assign(net.w1.size(), 0.0);
    g.w2.assign(net.w2.size(), 0.0);
    g.bias = 0.0;
    g.beta = net.beta;
    g.v_th = net.v_th;
    return g;
}

void check_dimensions(const FloatFcsnn& net, std::span<const LabeledSample> samples) {
    for (const auto& s : samples) {
        if (s.sequence.dim() != net.input_dim) throw ConfigError("sample dimension does not match the network");
    }
}

}  // namespace

void FloatFcsnn::validate() const {
    if (input_dim < 1 || n_hidden < 1) throw ConfigError("network dimensions must be positive");
    if (w1.size() != static_cast<std::size_t>(input_dim) * static_cast<std::size_t>(n_hidden) ||
        w2.size() != static_cast<std::size_t>(n_hidden)) {
        throw ConfigError("weight tensors do not match the network dimensions");
    }
    if (!all_finite(w1) || !all_finite(w2) || !std::isfinite(bias)) throw ConfigError("non-finite weight");
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
    if (!(v_th > 0.0) || !std::isfinite(v_th)) throw ConfigError("v_th must be positive");
}

void TrainConfig::validate() const {
    if (n_hidden < 1) throw ConfigError("n_hidden must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
    if (!(surrogate.width > 0.0) || surrogate.slope < 0.0) throw ConfigError("invalid surrogate parameters");
    if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be non-negative");
}

FloatFcsnn init_network(int input_dim, int n_hidden, double init_scale, std::uint64_t seed) {
    FloatFcsnn net;
    net.input_dim = input_dim;
    net.n_hidden = n_hidden;
    CounterRng rng(seed, 0x1417);
    net.w1.resize(static_cast<std::size_t>(input_dim) * static_cast<std::size_t>(n_hidden));
    for (auto& w : net.w1) w = init_scale * (2.0 * rng.uniform() - 1.0);
    net.w2.resize(static_cast<std::size_t>(n_hidden));
    for (auto& w : net.w2) w = init_scale * (2.0 * rng.uniform() - 1.0);
    net.validate();
    return net;
}

std::vector<LabeledSample> build_dataset(const EventStream& stream, int n_ebbi, WindowPolicy policy, int n) {
    EbbiStack stack(stream.geometry(), n_ebbi, policy);
    std::vector<LabeledSample> samples;
    samples.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const Event& e = stream[i];
        if (e.label == Label::kUnlabeled) {
            throw ValidationError("event " + std::to_string(i) + " is unlabeled");
        }
        samples.push_back({extract_sequence(stack, e, n), e.label, e.t});
        stack.process_event(e);
    }
    return samples;
}

DatasetSplit split_chronological(std::span<const LabeledSample> samples, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
    const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(samples.size()) * train_fraction));
    return {samples.subspan(0, cut), samples.subspan(cut)};
}

ClassWeights class_weights(std::span<const LabeledSample> samples) {
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (const auto& s : samples) {
        (target(s.label) > 0.5 ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0) throw ConfigError("training data needs both signal and noise samples");
    const double total = static_cast<double>(samples.size());
    return {total / (2.0 * static_cast<double>(pos)), total / (2.0 * static_cast<double>(neg))};
}

LossGradient loss_and_gradient(const FloatFcsnn& net, std::span<const LabeledSample> samples,
                               const ClassWeights& weights, const SurrogateConfig& surrogate,
                               SpikeFunction forward_mode) {
    LossGradient out{0.0, zeros_like(net)};
    if (samples.empty()) return out;
    thread_local Trace tr;
    thread_local Trace scratch;
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (const auto& s : samples) {
        const double z = forward(net, s.sequence, forward_mode, surrogate, tr);
        const double y = target(s.label);
        const double w = sample_weight(weights, s.label);
        out.loss += w * (softplus(z) - y * z) * inv_n;
        backward(net, tr, s.sequence.steps(), w * (sigmoid(z) - y) * inv_n, surrogate, scratch, out.gradient);
    }
    return out;
}

double mean_loss(const FloatFcsnn& net, std::span<const LabeledSample> samples, const ClassWeights& weights,
                 const SurrogateConfig& surrogate, SpikeFunction forward_mode) {
    if (samples.empty()) return 0.0;
    std::vector<double> partial(kChunks, 0.0);
    detail::parallel_chunks(samples.size(), kChunks, [&](std::size_t b, std::size_t e, std::size_t c) {
        Trace tr;
        double sum = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            const auto& s = samples[i];
            const double z = forward(net, s.sequence, forward_mode, surrogate, tr);
            sum += sample_weight(weights, s.label) * (softplus(z) - target(s.label) * z);
        }
        partial[c] = sum;
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0) / static_cast<double>(samples.size());
}

double float_score(const FloatFcsnn& net, const PatchSequence& seq, SpikeFunction forward_mode,
                   const SurrogateConfig& surrogate) {
    Trace tr;
    return forward(net, seq, forward_mode, surrogate, tr);
}

namespace {

double validation_auc(const FloatFcsnn& net, std::span<const LabeledSample> validation) {
    if (validation.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> scores(validation.size());
    std::vector<Label> labels(validation.size());
    detail::parallel_chunks(validation.size(), kChunks, [&](std::size_t b, std::size_t e, std::size_t) {
        Trace tr;
        for (std::size_t i = b; i < e; ++i) {
            scores[i] = forward(net, validation[i].sequence, SpikeFunction::kHeaviside, {}, tr);
            labels[i] = validation[i].label;
        }
    });
    const bool has_pos = std::count(labels.begin(), labels.end(), Label::kSignal) > 0;
    const bool has_neg = std::count(labels.begin(), labels.end(), Label::kNoise) > 0;
    if (!has_pos || !has_neg) return std::numeric_limits<double>::quiet_NaN();
    return roc_from_scores(std::span<const double>(scores), labels).auc;
}

}  // namespace

FloatFcsnn train_from(FloatFcsnn net, std::span<const LabeledSample> samples, const TrainConfig& config,
                      std::span<const LabeledSample> validation, std::vector<EpochLog>* log) {
    config.validate();
    net.validate();
    check_dimensions(net, samples);
    check_dimensions(net, validation);
    const ClassWeights weights = class_weights(samples);

    auto record = [&](int epoch) {
        if (log) log->push_back({epoch, mean_loss(net, samples, weights, config.surrogate),
                                 validation_auc(net, validation)});
    };
    record(0);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(config.seed, 0x7A1);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        // Fisher-Yates on the sample order.
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            FloatFcsnn grad = zeros_like(net);
            const double inv_n = 1.0 / static_cast<double>(stop - start);
            thread_local Trace tr;
            thread_local Trace scratch;
            for (std::size_t k = start; k < stop; ++k) {
                const auto& s = samples[order[k]];
                const double z = forward(net, s.sequence, SpikeFunction::kHeaviside, config.surrogate, tr);
                const double g = sample_weight(weights, s.label) * (sigmoid(z) - target(s.label)) * inv_n;
                backward(net, tr, s.sequence.steps(), g, config.surrogate, scratch, grad);
            }
            const double lr = config.learning_rate;
            for (std::size_t i = 0; i < net.w1.size(); ++i) net.w1[i] -= lr * grad.w1[i];
            for (std::size_t i = 0; i < net.w2.size(); ++i) net.w2[i] -= lr * grad.w2[i];
            net.bias -= lr * grad.bias;
        }
        record(epoch);
    }
    net.validate();
    return net;
}

FloatFcsnn train(std::span<const LabeledSample> samples, const TrainConfig& config,
                 std::span<const LabeledSample> validation, std::vector<EpochLog>* log) {
    config.validate();
    if (samples.empty()) throw ConfigError("no training samples");
    const int dim = samples.front().sequence.dim();
    return train_from(init_network(dim, config.n_hidden, config.init_scale, config.seed), samples, config,
                      validation, log);
}

void write_training_log_csv(std::span<const EpochLog> log, std::ostream& out) {
    out << "epoch,train_loss,test_auc\n";
    char buf[96];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g\n", row.epoch, row.train_loss, row.test_auc);
        out << buf;
    }
}

QuantizedTensor quantize_tensor(std::span<const double> weights) {
    double max_abs = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) throw ConfigError("cannot quantize non-finite weight");
        max_abs = std::max(max_abs, std::abs(w));
    }
    QuantizedTensor q;
    q.values.resize(weights.size(), 0);
    if (max_abs == 0.0) {
        q.scale = 1.0;
        return q;
    }
    q.scale = max_abs / 127.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const long r = std::lround(weights[i] * 127.0 / max_abs);
        q.values[i] = static_cast<std::int8_t>(std::clamp(r, -127L, 127L));
    }
    return q;
}

QuantizedFcsnn quantize(const FloatFcsnn& net) {
    net.validate();
    const auto q1 = quantize_tensor(net.w1);
    const auto q2 = quantize_tensor(net.w2);
    QuantizedFcsnn q;
    q.input_dim = net.input_dim;
    q.n_hidden = net.n_hidden;
    q.w1 = q1.values;
    q.w2 = q2.values;
    q.s1 = static_cast<float>(q1.scale);
    q.s2 = static_cast<float>(q2.scale);
    q.v_th = static_cast<std::int32_t>(std::clamp<long>(std::lround(net.v_th / q1.scale), 1, kMembraneMax));
    const double shift = net.beta >= 1.0 ? 15.0 : std::round(-std::log2(1.0 - net.beta));
    q.beta_shift = static_cast<std::uint8_t>(std::clamp(shift, 0.0, 15.0));
    q.validate();
    return q;
}

FloatFcsnn dequantize(const QuantizedFcsnn& q) {
    q.validate();
    FloatFcsnn net;
    net.input_dim = q.input_dim;
    net.n_hidden = q.n_hidden;
    net.w1.resize(q.w1.size());
    net.w2.resize(q.w2.size());
    for (std::size_t i = 0; i < q.w1.size(); ++i) net.w1[i] = q.w1[i] * static_cast<double>(q.s1);
    for (std::size_t i = 0; i < q.w2.size(); ++i) net.w2[i] = q.w2[i] * static_cast<double>(q.s2);
    net.v_th = q.v_th * static_cast<double>(q.s1);
    if (q.beta_shift == 0) throw ConfigError("beta_shift 0 (beta = 0) has no float counterpart");
    net.beta = 1.0 - std::ldexp(1.0, -q.beta_shift);
    net.bias = 0.0;
    return net;
}

ClassificationThreshold suggested_threshold(const FloatFcsnn& net, const QuantizedFcsnn& q) {
    return {static_cast<std::int64_t>(std::ceil(-net.bias / static_cast<double>(q.s2)))};
}

std::vector<std::int64_t> score_samples(const QuantizedFcsnn& net, std::span<const LabeledSample> samples) {
    std::vector<std::int64_t> scores(samples.size());
    detail::parallel_chunks(samples.size(), kChunks, [&](std::size_t b, std::size_t e, std::size_t) {
        LifState state(net.n_hidden);
        for (std::size_t i = b; i < e; ++i) scores[i] = score_sequence(net, samples[i].sequence, state);
    });
    return scores;
}

std::vector<std::int64_t> score_stream(const QuantizedFcsnn& net, const EventStream& stream, int n_ebbi,
                                       WindowPolicy policy, int n) {
    if (2 * n * n != net.input_dim) throw ConfigError("patch size does not match the network input");
    EbbiStack stack(stream.geometry(), n_ebbi, policy);
    LifState state(net.n_hidden);
    std::vector<std::int64_t> scores;
    scores.reserve(stream.size());
    for (const Event& e : stream) {
        scores.push_back(score_sequence(net, extract_sequence(stack, e, n), state));
        stack.process_event(e);
    }
    return scores;
}

RocCurve sweep_threshold(const QuantizedFcsnn& net, std::span<const LabeledSample> samples) {
    const auto scores = score_samples(net, samples);
    std::vector<Label> labels(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) labels[i] = samples[i].label;
    return roc_from_scores(std::span<const std::int64_t>(scores), labels);
}

void save_float_checkpoint(const FloatFcsnn& net, const std::filesystem::path& path) {
    net.validate();
    if (net.input_dim > 0xFFFF || net.n_hidden > 0xFFFF) throw ConfigError("network too large for file format");
    write_file_atomic(path, [&](std::ostream& out) {
        out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
        detail::put_le(out, kFloatCheckpointVersion);
        detail::put_le(out, static_cast<std::uint16_t>(net.input_dim));
        detail::put_le(out, static_cast<std::uint16_t>(net.n_hidden));
        detail::put_le(out, static_cast<float>(net.v_th));
        detail::put_le(out, static_cast<float>(net.beta));
        detail::put_le(out, static_cast<float>(net.bias));
        for (double w : net.w1) detail::put_le(out, static_cast<float>(w));
        for (double w : net.w2) detail::put_le(out, static_cast<float>(w));
    });
}

FloatFcsnn load_float_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::size_t offset = 0;
    detail::expect_magic(in, kCheckpointMagic, offset);
    const auto version = detail::get_le<std::uint16_t>(in, offset);
    if (version != kFloatCheckpointVersion) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version), offset - 2);
    }
    FloatFcsnn net;
    net.input_dim = detail::get_le<std::uint16_t>(in, offset);
    net.n_hidden = detail::get_le<std::uint16_t>(in, offset);
    net.v_th = detail::get_le<float>(in, offset);
    net.beta = detail::get_le<float>(in, offset);
    net.bias = detail::get_le<float>(in, offset);
    net.w1.resize(static_cast<std::size_t>(net.input_dim) * static_cast<std::size_t>(net.n_hidden));
    for (auto& w : net.w1) w = detail::get_le<float>(in, offset);
    net.w2.resize(static_cast<std::size_t>(net.n_hidden));
    for (auto& w : net.w2) w = detail::get_le<float>(in, offset);
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes in checkpoint", offset);
    net.validate();
    return net;
}

}  // namespace evdenoise
