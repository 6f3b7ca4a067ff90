#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "evdenoise/ebbi.hpp"
#include "evdenoise/event.hpp"
#include "evdenoise/metrics.hpp"
#include "evdenoise/snn.hpp"

namespace evdenoise {

// Float counterpart of QuantizedFcsnn used during training. `bias` is added
// to the readout before the sigmoid; it has no integer counterpart and is
// folded into the classification threshold instead.
struct FloatFcsnn {
    int input_dim = 0;
    int n_hidden = 0;
    std::vector<double> w1;  // n_hidden x input_dim, row-major
    std::vector<double> w2;  // n_hidden
    double bias = 0.0;
    double beta = 0.5;
    double v_th = 1.0;

    // Throws ConfigError on shape mismatch, non-finite values, beta outside
    // (0, 1] or v_th <= 0.
    void validate() const;

    friend bool operator==(const FloatFcsnn&, const FloatFcsnn&) = default;
};

// Uniform(-init_scale, init_scale) hidden weights and readout weights,
// zero bias.
FloatFcsnn init_network(int input_dim, int n_hidden, double init_scale, std::uint64_t seed);

struct SurrogateConfig {
    double slope = 1.0;  // derivative inside the boxcar
    double width = 1.0;  // boxcar is |V - v_th| < width / 2
};

// How spikes are produced in the float forward pass. kHeaviside is the real
// model; kSurrogate replaces the step with the antiderivative of the boxcar
// so the forward pass is differentiable and matches the backward pass
// exactly (used for gradient checks).
enum class SpikeFunction { kHeaviside, kSurrogate };

struct TrainConfig {
    int n_hidden = 30;
    double learning_rate = 0.05;
    int epochs = 5;
    int batch_size = 64;
    SurrogateConfig surrogate{};
    double train_fraction = 0.8;
    double init_scale = 0.3;
    std::uint64_t seed = 7;

    void validate() const;
};

struct LabeledSample {
    PatchSequence sequence;
    Label label = Label::kNoise;
    std::uint64_t t = 0;
};

// Replays the stream through an EBBI stack. Each event's sequence is read
// before the event itself is written, so an event never sees itself. Throws
// ValidationError on unlabeled events.
std::vector<LabeledSample> build_dataset(const EventStream& stream, int n_ebbi, WindowPolicy policy,
                                         int n);

struct DatasetSplit {
    std::span<const LabeledSample> train;
    std::span<const LabeledSample> test;
};

// First floor(size * train_fraction) samples train, the rest test.
DatasetSplit split_chronological(std::span<const LabeledSample> samples, double train_fraction);

// Inverse-frequency weights N / (2 N_c), so both classes carry equal total
// weight. Throws ConfigError when a class is missing.
struct ClassWeights {
    double signal = 1.0;
    double noise = 1.0;
};
ClassWeights class_weights(std::span<const LabeledSample> samples);

struct LossGradient {
    double loss = 0.0;  // weighted mean binary cross-entropy
    FloatFcsnn gradient;  // same shape as the network; beta and v_th untouched
};

LossGradient loss_and_gradient(const FloatFcsnn& net, std::span<const LabeledSample> samples,
                               const ClassWeights& weights, const SurrogateConfig& surrogate,
                               SpikeFunction forward = SpikeFunction::kHeaviside);

double mean_loss(const FloatFcsnn& net, std::span<const LabeledSample> samples,
                 const ClassWeights& weights, const SurrogateConfig& surrogate = {},
                 SpikeFunction forward = SpikeFunction::kHeaviside);

// Readout plus bias (the logit) for one sequence.
double float_score(const FloatFcsnn& net, const PatchSequence& seq,
                   SpikeFunction forward = SpikeFunction::kHeaviside,
                   const SurrogateConfig& surrogate = {});

struct EpochLog {
    int epoch = 0;  // 0 is the untrained initialisation
    double train_loss = 0.0;
    double test_auc = 0.0;  // NaN without a validation set
};

// Minibatch SGD with BPTT over the sequence steps. Throws ConfigError when
// the training set lacks a class.
FloatFcsnn train(std::span<const LabeledSample> samples, const TrainConfig& config,
                 std::span<const LabeledSample> validation = {}, std::vector<EpochLog>* log = nullptr);

// Continues from an existing network.
FloatFcsnn train_from(FloatFcsnn net, std::span<const LabeledSample> samples, const TrainConfig& config,
                      std::span<const LabeledSample> validation = {}, std::vector<EpochLog>* log = nullptr);

void write_training_log_csv(std::span<const EpochLog> log, std::ostream& out);

struct QuantizedTensor {
    std::vector<std::int8_t> values;
    double scale = 1.0;
};

// Symmetric per-tensor scaling: scale = max|w| / 127 (1 for an all-zero
// tensor), q = round(w / scale) clamped to [-127, 127].
QuantizedTensor quantize_tensor(std::span<const double> weights);

// v_th is expressed in units of the hidden-layer scale; beta maps to the
// nearest shift with beta = 1 - 2^-shift. The bias is dropped.
QuantizedFcsnn quantize(const FloatFcsnn& net);
FloatFcsnn dequantize(const QuantizedFcsnn& net);

// Integer threshold equivalent to score + bias >= 0 in the float model.
ClassificationThreshold suggested_threshold(const FloatFcsnn& net, const QuantizedFcsnn& q);

// Integer scores for each sample; deterministic, computed in parallel.
std::vector<std::int64_t> score_samples(const QuantizedFcsnn& net, std::span<const LabeledSample> samples);

// Replays a stream (labels optional) and scores every event with the same
// extract-then-write order as build_dataset.
std::vector<std::int64_t> score_stream(const QuantizedFcsnn& net, const EventStream& stream, int n_ebbi,
                                       WindowPolicy policy, int n);

// ROC over every distinct integer score.
RocCurve sweep_threshold(const QuantizedFcsnn& net, std::span<const LabeledSample> samples);

// Float checkpoint: "SNNFF32", u16 version, u16 input_dim, u16 n_hidden,
// f32 v_th, f32 beta, f32 bias, f32 w1 (row-major), f32 w2; little-endian.
inline constexpr std::uint16_t kFloatCheckpointVersion = 1;
void save_float_checkpoint(const FloatFcsnn& net, const std::filesystem::path& path);
FloatFcsnn load_float_checkpoint(const std::filesystem::path& path);

}  // namespace evdenoise
