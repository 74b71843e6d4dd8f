#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace statsim {

/// Fully connected layer; `weights` is outputs x inputs, row-major.
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    double& weight(std::size_t out, std::size_t in) { return weights[out * inputs + in]; }
    double weight(std::size_t out, std::size_t in) const { return weights[out * inputs + in]; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Multi-layer perceptron with logistic sigmoid units on every non-input layer.
class Mlp {
public:
    Mlp() = default;
    /// Throws ShapeError if consecutive layers do not chain.
    explicit Mlp(std::vector<DenseLayer> layers);

    std::vector<std::size_t> layer_sizes() const;
    std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().inputs; }
    std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().outputs; }

    std::span<const DenseLayer> layers() const { return layers_; }
    std::span<DenseLayer> layers() { return layers_; }

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    std::vector<DenseLayer> layers_;
};

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    double init_scale = 0.1;
};

struct PairSample {
    std::vector<double> input;
    double target = 0.0;
};

/// Parameter gradient, shaped like the network it was computed for.
struct Gradient {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/// Source of training samples. `fill` may depend on the epoch, which lets generators
/// draw fresh samples every pass while staying a pure function of (epoch, index).
class SampleStream {
public:
    virtual ~SampleStream() = default;
    virtual std::size_t size() const = 0;
    virtual void fill(std::size_t epoch, std::size_t index, PairSample& out) const = 0;
};

/// Replays a fixed sample list every epoch.
class VectorSampleStream final : public SampleStream {
public:
    explicit VectorSampleStream(std::span<const PairSample> samples) : samples_(samples) {}
    std::size_t size() const override { return samples_.size(); }
    void fill(std::size_t, std::size_t index, PairSample& out) const override {
        out = samples_[index];
    }

private:
    std::span<const PairSample> samples_;
};

/// Called after each epoch with the mean per-sample loss of that epoch.
using EpochObserver = std::function<void(std::size_t epoch, double mean_loss)>;

/// Weights i.i.d. uniform on [-init_scale, init_scale] from cfg.seed; biases zero.
/// Throws ConfigError for fewer than two layers or a zero size.
Mlp mlp_init(std::span<const std::size_t> layer_sizes, const TrainConfig& cfg);

std::vector<double> forward(const Mlp& net, std::span<const double> x);

/// Half the squared error.
double loss(std::span<const double> y, std::span<const double> t);

/// Exact backpropagation gradient of loss(forward(x), target).
Gradient gradient(const Mlp& net, const PairSample& sample);

/// Per-sample SGD in stream order. Throws DivergenceError on a non-finite loss.
Mlp train(Mlp net, const SampleStream& samples, const TrainConfig& cfg,
          const EpochObserver& observer = {});

Mlp train(Mlp net, std::span<const PairSample> samples, const TrainConfig& cfg,
          const EpochObserver& observer = {});

}  // namespace statsim
