#include "statsim/mlp.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "statsim/error.hpp"
#include "statsim/rng.hpp"

namespace statsim {

namespace {

// Clamped so outputs stay strictly inside (0,1) even when exp() saturates.
double sigmoid(double z) {
    const double y = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(y, DBL_MIN, 1.0 - DBL_EPSILON / 2);
}

void check_input(const Mlp& net, std::size_t n) {
    if (net.layers().empty()) throw ShapeError("network has no layers");
    if (n != net.input_size()) {
        throw ShapeError("input length " + std::to_string(n) + " does not match network input " +
                         std::to_string(net.input_size()));
    }
}

// Activations of every layer, index 0 being the input itself. Zero inputs are skipped
// in the first layer; w*0 contributes nothing, so the result is the same as the dense sum.
struct Activations {
    std::vector<std::size_t> nonzero;
    std::vector<std::vector<double>> values;
};

void run_forward(const Mlp& net, std::span<const double> x, Activations& act) {
    const auto layers = net.layers();
    act.values.resize(layers.size() + 1);
    act.values[0].assign(x.begin(), x.end());
    act.nonzero.clear();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) act.nonzero.push_back(i);
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const DenseLayer& layer = layers[l];
        const std::vector<double>& in = act.values[l];
        std::vector<double>& out = act.values[l + 1];
        out.resize(layer.outputs);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double* w = layer.weights.data() + o * layer.inputs;
            double s = layer.biases[o];
            if (l == 0) {
                for (std::size_t i : act.nonzero) s += w[i] * in[i];
            } else {
                for (std::size_t i = 0; i < layer.inputs; ++i) s += w[i] * in[i];
            }
            out[o] = sigmoid(s);
        }
    }
}

// Error signals dL/dz per non-input layer.
void run_backward(const Mlp& net, const Activations& act, std::span<const double> target,
                  std::vector<std::vector<double>>& deltas) {
    const auto layers = net.layers();
    const std::size_t n_layers = layers.size();
    deltas.resize(n_layers);
    {
        const std::vector<double>& y = act.values[n_layers];
        std::vector<double>& d = deltas[n_layers - 1];
        d.resize(y.size());
        for (std::size_t o = 0; o < y.size(); ++o) d[o] = (y[o] - target[o]) * y[o] * (1.0 - y[o]);
    }
    for (std::size_t l = n_layers - 1; l > 0; --l) {
        const DenseLayer& next = layers[l];
        const std::vector<double>& a = act.values[l];
        const std::vector<double>& dn = deltas[l];
        std::vector<double>& d = deltas[l - 1];
        d.assign(next.inputs, 0.0);
        for (std::size_t o = 0; o < next.outputs; ++o) {
            const double* w = next.weights.data() + o * next.inputs;
            const double g = dn[o];
            for (std::size_t i = 0; i < next.inputs; ++i) d[i] += w[i] * g;
        }
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= a[i] * (1.0 - a[i]);
    }
}

}  // namespace

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const DenseLayer& layer = layers_[l];
        if (layer.weights.size() != layer.inputs * layer.outputs ||
            layer.biases.size() != layer.outputs) {
            throw ShapeError("layer " + std::to_string(l) + " arrays do not match its shape");
        }
        if (l > 0 && layers_[l - 1].outputs != layer.inputs) {
            throw ShapeError("layer " + std::to_string(l) + " input size does not chain");
        }
    }
}

std::vector<std::size_t> Mlp::layer_sizes() const {
    std::vector<std::size_t> sizes;
    if (layers_.empty()) return sizes;
    sizes.push_back(layers_.front().inputs);
    for (const DenseLayer& layer : layers_) sizes.push_back(layer.outputs);
    return sizes;
}

Mlp mlp_init(std::span<const std::size_t> layer_sizes, const TrainConfig& cfg) {
    if (layer_sizes.size() < 2) throw ConfigError("an MLP needs at least two layer sizes");
    if (std::ranges::find(layer_sizes, std::size_t{0}) != layer_sizes.end()) {
        throw ConfigError("layer sizes must be positive");
    }
    Rng rng(cfg.seed);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        DenseLayer layer;
        layer.inputs = layer_sizes[l];
        layer.outputs = layer_sizes[l + 1];
        layer.weights.resize(layer.inputs * layer.outputs);
        for (double& w : layer.weights) w = rng.uniform(-cfg.init_scale, cfg.init_scale);
        layer.biases.assign(layer.outputs, 0.0);
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

std::vector<double> forward(const Mlp& net, std::span<const double> x) {
    check_input(net, x.size());
    Activations act;
    run_forward(net, x, act);
    return std::move(act.values.back());
}

double loss(std::span<const double> y, std::span<const double> t) {
    if (y.size() != t.size()) throw ShapeError("loss: output and target lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - t[i];
        s += d * d;
    }
    return 0.5 * s;
}

Gradient gradient(const Mlp& net, const PairSample& sample) {
    check_input(net, sample.input.size());
    const double target[1] = {sample.target};
    if (net.output_size() != 1) throw ShapeError("pair samples carry a single target");
    Activations act;
    run_forward(net, sample.input, act);
    std::vector<std::vector<double>> deltas;
    run_backward(net, act, target, deltas);

    Gradient g;
    const auto layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const DenseLayer& layer = layers[l];
        const std::vector<double>& a = act.values[l];
        std::vector<double> gw(layer.weights.size());
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            for (std::size_t i = 0; i < layer.inputs; ++i) gw[o * layer.inputs + i] = deltas[l][o] * a[i];
        }
        g.weights.push_back(std::move(gw));
        g.biases.push_back(deltas[l]);
    }
    return g;
}

Mlp train(Mlp net, const SampleStream& samples, const TrainConfig& cfg,
          const EpochObserver& observer) {
    if (net.output_size() != 1) throw ShapeError("pair training needs a single output unit");
    Activations act;
    std::vector<std::vector<double>> deltas;
    PairSample sample;
    const double lr = cfg.learning_rate;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double total = 0.0;
        for (std::size_t idx = 0; idx < samples.size(); ++idx) {
            samples.fill(epoch, idx, sample);
            check_input(net, sample.input.size());
            run_forward(net, sample.input, act);
            const double target[1] = {sample.target};
            const double l = loss(act.values.back(), target);
            if (!std::isfinite(l)) throw DivergenceError(epoch, idx);
            total += l;
            run_backward(net, act, target, deltas);

            auto layers = net.layers();
            for (std::size_t li = 0; li < layers.size(); ++li) {
                DenseLayer& layer = layers[li];
                const std::vector<double>& a = act.values[li];
                const std::vector<double>& d = deltas[li];
                for (std::size_t o = 0; o < layer.outputs; ++o) {
                    double* w = layer.weights.data() + o * layer.inputs;
                    const double delta = d[o];
                    if (li == 0) {
                        for (std::size_t i : act.nonzero) w[i] -= lr * (delta * a[i]);
                    } else {
                        for (std::size_t i = 0; i < layer.inputs; ++i) w[i] -= lr * (delta * a[i]);
                    }
                    layer.biases[o] -= lr * delta;
                }
            }
        }
        if (observer) {
            observer(epoch, samples.size() ? total / static_cast<double>(samples.size()) : 0.0);
        }
    }
    return net;
}

Mlp train(Mlp net, std::span<const PairSample> samples, const TrainConfig& cfg,
          const EpochObserver& observer) {
    return train(std::move(net), VectorSampleStream(samples), cfg, observer);
}

}  // namespace statsim
