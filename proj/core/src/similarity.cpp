#include "statsim/similarity.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "statsim/error.hpp"

namespace statsim {

namespace {

double sigmoid(double z) {
    const double y = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(y, DBL_MIN, 1.0 - DBL_EPSILON / 2);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("vector lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
    std::vector<double> v;
    v.reserve(a.size() + b.size());
    v.insert(v.end(), a.begin(), a.end());
    v.insert(v.end(), b.begin(), b.end());
    return v;
}

}  // namespace

Posterior::Posterior(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ConfigError("posterior over an empty label set");
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw ConfigError("posterior entries must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("posterior entries must sum to 1");
}

Posterior Posterior::indicator(std::size_t n_labels, std::size_t label) {
    if (label >= n_labels) throw ConfigError("indicator label out of range");
    std::vector<double> p(n_labels, 0.0);
    p[label] = 1.0;
    return Posterior(std::move(p));
}

const Posterior& ExactSimilarity::posterior_of(std::span<const double> x) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::ranges::equal(points[i], x)) return posteriors.at(i);
    }
    throw StateError("point has no assigned posterior");
}

QuadraticForm::QuadraticForm(std::size_t dim, std::vector<double> matrix)
    : dim_(dim), matrix_(std::move(matrix)), cholesky_(dim * dim, 0.0) {
    if (dim_ == 0 || matrix_.size() != dim_ * dim_) {
        throw MatrixError("quadratic form matrix must be dim x dim");
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (matrix_[i * dim_ + j] != matrix_[j * dim_ + i]) {
                throw MatrixError("quadratic form matrix is not symmetric");
            }
        }
    }
    for (std::size_t j = 0; j < dim_; ++j) {
        double pivot = matrix_[j * dim_ + j];
        for (std::size_t k = 0; k < j; ++k) pivot -= cholesky_[j * dim_ + k] * cholesky_[j * dim_ + k];
        if (!(pivot > 0.0)) {
            throw MatrixError("matrix is not positive definite (pivot " + std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(pivot);
        cholesky_[j * dim_ + j] = ljj;
        for (std::size_t i = j + 1; i < dim_; ++i) {
            double s = matrix_[i * dim_ + j];
            for (std::size_t k = 0; k < j; ++k) s -= cholesky_[i * dim_ + k] * cholesky_[j * dim_ + k];
            cholesky_[i * dim_ + j] = s / ljj;
        }
    }
}

double QuadraticForm::cost(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != dim_ || y.size() != dim_) throw ShapeError("quadratic form dimension mismatch");
    // (x-y)' L L' (x-y) = sum_j (sum_{i>=j} L_ij d_i)^2
    double total = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (std::size_t i = j; i < dim_; ++i) s += cholesky_[i * dim_ + j] * (x[i] - y[i]);
        total += s * s;
    }
    return total;
}

double exact_similarity(const Posterior& p, const Posterior& q) {
    if (p.size() != q.size()) throw ShapeError("posteriors over different label sets");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * q[i];
    return s;
}

double learned_similarity(const LearnedSimilarity& model, std::span<const double> x,
                          std::span<const double> x_prime) {
    if (x.size() != x_prime.size() || 2 * x.size() != model.net.input_size()) {
        throw ShapeError("learned similarity expects two vectors of half the network input size");
    }
    const double forward_xy = forward(model.net, concat(x, x_prime)).front();
    if (!model.symmetrize) return forward_xy;
    const double forward_yx = forward(model.net, concat(x_prime, x)).front();
    return 0.5 * (forward_xy + forward_yx);
}

double similarity_score(const SimilarityModel& model, std::span<const double> x,
                        std::span<const double> x_prime) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ExactSimilarity>) {
                return exact_similarity(m.posterior_of(x), m.posterior_of(x_prime));
            } else if constexpr (std::is_same_v<T, LearnedSimilarity>) {
                return learned_similarity(m, x, x_prime);
            } else if constexpr (std::is_same_v<T, EuclideanDistance>) {
                return -squared_distance(x, x_prime);
            } else {
                return -m.cost(x, x_prime);
            }
        },
        model);
}

std::vector<double> exemplar_posterior(const SimilarityModel& sim, std::span<const double> x,
                                       std::span<const Exemplar> exemplars) {
    std::set<Label> seen;
    for (const Exemplar& e : exemplars) {
        if (!seen.insert(e.label).second) {
            throw ConfigError("duplicate exemplar label " + std::to_string(e.label));
        }
    }
    std::vector<double> scores;
    scores.reserve(exemplars.size());
    for (const Exemplar& e : exemplars) scores.push_back(similarity_score(sim, x, e.point));
    return scores;
}

Label gaussian_similarity_decision(std::span<const double> x, std::span<const Exemplar> prototypes,
                                   const QuadraticForm& sigma) {
    if (prototypes.empty()) throw StateError("no prototypes");
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prototypes.size(); ++i) {
        const double c = sigma.cost(x, prototypes[i].point);
        if (c < best_cost) {
            best_cost = c;
            best = i;
        }
    }
    return prototypes[best].label;
}

PairScorer::PairScorer(const SimilarityModel& model) : model_(&model) {
    if (const auto* learned = std::get_if<LearnedSimilarity>(model_)) {
        if (learned->net.layers().empty() || learned->net.input_size() % 2 != 0) {
            throw ShapeError("learned similarity network needs an even input size");
        }
        half_dim_ = learned->net.input_size() / 2;
        hidden_ = learned->net.layers().front().outputs;
    }
}

PreparedVector PairScorer::prepare(std::span<const double> x) const {
    if (const auto* learned = std::get_if<LearnedSimilarity>(model_)) {
        if (x.size() != half_dim_) throw ShapeError("vector length does not match the learned model");
        const DenseLayer& first = learned->net.layers().front();
        // data = [W_left x | W_right x]
        PreparedVector p{std::vector<double>(2 * hidden_, 0.0)};
        for (std::size_t i = 0; i < half_dim_; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (std::size_t o = 0; o < hidden_; ++o) {
                p.data[o] += first.weight(o, i) * xi;
                p.data[hidden_ + o] += first.weight(o, half_dim_ + i) * xi;
            }
        }
        return p;
    }
    if (const auto* exact = std::get_if<ExactSimilarity>(model_)) {
        const auto probs = exact->posterior_of(x).probs();
        return PreparedVector{std::vector<double>(probs.begin(), probs.end())};
    }
    return PreparedVector{std::vector<double>(x.begin(), x.end())};
}

double PairScorer::learned_half(const PreparedVector& left, const PreparedVector& right) const {
    const auto& net = std::get<LearnedSimilarity>(*model_).net;
    const auto layers = net.layers();
    std::vector<double> act(hidden_);
    for (std::size_t o = 0; o < hidden_; ++o) {
        act[o] = sigmoid(layers[0].biases[o] + (left.data[o] + right.data[hidden_ + o]));
    }
    std::vector<double> next;
    for (std::size_t l = 1; l < layers.size(); ++l) {
        const DenseLayer& layer = layers[l];
        next.resize(layer.outputs);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            double s = layer.biases[o];
            for (std::size_t i = 0; i < layer.inputs; ++i) s += layer.weight(o, i) * act[i];
            next[o] = sigmoid(s);
        }
        act.swap(next);
    }
    return act.front();
}

double PairScorer::score(const PreparedVector& a, const PreparedVector& b) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ExactSimilarity>) {
                double s = 0.0;
                for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
                return s;
            } else if constexpr (std::is_same_v<T, LearnedSimilarity>) {
                const double ab = learned_half(a, b);
                if (!m.symmetrize) return ab;
                return 0.5 * (ab + learned_half(b, a));
            } else if constexpr (std::is_same_v<T, EuclideanDistance>) {
                return -squared_distance(a.data, b.data);
            } else {
                return -m.cost(a.data, b.data);
            }
        },
        *model_);
}

}  // namespace statsim
