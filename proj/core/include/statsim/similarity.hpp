#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "statsim/mlp.hpp"

namespace statsim {

using Label = int;

/// Probability vector over a finite label set; entries are indexed by label 0..n-1.
class Posterior {
public:
    /// Throws ConfigError unless all entries are >= 0 and they sum to 1 within 1e-9.
    explicit Posterior(std::vector<double> probs);

    /// Point mass on `label` over `n_labels` labels.
    static Posterior indicator(std::size_t n_labels, std::size_t label);

    std::span<const double> probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

struct Exemplar {
    std::vector<double> point;
    Label label = 0;
};

/// Similarity known in closed form: every point of a finite set carries its posterior.
struct ExactSimilarity {
    std::vector<std::vector<double>> points;
    std::vector<Posterior> posteriors;

    /// Posterior of the point that equals `x` exactly; StateError when absent.
    const Posterior& posterior_of(std::span<const double> x) const;
};

/// MLP over the concatenation [x || x'] that estimates P(same class | x, x').
struct LearnedSimilarity {
    Mlp net;
    bool symmetrize = true;
};

/// Baseline: smaller Euclidean distance means more similar.
struct EuclideanDistance {};

/// Symmetric positive definite matrix; similarity decreases with (x-y)' Q (x-y).
class QuadraticForm {
public:
    /// Row-major dim x dim. Throws MatrixError if not symmetric or not positive definite.
    QuadraticForm(std::size_t dim, std::vector<double> matrix);

    std::size_t dim() const { return dim_; }
    std::span<const double> matrix() const { return matrix_; }
    /// (x-y)' Q (x-y), evaluated as |L'(x-y)|^2 with Q = L L'.
    double cost(std::span<const double> x, std::span<const double> y) const;

private:
    std::size_t dim_;
    std::vector<double> matrix_;
    std::vector<double> cholesky_;  // lower triangle, row-major
};

using SimilarityModel =
    std::variant<ExactSimilarity, LearnedSimilarity, EuclideanDistance, QuadraticForm>;

/// Sum over labels of p(label) * q(label).
double exact_similarity(const Posterior& p, const Posterior& q);

double learned_similarity(const LearnedSimilarity& model, std::span<const double> x,
                          std::span<const double> x_prime);

/// Ranking score for any model, larger meaning more similar. Exact and Learned return
/// the similarity itself; Euclidean returns the negated squared distance and
/// QuadraticForm the negated cost.
double similarity_score(const SimilarityModel& model, std::span<const double> x,
                        std::span<const double> x_prime);

/// Scores sim(x, x_label) for each exemplar, in exemplar order. With the Exact model
/// and unambiguous exemplars this is the posterior of x. Throws ConfigError on
/// duplicate labels.
std::vector<double> exemplar_posterior(const SimilarityModel& sim, std::span<const double> x,
                                       std::span<const Exemplar> exemplars);

/// Label of the prototype minimising (x-p)' sigma (x-p); lowest index wins ties.
/// Throws MatrixError for a non-PD sigma and StateError for no prototypes.
Label gaussian_similarity_decision(std::span<const double> x, std::span<const Exemplar> prototypes,
                                   const QuadraticForm& sigma);

/// A vector pre-transformed for repeated scoring against many partners.
struct PreparedVector {
    std::vector<double> data;
};

/// Batched scoring front end. For the learned model, the first layer is split into the
/// halves acting on x and on x', so each vector is projected once and every pair costs
/// O(hidden units). Results agree with similarity_score up to floating-point rounding.
/// The referenced model must outlive the scorer.
class PairScorer {
public:
    explicit PairScorer(const SimilarityModel& model);

    PreparedVector prepare(std::span<const double> x) const;
    double score(const PreparedVector& a, const PreparedVector& b) const;

private:
    double learned_half(const PreparedVector& left, const PreparedVector& right) const;

    const SimilarityModel* model_;
    std::size_t half_dim_ = 0;
    std::size_t hidden_ = 0;
};

}  // namespace statsim
