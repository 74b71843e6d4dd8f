#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "statsim/error.hpp"
#include "statsim/similarity.hpp"

using namespace statsim;

namespace {

double brute_sum(const Posterior& p, const Posterior& q) {
    double acc = 0.0;
    for (std::size_t w = 0; w < p.size(); ++w) {
        for (std::size_t v = 0; v < q.size(); ++v) {
            if (w == v) acc += p[w] * q[v];
        }
    }
    return acc;
}

// Finite world whose first n_labels points are unambiguous exemplars.
struct World {
    ExactSimilarity sim;
    std::vector<Exemplar> exemplars;
};

World make_world(Rng& rng, std::size_t n_labels, std::size_t extra_points, bool ambiguous_exemplars) {
    World w;
    for (std::size_t l = 0; l < n_labels; ++l) {
        w.sim.points.push_back({static_cast<double>(l), 0.0});
        w.sim.posteriors.push_back(ambiguous_exemplars ? Posterior(testutil::random_simplex(rng, n_labels))
                                                       : Posterior::indicator(n_labels, l));
        w.exemplars.push_back({w.sim.points.back(), static_cast<Label>(l)});
    }
    for (std::size_t i = 0; i < extra_points; ++i) {
        w.sim.points.push_back({static_cast<double>(i), 1.0});
        w.sim.posteriors.emplace_back(testutil::random_simplex(rng, n_labels));
    }
    return w;
}

}  // namespace

TEST_CASE("posterior validation") {
    CHECK_NOTHROW(Posterior({0.25, 0.75}));
    CHECK_THROWS_AS(Posterior({0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(Posterior({-0.1, 1.1}), ConfigError);
    const Posterior d = Posterior::indicator(3, 1);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 1.0);
}

TEST_CASE("exact similarity examples") {
    CHECK(exact_similarity(Posterior::indicator(5, 2), Posterior::indicator(5, 2)) == 1.0);
    const Posterior u({0.25, 0.25, 0.25, 0.25});
    CHECK(exact_similarity(u, u) == 0.25);
    CHECK_THROWS_AS(exact_similarity(u, Posterior::indicator(3, 0)), ShapeError);
}

TEST_CASE("exact similarity equals loop summation") {
    Rng rng(17);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng.below(10);
        const Posterior p(testutil::random_simplex(rng, n));
        const Posterior q(testutil::random_simplex(rng, n));
        const double s = exact_similarity(p, q);
        worst = std::max(worst, std::abs(s - brute_sum(p, q)));
        CHECK(s == exact_similarity(q, p));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        // self-similarity is at most one
        CHECK(exact_similarity(p, p) <= 1.0 + 1e-15);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("self-similarity of a non-indicator is below one") {
    const Posterior p({0.9, 0.1});
    CHECK(exact_similarity(p, p) < 1.0);
}

TEST_CASE("unambiguous exemplars recover the posterior") {
    Rng rng(1);
    World w = make_world(rng, 3, 0, false);
    w.sim.points.push_back({9.0, 9.0});
    w.sim.posteriors.emplace_back(std::vector<double>{0.2, 0.5, 0.3});
    const SimilarityModel model = w.sim;
    const double x[] = {9.0, 9.0};
    const auto scores = exemplar_posterior(model, x, w.exemplars);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(scores[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(scores[2] == doctest::Approx(0.3).epsilon(1e-12));

    const double ex1[] = {1.0, 0.0};
    const auto own = exemplar_posterior(model, ex1, w.exemplars);
    CHECK(own == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("unambiguous exemplar property over random worlds") {
    Rng rng(123);
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
        const std::size_t n = 2 + rng.below(9);
        const World w = make_world(rng, n, 3, false);
        const SimilarityModel model = w.sim;
        const std::size_t pick = n + rng.below(3);
        const auto scores = exemplar_posterior(model, w.sim.points[pick], w.exemplars);
        for (std::size_t l = 0; l < n; ++l) worst = std::max(worst, std::abs(scores[l] - w.sim.posteriors[pick][l]));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("ambiguous exemplars score by summation") {
    Rng rng(99);
    for (int c = 0; c < 200; ++c) {
        const std::size_t n = 2 + rng.below(5);
        const World w = make_world(rng, n, 2, true);
        const SimilarityModel model = w.sim;
        const std::size_t pick = n + rng.below(2);
        const auto scores = exemplar_posterior(model, w.sim.points[pick], w.exemplars);
        for (std::size_t l = 0; l < n; ++l) {
            CHECK(std::abs(scores[l] - brute_sum(w.sim.posteriors[pick], w.sim.posteriors[l])) <= 1e-12);
        }
    }
}

TEST_CASE("duplicate exemplar labels are rejected") {
    const SimilarityModel model = EuclideanDistance{};
    const std::vector<Exemplar> ex{{{0.0}, 1}, {{1.0}, 1}};
    const double x[] = {0.5};
    CHECK_THROWS_AS(exemplar_posterior(model, x, ex), ConfigError);
}

TEST_CASE("exact model needs a known point") {
    const ExactSimilarity sim{{{0.0}}, {Posterior::indicator(2, 0)}};
    const double x[] = {3.0};
    CHECK_THROWS_AS(sim.posterior_of(x), StateError);
}

TEST_CASE("learned similarity of a zero net is one half") {
    TrainConfig cfg;
    cfg.init_scale = 0.0;
    const std::size_t sizes[] = {4, 3, 1};
    const LearnedSimilarity m{mlp_init(sizes, cfg), true};
    const double a[] = {1, 2}, b[] = {-3, 4};
    CHECK(learned_similarity(m, a, b) == 0.5);
    const double wrong[] = {1, 2, 3};
    CHECK_THROWS_AS(learned_similarity(m, a, wrong), ShapeError);
}

TEST_CASE("symmetrized learned similarity is symmetric") {
    TrainConfig cfg;
    cfg.init_scale = 1.0;
    cfg.seed = 5;
    const std::size_t sizes[] = {6, 5, 1};
    const LearnedSimilarity m{mlp_init(sizes, cfg), true};
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const auto a = testutil::random_vector(rng, 3), b = testutil::random_vector(rng, 3);
        CHECK(learned_similarity(m, a, b) == learned_similarity(m, b, a));
        const double s = learned_similarity(m, a, b);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("trained XOR pair model separates positives from negatives") {
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 5000;
    cfg.seed = 11;
    cfg.init_scale = 1.0;
    const std::vector<PairSample> samples{{{0, 0}, 1}, {{0, 1}, 0}, {{1, 0}, 0}, {{1, 1}, 1}};
    const std::size_t sizes[] = {2, 8, 1};
    const LearnedSimilarity m{train(mlp_init(sizes, cfg), samples, cfg), true};
    double min_pos = 1.0, max_neg = 0.0;
    for (const PairSample& s : samples) {
        const double v = learned_similarity(m, std::span(s.input).first(1), std::span(s.input).last(1));
        if (s.target == 1.0) min_pos = std::min(min_pos, v);
        else max_neg = std::max(max_neg, v);
    }
    CHECK(min_pos > max_neg);
}

TEST_CASE("quadratic form validation") {
    CHECK_THROWS_AS(QuadraticForm(2, {1, 0.5, 0.4, 1}), MatrixError);
    CHECK_THROWS_AS(QuadraticForm(2, {1, 2, 2, 1}), MatrixError);
    CHECK_THROWS_AS(QuadraticForm(2, {0, 0, 0, 1}), MatrixError);
    const QuadraticForm q(2, {2, 0, 0, 3});
    const double x[] = {1, 1}, y[] = {0, 0};
    CHECK(q.cost(x, y) == doctest::Approx(5.0));
    CHECK(q.cost(x, x) == 0.0);
}

TEST_CASE("gaussian decision examples") {
    const std::vector<Exemplar> protos{{{0, 0}, 0}, {{10, 0}, 1}};
    const double x[] = {1, 0};
    CHECK(gaussian_similarity_decision(x, protos, QuadraticForm(2, {1, 0, 0, 1})) == 0);

    const std::vector<Exemplar> p2{{{2, 0}, 0}, {{0, 3}, 1}};
    const double origin[] = {0, 0};
    const QuadraticForm sigma(2, {100, 0, 0, 1});
    CHECK(sigma.cost(origin, p2[0].point) == doctest::Approx(400.0));
    CHECK(sigma.cost(origin, p2[1].point) == doctest::Approx(9.0));
    CHECK(gaussian_similarity_decision(origin, p2, sigma) == 1);

    CHECK_THROWS_AS(gaussian_similarity_decision(origin, std::vector<Exemplar>{}, sigma), StateError);
}

TEST_CASE("gaussian decision equals direct kernel argmax") {
    Rng rng(31);
    int agree = 0;
    for (int c = 0; c < 1000; ++c) {
        const std::size_t d = 1 + rng.below(10);
        // sigma = A A' + 0.1 I
        std::vector<double> a(d * d);
        for (double& v : a) v = rng.uniform(-1, 1);
        std::vector<double> m(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t k = 0; k < d; ++k) m[i * d + j] += a[i * d + k] * a[j * d + k];
            }
            m[i * d + i] += 0.1;
        }
        const QuadraticForm sigma(d, m);
        const std::size_t n = 1 + rng.below(10);
        std::vector<Exemplar> protos;
        for (std::size_t p = 0; p < n; ++p) protos.push_back({testutil::random_vector(rng, d, -2, 2), static_cast<Label>(p)});
        const auto x = testutil::random_vector(rng, d, -2, 2);

        Label best = -1;
        double best_k = -1.0;
        for (const Exemplar& p : protos) {
            double quad = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) quad += (x[i] - p.point[i]) * m[i * d + j] * (x[j] - p.point[j]);
            }
            const double k = std::exp(-0.5 * quad);
            if (k > best_k) {
                best_k = k;
                best = p.label;
            }
        }
        agree += gaussian_similarity_decision(x, protos, sigma) == best;
    }
    CHECK(agree == 1000);
}

TEST_CASE("quadratic form ranking score is the negated cost") {
    const QuadraticForm q(2, {4, 1, 1, 3});
    const SimilarityModel m = q;
    const double x[] = {1, -2}, y[] = {0.5, 0.5};
    CHECK(similarity_score(m, x, y) == -q.cost(x, y));
    CHECK(q.cost(x, y) >= 0.0);
    const SimilarityModel e = EuclideanDistance{};
    CHECK(similarity_score(e, x, y) == doctest::Approx(-(0.25 + 6.25)));
}

TEST_CASE("pair scorer agrees with direct evaluation") {
    TrainConfig cfg;
    cfg.init_scale = 0.8;
    cfg.seed = 21;
    const std::size_t sizes[] = {10, 7, 3, 1};
    for (bool sym : {true, false}) {
        const SimilarityModel m = LearnedSimilarity{mlp_init(sizes, cfg), sym};
        const PairScorer scorer(m);
        Rng rng(6);
        for (int i = 0; i < 200; ++i) {
            auto a = testutil::random_vector(rng, 5), b = testutil::random_vector(rng, 5);
            if (i % 4 == 0) a[rng.below(5)] = 0.0;
            const double direct = similarity_score(m, a, b);
            const double fast = scorer.score(scorer.prepare(a), scorer.prepare(b));
            CHECK(std::abs(direct - fast) <= 1e-12);
        }
    }
    const SimilarityModel e = EuclideanDistance{};
    const PairScorer es(e);
    const double a[] = {1, 2}, b[] = {4, 6};
    CHECK(es.score(es.prepare(a), es.prepare(b)) == -25.0);
}
