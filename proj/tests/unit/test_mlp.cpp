#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "statsim/error.hpp"
#include "statsim/mlp.hpp"

using namespace statsim;

namespace {

Mlp random_net(Rng& rng, std::vector<std::size_t> sizes, double scale) {
    TrainConfig cfg;
    cfg.seed = rng.next_u64();
    cfg.init_scale = scale;
    Mlp net = mlp_init(sizes, cfg);
    for (DenseLayer& l : net.layers()) {
        for (double& b : l.biases) b = rng.uniform(-scale, scale);
    }
    return net;
}

double loss_at(const Mlp& net, const PairSample& s) {
    const auto y = forward(net, s.input);
    const double t[] = {s.target};
    return loss(y, t);
}

std::vector<PairSample> xor_pairs() {
    return {{{0, 0}, 1}, {{0, 1}, 0}, {{1, 0}, 0}, {{1, 1}, 1}};
}

}  // namespace

TEST_CASE("init rejects degenerate layer lists") {
    TrainConfig cfg;
    const std::size_t one[] = {3};
    const std::size_t zero[] = {3, 0, 1};
    CHECK_THROWS_AS(mlp_init(one, cfg), ConfigError);
    CHECK_THROWS_AS(mlp_init(zero, cfg), ConfigError);
}

TEST_CASE("init shapes, range and determinism") {
    TrainConfig cfg;
    cfg.seed = 42;
    const std::size_t sizes[] = {20, 100, 1};
    const Mlp a = mlp_init(sizes, cfg);
    REQUIRE(a.layers().size() == 2);
    CHECK(a.layers()[0].outputs == 100);
    CHECK(a.layers()[0].inputs == 20);
    CHECK(a.layers()[0].weights.size() == 100 * 20);
    CHECK(a.layers()[1].weights.size() == 100);
    CHECK(a.layer_sizes() == std::vector<std::size_t>{20, 100, 1});
    for (const DenseLayer& l : a.layers()) {
        for (double w : l.weights) CHECK(std::abs(w) <= cfg.init_scale);
        for (double b : l.biases) CHECK(b == 0.0);
    }
    CHECK(a == mlp_init(sizes, cfg));
    cfg.seed = 43;
    CHECK_FALSE(a == mlp_init(sizes, cfg));
}

TEST_CASE("zero weights give one half everywhere") {
    TrainConfig cfg;
    cfg.init_scale = 0.0;
    const std::size_t sizes[] = {4, 3, 2};
    const Mlp net = mlp_init(sizes, cfg);
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        const auto y = forward(net, testutil::random_vector(rng, 4, -10, 10));
        REQUIRE(y.size() == 2);
        CHECK(y[0] == 0.5);
        CHECK(y[1] == 0.5);
    }
}

TEST_CASE("hand evaluated 1:1:1 network") {
    DenseLayer l1{1, 1, {1.0}, {0.0}};
    DenseLayer l2{1, 1, {1.0}, {0.0}};
    const Mlp net({l1, l2});
    const double x[] = {0.0};
    const double expected = 1.0 / (1.0 + std::exp(-0.5));
    CHECK(forward(net, x)[0] == doctest::Approx(expected).epsilon(1e-15));
    CHECK(forward(net, x)[0] == doctest::Approx(0.6225).epsilon(1e-4));
}

TEST_CASE("forward rejects wrong input length") {
    TrainConfig cfg;
    const std::size_t sizes[] = {3, 2, 1};
    const Mlp net = mlp_init(sizes, cfg);
    const double x[] = {1.0, 2.0};
    CHECK_THROWS_AS(forward(net, x), ShapeError);
}

TEST_CASE("non-chaining layers are rejected") {
    DenseLayer l1{2, 3, std::vector<double>(6), std::vector<double>(3)};
    DenseLayer l2{2, 1, std::vector<double>(2), std::vector<double>(1)};
    CHECK_THROWS_AS(Mlp({l1, l2}), ShapeError);
}

TEST_CASE("outputs stay strictly inside (0,1)") {
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const Mlp net = random_net(rng, {5, 7, 1}, 5.0);
        const auto y = forward(net, testutil::random_vector(rng, 5, -1e3, 1e3));
        CHECK(y[0] > 0.0);
        CHECK(y[0] < 1.0);
    }
}

TEST_CASE("loss values") {
    const double a[] = {0.3, 0.7};
    CHECK(loss(a, a) == 0.0);
    const double y[] = {0.5}, t[] = {1.0};
    CHECK(loss(y, t) == 0.125);
    const double short_t[] = {1.0};
    CHECK_THROWS_AS(loss(a, short_t), ShapeError);

    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto p = testutil::random_vector(rng, 6, 0, 1);
        const auto q = testutil::random_vector(rng, 6, 0, 1);
        long double acc = 0.0;
        for (std::size_t k = 0; k < 6; ++k) acc += 0.5L * (static_cast<long double>(p[k]) - q[k]) * (p[k] - q[k]);
        CHECK(std::abs(loss(p, q) - static_cast<double>(acc)) < 1e-12);
    }
}

TEST_CASE("gradient matches central finite differences") {
    Rng rng(2024);
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        std::vector<std::size_t> sizes{1 + rng.below(6)};
        const std::size_t hidden_layers = 1 + rng.below(2);
        for (std::size_t h = 0; h < hidden_layers; ++h) sizes.push_back(1 + rng.below(6));
        sizes.push_back(1);
        Mlp net = random_net(rng, sizes, 1.5);
        PairSample s{testutil::random_vector(rng, sizes.front(), -2, 2), static_cast<double>(rng.below(2))};
        const Gradient g = gradient(net, s);
        const double h = 1e-5;
        for (std::size_t li = 0; li < net.layers().size(); ++li) {
            auto check = [&](double& param, double analytic) {
                const double keep = param;
                param = keep + h;
                const double up = loss_at(net, s);
                param = keep - h;
                const double down = loss_at(net, s);
                param = keep;
                const double numeric = (up - down) / (2 * h);
                const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-7});
                worst = std::max(worst, rel);
            };
            DenseLayer& l = net.layers()[li];
            for (std::size_t k = 0; k < l.weights.size(); ++k) check(l.weights[k], g.weights[li][k]);
            for (std::size_t k = 0; k < l.biases.size(); ++k) check(l.biases[k], g.biases[li][k]);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("gradient at a stationary sample vanishes on the output layer") {
    Rng rng(8);
    const Mlp net = random_net(rng, {3, 4, 1}, 1.0);
    PairSample s{testutil::random_vector(rng, 3), 0.0};
    s.target = forward(net, s.input)[0];
    const Gradient g = gradient(net, s);
    for (double w : g.weights.back()) CHECK(w == 0.0);
    CHECK(g.biases.back()[0] == 0.0);
}

TEST_CASE("zero input and zero weights") {
    TrainConfig cfg;
    cfg.init_scale = 0.0;
    const std::size_t sizes[] = {3, 4, 1};
    const Mlp net = mlp_init(sizes, cfg);
    const PairSample s{{0, 0, 0}, 1.0};
    const Gradient g = gradient(net, s);
    for (double w : g.weights[0]) CHECK(w == 0.0);
    // output delta = (0.5 - 1) * 0.25
    CHECK(g.biases[1][0] == doctest::Approx(-0.125));
    for (double w : g.weights[1]) CHECK(w == doctest::Approx(-0.125 * 0.5));
}

TEST_CASE("gradient needs a single output") {
    TrainConfig cfg;
    const std::size_t sizes[] = {2, 3, 2};
    const Mlp net = mlp_init(sizes, cfg);
    CHECK_THROWS_AS(gradient(net, PairSample{{0, 0}, 1}), ShapeError);
}

TEST_CASE("learning rate zero leaves the net unchanged") {
    Rng rng(1);
    const Mlp net = random_net(rng, {2, 8, 1}, 0.5);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 3;
    const auto samples = xor_pairs();
    CHECK(train(net, samples, cfg) == net);
}

TEST_CASE("one sample one epoch equals a hand-applied SGD step") {
    Rng rng(77);
    const Mlp net = random_net(rng, {3, 5, 1}, 0.8);
    const PairSample s{{0.2, 0.0, -0.7}, 1.0};
    TrainConfig cfg;
    cfg.learning_rate = 0.3;
    const Gradient g = gradient(net, s);
    const Mlp trained = train(net, std::span<const PairSample>(&s, 1), cfg);
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        const DenseLayer& before = net.layers()[li];
        const DenseLayer& after = trained.layers()[li];
        for (std::size_t k = 0; k < before.weights.size(); ++k) {
            CHECK(after.weights[k] == before.weights[k] - cfg.learning_rate * g.weights[li][k]);
        }
        for (std::size_t k = 0; k < before.biases.size(); ++k) {
            CHECK(after.biases[k] == before.biases[k] - cfg.learning_rate * g.biases[li][k]);
        }
    }
}

TEST_CASE("XOR pair task converges") {
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 5000;
    cfg.seed = 11;
    const std::size_t sizes[] = {2, 8, 1};
    const auto samples = xor_pairs();
    double last = 1.0;
    const Mlp net = train(mlp_init(sizes, cfg), samples, cfg, [&](std::size_t, double l) { last = l; });
    CHECK(last < 0.01);
    double mean = 0.0;
    for (const PairSample& s : samples) mean += loss_at(net, s);
    CHECK(mean / 4.0 < 0.01);
}

TEST_CASE("training is deterministic") {
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 50;
    cfg.seed = 3;
    const std::size_t sizes[] = {2, 4, 1};
    const auto samples = xor_pairs();
    const Mlp a = train(mlp_init(sizes, cfg), samples, cfg);
    const Mlp b = train(mlp_init(sizes, cfg), samples, cfg);
    CHECK(a == b);
}

TEST_CASE("non-finite loss raises a divergence error") {
    TrainConfig cfg;
    const std::size_t sizes[] = {2, 3, 1};
    std::vector<PairSample> samples{{{0, 0}, 1}, {{std::numeric_limits<double>::quiet_NaN(), 0}, 1}};
    try {
        train(mlp_init(sizes, cfg), samples, cfg);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.epoch() == 0);
        CHECK(e.sample() == 1);
    }
}
