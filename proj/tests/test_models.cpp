#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ews/model_io.hpp"
#include "ews/models.hpp"
#include "test_util.hpp"

using namespace ews;
using namespace ews::models;

namespace {

std::vector<double> logistic_theta(const Model& m) {
    const auto& p = std::get<LogisticParams>(m.params());
    std::vector<double> t{p.intercept};
    t.insert(t.end(), p.coef.begin(), p.coef.end());
    return t;
}


Dataset xor_data() {
    Dataset d;
    d.x = Matrix(8, 2);
    int idx = 0;
    for (int rep = 0; rep < 2; ++rep) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                d.x(idx, 0) = a;
                d.x(idx, 1) = b;
                d.y.push_back(a ^ b);
                d.w.push_back(1.0);
                ++idx;
            }
        }
    }
    return d;
}

}  // namespace

TEST_CASE("logistic gradient matches central differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto d = testutil::random_dataset(60, 4, seed);
        std::mt19937_64 rng(seed + 100);
        std::normal_distribution<double> normal;
        std::vector<double> theta(5), grad(5);
        for (auto& t : theta) t = normal(rng);
        logistic_objective(d, 0.7, theta, grad);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto plus = theta, minus = theta;
            const double h = 1e-5;
            plus[k] += h;
            minus[k] -= h;
            const double fd = (logistic_objective(d, 0.7, plus, {}) - logistic_objective(d, 0.7, minus, {})) / (2 * h);
            CHECK(oracle::rel_error(grad[k], fd) <= 1e-5);
        }
    }
}

TEST_CASE("logistic fit on separated data stays finite and monotone") {
    Dataset d;
    d.x = Matrix(6, 1);
    for (int i = 0; i < 6; ++i) {
        d.x(i, 0) = i;
        d.y.push_back(i >= 3);
        d.w.push_back(1.0);
    }
    const auto m = fit_logistic(d, 0.1);
    const auto t = logistic_theta(m);
    CHECK(std::isfinite(t[1]));
    CHECK(t[1] > 0);
    const auto p = m.predict_proba(d.x);
    for (int i = 1; i < 6; ++i) CHECK(p[i] > p[i - 1]);
}

TEST_CASE("logistic weights equal duplication") {
    auto d = testutil::random_dataset(40, 3, 5);
    Dataset weighted = d, dup;
    dup.x = Matrix(0, 3);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int w = d.y[i] ? 3 : 1;
        weighted.w[i] = w;
        for (int k = 0; k < w; ++k) idx.push_back(i);
    }
    dup = d.subset(idx);
    dup.w.assign(dup.size(), 1.0);
    const auto a = logistic_theta(fit_logistic(weighted, 1.0));
    const auto b = logistic_theta(fit_logistic(dup, 1.0));
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-8));
}

TEST_CASE("logistic at the zero vector returns sigmoid(intercept)") {
    auto d = testutil::random_dataset(50, 2, 2);
    const auto m = fit_logistic(d, 1.0);
    const std::vector<double> zero(2, 0.0);
    CHECK(m.predict_proba_row(zero) == doctest::Approx(sigmoid(logistic_theta(m)[0])).epsilon(1e-15));
}

TEST_CASE("cart: constant features give one leaf at the weighted base rate") {
    auto d = testutil::random_dataset(10, 2, 1);
    double pos = 0, tot = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        d.x(i, 0) = d.x(i, 1) = 1.0;
        pos += d.w[i] * d.y[i];
        tot += d.w[i];
    }
    const auto m = fit_cart(d, 3, 1.0);
    CHECK(std::get<CartParams>(m.params()).tree.nodes.size() == 1);
    CHECK(m.predict_proba_row(d.x.row(0)) == doctest::Approx(pos / tot).epsilon(1e-14));
}

TEST_CASE("cart: pure labels give one clipped leaf") {
    auto d = testutil::random_dataset(10, 2, 1);
    d.y.assign(10, 1);
    const auto m = fit_cart(d, 3, 1.0);
    CHECK(std::get<CartParams>(m.params()).tree.nodes.size() == 1);
    CHECK(m.predict_proba_row(d.x.row(0)) == doctest::Approx(1 - kProbEps).epsilon(1e-15));
}

TEST_CASE("single-class training data is rejected by the likelihood models") {
    auto d = testutil::random_dataset(10, 2, 1);
    d.y.assign(10, 1);
    CHECK_THROWS_AS(fit_logistic(d, 1.0), ews::Error);
}

TEST_CASE("cart separates XOR at depth 2") {
    const auto d = xor_data();
    const auto m = fit_cart(d, 2, 1.0);
    const auto p = m.predict_proba(d.x);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK((p[i] >= 0.5) == (d.y[i] == 1));
}

TEST_CASE("cart weights equal duplication") {
    auto d = testutil::random_dataset(60, 3, 9);
    Dataset weighted = d;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int w = d.y[i] ? 4 : 1;
        weighted.w[i] = w;
        for (int k = 0; k < w; ++k) idx.push_back(i);
    }
    Dataset dup = d.subset(idx);
    dup.w.assign(dup.size(), 1.0);
    const auto a = fit_cart(weighted, 4, 1.0);
    const auto b = fit_cart(dup, 4, 1.0);
    CHECK(a.predict_proba(d.x) == b.predict_proba(d.x));
}

TEST_CASE("degenerate forest equals cart") {
    auto d = testutil::random_dataset(80, 3, 4);
    const auto cart = fit_cart(d, 3, 1.0);
    const auto rf = fit_random_forest(d, 1, 3, 1.0, 11, false, 1.0);
    CHECK(cart.predict_proba(d.x) == rf.predict_proba(d.x));
}

TEST_CASE("forest is deterministic under its seed") {
    auto d = testutil::random_dataset(120, 4, 6);
    const auto a = fit_random_forest(d, 10, 3, 0.5, 99);
    const auto b = fit_random_forest(d, 10, 3, 0.5, 99);
    const auto c = fit_random_forest(d, 10, 3, 0.5, 100);
    CHECK(a.predict_proba(d.x) == b.predict_proba(d.x));
    CHECK(a.predict_proba(d.x) != c.predict_proba(d.x));
}

TEST_CASE("forest of identical trees predicts like one tree") {
    auto d = testutil::random_dataset(50, 2, 8);
    const auto cart = fit_cart(d, 3, 1.0);
    const auto& t = std::get<CartParams>(cart.params()).tree;
    ModelConfig cfg;
    cfg.family = Family::rf;
    Model rf(cfg, cart.schema(), 0, ForestParams{{t, t, t}});
    const auto a = cart.predict_proba(d.x), b = rf.predict_proba(d.x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("boosting: prior-only prediction is the weighted base rate") {
    auto d = testutil::random_dataset(40, 2, 3);
    double pos = 0, tot = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        pos += d.w[i] * d.y[i];
        tot += d.w[i];
    }
    const auto m = fit_gradient_boosting(d, 1, 0.1, 1, 1.0, 1);
    ModelConfig cfg;
    cfg.family = Family::gbt;
    Model prior_only(cfg, m.schema(), 0, BoostedParams{std::get<BoostedParams>(m.params()).prior, {}});
    for (double p : prior_only.predict_proba(d.x)) CHECK(p == doctest::Approx(pos / tot).epsilon(1e-12));
}

TEST_CASE("boosting: one depth-1 round matches hand-computed leaf values") {
    // Six rows, one feature; split must fall between 2 and 3.
    Dataset d;
    d.x = Matrix(6, 1);
    const int ys[6] = {0, 0, 1, 1, 1, 0};
    const double xs[6] = {0, 1, 2, 3, 4, 5};
    for (int i = 0; i < 6; ++i) {
        d.x(i, 0) = xs[i];
        d.y.push_back(ys[i]);
        d.w.push_back(1.0);
    }
    const double lr = 0.3, lambda = 1.0;
    const auto m = fit_gradient_boosting(d, 1, lr, 1, lambda, 1, 0.0);
    const auto& p = std::get<BoostedParams>(m.params());
    CHECK(p.prior == doctest::Approx(0.0).epsilon(1e-15));
    const auto& t = p.trees.at(0);
    REQUIRE(t.nodes.size() == 3);
    // At prior 0 every p = 0.5: g = p - y, h = 0.25.
    const double thr = t.nodes[0].threshold;
    double gl = 0, hl = 0, gr = 0, hr = 0;
    for (int i = 0; i < 6; ++i) {
        const double g = 0.5 - ys[i];
        if (xs[i] <= thr) {
            gl += g;
            hl += 0.25;
        } else {
            gr += g;
            hr += 0.25;
        }
    }
    CHECK(t.nodes[t.nodes[0].left].value == doctest::Approx(-lr * gl / (hl + lambda)).epsilon(1e-14));
    CHECK(t.nodes[t.nodes[0].right].value == doctest::Approx(-lr * gr / (hr + lambda)).epsilon(1e-14));
}

TEST_CASE("boosting training loss never increases") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto d = testutil::random_dataset(150, 3, seed);
        const auto m = fit_gradient_boosting(d, 30, 0.1, 3, 1.0, seed);
        const auto curve = boosting_loss_curve(m, d);
        for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1] + 1e-12);
    }
}

TEST_CASE("boosting weights equal duplication") {
    auto d = testutil::random_dataset(60, 2, 12);
    Dataset weighted = d;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int w = d.y[i] ? 2 : 1;
        weighted.w[i] = w;
        for (int k = 0; k < w; ++k) idx.push_back(i);
    }
    Dataset dup = d.subset(idx);
    dup.w.assign(dup.size(), 1.0);
    const auto a = fit_gradient_boosting(weighted, 10, 0.2, 2, 1.0, 1);
    const auto b = fit_gradient_boosting(dup, 10, 0.2, 2, 1.0, 1);
    const auto pa = a.predict_proba(d.x), pb = b.predict_proba(d.x);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == doctest::Approx(pb[i]).epsilon(1e-8));
}

TEST_CASE("boosting prediction equals an independent sum over trees") {
    auto d = testutil::random_dataset(100, 3, 21);
    const auto m = fit_gradient_boosting(d, 20, 0.1, 3, 1.0, 2);
    const auto& p = std::get<BoostedParams>(m.params());
    for (std::size_t i = 0; i < d.size(); ++i) {
        double s = p.prior;
        for (const auto& t : p.trees) {
            std::size_t node = 0;
            while (t.nodes[node].left >= 0) {
                node = d.x(i, t.nodes[node].feature) <= t.nodes[node].threshold ? t.nodes[node].left
                                                                                  : t.nodes[node].right;
            }
            s += t.nodes[node].value;
        }
        CHECK(std::abs(m.raw_output(d.x.row(i)) - s) <= 1e-12);
    }
}

TEST_CASE("neural net gradient matches central differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto d = testutil::random_dataset(40, 3, seed);
        const auto act = seed % 2 ? Activation::tanh : Activation::relu;
        auto net = init_neural_net(3, 4, act, 0.1, seed);
        auto theta = net.flatten();
        std::vector<double> grad(theta.size());
        neural_net_objective(d, 0.5, net, theta, grad);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            auto plus = theta, minus = theta;
            const double h = 1e-5;
            plus[k] += h;
            minus[k] -= h;
            const double fd =
                (neural_net_objective(d, 0.5, net, plus, {}) - neural_net_objective(d, 0.5, net, minus, {})) / (2 * h);
            CAPTURE(seed);
            CAPTURE(k);
            CHECK(oracle::rel_error(grad[k], fd) <= 1e-4);
        }
    }
}

TEST_CASE("neural net without hidden units reduces to logistic regression") {
    auto d = testutil::random_dataset(80, 3, 14);
    const auto lr = fit_logistic(d, 1.0);
    const auto nn = fit_neural_net(d, 0, 1.0, 20000, 2.0, 3);
    const auto& p = std::get<NeuralNetParams>(nn.params());
    const auto t = logistic_theta(lr);
    double dist = (p.b2 - t[0]) * (p.b2 - t[0]);
    for (std::size_t j = 0; j < 3; ++j) dist += (p.w2[j] - t[j + 1]) * (p.w2[j] - t[j + 1]);
    CHECK(std::sqrt(dist) <= 1e-3);
}

TEST_CASE("neural net is deterministic and flags divergence") {
    auto d = testutil::random_dataset(60, 3, 15);
    const auto a = fit_neural_net(d, 4, 0.1, 50, 0.5, 8);
    const auto b = fit_neural_net(d, 4, 0.1, 50, 0.5, 8);
    CHECK(std::get<NeuralNetParams>(a.params()).flatten() == std::get<NeuralNetParams>(b.params()).flatten());
    CHECK_THROWS_AS(fit_neural_net(d, 4, 0.0, 50, 1e6, 8), Error);
}

TEST_CASE("probabilities stay inside the clipping band") {
    auto d = testutil::random_dataset(100, 3, 16, 8.0);
    for (auto fam : {Family::logit, Family::cart, Family::rf, Family::gbt, Family::nn}) {
        ModelConfig c;
        c.family = fam;
        c.l2 = 0.01;
        c.n_trees = 5;
        c.n_rounds = 50;
        c.learning_rate = 0.5;
        c.epochs = 50;
        const auto m = fit_model(c, d, 1);
        for (double p : m.predict_proba(d.x)) {
            CHECK(p >= kProbEps);
            CHECK(p <= 1 - kProbEps);
        }
    }
}

TEST_CASE("schema mismatch is rejected") {
    auto d = testutil::random_dataset(30, 3, 1);
    const auto m = fit_logistic(d, 1.0);
    CHECK_THROWS_AS(m.predict_proba(Matrix(2, 4)), Error);
    const std::vector<std::string> wrong{"a", "b", "c"};
    d.feature_names = {"f0", "f1", "f2"};
    CHECK_NOTHROW(m.check_schema(3, d.feature_names));
    CHECK_THROWS_AS(m.check_schema(3, wrong), Error);
}

TEST_CASE("model documents round-trip bit-exactly") {
    auto d = testutil::random_dataset(80, 3, 17);
    for (auto fam : {Family::logit, Family::cart, Family::rf, Family::gbt, Family::nn}) {
        ModelConfig c;
        c.family = fam;
        c.n_trees = 4;
        c.n_rounds = 5;
        c.epochs = 20;
        auto m = fit_model(c, d, 3);
        m.set_background_mean({0.1, 0.2, 1.0 / 3.0});
        const auto text = to_json(m);
        const auto back = from_json(text);
        CHECK(to_json(back) == text);
        CHECK(back.predict_proba(d.x) == m.predict_proba(d.x));
        CHECK(back.background_mean() == m.background_mean());
    }
    CHECK_THROWS_AS(from_json("{\"schema\":\"other\"}"), Error);
}
