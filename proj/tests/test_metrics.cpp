#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ews/common.hpp"
#include "ews/metrics.hpp"

using namespace ews;
using namespace ews::metrics;

namespace {

struct Case {
    std::vector<int> y;
    std::vector<double> s;
};

Case random_case(std::mt19937_64& rng, std::size_t n, bool ties) {
    Case c;
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        c.y.push_back(u(rng) < 0.3);
        c.s.push_back(ties ? std::floor(u(rng) * 5) / 5 : u(rng));
    }
    c.y[0] = 1;
    c.y[1] = 0;
    return c;
}

}  // namespace

TEST_CASE("AUC basics") {
    CHECK(compute_auc(std::vector<int>{0, 0, 1, 1}, std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 1.0);
    CHECK(compute_auc(std::vector<int>{0, 1, 0, 1}, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
    CHECK_THROWS_AS(compute_auc(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.2}), Error);
    const std::vector<int> y{1, 0, 1, 1, 0, 0, 1, 0};
    const std::vector<double> s{0.9, 0.9, 0.4, 0.7, 0.3, 0.7, 0.2, 0.1};
    CHECK(compute_auc(y, s) == doctest::Approx(oracle::pair_auc(y, s)).epsilon(1e-15));
}

TEST_CASE("AUC equals pair counting on random cases") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = random_case(rng, 2 + rng() % 199, trial % 2 == 0);
        CHECK(std::abs(compute_auc(c.y, c.s) - oracle::pair_auc(c.y, c.s)) <= 1e-12);
    }
}

TEST_CASE("AUC is invariant under monotone transforms") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = random_case(rng, 60, trial % 2 == 0);
        const double a = compute_auc(c.y, c.s);
        for (auto& v : c.s) v = std::exp(3 * v) - 7;
        CHECK(compute_auc(c.y, c.s) == a);
    }
}

TEST_CASE("averaged counts from the boosted-tree row") {
    const auto r = metrics_from_counts(38.50, 3253.21, 683.79, 12.50);
    CHECK(std::abs(*r.recall - 0.755) <= 0.001);
    CHECK(std::abs(*r.specificity - 0.826) <= 0.001);
    CHECK(std::abs(*r.accuracy - 0.825) <= 0.001);
    // The geometric mean of these two rates lands at 0.7898.
    CHECK(*r.gmean == doctest::Approx(std::sqrt(*r.recall * *r.specificity)).epsilon(1e-15));
}

TEST_CASE("perfect classifier rates") {
    const auto r = metrics_from_counts(1, 1, 0, 0);
    for (const char* m : {"accuracy", "recall", "specificity", "precision", "f1", "gmean"}) {
        CHECK(*metric_value(r, m) == 1.0);
    }
    CHECK(*r.type1 == 0.0);
    CHECK(*r.type2 == 0.0);
}

TEST_CASE("threshold metrics equal a naive counter") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<int> y;
        std::vector<double> p;
        for (std::size_t i = 0; i < n; ++i) {
            y.push_back(u(rng) < 0.4);
            p.push_back(trial % 3 == 0 ? std::round(u(rng) * 4) / 4 : u(rng));
        }
        double tp = 0, tn = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool pred = !(p[i] < 0.5);
            if (y[i] && pred) tp++;
            if (y[i] && !pred) fn++;
            if (!y[i] && pred) fp++;
            if (!y[i] && !pred) tn++;
        }
        const auto r = compute_metrics(y, p);
        CHECK(r.tp == tp);
        CHECK(r.tn == tn);
        CHECK(r.fp == fp);
        CHECK(r.fn == fn);
        CHECK(*r.accuracy == doctest::Approx((tp + tn) / n));
        if (tp + fn > 0) {
            CHECK(*r.recall == doctest::Approx(tp / (tp + fn)));
            CHECK(*r.recall + *r.type2 == 1.0);
        } else {
            CHECK_FALSE(r.recall.has_value());
        }
        if (tn + fp > 0) {
            CHECK(*r.specificity + *r.type1 == 1.0);
        } else {
            CHECK_FALSE(r.specificity.has_value());
        }
        if (2 * tp + fp + fn > 0) CHECK(*r.f1 == doctest::Approx(2 * tp / (2 * tp + fp + fn)));
    }
}

TEST_CASE("averaging reports") {
    auto a = metrics_from_counts(7, 10, 0, 3);
    auto b = metrics_from_counts(8, 10, 0, 2);
    const std::vector<MetricReport> one{a};
    const auto single = average_reports(one);
    CHECK(single.n == 1);
    CHECK(*single.mean.recall == *a.recall);
    CHECK(single.mean.tp == a.tp);
    const std::vector<MetricReport> two{a, b};
    const auto avg = average_reports(two);
    CHECK(*avg.mean.recall == doctest::Approx(0.75));
    CHECK(avg.mean.tp == 7.5);
    CHECK(*avg.from_mean_counts.recall == doctest::Approx(7.5 / 10));
    // An absent rate is averaged over the reports that have it.
    auto c = metrics_from_counts(0, 5, 1, 0);
    const std::vector<MetricReport> mixed{a, c};
    CHECK(*average_reports(mixed).mean.recall == *a.recall);
}

TEST_CASE("metric names cover every rate") {
    for (const auto& name : metric_names()) {
        if (name == "auc" || name == "tp" || name == "tn" || name == "fp" || name == "fn") continue;
        CHECK(metric_value(metrics_from_counts(3, 4, 1, 2), name).has_value());
    }
}
