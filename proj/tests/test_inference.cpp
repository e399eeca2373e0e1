#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "ews/common.hpp"
#include "ews/inference.hpp"

using namespace ews;
using namespace ews::inference;

TEST_CASE("paired t-test textbook case") {
    const std::vector<double> d{1, 2, 3, 4};
    const auto r = paired_t_test(d);
    CHECK(std::abs(r.t - 3.873) <= 0.001);
    CHECK(std::abs(r.p - 0.0305) <= 0.001);
    CHECK(r.df == 3);
    const std::vector<double> neg{-1, -2, -3, -4};
    const auto n = paired_t_test(neg);
    CHECK(n.t == -r.t);
    CHECK(n.p == doctest::Approx(r.p).epsilon(1e-15));
}

TEST_CASE("t-test degenerate spreads") {
    const std::vector<double> zeros{0, 0, 0};
    CHECK(paired_t_test(zeros).t == 0.0);
    CHECK(paired_t_test(zeros).p == 1.0);
    const std::vector<double> same{0.2, 0.2};
    CHECK(paired_t_test(same).p == 0.0);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(paired_t_test(one), Error);
}

TEST_CASE("t distribution agrees with a reference implementation") {
    for (double df : {1.0, 2.0, 3.0, 7.5, 13.0, 30.0, 200.0}) {
        boost::math::students_t dist(df);
        for (double t : {-40.0, -6.0, -2.1, -0.3, 0.0, 0.7, 1.96, 4.5, 25.0}) {
            CHECK(std::abs(student_t_cdf(t, df) - boost::math::cdf(dist, t)) <= 1e-12);
        }
    }
    CHECK(incomplete_beta(2, 3, 0) == 0.0);
    CHECK(incomplete_beta(2, 3, 1) == 1.0);
    CHECK(incomplete_beta(1, 1, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("bootstrap on two deltas matches exact enumeration") {
    // Resamples of {-1, 3}: means -1, 1, 1, 3 with probability 1/4 each.
    const std::vector<double> d{-1, 3};
    const auto r = paired_bootstrap(d, 1000000, 17);
    CHECK(std::abs(r.p - 0.5) <= 0.01);
    CHECK(std::abs(r.ci_low - (-1.0)) <= 0.01);
    CHECK(std::abs(r.ci_high - 3.0) <= 0.01);
    // All means positive: the floor applies.
    const std::vector<double> pos{1, 3};
    CHECK(paired_bootstrap(pos, 1000, 17).p == doctest::Approx(2.0 / 1000));
}

TEST_CASE("bootstrap degenerate, deterministic, and covering the mean") {
    const std::vector<double> same{0.3, 0.3, 0.3};
    const auto r = paired_bootstrap(same, 500, 1);
    CHECK(r.ci_low == 0.3);
    CHECK(r.ci_high == 0.3);
    CHECK(r.p == doctest::Approx(2.0 / 500));
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.01, 0.05);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> d(2 + rng() % 12);
        for (auto& v : d) v = g(rng);
        const auto a = paired_bootstrap(d, 200, trial);
        const auto b = paired_bootstrap(d, 200, trial);
        CHECK(a.p == b.p);
        CHECK(a.ci_low == b.ci_low);
        double mean = 0;
        for (double v : d) mean += v;
        mean /= d.size();
        CHECK(a.ci_low <= mean);
        CHECK(a.ci_high >= mean);
    }
}

TEST_CASE("feature-set comparison signs and tags") {
    std::vector<metrics::MetricReport> with, without;
    for (int k = 0; k < 12; ++k) {
        // with-AI arm: 3 more true positives out of 100 positives, fewer misses.
        with.push_back(metrics::metrics_from_counts(60 + k % 3 + 3, 800, 100, 37 - k % 3));
        without.push_back(metrics::metrics_from_counts(60 + k % 3, 800, 100, 40 - k % 3));
    }
    const auto cmp = compare_feature_sets(with, without, 5000, 3);
    auto find = [&](const std::string& m) {
        for (const auto& c : cmp) {
            if (c.metric == m) return c;
        }
        FAIL("missing " << m);
        return PairedComparison{};
    };
    const auto recall = find("recall");
    CHECK(recall.mean_delta == doctest::Approx(0.03));
    CHECK(recall.direction == "AI better");
    CHECK(recall.p_boot < 0.01);
    CHECK(recall.tested);
    const auto t2 = find("type2");
    CHECK(t2.mean_delta == doctest::Approx(0.03));
    CHECK(t2.direction == "AI reduces Type II");
    CHECK(lower_is_better("type1"));
    CHECK_FALSE(lower_is_better("auc"));

    const auto same = compare_feature_sets(with, with, 1000, 3);
    for (const auto& c : same) {
        CHECK(c.mean_delta == 0.0);
        CHECK(c.direction == "neutral");
        if (c.tested) CHECK(c.p_t == 1.0);
    }
    std::vector<metrics::MetricReport> shorter(with.begin(), with.end() - 1);
    CHECK_THROWS_AS(compare_feature_sets(with, shorter, 100, 1), Error);
}
