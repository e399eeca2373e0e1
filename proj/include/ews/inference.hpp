#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ews/metrics.hpp"

namespace ews::inference {

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);
// Student-t cumulative distribution with df degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
    double mean = 0;
    double t = 0;
    double p = 1;  // two-sided
    double df = 0;
};

// One-sample t-test on paired deltas. With zero spread, p is 0 for a
// nonzero mean and 1 otherwise.
TTestResult paired_t_test(std::span<const double> deltas);

struct BootstrapResult {
    double ci_low = 0;
    double ci_high = 0;
    double p = 1;  // two-sided, floored at 2/B
};

inline constexpr int kDefaultBootstrap = 10000;

// Percentile bootstrap over split indices.
BootstrapResult paired_bootstrap(std::span<const double> deltas, int replicates, std::uint64_t seed);

struct PairedComparison {
    std::string metric;
    std::vector<double> deltas;
    double mean_delta = 0;
    double ci_low = 0, ci_high = 0;
    double t_stat = 0;
    double p_t = 1;
    double p_boot = 1;
    std::string direction;
    bool tested = false;  // false when fewer than two paired splits remain
};

// Metrics compared by default, quality measures first.
const std::vector<std::string>& compared_metrics();
// True for error rates, whose deltas are without - with.
bool lower_is_better(const std::string& metric);
std::string direction_tag(const std::string& metric, double mean_delta);

// Split-aligned with/without reports. Splits where either arm lacks the
// metric are left out of that metric's deltas.
std::vector<PairedComparison> compare_feature_sets(std::span<const metrics::MetricReport> with_ai,
                                                   std::span<const metrics::MetricReport> without_ai,
                                                   int replicates, std::uint64_t seed,
                                                   const std::vector<std::string>& metrics = compared_metrics());

}  // namespace ews::inference
