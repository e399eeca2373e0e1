#include "ews/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ews/common.hpp"
#include "ews/hash.hpp"

namespace ews::inference {

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0 && b > 0)) throw Error("incomplete beta needs positive shape parameters");
    if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta argument outside [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0)) throw Error("degrees of freedom must be positive");
    if (std::isnan(t)) return t;
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t > 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> deltas) {
    const std::size_t n = deltas.size();
    if (n < 2) throw Error("paired t-test needs at least two deltas");
    TTestResult r;
    r.df = static_cast<double>(n - 1);
    r.mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double d : deltas) ss += (d - r.mean) * (d - r.mean);
    const double sd = std::sqrt(ss / r.df);
    if (sd == 0.0) {
        if (r.mean == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean);
            r.p = 0.0;
        }
        return r;
    }
    r.t = r.mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = std::min(1.0, incomplete_beta(0.5 * r.df, 0.5, r.df / (r.df + r.t * r.t)));
    return r;
}

namespace {
double type7(const std::vector<double>& sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}
}  // namespace

BootstrapResult paired_bootstrap(std::span<const double> deltas, int replicates, std::uint64_t seed) {
    const std::size_t n = deltas.size();
    if (n < 2) throw Error("paired bootstrap needs at least two deltas");
    if (replicates < 1) throw Error("bootstrap needs at least one replicate");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> means(static_cast<std::size_t>(replicates));
    std::size_t le = 0, ge = 0;
    for (auto& m : means) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += deltas[pick(rng)];
        m = s / static_cast<double>(n);
        if (m <= 0) ++le;
        if (m >= 0) ++ge;
    }
    std::sort(means.begin(), means.end());
    BootstrapResult r;
    r.ci_low = type7(means, 0.025);
    r.ci_high = type7(means, 0.975);
    const double b = replicates;
    const double p = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) / b;
    r.p = std::clamp(p, std::min(1.0, 2.0 / b), 1.0);
    return r;
}

const std::vector<std::string>& compared_metrics() {
    static const std::vector<std::string> names = {"auc",       "accuracy", "recall", "specificity",
                                                   "precision", "f1",       "gmean",  "type1",
                                                   "type2"};
    return names;
}

bool lower_is_better(const std::string& metric) { return metric == "type1" || metric == "type2"; }

std::string direction_tag(const std::string& metric, double mean_delta) {
    if (mean_delta == 0.0 || std::isnan(mean_delta)) return "neutral";
    if (metric == "type1") return mean_delta > 0 ? "AI reduces Type I" : "AI increases Type I";
    if (metric == "type2") return mean_delta > 0 ? "AI reduces Type II" : "AI increases Type II";
    return mean_delta > 0 ? "AI better" : "AI worse";
}

std::vector<PairedComparison> compare_feature_sets(std::span<const metrics::MetricReport> with_ai,
                                                   std::span<const metrics::MetricReport> without_ai,
                                                   int replicates, std::uint64_t seed,
                                                   const std::vector<std::string>& names) {
    if (with_ai.size() != without_ai.size()) throw Error("with-AI and without-AI split sets differ");
    std::vector<PairedComparison> out;
    std::uint64_t metric_index = 0;
    for (const auto& name : names) {
        PairedComparison c;
        c.metric = name;
        for (std::size_t s = 0; s < with_ai.size(); ++s) {
            const auto a = metrics::metric_value(with_ai[s], name);
            const auto b = metrics::metric_value(without_ai[s], name);
            if (!a || !b) continue;
            c.deltas.push_back(lower_is_better(name) ? *b - *a : *a - *b);
        }
        if (!c.deltas.empty()) {
            c.mean_delta = std::accumulate(c.deltas.begin(), c.deltas.end(), 0.0) /
                           static_cast<double>(c.deltas.size());
        }
        if (c.deltas.size() >= 2) {
            const auto t = paired_t_test(c.deltas);
            const auto bs = paired_bootstrap(c.deltas, replicates, derive_seed(seed, {metric_index}));
            c.t_stat = t.t;
            c.p_t = t.p;
            c.ci_low = bs.ci_low;
            c.ci_high = bs.ci_high;
            c.p_boot = bs.p;
            c.tested = true;
        } else {
            c.t_stat = c.ci_low = c.ci_high = std::numeric_limits<double>::quiet_NaN();
            c.p_t = c.p_boot = std::numeric_limits<double>::quiet_NaN();
        }
        c.direction = direction_tag(name, c.mean_delta);
        out.push_back(std::move(c));
        ++metric_index;
    }
    return out;
}

}  // namespace ews::inference
