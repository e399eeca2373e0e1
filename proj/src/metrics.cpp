#include "ews/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ews/common.hpp"

namespace ews::metrics {

double compute_auc(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw Error("labels and scores differ in length");
    const std::size_t n = labels.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[idx[k]]) {
                rank_sum += avg_rank;
                ++n1;
            }
        }
        i = j;
    }
    const std::size_t n0 = n - n1;
    if (n1 == 0 || n0 == 0) throw Error("AUC needs both classes");
    const double u = rank_sum - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
    return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"auc",  "accuracy", "recall", "specificity", "precision",
                                                   "f1",   "gmean",    "type1",  "type2",       "tp",
                                                   "tn",   "fp",       "fn"};
    return names;
}

std::optional<double> metric_value(const MetricReport& r, std::string_view name) {
    if (name == "auc") return r.auc;
    if (name == "accuracy") return r.accuracy;
    if (name == "recall") return r.recall;
    if (name == "specificity") return r.specificity;
    if (name == "precision") return r.precision;
    if (name == "f1") return r.f1;
    if (name == "gmean") return r.gmean;
    if (name == "type1") return r.type1;
    if (name == "type2") return r.type2;
    if (name == "tp") return r.tp;
    if (name == "tn") return r.tn;
    if (name == "fp") return r.fp;
    if (name == "fn") return r.fn;
    throw Error("unknown metric '" + std::string(name) + "'");
}

namespace {
std::optional<double> ratio(double num, double den) {
    if (!(den > 0)) return std::nullopt;
    return num / den;
}
}  // namespace

MetricReport metrics_from_counts(double tp, double tn, double fp, double fn) {
    MetricReport r;
    r.tp = tp;
    r.tn = tn;
    r.fp = fp;
    r.fn = fn;
    r.accuracy = ratio(tp + tn, tp + tn + fp + fn);
    r.recall = ratio(tp, tp + fn);
    r.specificity = ratio(tn, tn + fp);
    r.precision = ratio(tp, tp + fp);
    r.f1 = ratio(2 * tp, 2 * tp + fp + fn);
    if (r.recall && r.specificity) r.gmean = std::sqrt(*r.recall * *r.specificity);
    if (r.specificity) r.type1 = ratio(fp, tn + fp);
    if (r.recall) r.type2 = ratio(fn, tp + fn);
    return r;
}

MetricReport compute_metrics(std::span<const int> labels, std::span<const double> probabilities, double threshold) {
    if (labels.size() != probabilities.size()) throw Error("labels and probabilities differ in length");
    double tp = 0, tn = 0, fp = 0, fn = 0;
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = probabilities[i];
        if (!(p >= 0.0 && p <= 1.0)) throw Error("probability outside [0, 1]");
        const bool predicted = p >= threshold;
        if (labels[i]) {
            pos = true;
            (predicted ? tp : fn) += 1;
        } else {
            neg = true;
            (predicted ? fp : tn) += 1;
        }
    }
    MetricReport r = metrics_from_counts(tp, tn, fp, fn);
    if (pos && neg) r.auc = compute_auc(labels, probabilities);
    return r;
}

AveragedReport average_reports(std::span<const MetricReport> reports) {
    if (reports.empty()) throw Error("cannot average zero reports");
    AveragedReport out;
    out.n = reports.size();
    auto avg = [&](auto member) -> std::optional<double> {
        double s = 0;
        std::size_t k = 0;
        for (const auto& r : reports) {
            if (const auto& v = r.*member) {
                s += *v;
                ++k;
            }
        }
        if (k == 0) return std::nullopt;
        return s / static_cast<double>(k);
    };
    auto avg_count = [&](double MetricReport::*member) {
        double s = 0;
        for (const auto& r : reports) s += r.*member;
        return s / static_cast<double>(reports.size());
    };
    MetricReport& m = out.mean;
    m.tp = avg_count(&MetricReport::tp);
    m.tn = avg_count(&MetricReport::tn);
    m.fp = avg_count(&MetricReport::fp);
    m.fn = avg_count(&MetricReport::fn);
    m.auc = avg(&MetricReport::auc);
    m.accuracy = avg(&MetricReport::accuracy);
    m.recall = avg(&MetricReport::recall);
    m.specificity = avg(&MetricReport::specificity);
    m.precision = avg(&MetricReport::precision);
    m.f1 = avg(&MetricReport::f1);
    m.gmean = avg(&MetricReport::gmean);
    m.type1 = avg(&MetricReport::type1);
    m.type2 = avg(&MetricReport::type2);
    out.from_mean_counts = metrics_from_counts(m.tp, m.tn, m.fp, m.fn);
    out.from_mean_counts.auc = m.auc;
    return out;
}

}  // namespace ews::metrics
