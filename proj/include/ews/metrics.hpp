#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ews::metrics {

// Mann-Whitney AUC with average ranks for ties. Throws unless both classes
// are present.
double compute_auc(std::span<const int> labels, std::span<const double> scores);

// Threshold metrics. Rates whose denominator is zero are absent.
struct MetricReport {
    std::optional<double> auc;
    std::optional<double> accuracy;
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> f1;
    std::optional<double> gmean;
    std::optional<double> type1;  // false-positive rate
    std::optional<double> type2;  // false-negative rate
    double tp = 0, tn = 0, fp = 0, fn = 0;
};

// Names in output order; counts last.
const std::vector<std::string>& metric_names();
std::optional<double> metric_value(const MetricReport& r, std::string_view name);

MetricReport metrics_from_counts(double tp, double tn, double fp, double fn);

// Rows with probability >= threshold are predicted distressed.
MetricReport compute_metrics(std::span<const int> labels, std::span<const double> probabilities,
                             double threshold = 0.5);

struct AveragedReport {
    std::size_t n = 0;
    MetricReport mean;              // every field averaged on its own
    MetricReport from_mean_counts;  // rates recomputed from the averaged counts
};

// Absent rates are averaged over the reports that have them.
AveragedReport average_reports(std::span<const MetricReport> reports);

}  // namespace ews::metrics
