#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ews/dataset.hpp"
#include "ews/models.hpp"
#include "ews/panel.hpp"

namespace ews::protocol {

struct Window {
    int start = 0;
    int end = 0;
    bool operator==(const Window&) const = default;
};

// Training windows [start_k, end_year] sharing one test year.
struct SplitPlan {
    int test_year = 0;
    std::vector<int> start_years;
    int end_year = 0;

    std::size_t size() const { return start_years.size(); }
    Window window(std::size_t k) const { return {start_years.at(k), end_year}; }
};

SplitPlan make_split_plan(int test_year, int earliest_start, int end_year);

// Linear interpolation between order statistics; q in [0, 100].
double percentile(std::span<const double> sorted, double q);

struct FeatureStats {
    double p1 = 0, p99 = 0, mean = 0, sd = 0;
    bool winsorized = true;
    bool degenerate() const { return sd == 0.0; }
    bool operator==(const FeatureStats&) const = default;
};

struct WindowStats {
    std::vector<FeatureStats> features;
    bool operator==(const WindowStats&) const = default;
};

// Percentiles, then mean and sd (n - 1) of the clamped training values.
// Columns with winsorize[j] == false skip clamping.
WindowStats fit_window_stats(const Matrix& train, const std::vector<bool>& winsorize = {});

// Clamp to [p1, p99] where enabled, then z-score; degenerate columns map to 0.
Matrix apply_preprocessing(const Matrix& x, const WindowStats& stats);

struct ClassWeights {
    double w1 = 1;  // distressed
    double w0 = 1;  // healthy
    bool operator==(const ClassWeights&) const = default;
};

ClassWeights compute_class_weights(std::span<const int> labels);
std::vector<double> expand_weights(std::span<const int> labels, const ClassWeights& w);

struct FoldAssignment {
    int k = 0;
    std::vector<int> fold;  // per row
    std::vector<std::string> warnings;
    bool operator==(const FoldAssignment& o) const { return k == o.k && fold == o.fold; }
};

// Positives and negatives are shuffled separately and dealt round-robin, so
// per-fold positive counts differ by at most one. k drops to the positive
// count (minimum 2) when there are fewer positives than folds.
FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

struct CvRow {
    models::ModelConfig config;
    double mean_auc = 0;
    std::vector<double> fold_auc;
    std::string error;  // non-empty when every fold failed
};

struct Selection {
    models::ModelConfig chosen;
    std::vector<CvRow> table;
    int folds = 0;
    std::vector<std::string> warnings;
};

// Grid search by mean fold AUC with class weights refit inside each fold.
// Ties go to the config with the smaller capacity().
Selection select_hyperparameters(const Dataset& train, const std::vector<models::ModelConfig>& grid, int k,
                                 std::uint64_t seed);

struct PreprocessOptions {
    bool winsorize_ai = true;
};

// Design matrices for one window and feature set. Statistics, weights and
// folds see training rows only.
struct WindowData {
    Window window;
    int test_year = 0;
    Dataset train;  // standardized, class-weighted
    Dataset test;   // standardized, unit weights
    std::vector<std::string> test_firms;
    WindowStats stats;
    ClassWeights weights;
    std::size_t n_train_pos = 0, n_train_neg = 0, n_test_pos = 0, n_test_neg = 0;
};

WindowData build_window(std::span<const panel::LabeledInstance> instances, Window window, int test_year,
                        panel::FeatureSet feature_set, const PreprocessOptions& options = {});

// Rows of `instances` with label_year inside [first, last].
Dataset raw_dataset(std::span<const panel::LabeledInstance> instances, int first, int last,
                    panel::FeatureSet feature_set, std::vector<std::string>* firms = nullptr);

}  // namespace ews::protocol
