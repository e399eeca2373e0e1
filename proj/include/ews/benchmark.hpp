#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ews/explain.hpp"
#include "ews/imputation.hpp"
#include "ews/inference.hpp"
#include "ews/metrics.hpp"
#include "ews/protocol.hpp"
#include "ews/run_config.hpp"

namespace ews::bench {

inline constexpr std::string_view kVersion = "1.0.0";

struct LoadedPanel {
    panel::Panel panel;
    panel::BuildReport build;
    std::map<std::string, std::string> digests;  // input name -> fnv1a64 hex
};

// Reads the configured inputs (or runs the generator) and builds the panel.
LoadedPanel load_panel(const RunConfig& config);

struct WindowInfo {
    std::size_t index = 0;
    protocol::Window window;
    panel::FeatureSet feature_set = panel::FeatureSet::with_ai;
    bool ok = false;
    std::string error;
    std::size_t n_train = 0, n_train_pos = 0, n_test = 0, n_test_pos = 0;
    protocol::ClassWeights weights;
    std::size_t degenerate_features = 0;
};

struct TaskResult {
    std::size_t window = 0;
    models::Family family = models::Family::logit;
    panel::FeatureSet feature_set = panel::FeatureSet::with_ai;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    protocol::Selection selection;
    metrics::MetricReport report;
    std::string model_json;
    std::vector<std::size_t> explained_rows;
    std::vector<explain::ShapExplanation> explanations;
    explain::Importance importance;
    double seconds = 0;
};

struct FamilySummary {
    models::Family family;
    panel::FeatureSet feature_set;
    metrics::AveragedReport averaged;
};

struct BenchmarkResult {
    RunConfig config;
    protocol::SplitPlan plan;
    LoadedPanel input;
    panel::ImputationReport imputation;
    bool imputed = false;
    panel::LabelingResult labels;
    std::vector<WindowInfo> windows;  // plan.size() x feature_sets
    std::vector<TaskResult> tasks;    // window-major, then family, then feature set
    std::vector<FamilySummary> summaries;
    std::map<models::Family, std::vector<inference::PairedComparison>> comparisons;
    std::map<models::Family, std::map<panel::FeatureSet, std::vector<explain::StabilityRow>>> stability;
    // Standardized test rows of the first split per feature set, for explanation requests.
    std::map<panel::FeatureSet, protocol::WindowData> first_split;
    std::vector<std::string> warnings;
    double seconds = 0;

    std::size_t completed_windows() const;
};

// Called after each task with (task, finished count, total); calls are
// serialized but may come from worker threads.
using ProgressFn = std::function<void(const TaskResult&, std::size_t, std::size_t)>;

BenchmarkResult run_benchmark(const RunConfig& config, LoadedPanel input, const ProgressFn& progress = {});

// Writes every output file in a fixed order. Files are byte-identical for
// identical configs whatever the worker count.
void write_outputs(const BenchmarkResult& result, const std::filesystem::path& out_dir);

// Comparisons recomputed from a results.csv written by write_outputs.
std::string compare_results_file(const std::filesystem::path& results_csv, int replicates, std::uint64_t seed);

std::string format_comparisons(const std::map<models::Family, std::vector<inference::PairedComparison>>& comps,
                               int replicates);

std::string format_summary(const panel::PanelSummary& summary);

}  // namespace ews::bench
