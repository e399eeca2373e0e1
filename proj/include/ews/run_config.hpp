#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ews/imputation.hpp"
#include "ews/models.hpp"
#include "ews/panel.hpp"
#include "ews/synth.hpp"

namespace ews::bench {

enum class ImputationMode { none, global, per_window };

struct RunConfig {
    // Input: a panel file, or financial + AI feature files, or an inline generator.
    std::filesystem::path panel_path;
    std::filesystem::path financial_path;
    std::filesystem::path ai_path;
    std::optional<synth::GeneratorConfig> generator;

    int test_year = 2023;
    int earliest_start = 2009;
    int end_year = 0;  // 0 = test_year - 1
    int horizon = kDefaultHorizon;

    std::vector<models::Family> families{models::Family::logit, models::Family::rf, models::Family::gbt,
                                         models::Family::nn};
    std::map<models::Family, std::vector<models::ModelConfig>> grids;
    std::vector<panel::FeatureSet> feature_sets{panel::FeatureSet::with_ai, panel::FeatureSet::without_ai};

    int cv_folds = 10;
    std::uint64_t seed = 20240601;
    int bootstrap = 10000;
    double threshold = 0.5;
    bool winsorize_ai = true;

    ImputationMode imputation = ImputationMode::global;
    panel::ImputationConfig imputation_config;

    int explain_rows = 200;        // test rows explained per split; 0 disables explanations
    std::string save_models = "first";  // none | first | all
    bool record_timing = false;
    int jobs = 1;

    int effective_end_year() const { return end_year == 0 ? test_year - 1 : end_year; }
    const std::vector<models::ModelConfig>& grid(models::Family f) const;
    void validate() const;
};

// Default grids; unreported in the source material, so these are guesses.
std::vector<models::ModelConfig> default_grid(models::Family family);

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
// Canonical JSON snapshot (paths as given, every field explicit).
std::string run_config_to_json(const RunConfig& config);

std::string_view to_string(ImputationMode m);
ImputationMode parse_imputation_mode(std::string_view s);

}  // namespace ews::bench
