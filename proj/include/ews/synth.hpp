#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ews/panel.hpp"

namespace ews::synth {

// Calibration defaults. Values marked "target" track published aggregates;
// the rest are uncalibrated choices.
struct GeneratorConfig {
    int n_firms = 2300;            // non-financial firms
    int n_financial_firms = 60;    // emitted, then excluded by build_panel
    int first_year = 2008;
    int last_year = 2023;
    int n_rows = 32593;            // target: emitted non-financial firm-years (0 = full panel)
    double distress_rate = 0.0326; // target: share of firm-years flagged
    // Adoption ramp: prevalence(t) = ceiling * sigmoid(slope * (t - midpoint)).
    double ai_midpoint = 2017.5;
    double ai_slope = 0.35;
    double ai_ceiling = 0.65;      // gives about half the firms active in 2020-2021 (target)
    // Correlation between firm frailty and the adoption threshold; fragile
    // firms adopt later, healthy ones earlier.
    double adoption_frailty_link = 0.7;
    // Log-odds reduction in onset hazard per unit of AI intensity above the
    // same year's expected level.
    double signal_strength = 2.5;
    // Onset log-odds slopes on standardized X01..X05 observed two years earlier.
    std::array<double, panel::kNumFinancial> financial_effects{-0.3, -0.5, -0.6, -0.5, -0.1};
    double frailty_effect = 0.6;   // unobserved firm-level persistence
    double persistence = 0.5;      // per-year exit probability from ST, mean spell 2 years
    double risk_autocorrelation = 0.7;
    double missing_rate = 0.02;    // MCAR holes in financial columns
    std::uint64_t seed = 42;

    void validate() const;
};

struct GroundTruth {
    double intercept = 0;  // calibrated onset intercept
    std::array<double, panel::kNumFinancial> financial_effects{};
    double frailty_effect = 0;
    double signal_strength = 0;
    // Per emitted row, aligned with SynthData::financial; NaN log-odds for
    // financial-industry rows. Counts cover non-financial rows only.
    std::vector<double> onset_log_odds;
    std::vector<bool> onset;
    std::size_t n_rows = 0;
    std::size_t n_distressed_rows = 0;
};

struct SynthData {
    std::vector<panel::FinancialRow> financial;
    std::vector<panel::AiFeatureRow> ai;
    GroundTruth truth;
};

SynthData generate(const GeneratorConfig& config);

// Runs the generated rows through build_panel.
panel::Panel to_panel(const SynthData& data);

// Writes financial.csv, ai_features.csv and ground_truth.csv into dir.
void write_outputs(const SynthData& data, const GeneratorConfig& config, const std::filesystem::path& dir);

// Emits one small text document per firm-year (first `limit` adopter rows)
// plus a patent file, so the extraction pipeline can be run on them. The
// documents plant exactly the generated AI term counts.
void write_text_corpus(const SynthData& data, const std::filesystem::path& dir, std::size_t limit);

std::string config_to_json(const GeneratorConfig& config);
GeneratorConfig config_from_json(const std::string& text);

}  // namespace ews::synth
