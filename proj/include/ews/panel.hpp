#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ews/common.hpp"
#include "ews/text_features.hpp"

namespace ews::panel {

inline constexpr std::size_t kNumFinancial = 5;
inline constexpr std::size_t kNumFeatures = kNumFinancial + text::kNumAiFeatures;
inline constexpr std::string_view kPanelSchema = "ews.panel/1";

using FeatureVector = std::array<double, kNumFeatures>;

enum class Industry { financial, non_financial };
std::string_view to_string(Industry industry);
Industry parse_industry(std::string_view s);

// Financial ratio columns X01..X05 followed by the eight AI columns.
const std::array<std::string, kNumFeatures>& feature_names();
const std::array<std::string_view, kNumFinancial>& financial_column_names();

enum class FeatureSet { with_ai, without_ai };
std::string_view to_string(FeatureSet fs);
FeatureSet parse_feature_set(std::string_view s);
// Indices into FeatureVector that a feature set uses.
std::vector<std::size_t> feature_columns(FeatureSet fs);

struct FirmYearRecord {
    std::string firm_id;
    int year = 0;
    std::array<double, kNumFinancial> x{};  // NaN marks a missing value
    text::AiFeatures ai;
    bool st_status = false;
    Industry industry = Industry::non_financial;
    bool ai_missing = false;  // no AI row joined; AI fields are zero

    FeatureVector features() const;
};

// Rows as supplied by the financial input file.
struct FinancialRow {
    std::string firm_id;
    int year = 0;
    std::array<double, kNumFinancial> x{};
    bool st_flag = false;
    Industry industry = Industry::non_financial;
};

struct AiFeatureRow {
    std::string firm_id;
    int year = 0;
    text::AiFeatures ai;
};

// Firm-year panel keyed by (firm_id, year), rows sorted by firm then year.
// Immutable once built.
class Panel {
public:
    Panel() = default;
    explicit Panel(std::vector<FirmYearRecord> rows);

    const std::vector<FirmYearRecord>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    const FirmYearRecord* find(std::string_view firm_id, int year) const;
    std::pair<int, int> year_range() const;

private:
    std::vector<FirmYearRecord> rows_;
    std::map<std::pair<std::string, int>, std::size_t, std::less<>> index_;
};

struct BuildReport {
    std::size_t financial_rows_dropped = 0;  // financial-industry exclusion
    std::size_t ai_rows_unjoined = 0;        // AI rows without a financial row
    std::size_t rows_without_ai = 0;         // treated as zero AI, flagged
    std::vector<std::string> warnings;
};

struct BuildResult {
    Panel panel;
    BuildReport report;
};

// Merges financial and AI rows, dropping financial-industry firms. Duplicate
// keys in either input are rejected.
BuildResult build_panel(std::span<const FinancialRow> financial, std::span<const AiFeatureRow> ai);

struct LabeledInstance {
    std::string firm_id;
    int label_year = 0;
    int feature_year = 0;
    bool distressed = false;
    FeatureVector features{};
};

struct LabelingResult {
    std::vector<LabeledInstance> instances;
    std::size_t skipped_missing_base = 0;
    std::size_t dropped_already_distressed = 0;
};

// Distress at label_year from features at label_year - horizon. Base years
// that are already flagged are dropped; healthy instances come only from
// firms never flagged anywhere in the panel.
LabelingResult label_instances(const Panel& panel, int first_label_year, int last_label_year,
                               int horizon = kDefaultHorizon);

struct ClassPrevalence {
    int year = 0;
    std::size_t n_healthy = 0;
    std::size_t n_distressed = 0;
    // Fraction of firms with a nonzero value, per AI column plus "any AI".
    std::array<double, text::kNumAiFeatures + 1> healthy{};
    std::array<double, text::kNumAiFeatures + 1> distressed{};
};

struct PanelSummary {
    std::size_t n_observations = 0;
    std::size_t n_distressed = 0;
    double distress_rate = 0;
    std::size_t n_firms = 0;
    std::size_t n_distressed_firms = 0;
    std::vector<ClassPrevalence> prevalence;  // one entry per year
    // Per-class means of each AI column over all firm-years.
    std::array<double, text::kNumAiFeatures> healthy_means{};
    std::array<double, text::kNumAiFeatures> distressed_means{};
    // Per-class means restricted to the final panel year.
    std::array<double, text::kNumAiFeatures> healthy_means_final_year{};
    std::array<double, text::kNumAiFeatures> distressed_means_final_year{};
};

// Health class is a firm-level property: a firm is distressed when it is
// flagged in any panel year.
PanelSummary summarize_panel(const Panel& panel);

// Delimited I/O.
std::vector<FinancialRow> read_financial_rows(const std::filesystem::path& path);
std::vector<AiFeatureRow> read_ai_feature_rows(const std::filesystem::path& path);
std::string format_financial_rows(std::span<const FinancialRow> rows);
std::string format_ai_feature_rows(std::span<const AiFeatureRow> rows);
std::string format_panel(const Panel& panel);
Panel parse_panel(std::string_view content);
Panel read_panel(const std::filesystem::path& path);

}  // namespace ews::panel
