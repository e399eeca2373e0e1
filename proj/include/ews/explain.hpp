#pragma once

#include <span>
#include <string>
#include <vector>

#include "ews/models.hpp"

namespace ews::explain {

struct ShapExplanation {
    double base_value = 0;
    std::vector<double> phi;
    models::OutputSpace output_space = models::OutputSpace::log_odds;

    double output() const;  // base_value + sum(phi)
};

// phi_j = beta_j (x_j - mean_j) in log-odds.
ShapExplanation shap_linear(const models::Model& model, std::span<const double> row,
                            std::span<const double> background_mean);

// Path-dependent attribution for one tree using its recorded covers.
ShapExplanation shap_tree(const tree::Tree& tree, std::span<const double> row, std::size_t num_features);
// cart/rf in probability space, gbt in log-odds; ensembles add per-tree values.
ShapExplanation shap_tree(const models::Model& model, std::span<const double> row);

inline constexpr std::size_t kMaxExhaustiveFeatures = 14;

// Exact Shapley values of the raw output with absent features replaced by
// the background mean. Cost grows as 2^d.
ShapExplanation shap_exhaustive(const models::Model& model, std::span<const double> row,
                                std::span<const double> background_mean);

// Family dispatch: linear for logit, tree paths for cart/rf/gbt, exhaustive
// for nn. Uses the model's stored background mean.
ShapExplanation explain_row(const models::Model& model, std::span<const double> row);

struct Importance {
    std::vector<double> mean_abs;
    std::vector<double> normalized;  // min -> 1, max -> 100
    bool constant = false;           // all equal; every feature gets 100
};

Importance global_importance(std::span<const ShapExplanation> explanations);
Importance normalize_importance(std::vector<double> mean_abs);

struct StabilityRow {
    std::string feature;
    double top6_frequency = 0;
    double mean_rank = 0;
    double mean_normalized_importance = 0;
};

inline constexpr std::size_t kTopK = 6;

// Ranks by descending mean |phi|, ties resolved by schema order. A feature
// tied with the sixth-ranked value counts as top six.
std::vector<int> rank_features(std::span<const double> mean_abs);
std::vector<StabilityRow> stability_across_splits(const std::vector<std::string>& schema,
                                                  std::span<const Importance> splits);

}  // namespace ews::explain
