#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "ews/panel.hpp"

namespace ews::panel {

struct ImputationConfig {
    int m = 5;            // completed panels
    int cycles = 10;      // chained-equation sweeps per panel
    std::uint64_t seed = 20240601;
    int max_depth = 8;    // regression-tree depth
    double min_leaf = 5;  // minimum donor rows per leaf
};

struct ImputationReport {
    std::array<std::size_t, kNumFinancial> cells_imputed{};
    std::array<std::size_t, kNumFinancial> column_order{};  // ascending missingness
    int m = 0;
    int cycles = 0;
    std::uint64_t seed = 0;
    std::string method = "chained-equations/cart-donor";
    std::string pooling = "mean-of-m";

    std::string to_json() const;
};

struct ImputationResult {
    Panel panel;
    ImputationReport report;
};

// Fills missing financial cells by chained equations with CART donor draws.
// The m completed panels are averaged cell-wise; observed cells are copied
// unchanged. AI columns are never imputed.
ImputationResult impute_missing(const Panel& panel, const ImputationConfig& config);

}  // namespace ews::panel
