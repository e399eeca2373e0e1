#include "ews/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ews/hash.hpp"
#include "ews/tree.hpp"
#include "json.hpp"

namespace ews::panel {

std::string ImputationReport::to_json() const {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["pooling"] = pooling;
    j["m"] = m;
    j["cycles"] = cycles;
    j["seed"] = seed;
    auto& cells = j["cells_imputed"];
    cells = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < kNumFinancial; ++c) cells[std::string(financial_column_names()[c])] = cells_imputed[c];
    auto& order = j["column_order"];
    order = nlohmann::ordered_json::array();
    for (std::size_t c : column_order) order.push_back(std::string(financial_column_names()[c]));
    return j.dump(2);
}

namespace {

constexpr std::size_t kPredictors = kNumFeatures - 1;

// One chained-equations chain over a dense working copy of the features.
std::vector<FeatureVector> run_chain(const std::vector<FeatureVector>& input,
                                     const std::array<std::vector<std::uint32_t>, kNumFinancial>& missing,
                                     const std::array<std::vector<std::uint32_t>, kNumFinancial>& observed,
                                     const std::array<std::size_t, kNumFinancial>& order,
                                     const ImputationConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<FeatureVector> work = input;
    const std::size_t n = work.size();

    for (std::size_t c = 0; c < kNumFinancial; ++c) {
        const auto& obs = observed[c];
        std::uniform_int_distribution<std::size_t> pick(0, obs.size() - 1);
        for (auto r : missing[c]) work[r][c] = input[obs[pick(rng)]][c];
    }

    tree::GrowParams gp;
    gp.criterion = tree::Criterion::variance;
    gp.max_depth = config.max_depth;
    gp.min_child_s2 = std::max(1.0, config.min_leaf);

    Matrix x(n, kPredictors);
    std::vector<double> y(n), ones(n, 1.0);
    for (int cycle = 0; cycle < config.cycles; ++cycle) {
        for (std::size_t c : order) {
            if (missing[c].empty()) continue;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t k = 0;
                for (std::size_t j = 0; j < kNumFeatures; ++j) {
                    if (j != c) x(i, k++) = work[i][j];
                }
                y[i] = work[i][c];
            }
            const auto bins = tree::bin_features(x);
            tree::RowStats stats{y, ones, ones};
            const auto tr = tree::grow_tree(bins, stats, observed[c], gp,
                                            [](double s1, double s2) { return s2 > 0 ? s1 / s2 : 0.0; });
            std::vector<std::vector<double>> donors(tr.nodes.size());
            for (auto r : observed[c]) donors[static_cast<std::size_t>(tr.leaf_index(x.row(r)))].push_back(y[r]);
            for (auto r : missing[c]) {
                const auto& pool = donors[static_cast<std::size_t>(tr.leaf_index(x.row(r)))];
                if (pool.empty()) throw Error("imputation reached a leaf without donors");
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                work[r][c] = pool[pick(rng)];
            }
        }
    }
    return work;
}

}  // namespace

ImputationResult impute_missing(const Panel& panel, const ImputationConfig& config) {
    if (config.m < 1) throw Error("imputation needs m >= 1");
    if (config.cycles < 0) throw Error("imputation cycles must be non-negative");
    const auto& rows = panel.rows();
    const std::size_t n = rows.size();

    ImputationResult result;
    auto& report = result.report;
    report.m = config.m;
    report.cycles = config.cycles;
    report.seed = config.seed;

    std::vector<FeatureVector> input(n);
    std::array<std::vector<std::uint32_t>, kNumFinancial> missing, observed;
    for (std::size_t i = 0; i < n; ++i) {
        input[i] = rows[i].features();
        for (std::size_t c = 0; c < kNumFinancial; ++c) {
            const double v = rows[i].x[c];
            if (std::isnan(v)) {
                missing[c].push_back(static_cast<std::uint32_t>(i));
            } else if (!std::isfinite(v)) {
                throw Error("non-finite value in column " + std::string(financial_column_names()[c]) + " for " +
                            rows[i].firm_id + " " + std::to_string(rows[i].year));
            } else {
                observed[c].push_back(static_cast<std::uint32_t>(i));
            }
        }
        for (std::size_t j = kNumFinancial; j < kNumFeatures; ++j) {
            if (!std::isfinite(input[i][j])) throw Error("AI columns cannot contain missing values");
        }
    }

    std::array<std::size_t, kNumFinancial> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return missing[a].size() < missing[b].size(); });
    report.column_order = order;
    for (std::size_t c = 0; c < kNumFinancial; ++c) report.cells_imputed[c] = missing[c].size();

    const bool any_missing = std::any_of(missing.begin(), missing.end(), [](const auto& v) { return !v.empty(); });
    if (!any_missing) {
        result.panel = panel;
        return result;
    }
    for (std::size_t c = 0; c < kNumFinancial; ++c) {
        if (observed[c].empty()) {
            throw Error("column " + std::string(financial_column_names()[c]) + " has no observed values");
        }
    }

    std::vector<FirmYearRecord> out = rows;
    std::vector<std::array<double, kNumFinancial>> sum(n);
    for (int k = 0; k < config.m; ++k) {
        const auto done =
            run_chain(input, missing, observed, order, config, derive_seed(config.seed, {static_cast<std::uint64_t>(k)}));
        for (std::size_t c = 0; c < kNumFinancial; ++c) {
            for (auto r : missing[c]) sum[r][c] += done[r][c];
        }
    }
    for (std::size_t c = 0; c < kNumFinancial; ++c) {
        for (auto r : missing[c]) out[r].x[c] = sum[r][c] / static_cast<double>(config.m);
    }
    result.panel = Panel(std::move(out));
    return result;
}

}  // namespace ews::panel
