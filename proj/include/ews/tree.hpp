#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ews/dataset.hpp"

namespace ews::tree {

// Flat binary tree node. Internal nodes route x[feature] <= threshold to the
// left child. Leaves carry the model's output contribution.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double cover = 0.0;  // sum of training instance weights reaching the node

    bool is_leaf() const { return left < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int leaf_index(std::span<const double> row) const;
    double predict(std::span<const double> row) const { return nodes[static_cast<std::size_t>(leaf_index(row))].value; }
    int depth() const;
    bool has_cover() const;
};

// Features quantized to bins whose edges are midpoints between adjacent
// distinct training values. With at most max_bins distinct values every
// midpoint is a candidate threshold, so the split search is exhaustive.
struct BinnedFeatures {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint16_t> codes;            // column-major
    std::vector<std::vector<double>> thresholds;  // per feature, ascending

    std::uint16_t code(std::size_t r, std::size_t c) const { return codes[c * rows + r]; }
};

inline constexpr std::size_t kDefaultMaxBins = 256;

BinnedFeatures bin_features(const Matrix& x, std::size_t max_bins = kDefaultMaxBins);

// Split criterion: maximize sum over children of s1^2 / (s2 + lambda).
// With s1 = weighted positives, s2 = weight, lambda = 0 this is weighted
// Gini; with gradients/Hessians it is the Newton boosting gain; with
// s1 = y, s2 = 1 it is variance reduction.
enum class Criterion { gini, newton, variance };

struct GrowParams {
    // gini additionally accepts zero-gain splits of impure nodes, so greedy
    // growth can still separate patterns such as XOR.
    Criterion criterion = Criterion::gini;
    int max_depth = 6;
    double min_child_s2 = 1e-12;  // minimum s2 mass in each child
    double lambda = 0.0;
    double min_gain = 1e-12;
    double feature_fraction = 1.0;  // per-split column subsampling
};

struct RowStats {
    std::span<const double> s1;
    std::span<const double> s2;
    std::span<const double> cover;
};

using LeafValueFn = std::function<double(double s1, double s2)>;

// Rows with zero cover and zero s2 may be omitted from `rows`.
// `rng` is consulted only when feature_fraction < 1.
Tree grow_tree(const BinnedFeatures& bins, const RowStats& stats, std::vector<std::uint32_t> rows,
               const GrowParams& params, const LeafValueFn& leaf_value, std::mt19937_64* rng = nullptr);

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Best root split under the criterion above (exposed for testing).
SplitChoice best_split(const BinnedFeatures& bins, const RowStats& stats, std::span<const std::uint32_t> rows,
                       const GrowParams& params);

}  // namespace ews::tree
