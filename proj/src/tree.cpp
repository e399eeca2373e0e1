#include "ews/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ews::tree {

int Tree::leaf_index(std::span<const double> row) const {
    if (nodes.empty()) throw Error("empty tree");
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        if (static_cast<std::size_t>(n.feature) >= row.size()) throw Error("tree feature index out of range");
        i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return i;
}

int Tree::depth() const {
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.is_leaf()) {
            best = std::max(best, d[i]);
            continue;
        }
        d[static_cast<std::size_t>(n.left)] = d[i] + 1;
        d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    }
    return best;
}

bool Tree::has_cover() const {
    if (nodes.empty()) return false;
    return std::all_of(nodes.begin(), nodes.end(),
                       [](const TreeNode& n) { return std::isfinite(n.cover) && n.cover >= 0.0; }) &&
           nodes.front().cover > 0.0;
}

BinnedFeatures bin_features(const Matrix& x, std::size_t max_bins) {
    if (max_bins < 2 || max_bins > 65536) throw Error("max_bins must be in [2, 65536]");
    BinnedFeatures b;
    b.rows = x.rows();
    b.cols = x.cols();
    b.codes.resize(b.rows * b.cols);
    b.thresholds.resize(b.cols);
    std::vector<double> vals;
    for (std::size_t c = 0; c < b.cols; ++c) {
        vals.resize(b.rows);
        for (std::size_t r = 0; r < b.rows; ++r) {
            vals[r] = x(r, c);
            if (std::isnan(vals[r])) throw Error("cannot bin a NaN feature value");
        }
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        const std::size_t u = vals.size();
        auto midpoint = [](double lo, double hi) {
            double m = 0.5 * (lo + hi);
            return m < hi ? m : lo;
        };
        auto& th = b.thresholds[c];
        if (u <= max_bins) {
            for (std::size_t i = 0; i + 1 < u; ++i) th.push_back(midpoint(vals[i], vals[i + 1]));
        } else {
            for (std::size_t k = 1; k < max_bins; ++k) {
                const std::size_t i = k * u / max_bins;
                const double t = midpoint(vals[i - 1], vals[i]);
                if (th.empty() || t > th.back()) th.push_back(t);
            }
        }
        for (std::size_t r = 0; r < b.rows; ++r) {
            const double v = x(r, c);
            b.codes[c * b.rows + r] =
                static_cast<std::uint16_t>(std::lower_bound(th.begin(), th.end(), v) - th.begin());
        }
    }
    return b;
}

namespace {

struct Sums {
    double s1 = 0, s2 = 0, cover = 0;
    void add(double a, double b, double c) {
        s1 += a;
        s2 += b;
        cover += c;
    }
};

double score(double s1, double s2, double lambda) {
    const double den = s2 + lambda;
    return den > 0 ? s1 * s1 / den : 0.0;
}

class Grower {
public:
    Grower(const BinnedFeatures& bins, const RowStats& stats, const GrowParams& params, const LeafValueFn& leaf,
           std::mt19937_64* rng)
        : bins_(bins), stats_(stats), params_(params), leaf_(leaf), rng_(rng) {
        all_features_.resize(bins.cols);
        std::iota(all_features_.begin(), all_features_.end(), 0);
    }

    int grow(std::vector<std::uint32_t>& rows, std::size_t begin, std::size_t end, int depth) {
        Sums total;
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = rows[i];
            total.add(stats_.s1[r], stats_.s2[r], stats_.cover[r]);
        }
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes.back().cover = total.cover;

        SplitChoice split;
        if (depth < params_.max_depth && end - begin >= 2) {
            split = find(std::span<const std::uint32_t>(rows.data() + begin, end - begin), total);
        }
        if (split.feature < 0) {
            tree_.nodes[static_cast<std::size_t>(id)].value = leaf_(total.s1, total.s2);
            return id;
        }
        const auto f = static_cast<std::size_t>(split.feature);
        const auto& th = bins_.thresholds[f];
        const auto bin = static_cast<std::uint16_t>(
            std::lower_bound(th.begin(), th.end(), split.threshold) - th.begin());
        auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                     rows.begin() + static_cast<std::ptrdiff_t>(end),
                                     [&](std::uint32_t r) { return bins_.code(r, f) <= bin; });
        const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
        const int left = grow(rows, begin, mid, depth + 1);
        const int right = grow(rows, mid, end, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    SplitChoice find(std::span<const std::uint32_t> rows, const Sums& total) {
        const std::vector<std::size_t>* features = &all_features_;
        std::vector<std::size_t> sampled;
        if (params_.feature_fraction < 1.0 && rng_ != nullptr) {
            const auto d = bins_.cols;
            const auto k = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::lround(params_.feature_fraction * static_cast<double>(d))));
            sampled = all_features_;
            for (std::size_t i = 0; i < std::min(k, d); ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, d - 1);
                std::swap(sampled[i], sampled[pick(*rng_)]);
            }
            sampled.resize(std::min(k, d));
            std::sort(sampled.begin(), sampled.end());
            features = &sampled;
        }

        const double parent = score(total.s1, total.s2, params_.lambda);
        const double tolerance = params_.min_gain * (1.0 + std::abs(parent));
        SplitChoice best;
        best.gain = tolerance;
        if (params_.criterion == Criterion::gini) {
            const bool pure = total.s1 <= tolerance || total.s1 >= total.s2 - tolerance;
            if (pure) return best_none();
            best.gain = -tolerance;
        }
        std::vector<Sums> hist;
        for (std::size_t f : *features) {
            const auto& th = bins_.thresholds[f];
            if (th.empty()) continue;
            hist.assign(th.size() + 1, Sums{});
            const std::uint16_t* codes = bins_.codes.data() + f * bins_.rows;
            for (auto r : rows) hist[codes[r]].add(stats_.s1[r], stats_.s2[r], stats_.cover[r]);
            Sums left;
            for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
                left.add(hist[b].s1, hist[b].s2, hist[b].cover);
                const double r_s1 = total.s1 - left.s1;
                const double r_s2 = total.s2 - left.s2;
                const double r_cover = total.cover - left.cover;
                if (left.s2 < params_.min_child_s2 || r_s2 < params_.min_child_s2) continue;
                if (left.cover <= 0 || r_cover <= 0) continue;
                const double gain =
                    score(left.s1, left.s2, params_.lambda) + score(r_s1, r_s2, params_.lambda) - parent;
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = th[b];
                }
            }
        }
        if (best.feature < 0) best.gain = 0.0;
        best.gain = std::max(best.gain, 0.0);
        return best;
    }

    static SplitChoice best_none() { return SplitChoice{}; }

    Tree take() { return std::move(tree_); }

private:
    const BinnedFeatures& bins_;
    const RowStats& stats_;
    const GrowParams& params_;
    const LeafValueFn& leaf_;
    std::mt19937_64* rng_;
    std::vector<std::size_t> all_features_;
    Tree tree_;
};

}  // namespace

Tree grow_tree(const BinnedFeatures& bins, const RowStats& stats, std::vector<std::uint32_t> rows,
               const GrowParams& params, const LeafValueFn& leaf_value, std::mt19937_64* rng) {
    if (rows.empty()) throw Error("cannot grow a tree on zero rows");
    Grower g(bins, stats, params, leaf_value, rng);
    g.grow(rows, 0, rows.size(), 0);
    return g.take();
}

SplitChoice best_split(const BinnedFeatures& bins, const RowStats& stats, std::span<const std::uint32_t> rows,
                       const GrowParams& params) {
    LeafValueFn leaf = [](double, double) { return 0.0; };
    Grower g(bins, stats, params, leaf, nullptr);
    Sums total;
    for (auto r : rows) total.add(stats.s1[r], stats.s2[r], stats.cover[r]);
    return g.find(rows, total);
}

}  // namespace ews::tree
