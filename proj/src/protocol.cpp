#include "ews/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ews/hash.hpp"
#include "ews/metrics.hpp"

namespace ews::protocol {

SplitPlan make_split_plan(int test_year, int earliest_start, int end_year) {
    if (earliest_start > end_year) {
        throw Error("empty split range: earliest start " + std::to_string(earliest_start) + " after end year " +
                    std::to_string(end_year));
    }
    if (end_year >= test_year) throw Error("training end year must precede the test year");
    SplitPlan plan;
    plan.test_year = test_year;
    plan.end_year = end_year;
    for (int s = earliest_start; s <= end_year; ++s) plan.start_years.push_back(s);
    return plan;
}

double percentile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error("percentile of an empty sample");
    if (!(q >= 0 && q <= 100)) throw Error("percentile rank outside [0, 100]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

WindowStats fit_window_stats(const Matrix& train, const std::vector<bool>& winsorize) {
    const std::size_t n = train.rows();
    if (n < 2) throw Error("window statistics need at least two training rows");
    if (!winsorize.empty() && winsorize.size() != train.cols()) throw Error("winsorize mask width mismatch");
    WindowStats stats;
    stats.features.resize(train.cols());
    std::vector<double> col(n);
    for (std::size_t j = 0; j < train.cols(); ++j) {
        auto& f = stats.features[j];
        f.winsorized = winsorize.empty() || winsorize[j];
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = train(i, j);
            if (!std::isfinite(col[i])) throw Error("non-finite training value in column " + std::to_string(j));
        }
        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        f.p1 = percentile(sorted, 1.0);
        f.p99 = percentile(sorted, 99.0);
        double sum = 0;
        for (double& v : col) {
            if (f.winsorized) v = std::clamp(v, f.p1, f.p99);
            sum += v;
        }
        f.mean = sum / static_cast<double>(n);
        double ss = 0;
        for (double v : col) ss += (v - f.mean) * (v - f.mean);
        f.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return stats;
}

Matrix apply_preprocessing(const Matrix& x, const WindowStats& stats) {
    if (x.cols() != stats.features.size()) {
        throw Error("schema mismatch: stats cover " + std::to_string(stats.features.size()) + " features, data has " +
                    std::to_string(x.cols()));
    }
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const auto& f = stats.features[j];
            if (f.degenerate()) {
                out(i, j) = 0.0;
                continue;
            }
            double v = x(i, j);
            if (f.winsorized) v = std::clamp(v, f.p1, f.p99);
            out(i, j) = (v - f.mean) / f.sd;
        }
    }
    return out;
}

ClassWeights compute_class_weights(std::span<const int> labels) {
    std::size_t n1 = 0;
    for (int y : labels) n1 += y != 0;
    const std::size_t n = labels.size();
    const std::size_t n0 = n - n1;
    if (n1 == 0 || n0 == 0) throw Error("class weights need both classes (n1=" + std::to_string(n1) +
                                        ", n0=" + std::to_string(n0) + ")");
    const double dn = static_cast<double>(n);
    return {dn / (2.0 * static_cast<double>(n1)), dn / (2.0 * static_cast<double>(n0))};
}

std::vector<double> expand_weights(std::span<const int> labels, const ClassWeights& w) {
    std::vector<double> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] ? w.w1 : w.w0;
    return out;
}

FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw Error("cross-validation needs at least two folds");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (pos.size() < 2) throw Error("cross-validation needs at least two positive rows");
    if (neg.size() < 2) throw Error("cross-validation needs at least two negative rows");
    FoldAssignment out;
    out.k = k;
    if (pos.size() < static_cast<std::size_t>(k)) {
        out.k = static_cast<int>(pos.size());
        out.warnings.push_back("only " + std::to_string(pos.size()) + " positive rows; folds lowered from " +
                               std::to_string(k) + " to " + std::to_string(out.k));
    }
    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    out.fold.assign(labels.size(), 0);
    const auto kk = static_cast<std::size_t>(out.k);
    for (std::size_t i = 0; i < pos.size(); ++i) out.fold[pos[i]] = static_cast<int>(i % kk);
    for (std::size_t i = 0; i < neg.size(); ++i) out.fold[neg[i]] = static_cast<int>((pos.size() + i) % kk);
    return out;
}

Selection select_hyperparameters(const Dataset& train, const std::vector<models::ModelConfig>& grid, int k,
                                 std::uint64_t seed) {
    if (grid.empty()) throw Error("hyperparameter grid is empty");
    train.validate();
    Selection sel;
    const auto folds = stratified_folds(train.y, k, derive_seed(seed, {0}));
    sel.folds = folds.k;
    sel.warnings = folds.warnings;

    std::vector<std::vector<std::size_t>> fit_idx(static_cast<std::size_t>(folds.k)),
        val_idx(static_cast<std::size_t>(folds.k));
    for (std::size_t i = 0; i < train.size(); ++i) {
        for (int f = 0; f < folds.k; ++f) {
            (folds.fold[i] == f ? val_idx : fit_idx)[static_cast<std::size_t>(f)].push_back(i);
        }
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
        CvRow row;
        row.config = grid[g];
        if (grid.size() == 1) {
            // Nothing to choose between; skip the folds.
            row.mean_auc = std::nan("");
            sel.table.push_back(row);
            continue;
        }
        for (int f = 0; f < folds.k; ++f) {
            const auto fi = static_cast<std::size_t>(f);
            Dataset fit = train.subset(fit_idx[fi]);
            const Dataset val = train.subset(val_idx[fi]);
            try {
                fit.w = expand_weights(fit.y, compute_class_weights(fit.y));
                const auto model = models::fit_model(grid[g], fit, derive_seed(seed, {1, g, fi}));
                const auto p = model.predict_proba(val.x);
                row.fold_auc.push_back(metrics::compute_auc(val.y, p));
            } catch (const Error& e) {
                sel.warnings.push_back(grid[g].describe() + " fold " + std::to_string(f) + ": " + e.what());
            }
        }
        if (row.fold_auc.empty()) {
            row.error = "no fold completed";
            row.mean_auc = std::nan("");
        } else {
            row.mean_auc = std::accumulate(row.fold_auc.begin(), row.fold_auc.end(), 0.0) /
                           static_cast<double>(row.fold_auc.size());
        }
        sel.table.push_back(std::move(row));
    }

    if (grid.size() == 1) {
        sel.chosen = grid.front();
        return sel;
    }
    const CvRow* best = nullptr;
    for (const auto& row : sel.table) {
        if (std::isnan(row.mean_auc)) continue;
        if (!best || row.mean_auc > best->mean_auc ||
            (row.mean_auc == best->mean_auc && row.config.capacity() < best->config.capacity())) {
            best = &row;
        }
    }
    if (!best) throw Error("every grid configuration failed cross-validation");
    sel.chosen = best->config;
    return sel;
}

Dataset raw_dataset(std::span<const panel::LabeledInstance> instances, int first, int last,
                    panel::FeatureSet feature_set, std::vector<std::string>* firms) {
    const auto cols = panel::feature_columns(feature_set);
    std::size_t n = 0;
    for (const auto& inst : instances) n += inst.label_year >= first && inst.label_year <= last;
    Dataset d;
    d.x = Matrix(n, cols.size());
    d.y.reserve(n);
    d.w.assign(n, 1.0);
    for (std::size_t c : cols) d.feature_names.push_back(panel::feature_names()[c]);
    std::size_t i = 0;
    for (const auto& inst : instances) {
        if (inst.label_year < first || inst.label_year > last) continue;
        for (std::size_t j = 0; j < cols.size(); ++j) d.x(i, j) = inst.features[cols[j]];
        d.y.push_back(inst.distressed ? 1 : 0);
        if (firms) firms->push_back(inst.firm_id);
        ++i;
    }
    return d;
}

WindowData build_window(std::span<const panel::LabeledInstance> instances, Window window, int test_year,
                        panel::FeatureSet feature_set, const PreprocessOptions& options) {
    if (window.end >= test_year) throw Error("training window overlaps the test year");
    WindowData out;
    out.window = window;
    out.test_year = test_year;
    Dataset train = raw_dataset(instances, window.start, window.end, feature_set);
    Dataset test = raw_dataset(instances, test_year, test_year, feature_set, &out.test_firms);
    for (int y : train.y) (y ? out.n_train_pos : out.n_train_neg)++;
    for (int y : test.y) (y ? out.n_test_pos : out.n_test_neg)++;
    if (train.size() < 2) throw Error("training window has fewer than two rows");

    std::vector<bool> mask(train.num_features(), true);
    if (!options.winsorize_ai) {
        for (std::size_t j = panel::kNumFinancial; j < mask.size(); ++j) mask[j] = false;
    }
    out.stats = fit_window_stats(train.x, mask);
    out.weights = compute_class_weights(train.y);
    train.x = apply_preprocessing(train.x, out.stats);
    train.w = expand_weights(train.y, out.weights);
    test.x = apply_preprocessing(test.x, out.stats);
    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

}  // namespace ews::protocol
