#include "ews/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ews::explain {

using models::Family;
using models::Model;

double ShapExplanation::output() const { return std::accumulate(phi.begin(), phi.end(), base_value); }

ShapExplanation shap_linear(const Model& model, std::span<const double> row, std::span<const double> mean) {
    const auto* p = std::get_if<models::LogisticParams>(&model.params());
    if (!p) throw Error("linear attribution requires a logistic model");
    const std::size_t d = p->coef.size();
    if (row.size() != d || mean.size() != d) throw Error("row or background width does not match the model");
    ShapExplanation e;
    e.base_value = p->intercept;
    e.phi.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        e.base_value += p->coef[j] * mean[j];
        e.phi[j] = p->coef[j] * (row[j] - mean[j]);
    }
    return e;
}

namespace {

struct PathElement {
    int feature = -1;
    double zero_fraction = 0;
    double one_fraction = 0;
    double weight = 0;
};

void extend_path(std::vector<PathElement>& path, int depth, double zero, double one, int feature) {
    const auto d = static_cast<std::size_t>(depth);
    path[d] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
    for (int i = depth - 1; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        path[k + 1].weight += one * path[k].weight * (i + 1) / static_cast<double>(depth + 1);
        path[k].weight = zero * path[k].weight * (depth - i) / static_cast<double>(depth + 1);
    }
}

void unwind_path(std::vector<PathElement>& path, int depth, int index) {
    const double one = path[static_cast<std::size_t>(index)].one_fraction;
    const double zero = path[static_cast<std::size_t>(index)].zero_fraction;
    double next = path[static_cast<std::size_t>(depth)].weight;
    for (int i = depth - 1; i >= 0; --i) {
        auto& el = path[static_cast<std::size_t>(i)];
        if (one != 0) {
            const double tmp = el.weight;
            el.weight = next * (depth + 1) / ((i + 1) * one);
            next = tmp - el.weight * zero * (depth - i) / static_cast<double>(depth + 1);
        } else {
            el.weight = el.weight * (depth + 1) / (zero * (depth - i));
        }
    }
    for (int i = index; i < depth; ++i) {
        auto& el = path[static_cast<std::size_t>(i)];
        const auto& nx = path[static_cast<std::size_t>(i + 1)];
        el.feature = nx.feature;
        el.zero_fraction = nx.zero_fraction;
        el.one_fraction = nx.one_fraction;
    }
}

double unwound_sum(const std::vector<PathElement>& path, int depth, int index) {
    const double one = path[static_cast<std::size_t>(index)].one_fraction;
    const double zero = path[static_cast<std::size_t>(index)].zero_fraction;
    double next = path[static_cast<std::size_t>(depth)].weight;
    double total = 0;
    for (int i = depth - 1; i >= 0; --i) {
        const auto& el = path[static_cast<std::size_t>(i)];
        if (one != 0) {
            const double tmp = next * (depth + 1) / ((i + 1) * one);
            total += tmp;
            next = el.weight - tmp * zero * (depth - i) / static_cast<double>(depth + 1);
        } else if (zero != 0) {
            total += (el.weight / zero) / ((depth - i) / static_cast<double>(depth + 1));
        }
    }
    return total;
}

class TreeExplainer {
public:
    TreeExplainer(const tree::Tree& t, std::span<const double> row, std::vector<double>& phi)
        : tree_(t), row_(row), phi_(phi) {}

    void run() {
        std::vector<PathElement> path(1);
        recurse(0, path, 0, 1.0, 1.0, -1);
    }

private:
    void recurse(int node, std::vector<PathElement> path, int depth, double zero, double one, int feature) {
        path.resize(static_cast<std::size_t>(depth) + 1);
        extend_path(path, depth, zero, one, feature);
        const auto& n = tree_.nodes[static_cast<std::size_t>(node)];
        if (n.is_leaf()) {
            for (int i = 1; i <= depth; ++i) {
                const auto& el = path[static_cast<std::size_t>(i)];
                const double w = unwound_sum(path, depth, i);
                phi_[static_cast<std::size_t>(el.feature)] += w * (el.one_fraction - el.zero_fraction) * n.value;
            }
            return;
        }
        const auto f = static_cast<std::size_t>(n.feature);
        const int hot = row_[f] <= n.threshold ? n.left : n.right;
        const int cold = hot == n.left ? n.right : n.left;
        if (!(n.cover > 0)) throw Error("tree node without positive cover");
        const double hot_zero = tree_.nodes[static_cast<std::size_t>(hot)].cover / n.cover;
        const double cold_zero = tree_.nodes[static_cast<std::size_t>(cold)].cover / n.cover;
        double in_zero = 1.0, in_one = 1.0;
        int k = 1;
        for (; k <= depth; ++k) {
            if (path[static_cast<std::size_t>(k)].feature == n.feature) break;
        }
        if (k <= depth) {
            in_zero = path[static_cast<std::size_t>(k)].zero_fraction;
            in_one = path[static_cast<std::size_t>(k)].one_fraction;
            unwind_path(path, depth, k);
            --depth;
        }
        recurse(hot, path, depth + 1, hot_zero * in_zero, in_one, n.feature);
        recurse(cold, path, depth + 1, cold_zero * in_zero, 0.0, n.feature);
    }

    const tree::Tree& tree_;
    std::span<const double> row_;
    std::vector<double>& phi_;
};

double expected_value(const tree::Tree& t) {
    const double root = t.nodes.front().cover;
    double e = 0;
    for (const auto& n : t.nodes) {
        if (n.is_leaf()) e += n.value * n.cover / root;
    }
    return e;
}

}  // namespace

ShapExplanation shap_tree(const tree::Tree& t, std::span<const double> row, std::size_t num_features) {
    if (!t.has_cover()) throw Error("tree lacks training cover metadata");
    for (const auto& n : t.nodes) {
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= num_features) {
            throw Error("tree splits on a feature outside the schema");
        }
    }
    ShapExplanation e;
    e.phi.assign(num_features, 0.0);
    e.base_value = expected_value(t);
    TreeExplainer(t, row, e.phi).run();
    return e;
}

ShapExplanation shap_tree(const Model& model, std::span<const double> row) {
    const std::size_t d = model.schema().size();
    if (row.size() != d) throw Error("row width does not match the model schema");
    ShapExplanation out;
    out.output_space = model.output_space();
    out.phi.assign(d, 0.0);
    auto add = [&](const tree::Tree& t, double scale) {
        const auto e = shap_tree(t, row, d);
        out.base_value += scale * e.base_value;
        for (std::size_t j = 0; j < d; ++j) out.phi[j] += scale * e.phi[j];
    };
    if (const auto* c = std::get_if<models::CartParams>(&model.params())) {
        add(c->tree, 1.0);
    } else if (const auto* f = std::get_if<models::ForestParams>(&model.params())) {
        const double s = 1.0 / static_cast<double>(f->trees.size());
        for (const auto& t : f->trees) add(t, s);
    } else if (const auto* b = std::get_if<models::BoostedParams>(&model.params())) {
        out.base_value = b->prior;
        for (const auto& t : b->trees) add(t, 1.0);
    } else {
        throw Error("tree attribution requires a cart, rf or gbt model");
    }
    return out;
}

ShapExplanation shap_exhaustive(const Model& model, std::span<const double> row, std::span<const double> mean) {
    const std::size_t d = model.schema().size();
    if (row.size() != d || mean.size() != d) throw Error("row or background width does not match the model");
    if (d > kMaxExhaustiveFeatures) {
        throw Error("exhaustive attribution supports at most " + std::to_string(kMaxExhaustiveFeatures) +
                    " features");
    }
    const std::size_t subsets = std::size_t{1} << d;
    std::vector<double> value(subsets);
    std::vector<double> z(d);
    for (std::size_t s = 0; s < subsets; ++s) {
        for (std::size_t j = 0; j < d; ++j) z[j] = (s >> j) & 1U ? row[j] : mean[j];
        value[s] = model.raw_output(z);
    }
    // weight[k] = k! (d - k - 1)! / d!
    std::vector<double> weight(d);
    for (std::size_t k = 0; k < d; ++k) {
        weight[k] = std::exp(std::lgamma(double(k) + 1) + std::lgamma(double(d - k)) - std::lgamma(double(d) + 1));
    }
    ShapExplanation e;
    e.output_space = model.output_space();
    e.base_value = value[0];
    e.phi.assign(d, 0.0);
    for (std::size_t s = 0; s < subsets; ++s) {
        const auto k = static_cast<std::size_t>(__builtin_popcountll(s));
        for (std::size_t j = 0; j < d; ++j) {
            if ((s >> j) & 1U) continue;
            e.phi[j] += weight[k] * (value[s | (std::size_t{1} << j)] - value[s]);
        }
    }
    return e;
}

ShapExplanation explain_row(const Model& model, std::span<const double> row) {
    switch (model.family()) {
        case Family::logit:
            if (model.background_mean().empty()) throw Error("model has no background mean");
            return shap_linear(model, row, model.background_mean());
        case Family::cart:
        case Family::rf:
        case Family::gbt: return shap_tree(model, row);
        case Family::nn:
            if (model.background_mean().empty()) throw Error("model has no background mean");
            return shap_exhaustive(model, row, model.background_mean());
    }
    throw Error("unsupported model family");
}

Importance normalize_importance(std::vector<double> mean_abs) {
    Importance imp;
    imp.mean_abs = std::move(mean_abs);
    const auto d = imp.mean_abs.size();
    imp.normalized.assign(d, 100.0);
    if (d == 0) return imp;
    const auto [lo_it, hi_it] = std::minmax_element(imp.mean_abs.begin(), imp.mean_abs.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        imp.constant = true;
        return imp;
    }
    for (std::size_t j = 0; j < d; ++j) imp.normalized[j] = 1.0 + 99.0 * (imp.mean_abs[j] - lo) / (hi - lo);
    return imp;
}

Importance global_importance(std::span<const ShapExplanation> explanations) {
    if (explanations.empty()) throw Error("global importance needs at least one explanation");
    const std::size_t d = explanations.front().phi.size();
    std::vector<double> acc(d, 0.0);
    for (const auto& e : explanations) {
        if (e.phi.size() != d) throw Error("explanations disagree on feature count");
        for (std::size_t j = 0; j < d; ++j) acc[j] += std::abs(e.phi[j]);
    }
    for (auto& v : acc) v /= static_cast<double>(explanations.size());
    return normalize_importance(std::move(acc));
}

std::vector<int> rank_features(std::span<const double> mean_abs) {
    std::vector<std::size_t> order(mean_abs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean_abs[a] > mean_abs[b]; });
    std::vector<int> rank(mean_abs.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i + 1);
    return rank;
}

std::vector<StabilityRow> stability_across_splits(const std::vector<std::string>& schema,
                                                  std::span<const Importance> splits) {
    if (splits.empty()) throw Error("stability needs at least one split");
    const std::size_t d = schema.size();
    std::vector<StabilityRow> out(d);
    for (std::size_t j = 0; j < d; ++j) out[j].feature = schema[j];
    for (const auto& s : splits) {
        if (s.mean_abs.size() != d || s.normalized.size() != d) throw Error("split importance schema mismatch");
        const auto rank = rank_features(s.mean_abs);
        double cutoff = -1;
        for (std::size_t j = 0; j < d; ++j) {
            if (static_cast<std::size_t>(rank[j]) == std::min(kTopK, d)) cutoff = s.mean_abs[j];
        }
        for (std::size_t j = 0; j < d; ++j) {
            const bool top = static_cast<std::size_t>(rank[j]) <= kTopK || s.mean_abs[j] == cutoff;
            out[j].top6_frequency += top ? 1.0 : 0.0;
            out[j].mean_rank += rank[j];
            out[j].mean_normalized_importance += s.normalized[j];
        }
    }
    const double n = static_cast<double>(splits.size());
    for (auto& r : out) {
        r.top6_frequency /= n;
        r.mean_rank /= n;
        r.mean_normalized_importance /= n;
    }
    return out;
}

}  // namespace ews::explain
