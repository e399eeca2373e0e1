#include "ews/models.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ews/hash.hpp"

namespace ews::models {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::logit: return "logit";
        case Family::cart: return "cart";
        case Family::rf: return "rf";
        case Family::gbt: return "gbt";
        case Family::nn: return "nn";
    }
    return "logit";
}

Family parse_family(std::string_view s) {
    if (s == "logit") return Family::logit;
    if (s == "cart") return Family::cart;
    if (s == "rf") return Family::rf;
    if (s == "gbt") return Family::gbt;
    if (s == "nn") return Family::nn;
    throw Error("unknown model family '" + std::string(s) + "'");
}

std::string_view to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

Activation parse_activation(std::string_view s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    throw Error("unknown activation '" + std::string(s) + "'");
}

std::string_view to_string(OutputSpace s) { return s == OutputSpace::log_odds ? "log_odds" : "probability"; }

std::array<double, 3> ModelConfig::capacity() const {
    switch (family) {
        case Family::logit: return {0.0, 0.0, -l2};
        case Family::cart: return {0.0, double(max_depth), -min_leaf_weight};
        case Family::rf: return {double(n_trees), double(max_depth), -min_leaf_weight};
        case Family::gbt: return {double(n_rounds), double(max_depth), -l2_leaf};
        case Family::nn: return {double(epochs), double(hidden_units), -l2};
    }
    return {0, 0, 0};
}

std::string ModelConfig::describe() const {
    std::ostringstream s;
    s << to_string(family) << '(';
    switch (family) {
        case Family::logit: s << "l2=" << l2; break;
        case Family::cart: s << "depth=" << max_depth << ",min_leaf=" << min_leaf_weight; break;
        case Family::rf:
            s << "trees=" << n_trees << ",depth=" << max_depth << ",ff=" << feature_fraction
              << ",min_leaf=" << min_leaf_weight << ",bootstrap=" << (bootstrap ? 1 : 0);
            break;
        case Family::gbt:
            s << "rounds=" << n_rounds << ",lr=" << learning_rate << ",depth=" << max_depth << ",l2_leaf=" << l2_leaf
              << ",min_hess=" << min_leaf_weight;
            break;
        case Family::nn:
            s << "hidden=" << hidden_units << ",act=" << to_string(activation) << ",l2=" << l2
              << ",epochs=" << epochs << ",lr=" << nn_learning_rate;
            break;
    }
    s << ')';
    return s.str();
}

// ---------------------------------------------------------------------------
// Model

Model::Model(ModelConfig config, std::vector<std::string> schema, std::uint64_t seed, ModelParams params)
    : config_(config), schema_(std::move(schema)), seed_(seed), params_(std::move(params)) {}

OutputSpace Model::output_space() const {
    return (family() == Family::cart || family() == Family::rf) ? OutputSpace::probability : OutputSpace::log_odds;
}

double NeuralNetParams::margin(std::span<const double> row) const {
    double out = b2;
    if (hidden == 0) {
        for (std::size_t j = 0; j < inputs; ++j) out += w2[j] * row[j];
        return out;
    }
    for (std::size_t k = 0; k < hidden; ++k) {
        double z = b1[k];
        const double* w = w1.data() + k * inputs;
        for (std::size_t j = 0; j < inputs; ++j) z += w[j] * row[j];
        const double a = activation == Activation::tanh ? std::tanh(z) : std::max(0.0, z);
        out += w2[k] * a;
    }
    return out;
}

std::vector<double> NeuralNetParams::flatten() const {
    std::vector<double> theta;
    theta.reserve(num_params());
    theta.insert(theta.end(), w1.begin(), w1.end());
    theta.insert(theta.end(), b1.begin(), b1.end());
    theta.insert(theta.end(), w2.begin(), w2.end());
    theta.push_back(b2);
    return theta;
}

void NeuralNetParams::unflatten(std::span<const double> theta) {
    if (theta.size() != num_params()) throw Error("parameter vector has the wrong length");
    auto it = theta.begin();
    std::copy(it, it + static_cast<std::ptrdiff_t>(w1.size()), w1.begin());
    it += static_cast<std::ptrdiff_t>(w1.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(b1.size()), b1.begin());
    it += static_cast<std::ptrdiff_t>(b1.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(w2.size()), w2.begin());
    it += static_cast<std::ptrdiff_t>(w2.size());
    b2 = *it;
}

double Model::raw_output(std::span<const double> row) const {
    if (row.size() != schema_.size()) throw Error("row width does not match the model schema");
    struct Visitor {
        std::span<const double> row;
        double operator()(const LogisticParams& p) const {
            double z = p.intercept;
            for (std::size_t j = 0; j < p.coef.size(); ++j) z += p.coef[j] * row[j];
            return z;
        }
        double operator()(const CartParams& p) const { return p.tree.predict(row); }
        double operator()(const ForestParams& p) const {
            double s = 0;
            for (const auto& t : p.trees) s += t.predict(row);
            return s / static_cast<double>(p.trees.size());
        }
        double operator()(const BoostedParams& p) const {
            double s = p.prior;
            for (const auto& t : p.trees) s += t.predict(row);
            return s;
        }
        double operator()(const NeuralNetParams& p) const { return p.margin(row); }
    };
    return std::visit(Visitor{row}, params_);
}

double Model::predict_proba_row(std::span<const double> row) const {
    const double raw = raw_output(row);
    return clip_probability(output_space() == OutputSpace::log_odds ? sigmoid(raw) : raw);
}

std::vector<double> Model::predict_proba(const Matrix& x) const {
    check_schema(x.cols());
    std::vector<double> p(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) p[i] = predict_proba_row(x.row(i));
    return p;
}

void Model::check_schema(std::size_t cols, std::span<const std::string> names) const {
    if (cols != schema_.size()) {
        throw Error("schema mismatch: model expects " + std::to_string(schema_.size()) + " features, got " +
                    std::to_string(cols));
    }
    if (!names.empty()) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (names[j] != schema_[j]) {
                throw Error("schema mismatch at column " + std::to_string(j) + ": expected '" + schema_[j] +
                            "', got '" + names[j] + "'");
            }
        }
    }
}

namespace {

std::vector<std::string> schema_of(const Dataset& d) {
    if (!d.feature_names.empty()) return d.feature_names;
    std::vector<std::string> names(d.num_features());
    for (std::size_t j = 0; j < names.size(); ++j) names[j] = "f" + std::to_string(j);
    return names;
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void require_both_classes(const Dataset& d) {
    double pos = 0, neg = 0;
    for (std::size_t i = 0; i < d.size(); ++i) (d.y[i] ? pos : neg) += d.w[i];
    if (pos <= 0 || neg <= 0) throw Error("training data must contain both classes with positive weight");
}

double weighted_prior(const Dataset& d) {
    double pos = 0, neg = 0;
    for (std::size_t i = 0; i < d.size(); ++i) (d.y[i] ? pos : neg) += d.w[i];
    return std::log(pos / neg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression

double logistic_objective(const Dataset& data, double l2, std::span<const double> theta, std::span<double> grad) {
    const std::size_t d = data.num_features();
    if (theta.size() != d + 1) throw Error("logistic parameter vector has the wrong length");
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto row = data.x.row(i);
        double z = theta[0];
        for (std::size_t j = 0; j < d; ++j) z += theta[j + 1] * row[j];
        loss += data.w[i] * (softplus(z) - data.y[i] * z);
        if (want_grad) {
            const double r = data.w[i] * (sigmoid(z) - data.y[i]);
            grad[0] += r;
            for (std::size_t j = 0; j < d; ++j) grad[j + 1] += r * row[j];
        }
    }
    for (std::size_t j = 1; j <= d; ++j) {
        loss += 0.5 * l2 * theta[j] * theta[j];
        if (want_grad) grad[j] += l2 * theta[j];
    }
    return loss;
}

Model fit_logistic(const Dataset& data, double l2, LogisticOptions options) {
    data.validate();
    require_both_classes(data);
    if (l2 < 0) throw Error("l2 must be non-negative");
    const std::size_t d = data.num_features();
    const std::size_t p = d + 1;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    theta[0] = weighted_prior(data);
    Eigen::VectorXd grad(static_cast<Eigen::Index>(p)), trial(static_cast<Eigen::Index>(p));

    auto dump = [&](const Eigen::VectorXd& t) {
        std::ostringstream s;
        s << "[";
        for (Eigen::Index j = 0; j < t.size(); ++j) s << (j ? ", " : "") << t[j];
        s << "]";
        return s.str();
    };

    double loss = logistic_objective(data, l2, {theta.data(), p}, {grad.data(), p});
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (!std::isfinite(loss)) throw Error("logistic loss is not finite at iterate " + dump(theta));
        if (grad.norm() <= options.gradient_tolerance) break;
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        Eigen::VectorXd xi(static_cast<Eigen::Index>(p));
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto row = data.x.row(i);
            xi[0] = 1.0;
            double z = theta[0];
            for (std::size_t j = 0; j < d; ++j) {
                xi[static_cast<Eigen::Index>(j + 1)] = row[j];
                z += theta[static_cast<Eigen::Index>(j + 1)] * row[j];
            }
            const double s = sigmoid(z);
            hess.selfadjointView<Eigen::Lower>().rankUpdate(xi, data.w[i] * s * (1.0 - s));
        }
        hess = hess.selfadjointView<Eigen::Lower>();
        for (std::size_t j = 1; j < p; ++j) hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += l2;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        Eigen::VectorXd step = ldlt.solve(-grad);
        if (ldlt.info() != Eigen::Success || !step.allFinite() || grad.dot(step) >= 0) {
            step = -grad;  // fall back to steepest descent
        }
        double t = 1.0;
        const double slope = grad.dot(step);
        bool accepted = false;
        double new_loss = loss;
        while (t > 1e-12) {
            trial = theta + t * step;
            new_loss = logistic_objective(data, l2, {trial.data(), p}, {});
            if (std::isfinite(new_loss) && new_loss <= loss + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        // No representable descent left: the gradient is at rounding level.
        if (!accepted || !(new_loss < loss)) break;
        theta = trial;
        loss = logistic_objective(data, l2, {theta.data(), p}, {grad.data(), p});
    }
    if (!std::isfinite(loss)) throw Error("logistic loss is not finite at iterate " + dump(theta));

    LogisticParams params;
    params.intercept = theta[0];
    params.coef.assign(theta.data() + 1, theta.data() + p);
    ModelConfig cfg;
    cfg.family = Family::logit;
    cfg.l2 = l2;
    return Model(cfg, schema_of(data), 0, std::move(params));
}

// ---------------------------------------------------------------------------
// Trees

namespace {

std::vector<std::uint32_t> positive_rows(std::span<const double> s2) {
    std::vector<std::uint32_t> rows;
    rows.reserve(s2.size());
    for (std::size_t i = 0; i < s2.size(); ++i) {
        if (s2[i] > 0) rows.push_back(static_cast<std::uint32_t>(i));
    }
    return rows;
}

tree::Tree grow_classification_tree(const tree::BinnedFeatures& bins, const Dataset& data,
                                    std::span<const double> weight, int max_depth, double min_leaf_weight,
                                    double feature_fraction, std::mt19937_64* rng) {
    std::vector<double> s1(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) s1[i] = weight[i] * data.y[i];
    tree::GrowParams gp;
    gp.criterion = tree::Criterion::gini;
    gp.max_depth = max_depth;
    gp.min_child_s2 = std::max(min_leaf_weight, 1e-12);
    gp.lambda = 0.0;
    gp.feature_fraction = feature_fraction;
    tree::RowStats stats{s1, weight, weight};
    auto rows = positive_rows(weight);
    if (rows.empty()) throw Error("no rows with positive weight");
    return tree::grow_tree(bins, stats, std::move(rows), gp,
                           [](double a, double b) { return clip_probability(b > 0 ? a / b : 0.5); }, rng);
}

}  // namespace

Model fit_cart(const Dataset& data, int max_depth, double min_leaf_weight) {
    data.validate();
    if (data.size() < 2) throw Error("CART needs at least two rows");
    if (max_depth < 0) throw Error("max_depth must be non-negative");
    const auto bins = tree::bin_features(data.x);
    CartParams params{grow_classification_tree(bins, data, data.w, max_depth, min_leaf_weight, 1.0, nullptr)};
    ModelConfig cfg;
    cfg.family = Family::cart;
    cfg.max_depth = max_depth;
    cfg.min_leaf_weight = min_leaf_weight;
    return Model(cfg, schema_of(data), 0, std::move(params));
}

Model fit_random_forest(const Dataset& data, int n_trees, int max_depth, double feature_fraction,
                        std::uint64_t seed, bool bootstrap, double min_leaf_weight) {
    data.validate();
    if (n_trees < 1) throw Error("random forest needs at least one tree");
    if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) throw Error("feature_fraction must be in (0, 1]");
    if (data.size() < 2) throw Error("random forest needs at least two rows");
    const auto bins = tree::bin_features(data.x);
    ForestParams params;
    params.trees.reserve(static_cast<std::size_t>(n_trees));
    const std::size_t n = data.size();
    std::vector<double> weight(n);
    for (int t = 0; t < n_trees; ++t) {
        std::mt19937_64 rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
        if (bootstrap) {
            std::vector<std::uint32_t> counts(n, 0);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t k = 0; k < n; ++k) ++counts[pick(rng)];
            for (std::size_t i = 0; i < n; ++i) weight[i] = counts[i] * data.w[i];
        } else {
            weight = data.w;
        }
        params.trees.push_back(
            grow_classification_tree(bins, data, weight, max_depth, min_leaf_weight, feature_fraction, &rng));
    }
    ModelConfig cfg;
    cfg.family = Family::rf;
    cfg.n_trees = n_trees;
    cfg.max_depth = max_depth;
    cfg.feature_fraction = feature_fraction;
    cfg.bootstrap = bootstrap;
    cfg.min_leaf_weight = min_leaf_weight;
    return Model(cfg, schema_of(data), seed, std::move(params));
}

Model fit_gradient_boosting(const Dataset& data, int n_rounds, double learning_rate, int max_depth, double l2_leaf,
                            std::uint64_t seed, double min_child_hessian) {
    data.validate();
    require_both_classes(data);
    if (n_rounds < 1) throw Error("gradient boosting needs at least one round");
    if (!(learning_rate > 0)) throw Error("learning_rate must be positive");
    if (l2_leaf < 0) throw Error("l2_leaf must be non-negative");
    const std::size_t n = data.size();
    const auto bins = tree::bin_features(data.x);
    BoostedParams params;
    params.prior = weighted_prior(data);
    std::vector<double> score(n, params.prior), g(n), h(n);
    tree::GrowParams gp;
    gp.criterion = tree::Criterion::newton;
    gp.max_depth = max_depth;
    gp.lambda = l2_leaf;
    gp.min_child_s2 = std::max(min_child_hessian, 1e-12);
    const auto rows = positive_rows(data.w);
    const auto leaf = [&](double G, double H) { return -learning_rate * G / (H + l2_leaf); };
    for (int round = 0; round < n_rounds; ++round) {
        double hsum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            g[i] = data.w[i] * (p - data.y[i]);
            h[i] = data.w[i] * p * (1.0 - p);
            hsum += h[i];
        }
        if (!std::isfinite(hsum)) throw Error("non-finite Hessian sum in boosting round " + std::to_string(round));
        tree::RowStats stats{g, h, data.w};
        tree::Tree t = tree::grow_tree(bins, stats, rows, gp, leaf);
        for (std::size_t i = 0; i < n; ++i) score[i] += t.predict(data.x.row(i));
        params.trees.push_back(std::move(t));
    }
    ModelConfig cfg;
    cfg.family = Family::gbt;
    cfg.n_rounds = n_rounds;
    cfg.learning_rate = learning_rate;
    cfg.max_depth = max_depth;
    cfg.l2_leaf = l2_leaf;
    cfg.min_leaf_weight = min_child_hessian;
    return Model(cfg, schema_of(data), seed, std::move(params));
}

std::vector<double> boosting_loss_curve(const Model& model, const Dataset& data) {
    const auto* p = std::get_if<BoostedParams>(&model.params());
    if (!p) throw Error("loss curve requires a gradient boosting model");
    const std::size_t n = data.size();
    std::vector<double> score(n, p->prior);
    double wsum = std::accumulate(data.w.begin(), data.w.end(), 0.0);
    auto loss = [&] {
        double l = 0;
        for (std::size_t i = 0; i < n; ++i) l += data.w[i] * (softplus(score[i]) - data.y[i] * score[i]);
        return l / wsum;
    };
    std::vector<double> curve{loss()};
    for (const auto& t : p->trees) {
        for (std::size_t i = 0; i < n; ++i) score[i] += t.predict(data.x.row(i));
        curve.push_back(loss());
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Neural network

NeuralNetParams init_neural_net(std::size_t inputs, std::size_t hidden, Activation activation, double prior,
                                std::uint64_t seed) {
    NeuralNetParams net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.activation = activation;
    std::mt19937_64 rng(seed);
    if (hidden == 0) {
        net.w2.assign(inputs, 0.0);
    } else {
        const double a = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
        const double b = std::sqrt(6.0 / static_cast<double>(hidden + 1));
        std::uniform_real_distribution<double> u1(-a, a), u2(-b, b);
        net.w1.resize(hidden * inputs);
        for (auto& w : net.w1) w = u1(rng);
        net.b1.assign(hidden, 0.0);
        net.w2.resize(hidden);
        for (auto& w : net.w2) w = u2(rng);
    }
    net.b2 = prior;
    return net;
}

double neural_net_objective(const Dataset& data, double l2, NeuralNetParams& net, std::span<const double> theta,
                            std::span<double> grad) {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    net.unflatten(theta);
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto d = static_cast<Eigen::Index>(net.inputs);
    const auto h = static_cast<Eigen::Index>(net.hidden);
    if (static_cast<std::size_t>(d) != data.num_features()) throw Error("network input width mismatch");
    Eigen::Map<const RowMat> X(data.x.data().data(), n, d);
    Eigen::Map<const Eigen::VectorXd> w(data.w.data(), n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = data.y[static_cast<std::size_t>(i)];
    const double wsum = w.sum();
    if (!(wsum > 0)) throw Error("total instance weight must be positive");

    Eigen::Map<const Eigen::VectorXd> w2(net.w2.data(), static_cast<Eigen::Index>(net.w2.size()));
    RowMat A;
    Eigen::VectorXd out;
    if (h == 0) {
        out = (X * w2).array() + net.b2;
    } else {
        Eigen::Map<const RowMat> W1(net.w1.data(), h, d);
        Eigen::Map<const Eigen::RowVectorXd> b1(net.b1.data(), h);
        A = (X * W1.transpose()).rowwise() + b1;
        if (net.activation == Activation::tanh) {
            A = A.array().tanh();
        } else {
            A = A.array().max(0.0);
        }
        out = (A * w2).array() + net.b2;
    }

    double loss = 0;
    Eigen::VectorXd delta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        loss += w[i] * (softplus(out[i]) - y[i] * out[i]);
        delta[i] = w[i] * (sigmoid(out[i]) - y[i]) / wsum;
    }
    double reg = w2.squaredNorm();
    for (double v : net.w1) reg += v * v;
    loss = (loss + 0.5 * l2 * reg) / wsum;

    if (!grad.empty()) {
        if (grad.size() != net.num_params()) throw Error("gradient buffer has the wrong length");
        std::size_t off = 0;
        if (h == 0) {
            Eigen::VectorXd gw2 = X.transpose() * delta + (l2 / wsum) * w2;
            std::copy(gw2.data(), gw2.data() + d, grad.begin());
            off = static_cast<std::size_t>(d);
        } else {
            Eigen::Map<const RowMat> W1(net.w1.data(), h, d);
            RowMat dZ = delta * w2.transpose();
            if (net.activation == Activation::tanh) {
                dZ.array() *= 1.0 - A.array().square();
            } else {
                dZ.array() *= (A.array() > 0.0).cast<double>();
            }
            RowMat gW1 = dZ.transpose() * X + (l2 / wsum) * W1;
            Eigen::RowVectorXd gb1 = dZ.colwise().sum();
            Eigen::VectorXd gw2 = A.transpose() * delta + (l2 / wsum) * w2;
            std::copy(gW1.data(), gW1.data() + h * d, grad.begin());
            off = static_cast<std::size_t>(h * d);
            std::copy(gb1.data(), gb1.data() + h, grad.begin() + static_cast<std::ptrdiff_t>(off));
            off += static_cast<std::size_t>(h);
            std::copy(gw2.data(), gw2.data() + h, grad.begin() + static_cast<std::ptrdiff_t>(off));
            off += static_cast<std::size_t>(h);
        }
        grad[off] = delta.sum();
    }
    return loss;
}

Model fit_neural_net(const Dataset& data, int hidden_units, double l2, int epochs, double learning_rate,
                     std::uint64_t seed, Activation activation) {
    data.validate();
    require_both_classes(data);
    if (hidden_units < 0) throw Error("hidden_units must be non-negative");
    if (epochs < 0) throw Error("epochs must be non-negative");
    NeuralNetParams net = init_neural_net(data.num_features(), static_cast<std::size_t>(hidden_units), activation,
                                          weighted_prior(data), seed);
    std::vector<double> theta = net.flatten();
    std::vector<double> grad(theta.size());
    const double initial = neural_net_objective(data, l2, net, theta, grad);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const double loss = epoch == 0 ? initial : neural_net_objective(data, l2, net, theta, grad);
        if (!std::isfinite(loss) || loss > 10.0 * initial) {
            throw Error("neural network training diverged at epoch " + std::to_string(epoch) +
                        "; use a smaller learning rate");
        }
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= learning_rate * grad[k];
    }
    net.unflatten(theta);
    ModelConfig cfg;
    cfg.family = Family::nn;
    cfg.hidden_units = hidden_units;
    cfg.l2 = l2;
    cfg.epochs = epochs;
    cfg.nn_learning_rate = learning_rate;
    cfg.activation = activation;
    return Model(cfg, schema_of(data), seed, std::move(net));
}

Model fit_model(const ModelConfig& c, const Dataset& data, std::uint64_t seed) {
    switch (c.family) {
        case Family::logit: return fit_logistic(data, c.l2);
        case Family::cart: return fit_cart(data, c.max_depth, c.min_leaf_weight);
        case Family::rf:
            return fit_random_forest(data, c.n_trees, c.max_depth, c.feature_fraction, seed, c.bootstrap,
                                     c.min_leaf_weight);
        case Family::gbt:
            return fit_gradient_boosting(data, c.n_rounds, c.learning_rate, c.max_depth, c.l2_leaf, seed,
                                         c.min_leaf_weight);
        case Family::nn:
            return fit_neural_net(data, c.hidden_units, c.l2, c.epochs, c.nn_learning_rate, seed, c.activation);
    }
    throw Error("unsupported model family");
}

}  // namespace ews::models
