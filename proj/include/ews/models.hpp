#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ews/dataset.hpp"
#include "ews/tree.hpp"

namespace ews::models {

enum class Family { logit, cart, rf, gbt, nn };
std::string_view to_string(Family f);
Family parse_family(std::string_view s);

enum class Activation { tanh, relu };
std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

// Hyperparameters for every family in one flat record; each family reads
// only its own fields.
struct ModelConfig {
    Family family = Family::logit;
    // logit, nn
    double l2 = 1.0;
    // cart, rf, gbt
    int max_depth = 3;
    double min_leaf_weight = 1.0;  // cart/rf: weight mass; gbt: Hessian mass
    // rf
    int n_trees = 100;
    double feature_fraction = 0.5;
    bool bootstrap = true;
    // gbt
    int n_rounds = 100;
    double learning_rate = 0.1;
    double l2_leaf = 1.0;
    // nn
    int hidden_units = 8;
    Activation activation = Activation::tanh;
    int epochs = 300;
    double nn_learning_rate = 0.5;

    // Capacity ordering used to break CV ties toward simpler models:
    // fewer trees, then shallower, then stronger regularization.
    std::array<double, 3> capacity() const;
    std::string describe() const;
};

struct LogisticParams {
    double intercept = 0.0;
    std::vector<double> coef;
};

struct CartParams {
    tree::Tree tree;
};

struct ForestParams {
    std::vector<tree::Tree> trees;
};

struct BoostedParams {
    double prior = 0.0;  // initial log-odds score
    std::vector<tree::Tree> trees;  // leaf values already scaled by the learning rate
};

// One hidden layer; hidden == 0 means a direct linear link (logistic model).
struct NeuralNetParams {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    Activation activation = Activation::tanh;
    std::vector<double> w1;  // hidden x inputs, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden (or inputs when hidden == 0)
    double b2 = 0.0;

    std::size_t num_params() const { return w1.size() + b1.size() + w2.size() + 1; }
    std::vector<double> flatten() const;
    void unflatten(std::span<const double> theta);
    double margin(std::span<const double> row) const;
};

using ModelParams = std::variant<LogisticParams, CartParams, ForestParams, BoostedParams, NeuralNetParams>;

enum class OutputSpace { log_odds, probability };
std::string_view to_string(OutputSpace s);

// A fitted classifier with its feature schema and training metadata.
class Model {
public:
    Model() = default;
    Model(ModelConfig config, std::vector<std::string> schema, std::uint64_t seed, ModelParams params);

    Family family() const { return config_.family; }
    const ModelConfig& config() const { return config_; }
    const std::vector<std::string>& schema() const { return schema_; }
    std::uint64_t seed() const { return seed_; }
    const ModelParams& params() const { return params_; }

    // Feature means of the training background, used by mean-substitution
    // explanations. Empty when unknown.
    const std::vector<double>& background_mean() const { return background_mean_; }
    void set_background_mean(std::vector<double> mean) { background_mean_ = std::move(mean); }

    // Raw model output: log-odds for logit/gbt/nn, probability for cart/rf.
    OutputSpace output_space() const;
    double raw_output(std::span<const double> row) const;

    // Probabilities clipped to [kProbEps, 1 - kProbEps].
    std::vector<double> predict_proba(const Matrix& x) const;
    double predict_proba_row(std::span<const double> row) const;

    // Throws when the matrix width or names differ from the training schema.
    void check_schema(std::size_t cols, std::span<const std::string> names = {}) const;

private:
    ModelConfig config_;
    std::vector<std::string> schema_;
    std::uint64_t seed_ = 0;
    ModelParams params_;
    std::vector<double> background_mean_;
};

// Weighted logistic loss plus l2 * ||beta||^2 / 2 (intercept unpenalized).
// theta = [intercept, beta...]. Gradient is written to `grad` when non-empty.
double logistic_objective(const Dataset& data, double l2, std::span<const double> theta, std::span<double> grad);

struct LogisticOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
};

Model fit_logistic(const Dataset& data, double l2, LogisticOptions options = {});
Model fit_cart(const Dataset& data, int max_depth, double min_leaf_weight);
Model fit_random_forest(const Dataset& data, int n_trees, int max_depth, double feature_fraction, std::uint64_t seed,
                        bool bootstrap = true, double min_leaf_weight = 1.0);
Model fit_gradient_boosting(const Dataset& data, int n_rounds, double learning_rate, int max_depth, double l2_leaf,
                            std::uint64_t seed, double min_child_hessian = 1.0);

// Normalized objective: (weighted cross-entropy + l2/2 * ||weights||^2) / sum(w).
double neural_net_objective(const Dataset& data, double l2, NeuralNetParams& net, std::span<const double> theta,
                            std::span<double> grad);
NeuralNetParams init_neural_net(std::size_t inputs, std::size_t hidden, Activation activation, double prior,
                                std::uint64_t seed);
Model fit_neural_net(const Dataset& data, int hidden_units, double l2, int epochs, double learning_rate,
                     std::uint64_t seed, Activation activation = Activation::tanh);

// Family-agnostic entry point used by the benchmark loop.
Model fit_model(const ModelConfig& config, const Dataset& data, std::uint64_t seed);

// Gradient-boosting training loss (normalized weighted log-loss) after each round.
std::vector<double> boosting_loss_curve(const Model& model, const Dataset& data);

}  // namespace ews::models
