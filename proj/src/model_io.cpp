#include "ews/model_io.hpp"

#include "ews/csv.hpp"
#include "json.hpp"

namespace ews::models {

using json = nlohmann::ordered_json;

namespace {

json tree_to_json(const tree::Tree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value, n.cover}));
    }
    return nodes;
}

tree::Tree tree_from_json(const json& j) {
    tree::Tree t;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 6) throw Error("malformed tree node");
        tree::TreeNode n;
        n.feature = a[0].get<int>();
        n.threshold = a[1].get<double>();
        n.left = a[2].get<int>();
        n.right = a[3].get<int>();
        n.value = a[4].get<double>();
        n.cover = a[5].get<double>();
        t.nodes.push_back(n);
    }
    const int size = static_cast<int>(t.nodes.size());
    if (size == 0) throw Error("tree has no nodes");
    for (const auto& n : t.nodes) {
        if ((n.left < 0) != (n.right < 0) || n.left >= size || n.right >= size) throw Error("bad tree child index");
    }
    return t;
}

json trees_to_json(const std::vector<tree::Tree>& trees) {
    json a = json::array();
    for (const auto& t : trees) a.push_back(tree_to_json(t));
    return a;
}

std::vector<tree::Tree> trees_from_json(const json& j) {
    std::vector<tree::Tree> trees;
    for (const auto& t : j) trees.push_back(tree_from_json(t));
    return trees;
}

json config_to_json(const ModelConfig& c) {
    json j;
    j["family"] = std::string(to_string(c.family));
    j["l2"] = c.l2;
    j["max_depth"] = c.max_depth;
    j["min_leaf_weight"] = c.min_leaf_weight;
    j["n_trees"] = c.n_trees;
    j["feature_fraction"] = c.feature_fraction;
    j["bootstrap"] = c.bootstrap;
    j["n_rounds"] = c.n_rounds;
    j["learning_rate"] = c.learning_rate;
    j["l2_leaf"] = c.l2_leaf;
    j["hidden_units"] = c.hidden_units;
    j["activation"] = std::string(to_string(c.activation));
    j["epochs"] = c.epochs;
    j["nn_learning_rate"] = c.nn_learning_rate;
    return j;
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.family = parse_family(j.at("family").get<std::string>());
    c.l2 = j.at("l2").get<double>();
    c.max_depth = j.at("max_depth").get<int>();
    c.min_leaf_weight = j.at("min_leaf_weight").get<double>();
    c.n_trees = j.at("n_trees").get<int>();
    c.feature_fraction = j.at("feature_fraction").get<double>();
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.n_rounds = j.at("n_rounds").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.l2_leaf = j.at("l2_leaf").get<double>();
    c.hidden_units = j.at("hidden_units").get<int>();
    c.activation = parse_activation(j.at("activation").get<std::string>());
    c.epochs = j.at("epochs").get<int>();
    c.nn_learning_rate = j.at("nn_learning_rate").get<double>();
    return c;
}

}  // namespace

std::string to_json(const Model& model) {
    json j;
    j["schema"] = std::string(kModelSchema);
    j["family"] = std::string(to_string(model.family()));
    j["seed"] = model.seed();
    j["features"] = model.schema();
    j["config"] = config_to_json(model.config());
    j["background_mean"] = model.background_mean();
    json p;
    std::visit(
        [&](const auto& params) {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, LogisticParams>) {
                p["intercept"] = params.intercept;
                p["coef"] = params.coef;
            } else if constexpr (std::is_same_v<T, CartParams>) {
                p["tree"] = tree_to_json(params.tree);
            } else if constexpr (std::is_same_v<T, ForestParams>) {
                p["trees"] = trees_to_json(params.trees);
            } else if constexpr (std::is_same_v<T, BoostedParams>) {
                p["prior"] = params.prior;
                p["trees"] = trees_to_json(params.trees);
            } else {
                p["inputs"] = params.inputs;
                p["hidden"] = params.hidden;
                p["activation"] = std::string(to_string(params.activation));
                p["w1"] = params.w1;
                p["b1"] = params.b1;
                p["w2"] = params.w2;
                p["b2"] = params.b2;
            }
        },
        model.params());
    j["params"] = std::move(p);
    return j.dump(1);
}

Model from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("model document is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != kModelSchema) {
            throw Error("unsupported model schema '" + j.at("schema").get<std::string>() + "'");
        }
        const ModelConfig cfg = config_from_json(j.at("config"));
        const auto& p = j.at("params");
        ModelParams params;
        switch (cfg.family) {
            case Family::logit:
                params = LogisticParams{p.at("intercept").get<double>(), p.at("coef").get<std::vector<double>>()};
                break;
            case Family::cart: params = CartParams{tree_from_json(p.at("tree"))}; break;
            case Family::rf: params = ForestParams{trees_from_json(p.at("trees"))}; break;
            case Family::gbt:
                params = BoostedParams{p.at("prior").get<double>(), trees_from_json(p.at("trees"))};
                break;
            case Family::nn: {
                NeuralNetParams net;
                net.inputs = p.at("inputs").get<std::size_t>();
                net.hidden = p.at("hidden").get<std::size_t>();
                net.activation = parse_activation(p.at("activation").get<std::string>());
                net.w1 = p.at("w1").get<std::vector<double>>();
                net.b1 = p.at("b1").get<std::vector<double>>();
                net.w2 = p.at("w2").get<std::vector<double>>();
                net.b2 = p.at("b2").get<double>();
                params = std::move(net);
                break;
            }
        }
        Model m(cfg, j.at("features").get<std::vector<std::string>>(), j.at("seed").get<std::uint64_t>(),
                std::move(params));
        m.set_background_mean(j.at("background_mean").get<std::vector<double>>());
        return m;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const Model& model, const std::filesystem::path& path) { write_file(path, to_json(model) + "\n"); }

Model load_model(const std::filesystem::path& path) { return from_json(read_file(path)); }

}  // namespace ews::models
