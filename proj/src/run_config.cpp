#include "ews/run_config.hpp"

#include "ews/csv.hpp"
#include "json.hpp"

namespace ews::bench {

using json = nlohmann::ordered_json;
using models::Family;
using models::ModelConfig;

std::string_view to_string(ImputationMode m) {
    switch (m) {
        case ImputationMode::none: return "none";
        case ImputationMode::global: return "global";
        case ImputationMode::per_window: return "per_window";
    }
    return "global";
}

ImputationMode parse_imputation_mode(std::string_view s) {
    if (s == "none") return ImputationMode::none;
    if (s == "global") return ImputationMode::global;
    if (s == "per_window") return ImputationMode::per_window;
    throw Error("unknown imputation mode '" + std::string(s) + "'");
}

std::vector<ModelConfig> default_grid(Family family) {
    std::vector<ModelConfig> grid;
    auto base = [&] {
        ModelConfig c;
        c.family = family;
        return c;
    };
    switch (family) {
        case Family::logit:
            for (double l2 : {1.0, 10.0}) {
                auto c = base();
                c.l2 = l2;
                grid.push_back(c);
            }
            break;
        case Family::cart:
            for (int depth : {3, 5}) {
                auto c = base();
                c.max_depth = depth;
                c.min_leaf_weight = 5;
                grid.push_back(c);
            }
            break;
        case Family::rf:
            for (int depth : {4, 6}) {
                auto c = base();
                c.n_trees = 50;
                c.max_depth = depth;
                c.feature_fraction = 0.5;
                c.min_leaf_weight = 5;
                grid.push_back(c);
            }
            break;
        case Family::gbt:
            for (int depth : {2, 3}) {
                auto c = base();
                c.n_rounds = 60;
                c.learning_rate = 0.1;
                c.max_depth = depth;
                c.l2_leaf = 1.0;
                c.min_leaf_weight = 1.0;
                grid.push_back(c);
            }
            break;
        case Family::nn:
            for (int hidden : {4, 8}) {
                auto c = base();
                c.hidden_units = hidden;
                c.l2 = 1.0;
                c.epochs = 200;
                c.nn_learning_rate = 0.5;
                grid.push_back(c);
            }
            break;
    }
    return grid;
}

const std::vector<ModelConfig>& RunConfig::grid(Family f) const {
    auto it = grids.find(f);
    if (it == grids.end()) throw Error("no grid for family " + std::string(models::to_string(f)));
    return it->second;
}

void RunConfig::validate() const {
    if (panel_path.empty() && (financial_path.empty() || ai_path.empty()) && !generator) {
        throw Error("config needs a panel, financial + ai_features files, or a generator section");
    }
    if (effective_end_year() >= test_year) throw Error("end_year must precede test_year");
    if (earliest_start > effective_end_year()) throw Error("earliest_start is after end_year");
    if (horizon != kDefaultHorizon) throw Error("only a 2-year horizon is supported");
    if (families.empty()) throw Error("no model families selected");
    if (feature_sets.empty()) throw Error("no feature sets selected");
    for (auto f : families) {
        if (grid(f).empty()) throw Error("empty grid for " + std::string(models::to_string(f)));
        for (const auto& c : grid(f)) {
            if (c.family != f) throw Error("grid entry family mismatch");
        }
    }
    if (cv_folds < 2) throw Error("cv_folds must be at least 2");
    if (bootstrap < 1) throw Error("bootstrap must be positive");
    if (!(threshold > 0 && threshold < 1)) throw Error("threshold must lie in (0, 1)");
    if (explain_rows < 0) throw Error("explain_rows must be non-negative");
    if (save_models != "none" && save_models != "first" && save_models != "all") {
        throw Error("save_models must be none, first or all");
    }
    if (jobs < 1) throw Error("jobs must be at least 1");
}

namespace {

ModelConfig grid_entry(Family family, const json& j) {
    ModelConfig c;
    c.family = family;
    for (const auto& [key, v] : j.items()) {
        if (key == "l2") c.l2 = v.get<double>();
        else if (key == "max_depth") c.max_depth = v.get<int>();
        else if (key == "min_leaf_weight") c.min_leaf_weight = v.get<double>();
        else if (key == "n_trees") c.n_trees = v.get<int>();
        else if (key == "feature_fraction") c.feature_fraction = v.get<double>();
        else if (key == "bootstrap") c.bootstrap = v.get<bool>();
        else if (key == "n_rounds") c.n_rounds = v.get<int>();
        else if (key == "learning_rate") c.learning_rate = v.get<double>();
        else if (key == "l2_leaf") c.l2_leaf = v.get<double>();
        else if (key == "hidden_units") c.hidden_units = v.get<int>();
        else if (key == "activation") c.activation = models::parse_activation(v.get<std::string>());
        else if (key == "epochs") c.epochs = v.get<int>();
        else if (key == "nn_learning_rate") c.nn_learning_rate = v.get<double>();
        else throw Error("unknown grid key '" + key + "'");
    }
    return c;
}

json grid_entry_json(const ModelConfig& c) {
    json j;
    switch (c.family) {
        case Family::logit: j["l2"] = c.l2; break;
        case Family::cart:
            j["max_depth"] = c.max_depth;
            j["min_leaf_weight"] = c.min_leaf_weight;
            break;
        case Family::rf:
            j["n_trees"] = c.n_trees;
            j["max_depth"] = c.max_depth;
            j["feature_fraction"] = c.feature_fraction;
            j["bootstrap"] = c.bootstrap;
            j["min_leaf_weight"] = c.min_leaf_weight;
            break;
        case Family::gbt:
            j["n_rounds"] = c.n_rounds;
            j["learning_rate"] = c.learning_rate;
            j["max_depth"] = c.max_depth;
            j["l2_leaf"] = c.l2_leaf;
            j["min_leaf_weight"] = c.min_leaf_weight;
            break;
        case Family::nn:
            j["hidden_units"] = c.hidden_units;
            j["activation"] = std::string(models::to_string(c.activation));
            j["l2"] = c.l2;
            j["epochs"] = c.epochs;
            j["nn_learning_rate"] = c.nn_learning_rate;
            break;
    }
    return j;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig c;
    for (auto f : {Family::logit, Family::cart, Family::rf, Family::gbt, Family::nn}) c.grids[f] = default_grid(f);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "panel") c.panel_path = resolve(base_dir, v.get<std::string>());
            else if (key == "financial") c.financial_path = resolve(base_dir, v.get<std::string>());
            else if (key == "ai_features") c.ai_path = resolve(base_dir, v.get<std::string>());
            else if (key == "generator") c.generator = synth::config_from_json(v.dump());
            else if (key == "test_year") c.test_year = v.get<int>();
            else if (key == "earliest_start") c.earliest_start = v.get<int>();
            else if (key == "end_year") c.end_year = v.get<int>();
            else if (key == "horizon") c.horizon = v.get<int>();
            else if (key == "families") {
                c.families.clear();
                for (const auto& f : v) c.families.push_back(models::parse_family(f.get<std::string>()));
            } else if (key == "feature_sets") {
                c.feature_sets.clear();
                for (const auto& f : v) c.feature_sets.push_back(panel::parse_feature_set(f.get<std::string>()));
            } else if (key == "grids") {
                for (const auto& [fam, entries] : v.items()) {
                    const auto family = models::parse_family(fam);
                    auto& g = c.grids[family];
                    g.clear();
                    for (const auto& e : entries) g.push_back(grid_entry(family, e));
                }
            } else if (key == "cv_folds") c.cv_folds = v.get<int>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "bootstrap") c.bootstrap = v.get<int>();
            else if (key == "threshold") c.threshold = v.get<double>();
            else if (key == "winsorize_ai") c.winsorize_ai = v.get<bool>();
            else if (key == "imputation") {
                for (const auto& [ik, iv] : v.items()) {
                    if (ik == "mode") c.imputation = parse_imputation_mode(iv.get<std::string>());
                    else if (ik == "m") c.imputation_config.m = iv.get<int>();
                    else if (ik == "cycles") c.imputation_config.cycles = iv.get<int>();
                    else if (ik == "seed") c.imputation_config.seed = iv.get<std::uint64_t>();
                    else if (ik == "max_depth") c.imputation_config.max_depth = iv.get<int>();
                    else if (ik == "min_leaf") c.imputation_config.min_leaf = iv.get<double>();
                    else throw Error("unknown imputation key '" + ik + "'");
                }
            } else if (key == "explain_rows") c.explain_rows = v.get<int>();
            else if (key == "save_models") c.save_models = v.get<std::string>();
            else if (key == "record_timing") c.record_timing = v.get<bool>();
            else if (key == "jobs") c.jobs = v.get<int>();
            else throw Error("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_file(path), path.parent_path());
}

std::string run_config_to_json(const RunConfig& c) {
    json j;
    if (!c.panel_path.empty()) j["panel"] = c.panel_path.string();
    if (!c.financial_path.empty()) j["financial"] = c.financial_path.string();
    if (!c.ai_path.empty()) j["ai_features"] = c.ai_path.string();
    if (c.generator) j["generator"] = json::parse(synth::config_to_json(*c.generator));
    j["test_year"] = c.test_year;
    j["earliest_start"] = c.earliest_start;
    j["end_year"] = c.effective_end_year();
    j["horizon"] = c.horizon;
    j["families"] = json::array();
    for (auto f : c.families) j["families"].push_back(std::string(models::to_string(f)));
    j["feature_sets"] = json::array();
    for (auto f : c.feature_sets) j["feature_sets"].push_back(std::string(panel::to_string(f)));
    json grids;
    for (auto f : c.families) {
        json g = json::array();
        for (const auto& e : c.grid(f)) g.push_back(grid_entry_json(e));
        grids[std::string(models::to_string(f))] = g;
    }
    j["grids"] = grids;
    j["cv_folds"] = c.cv_folds;
    j["seed"] = c.seed;
    j["bootstrap"] = c.bootstrap;
    j["threshold"] = c.threshold;
    j["winsorize_ai"] = c.winsorize_ai;
    j["imputation"] = {{"mode", std::string(to_string(c.imputation))},
                       {"m", c.imputation_config.m},
                       {"cycles", c.imputation_config.cycles},
                       {"seed", c.imputation_config.seed},
                       {"max_depth", c.imputation_config.max_depth},
                       {"min_leaf", c.imputation_config.min_leaf}};
    j["explain_rows"] = c.explain_rows;
    j["save_models"] = c.save_models;
    j["record_timing"] = c.record_timing;
    return j.dump(2);
}

}  // namespace ews::bench
