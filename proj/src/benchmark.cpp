#include "ews/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ews/csv.hpp"
#include "ews/hash.hpp"
#include "ews/model_io.hpp"
#include "json.hpp"

namespace ews::bench {

using json = nlohmann::ordered_json;
using models::Family;
using panel::FeatureSet;

namespace {

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

LoadedPanel load_panel(const RunConfig& config) {
    LoadedPanel out;
    if (!config.panel_path.empty()) {
        const auto content = read_file(config.panel_path);
        out.digests["panel"] = hex64(fnv1a64(content));
        out.panel = panel::parse_panel(content);
        return out;
    }
    if (!config.financial_path.empty()) {
        const auto fin = read_file(config.financial_path);
        const auto ai = read_file(config.ai_path);
        out.digests["financial"] = hex64(fnv1a64(fin));
        out.digests["ai_features"] = hex64(fnv1a64(ai));
        const auto fin_rows = panel::read_financial_rows(config.financial_path);
        const auto ai_rows = panel::read_ai_feature_rows(config.ai_path);
        auto built = panel::build_panel(fin_rows, ai_rows);
        out.panel = std::move(built.panel);
        out.build = std::move(built.report);
        return out;
    }
    const auto data = synth::generate(*config.generator);
    out.digests["generator"] = hex64(fnv1a64(synth::config_to_json(*config.generator)));
    auto built = panel::build_panel(data.financial, data.ai);
    out.panel = std::move(built.panel);
    out.build = std::move(built.report);
    return out;
}

std::size_t BenchmarkResult::completed_windows() const {
    std::set<std::size_t> done;
    for (const auto& t : tasks) {
        if (t.ok) done.insert(t.window);
    }
    return done.size();
}

namespace {

// Replaces financial features of instances with values from an imputed panel.
void refresh_features(std::vector<panel::LabeledInstance>& instances, const panel::Panel& imputed) {
    for (auto& inst : instances) {
        const auto* row = imputed.find(inst.firm_id, inst.feature_year);
        if (!row) throw Error("imputed panel lacks " + inst.firm_id + " " + std::to_string(inst.feature_year));
        inst.features = row->features();
    }
}

bool has_missing(const std::vector<panel::LabeledInstance>& instances) {
    for (const auto& inst : instances) {
        for (std::size_t j = 0; j < panel::kNumFinancial; ++j) {
            if (std::isnan(inst.features[j])) return true;
        }
    }
    return false;
}

std::vector<std::size_t> explained_rows(std::size_t n, int cap) {
    std::vector<std::size_t> rows;
    if (cap <= 0 || n == 0) return rows;
    const auto c = static_cast<std::size_t>(cap);
    if (n <= c) {
        for (std::size_t i = 0; i < n; ++i) rows.push_back(i);
        return rows;
    }
    for (std::size_t i = 0; i < c; ++i) rows.push_back(i * n / c);
    return rows;
}

std::vector<double> column_means(const Matrix& x) {
    std::vector<double> m(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) m[j] += x(i, j);
    }
    for (auto& v : m) v /= static_cast<double>(std::max<std::size_t>(1, x.rows()));
    return m;
}

std::size_t family_index(Family f) { return static_cast<std::size_t>(f); }
std::size_t set_index(FeatureSet f) { return static_cast<std::size_t>(f); }

}  // namespace

BenchmarkResult run_benchmark(const RunConfig& config, LoadedPanel input, const ProgressFn& progress) {
    config.validate();
    const double t0 = now_seconds();
    BenchmarkResult res;
    res.config = config;
    res.plan = protocol::make_split_plan(config.test_year, config.earliest_start, config.effective_end_year());
    res.input = std::move(input);
    const auto& plan = res.plan;
    const panel::Panel* source = &res.input.panel;

    panel::Panel imputed_global;
    if (config.imputation == ImputationMode::global) {
        auto imp = panel::impute_missing(res.input.panel, config.imputation_config);
        imputed_global = std::move(imp.panel);
        res.imputation = imp.report;
        res.imputed = true;
        source = &imputed_global;
    }
    res.labels = panel::label_instances(*source, plan.start_years.front(), plan.test_year, config.horizon);
    if (res.labels.skipped_missing_base > 0) {
        res.warnings.push_back(std::to_string(res.labels.skipped_missing_base) +
                               " label rows skipped for lack of a base-year row");
    }

    // Window preparation, serial and in plan order.
    const std::size_t n_sets = config.feature_sets.size();
    std::vector<std::optional<protocol::WindowData>> prepared(plan.size() * n_sets);
    protocol::PreprocessOptions pre;
    pre.winsorize_ai = config.winsorize_ai;
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const auto window = plan.window(k);
        std::vector<panel::LabeledInstance> local;
        std::span<const panel::LabeledInstance> instances = res.labels.instances;
        try {
            if (config.imputation == ImputationMode::per_window) {
                std::vector<panel::FirmYearRecord> rows;
                for (const auto& r : res.input.panel.rows()) {
                    if (r.year >= window.start - config.horizon && r.year <= plan.test_year - config.horizon) {
                        rows.push_back(r);
                    }
                }
                auto imp = panel::impute_missing(panel::Panel(std::move(rows)), config.imputation_config);
                if (k == 0) res.imputation = imp.report;
                res.imputed = true;
                for (const auto& inst : res.labels.instances) {
                    if ((inst.label_year >= window.start && inst.label_year <= window.end) ||
                        inst.label_year == plan.test_year) {
                        local.push_back(inst);
                    }
                }
                refresh_features(local, imp.panel);
                instances = local;
            }
        } catch (const Error& e) {
            for (std::size_t s = 0; s < n_sets; ++s) {
                WindowInfo info;
                info.index = k;
                info.window = window;
                info.feature_set = config.feature_sets[s];
                info.error = std::string("imputation failed: ") + e.what();
                res.windows.push_back(info);
            }
            continue;
        }
        for (std::size_t s = 0; s < n_sets; ++s) {
            WindowInfo info;
            info.index = k;
            info.window = window;
            info.feature_set = config.feature_sets[s];
            try {
                if (config.imputation == ImputationMode::none && has_missing(res.labels.instances)) {
                    throw Error("missing financial values and imputation is disabled");
                }
                auto wd = protocol::build_window(instances, window, plan.test_year, info.feature_set, pre);
                if (wd.test.size() == 0) throw Error("no test rows for year " + std::to_string(plan.test_year));
                info.ok = true;
                info.n_train = wd.train.size();
                info.n_train_pos = wd.n_train_pos;
                info.n_test = wd.test.size();
                info.n_test_pos = wd.n_test_pos;
                info.weights = wd.weights;
                for (const auto& f : wd.stats.features) info.degenerate_features += f.degenerate();
                prepared[k * n_sets + s] = std::move(wd);
            } catch (const Error& e) {
                info.error = e.what();
            }
            res.windows.push_back(info);
        }
    }

    // Task table, window-major.
    for (std::size_t k = 0; k < plan.size(); ++k) {
        for (auto f : config.families) {
            for (auto fs : config.feature_sets) {
                TaskResult t;
                t.window = k;
                t.family = f;
                t.feature_set = fs;
                t.seed = derive_seed(config.seed, {k, family_index(f), set_index(fs)});
                res.tasks.push_back(std::move(t));
            }
        }
    }

    auto run_task = [&](TaskResult& t) {
        const double start = now_seconds();
        const std::size_t s = static_cast<std::size_t>(
            std::find(config.feature_sets.begin(), config.feature_sets.end(), t.feature_set) -
            config.feature_sets.begin());
        const auto& wd = prepared[t.window * n_sets + s];
        try {
            if (!wd) throw Error("window unavailable: " + res.windows[t.window * n_sets + s].error);
            t.selection = protocol::select_hyperparameters(wd->train, config.grid(t.family), config.cv_folds,
                                                           derive_seed(t.seed, {0}));
            auto model = models::fit_model(t.selection.chosen, wd->train, derive_seed(t.seed, {1}));
            model.set_background_mean(column_means(wd->train.x));
            const auto p = model.predict_proba(wd->test.x);
            t.report = metrics::compute_metrics(wd->test.y, p, config.threshold);
            if (config.explain_rows > 0) {
                t.explained_rows = explained_rows(wd->test.size(), config.explain_rows);
                for (auto r : t.explained_rows) t.explanations.push_back(explain::explain_row(model, wd->test.x.row(r)));
                t.importance = explain::global_importance(t.explanations);
                if (!(t.window == 0 || config.save_models == "all")) {
                    t.explanations.clear();
                    t.explanations.shrink_to_fit();
                }
            }
            if (config.save_models == "all" || (config.save_models == "first" && t.window == 0)) {
                t.model_json = models::to_json(model);
            }
            t.ok = true;
        } catch (const std::exception& e) {
            t.ok = false;
            t.error = e.what();
        }
        t.seconds = now_seconds() - start;
    };

    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    std::size_t finished = 0;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= res.tasks.size()) return;
            run_task(res.tasks[i]);
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(res.tasks[i], ++finished, res.tasks.size());
            }
        }
    };
    const auto jobs = static_cast<std::size_t>(std::max(1, config.jobs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < std::min(jobs, res.tasks.size()); ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t s = 0; s < n_sets; ++s) {
        if (prepared[s]) res.first_split[config.feature_sets[s]] = *prepared[s];
    }

    // Averages, comparisons and stability, in config order.
    for (auto f : config.families) {
        for (auto fs : config.feature_sets) {
            std::vector<metrics::MetricReport> reports;
            for (const auto& t : res.tasks) {
                if (t.ok && t.family == f && t.feature_set == fs) reports.push_back(t.report);
            }
            if (!reports.empty()) res.summaries.push_back({f, fs, metrics::average_reports(reports)});
        }
        const bool both = std::count(config.feature_sets.begin(), config.feature_sets.end(), FeatureSet::with_ai) &&
                          std::count(config.feature_sets.begin(), config.feature_sets.end(), FeatureSet::without_ai);
        if (both) {
            std::vector<metrics::MetricReport> with, without;
            for (std::size_t k = 0; k < plan.size(); ++k) {
                const TaskResult *a = nullptr, *b = nullptr;
                for (const auto& t : res.tasks) {
                    if (t.window != k || t.family != f || !t.ok) continue;
                    (t.feature_set == FeatureSet::with_ai ? a : b) = &t;
                }
                if (a && b) {
                    with.push_back(a->report);
                    without.push_back(b->report);
                }
            }
            res.comparisons[f] = inference::compare_feature_sets(with, without, config.bootstrap,
                                                                 derive_seed(config.seed, {0xC0, family_index(f)}));
        }
        if (config.explain_rows > 0) {
            for (auto fs : config.feature_sets) {
                std::vector<explain::Importance> imps;
                std::vector<std::string> schema;
                for (auto c : panel::feature_columns(fs)) schema.push_back(panel::feature_names()[c]);
                for (const auto& t : res.tasks) {
                    if (t.ok && t.family == f && t.feature_set == fs) imps.push_back(t.importance);
                }
                if (!imps.empty()) res.stability[f][fs] = explain::stability_across_splits(schema, imps);
            }
        }
    }
    for (const auto& t : res.tasks) {
        if (!t.ok) {
            res.warnings.push_back("window " + std::to_string(t.window) + " " +
                                   std::string(models::to_string(t.family)) + " " +
                                   std::string(panel::to_string(t.feature_set)) + ": " + t.error);
        }
        for (const auto& w : t.selection.warnings) {
            res.warnings.push_back("window " + std::to_string(t.window) + " " +
                                   std::string(models::to_string(t.family)) + " " +
                                   std::string(panel::to_string(t.feature_set)) + ": " + w);
        }
    }
    res.seconds = now_seconds() - t0;
    return res;
}

// ---------------------------------------------------------------------------
// Output files

namespace {

const std::vector<std::string> kRateNames = {"auc",  "accuracy", "recall", "specificity", "precision",
                                             "f1",   "gmean",    "type1",  "type2"};

CsvRow metric_cells(const metrics::MetricReport& r) {
    CsvRow row;
    for (const auto& n : kRateNames) row.push_back(opt(metrics::metric_value(r, n)));
    for (double c : {r.tp, r.tn, r.fp, r.fn}) row.push_back(format_double(c));
    return row;
}

CsvRow metric_header() {
    CsvRow h = kRateNames;
    h.insert(h.end(), {"tp", "tn", "fp", "fn"});
    return h;
}

std::string task_label(const TaskResult& t) {
    std::ostringstream s;
    s << "window_" << std::setw(2) << std::setfill('0') << t.window << "_" << models::to_string(t.family) << "_"
      << panel::to_string(t.feature_set);
    return s.str();
}

std::string format_results(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.results/1");
    w.meta("threshold", format_double(res.config.threshold));
    CsvRow h{"window", "start", "end", "test_year", "family", "feature_set", "status", "config", "cv_folds",
             "cv_auc", "n_train", "n_train_pos", "n_test", "n_test_pos", "w1", "w0"};
    const auto mh = metric_header();
    h.insert(h.end(), mh.begin(), mh.end());
    h.push_back("error");
    w.row(h);
    const std::size_t n_sets = res.config.feature_sets.size();
    for (const auto& t : res.tasks) {
        const std::size_t s = static_cast<std::size_t>(
            std::find(res.config.feature_sets.begin(), res.config.feature_sets.end(), t.feature_set) -
            res.config.feature_sets.begin());
        const auto& info = res.windows[t.window * n_sets + s];
        CsvRow r{std::to_string(t.window), std::to_string(info.window.start), std::to_string(info.window.end),
                 std::to_string(res.plan.test_year), std::string(models::to_string(t.family)),
                 std::string(panel::to_string(t.feature_set)), t.ok ? "ok" : "failed"};
        if (t.ok) {
            r.push_back(t.selection.chosen.describe());
            r.push_back(std::to_string(t.selection.folds));
            double cv = std::nan("");
            for (const auto& row : t.selection.table) {
                if (row.config.describe() == t.selection.chosen.describe()) cv = row.mean_auc;
            }
            r.push_back(format_double(cv));
        } else {
            r.insert(r.end(), {"", "", ""});
        }
        r.push_back(std::to_string(info.n_train));
        r.push_back(std::to_string(info.n_train_pos));
        r.push_back(std::to_string(info.n_test));
        r.push_back(std::to_string(info.n_test_pos));
        r.push_back(info.ok ? format_double(info.weights.w1) : "");
        r.push_back(info.ok ? format_double(info.weights.w0) : "");
        if (t.ok) {
            const auto m = metric_cells(t.report);
            r.insert(r.end(), m.begin(), m.end());
        } else {
            r.insert(r.end(), mh.size(), "");
        }
        r.push_back(t.error);
        w.row(r);
    }
    return out.str();
}

std::string format_table2(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.table2/1");
    w.meta("averaging", "per-split metrics averaged; *_from_counts recomputed from averaged counts");
    CsvRow h{"family", "feature_set", "n_splits"};
    const auto mh = metric_header();
    h.insert(h.end(), mh.begin(), mh.end());
    for (const auto& n : {"accuracy", "recall", "specificity", "precision", "f1", "gmean"}) {
        h.push_back(std::string(n) + "_from_counts");
    }
    w.row(h);
    for (const auto& s : res.summaries) {
        CsvRow r{std::string(models::to_string(s.family)), std::string(panel::to_string(s.feature_set)),
                 std::to_string(s.averaged.n)};
        const auto m = metric_cells(s.averaged.mean);
        r.insert(r.end(), m.begin(), m.end());
        for (const auto& n : {"accuracy", "recall", "specificity", "precision", "f1", "gmean"}) {
            r.push_back(opt(metrics::metric_value(s.averaged.from_mean_counts, n)));
        }
        w.row(r);
    }
    return out.str();
}

std::string format_plot_data(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.plot_data/1");
    w.row({"family", "feature_set", "window", "start", "metric", "value"});
    const std::size_t n_sets = res.config.feature_sets.size();
    for (auto f : res.config.families) {
        for (auto fs : res.config.feature_sets) {
            for (const auto& metric : {"auc", "f1", "gmean", "type1", "type2"}) {
                for (const auto& t : res.tasks) {
                    if (!t.ok || t.family != f || t.feature_set != fs) continue;
                    const auto& info = res.windows[t.window * n_sets];
                    w.row({std::string(models::to_string(f)), std::string(panel::to_string(fs)),
                           std::to_string(t.window), std::to_string(info.window.start), metric,
                           opt(metrics::metric_value(t.report, metric))});
                }
            }
        }
    }
    return out.str();
}

std::string format_windows(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.windows/1");
    w.row({"window", "start", "end", "test_year", "feature_set", "status", "n_train", "n_train_pos", "n_test",
           "n_test_pos", "w1", "w0", "degenerate_features", "error"});
    for (const auto& info : res.windows) {
        w.row({std::to_string(info.index), std::to_string(info.window.start), std::to_string(info.window.end),
               std::to_string(res.plan.test_year), std::string(panel::to_string(info.feature_set)),
               info.ok ? "ok" : "failed", std::to_string(info.n_train), std::to_string(info.n_train_pos),
               std::to_string(info.n_test), std::to_string(info.n_test_pos),
               info.ok ? format_double(info.weights.w1) : "", info.ok ? format_double(info.weights.w0) : "",
               std::to_string(info.degenerate_features), info.error});
    }
    return out.str();
}

std::string format_cv(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.cv/1");
    w.meta("selection", "max mean fold AUC; ties to lower capacity");
    w.row({"window", "family", "feature_set", "config", "mean_auc", "folds_completed", "chosen"});
    for (const auto& t : res.tasks) {
        for (const auto& row : t.selection.table) {
            w.row({std::to_string(t.window), std::string(models::to_string(t.family)),
                   std::string(panel::to_string(t.feature_set)), row.config.describe(), format_double(row.mean_auc),
                   std::to_string(row.fold_auc.size()),
                   row.config.describe() == t.selection.chosen.describe() ? "1" : "0"});
        }
    }
    return out.str();
}

std::vector<std::string> schema_of(FeatureSet fs) {
    std::vector<std::string> s;
    for (auto c : panel::feature_columns(fs)) s.push_back(panel::feature_names()[c]);
    return s;
}

std::string format_explanations(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.explanations/1");
    w.meta("background", "training rows of the split");
    w.row({"window", "family", "feature_set", "row_id", "firm_id", "output_space", "feature", "phi", "base_value",
           "output"});
    for (const auto& t : res.tasks) {
        if (!t.ok || t.explanations.empty()) continue;
        const auto schema = schema_of(t.feature_set);
        auto it = res.first_split.find(t.feature_set);
        for (std::size_t e = 0; e < t.explanations.size(); ++e) {
            const auto& ex = t.explanations[e];
            const auto row_id = t.explained_rows[e];
            const std::string firm =
                (t.window == 0 && it != res.first_split.end()) ? it->second.test_firms[row_id] : "";
            for (std::size_t j = 0; j < ex.phi.size(); ++j) {
                w.row({std::to_string(t.window), std::string(models::to_string(t.family)),
                       std::string(panel::to_string(t.feature_set)), std::to_string(row_id), firm,
                       std::string(models::to_string(ex.output_space)), schema[j], format_double(ex.phi[j]),
                       format_double(ex.base_value), format_double(ex.output())});
            }
        }
    }
    return out.str();
}

std::string format_importance(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.importance/1");
    w.meta("source", "mean |SHAP| over explained test rows");
    w.row({"window", "family", "feature_set", "feature", "mean_abs_phi", "normalized", "rank", "constant"});
    for (const auto& t : res.tasks) {
        if (!t.ok || t.importance.mean_abs.empty()) continue;
        const auto schema = schema_of(t.feature_set);
        const auto rank = explain::rank_features(t.importance.mean_abs);
        for (std::size_t j = 0; j < schema.size(); ++j) {
            w.row({std::to_string(t.window), std::string(models::to_string(t.family)),
                   std::string(panel::to_string(t.feature_set)), schema[j],
                   format_double(t.importance.mean_abs[j]), format_double(t.importance.normalized[j]),
                   std::to_string(rank[j]), t.importance.constant ? "1" : "0"});
        }
    }
    return out.str();
}

std::string format_stability(const BenchmarkResult& res) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.stability/1");
    w.meta("source", "mean |SHAP|");
    w.row({"family", "feature_set", "feature", "top6_frequency", "mean_rank", "mean_normalized_importance"});
    for (auto f : res.config.families) {
        auto fi = res.stability.find(f);
        if (fi == res.stability.end()) continue;
        for (auto fs : res.config.feature_sets) {
            auto si = fi->second.find(fs);
            if (si == fi->second.end()) continue;
            for (const auto& r : si->second) {
                w.row({std::string(models::to_string(f)), std::string(panel::to_string(fs)), r.feature,
                       format_double(r.top6_frequency), format_double(r.mean_rank),
                       format_double(r.mean_normalized_importance)});
            }
        }
    }
    return out.str();
}

std::string format_test_rows(const protocol::WindowData& wd) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.rows/1");
    w.meta("preprocessing", "winsorized and standardized with training statistics");
    CsvRow h{"row_id", "firm_id", "label"};
    h.insert(h.end(), wd.test.feature_names.begin(), wd.test.feature_names.end());
    w.row(h);
    for (std::size_t i = 0; i < wd.test.size(); ++i) {
        CsvRow r{std::to_string(i), wd.test_firms[i], std::to_string(wd.test.y[i])};
        for (double v : wd.test.x.row(i)) r.push_back(format_double(v));
        w.row(r);
    }
    return out.str();
}

std::string format_manifest(const BenchmarkResult& res) {
    json j;
    j["schema"] = "ews.manifest/1";
    j["version"] = std::string(kVersion);
    j["config"] = json::parse(run_config_to_json(res.config));
    j["inputs"] = res.input.digests;
    json build;
    build["financial_rows_dropped"] = res.input.build.financial_rows_dropped;
    build["ai_rows_unjoined"] = res.input.build.ai_rows_unjoined;
    build["rows_without_ai"] = res.input.build.rows_without_ai;
    j["panel"] = {{"rows", res.input.panel.size()}, {"build", build}};
    j["imputation"] = res.imputed ? json::parse(res.imputation.to_json()) : json(nullptr);
    j["labeling"] = {{"instances", res.labels.instances.size()},
                     {"skipped_missing_base", res.labels.skipped_missing_base},
                     {"dropped_already_distressed", res.labels.dropped_already_distressed}};
    j["split_plan"] = {{"test_year", res.plan.test_year},
                       {"end_year", res.plan.end_year},
                       {"start_years", res.plan.start_years}};
    json seeds;
    seeds["master"] = res.config.seed;
    json tasks = json::array();
    for (const auto& t : res.tasks) {
        json tj;
        tj["task"] = task_label(t);
        tj["seed"] = t.seed;
        tj["status"] = t.ok ? "ok" : "failed";
        if (t.ok) tj["chosen"] = t.selection.chosen.describe();
        if (res.config.record_timing) tj["seconds"] = t.seconds;
        tasks.push_back(tj);
    }
    j["seeds"] = seeds;
    j["tasks"] = tasks;
    std::set<std::size_t> done;
    for (const auto& t : res.tasks) {
        if (t.ok) done.insert(t.window);
    }
    j["completed_windows"] = std::vector<std::size_t>(done.begin(), done.end());
    j["p_values"] = "two-sided";
    j["hyperparameter_grids"] = "defaults are unreported in the source material and are documented guesses";
    j["warnings"] = res.warnings;
    if (res.config.record_timing) j["seconds"] = res.seconds;
    return j.dump(2);
}

}  // namespace

std::string format_comparisons(const std::map<Family, std::vector<inference::PairedComparison>>& comps,
                               int replicates) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.comparisons/1");
    w.meta("p_values", "two-sided");
    w.meta("bootstrap_replicates", std::to_string(replicates));
    w.meta("sign", "quality metrics: with_ai - without_ai; type1/type2: without_ai - with_ai");
    w.row({"family", "metric", "n_splits", "mean_delta", "ci_low", "ci_high", "t_stat", "p_t", "p_boot",
           "direction", "deltas"});
    for (const auto& [family, list] : comps) {
        for (const auto& c : list) {
            std::string deltas;
            for (std::size_t i = 0; i < c.deltas.size(); ++i) deltas += (i ? ";" : "") + format_double(c.deltas[i]);
            w.row({std::string(models::to_string(family)), c.metric, std::to_string(c.deltas.size()),
                   format_double(c.mean_delta), format_double(c.ci_low), format_double(c.ci_high),
                   format_double(c.t_stat), format_double(c.p_t), format_double(c.p_boot), c.direction, deltas});
        }
    }
    return out.str();
}

void write_outputs(const BenchmarkResult& res, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "results.csv", format_results(res));
    write_file(dir / "table2.csv", format_table2(res));
    write_file(dir / "comparisons.csv", format_comparisons(res.comparisons, res.config.bootstrap));
    write_file(dir / "plot_data.csv", format_plot_data(res));
    write_file(dir / "windows.csv", format_windows(res));
    write_file(dir / "cv.csv", format_cv(res));
    if (res.config.explain_rows > 0) {
        write_file(dir / "explanations.csv", format_explanations(res));
        write_file(dir / "importance.csv", format_importance(res));
        write_file(dir / "stability.csv", format_stability(res));
    }
    if (res.config.save_models != "none") {
        for (const auto& t : res.tasks) {
            if (!t.model_json.empty()) write_file(dir / "models" / (task_label(t) + ".json"), t.model_json + "\n");
        }
        for (const auto& [fs, wd] : res.first_split) {
            write_file(dir / "models" / ("test_rows_window_00_" + std::string(panel::to_string(fs)) + ".csv"),
                       format_test_rows(wd));
        }
    }
    write_file(dir / "manifest.json", format_manifest(res) + "\n");
}

std::string compare_results_file(const std::filesystem::path& results_csv, int replicates, std::uint64_t seed) {
    const Table t = read_table(results_csv);
    auto it = t.meta.find("schema");
    if (it == t.meta.end() || it->second != "ews.results/1") throw Error("not an ews.results/1 file");
    const auto c_window = t.column("window"), c_family = t.column("family"), c_fs = t.column("feature_set"),
               c_status = t.column("status");
    // family -> window -> feature set -> report
    std::map<Family, std::map<long long, std::map<FeatureSet, metrics::MetricReport>>> table;
    for (const auto& row : t.rows) {
        if (row[c_status] != "ok") continue;
        metrics::MetricReport r;
        auto get = [&](const std::string& name) -> std::optional<double> {
            const double v = parse_double(row[t.column(name)]);
            if (std::isnan(v)) return std::nullopt;
            return v;
        };
        r.auc = get("auc");
        r.accuracy = get("accuracy");
        r.recall = get("recall");
        r.specificity = get("specificity");
        r.precision = get("precision");
        r.f1 = get("f1");
        r.gmean = get("gmean");
        r.type1 = get("type1");
        r.type2 = get("type2");
        r.tp = get("tp").value_or(0);
        r.tn = get("tn").value_or(0);
        r.fp = get("fp").value_or(0);
        r.fn = get("fn").value_or(0);
        table[models::parse_family(row[c_family])][parse_int(row[c_window])][panel::parse_feature_set(row[c_fs])] = r;
    }
    std::map<Family, std::vector<inference::PairedComparison>> comps;
    for (const auto& [family, windows] : table) {
        std::vector<metrics::MetricReport> with, without;
        for (const auto& [k, sets] : windows) {
            auto a = sets.find(FeatureSet::with_ai), b = sets.find(FeatureSet::without_ai);
            if (a == sets.end() || b == sets.end()) continue;
            with.push_back(a->second);
            without.push_back(b->second);
        }
        comps[family] =
            inference::compare_feature_sets(with, without, replicates, derive_seed(seed, {0xC0, family_index(family)}));
    }
    return format_comparisons(comps, replicates);
}

std::string format_summary(const panel::PanelSummary& s) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.prevalence/1");
    w.meta("n_observations", std::to_string(s.n_observations));
    w.meta("n_distressed", std::to_string(s.n_distressed));
    w.meta("distress_rate", format_double(s.distress_rate));
    w.meta("n_firms", std::to_string(s.n_firms));
    w.meta("n_distressed_firms", std::to_string(s.n_distressed_firms));
    w.meta("health_class", "firm-level: distressed if flagged in any year");
    w.row({"year", "class", "n_firms", "measure", "nonzero_share"});
    const auto& names = text::ai_feature_names();
    for (const auto& p : s.prevalence) {
        for (int cls = 0; cls < 2; ++cls) {
            const auto& share = cls == 0 ? p.healthy : p.distressed;
            const auto n = cls == 0 ? p.n_healthy : p.n_distressed;
            for (std::size_t m = 0; m <= names.size(); ++m) {
                w.row({std::to_string(p.year), cls == 0 ? "healthy" : "distressed", std::to_string(n),
                       m < names.size() ? std::string(names[m]) : std::string("any AI"), format_double(share[m])});
            }
        }
    }
    return out.str();
}

}  // namespace ews::bench
