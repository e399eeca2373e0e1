// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criteria by number (default: all).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ews/benchmark.hpp"
#include "ews/csv.hpp"
#include "ews/explain.hpp"
#include "ews/hash.hpp"
#include "ews/inference.hpp"
#include "ews/metrics.hpp"
#include "ews/models.hpp"
#include "ews/protocol.hpp"
#include "ews/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ews;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kCountsTol = 0.001;
constexpr double kAucTol = 1e-12;
constexpr double kShapTol = 1e-9;
constexpr double kTTol = 0.001;
constexpr double kBootTol = 0.01;
constexpr int kBootReplicates = 1000000;
constexpr double kLogitGradTol = 1e-5;
constexpr double kNetGradTol = 1e-4;
constexpr double kLocalTol = 1e-9;
constexpr int kSeeds = 10;
constexpr int kSeedsNeeded = 8;
constexpr double kRunLimitSeconds = 15 * 60;
constexpr double kRateTarget = 0.0326, kRateTol = 0.003;
constexpr double kShareTarget = 0.50, kShareTol = 0.05;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

fs::path work_dir() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / "ews_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string cli() {
    const char* p = std::getenv("EWS_CLI");
    if (!p) throw Error("EWS_CLI is not set");
    return p;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = cli() + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    const auto r = metrics::metrics_from_counts(38.50, 3253.21, 683.79, 12.50);
    const std::vector<std::tuple<std::string, double, double>> checks{
        {"recall", *r.recall, 0.755},
        {"specificity", *r.specificity, 0.826},
        {"accuracy", *r.accuracy, 0.825},
        {"gmean", *r.gmean, 0.788},
    };
    Outcome o{true, ""};
    for (const auto& [name, got, want] : checks) {
        const bool ok = std::abs(got - want) <= kCountsTol;
        o.pass = o.pass && ok;
        o.detail += name + " " + fmt(got) + (ok ? " ok" : " (want " + fmt(want) + ")") + "; ";
    }
    return o;
}

Outcome criterion2() {
    Outcome o{true, ""};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);

    double auc_err = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 199;
        std::vector<int> y(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = u(rng) < 0.3;
            s[i] = trial % 2 ? u(rng) : std::floor(u(rng) * 6);
        }
        y[0] = 1;
        y[1] = 0;
        auc_err = std::max(auc_err, std::abs(metrics::compute_auc(y, s) - oracle::pair_auc(y, s)));
    }
    const bool auc_ok = auc_err <= kAucTol;

    int split_agree = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = testutil::random_dataset(20, 3, seed, 1.0, seed % 2 == 0);
        const auto m = models::fit_cart(d, 1, 0.0);
        const auto& root = std::get<models::CartParams>(m.params()).tree.nodes[0];
        std::vector<double> s1(20), s2(20);
        for (std::size_t i = 0; i < 20; ++i) {
            s1[i] = d.w[i] * d.y[i];
            s2[i] = d.w[i];
        }
        const auto best = oracle::brute_force_split(d.x, s1, s2, 0.0);
        split_agree += root.feature == best.feature && (best.feature < 0 || root.threshold == best.threshold);
    }
    const bool split_ok = split_agree == 20;

    double shap_err = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = testutil::random_dataset(24, 3, seed + 50, 1.5, seed % 3 == 0);
        const auto m = models::fit_cart(d, 2, 0.0);
        const auto& t = std::get<models::CartParams>(m.params()).tree;
        for (std::size_t r = 0; r < d.size(); ++r) {
            const auto row = d.x.row(r);
            const auto e = explain::shap_tree(t, row, 3);
            const auto phi = oracle::brute_shapley(3, [&](unsigned mask) { return oracle::path_value(t, 0, row, mask); });
            for (std::size_t j = 0; j < 3; ++j) shap_err = std::max(shap_err, std::abs(e.phi[j] - phi[j]));
        }
    }
    const bool shap_ok = shap_err <= kShapTol;

    const auto tt = inference::paired_t_test(std::vector<double>{1, 2, 3, 4});
    const bool t_ok = std::abs(tt.t - 3.873) <= kTTol && std::abs(tt.p - 0.0305) <= kTTol;

    // Resamples of {-1, 3} have means -1, 1, 1, 3 with probability 1/4 each.
    const auto bs = inference::paired_bootstrap(std::vector<double>{-1, 3}, kBootReplicates, 11);
    const bool boot_ok = std::abs(bs.p - 0.5) <= kBootTol && std::abs(bs.ci_low + 1) <= kBootTol &&
                         std::abs(bs.ci_high - 3) <= kBootTol;

    o.pass = auc_ok && split_ok && shap_ok && t_ok && boot_ok;
    o.detail = "auc max err " + fmt(auc_err, 3) + "; cart splits " + std::to_string(split_agree) +
               "/20; treeshap max err " + fmt(shap_err, 3) + "; t " + fmt(tt.t) + " p " + fmt(tt.p) +
               "; bootstrap p " + fmt(bs.p) + " ci [" + fmt(bs.ci_low) + ", " + fmt(bs.ci_high) + "]";
    return o;
}

Outcome criterion3() {
    double logit_err = 0, net_err = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = testutil::random_dataset(50, 4, seed + 300);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        std::vector<double> theta(5), grad(5);
        for (auto& v : theta) v = g(rng);
        models::logistic_objective(d, 0.3, theta, grad);
        auto f = [&](const std::vector<double>& t) { return models::logistic_objective(d, 0.3, t, {}); };
        for (std::size_t k = 0; k < theta.size(); ++k) {
            logit_err = std::max(logit_err, oracle::rel_error(grad[k], oracle::central_difference(f, theta, k)));
        }
    }
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = testutil::random_dataset(40, 3, seed + 400);
        const auto act = seed % 2 ? models::Activation::tanh : models::Activation::relu;
        auto net = models::init_neural_net(3, 5, act, 0.2, seed);
        const auto theta = net.flatten();
        std::vector<double> grad(theta.size());
        models::neural_net_objective(d, 0.2, net, theta, grad);
        auto f = [&](const std::vector<double>& t) { return models::neural_net_objective(d, 0.2, net, t, {}); };
        for (std::size_t k = 0; k < theta.size(); ++k) {
            net_err = std::max(net_err, oracle::rel_error(grad[k], oracle::central_difference(f, theta, k)));
        }
    }
    return {logit_err <= kLogitGradTol && net_err <= kNetGradTol,
            "logistic max rel err " + fmt(logit_err, 3) + "; network max rel err " + fmt(net_err, 3)};
}

std::vector<panel::LabeledInstance> generator_instances(std::uint64_t seed) {
    synth::GeneratorConfig g;
    g.n_firms = 2000;
    g.n_rows = 28342;
    g.missing_rate = 0;
    g.seed = seed;
    return panel::label_instances(synth::to_panel(synth::generate(g)), 2009, 2023).instances;
}

Outcome criterion4() {
    const auto clean = generator_instances(4);
    auto poisoned = clean;
    for (auto& inst : poisoned) {
        if (inst.label_year != 2023) continue;
        for (auto& v : inst.features) v = 1e12;
    }
    const auto plan = protocol::make_split_plan(2023, 2009, 2022);
    int same = 0, total = 0;
    for (std::size_t k = 0; k < plan.size(); ++k) {
        for (auto fs : {panel::FeatureSet::with_ai, panel::FeatureSet::without_ai}) {
            const auto a = protocol::build_window(clean, plan.window(k), 2023, fs);
            const auto b = protocol::build_window(poisoned, plan.window(k), 2023, fs);
            const bool eq = a.stats == b.stats && a.weights == b.weights &&
                            protocol::stratified_folds(a.train.y, 10, derive_seed(7, {0})) ==
                                protocol::stratified_folds(b.train.y, 10, derive_seed(7, {0})) &&
                            a.train.x == b.train.x;
            same += eq;
            ++total;
        }
    }
    return {same == total, std::to_string(same) + "/" + std::to_string(total) +
                               " window x feature-set cases unchanged (stats, class weights, folds)"};
}

Outcome criterion5() {
    const auto instances = generator_instances(5);
    const auto w = protocol::build_window(instances, {2019, 2022}, 2023, panel::FeatureSet::with_ai);
    const auto mean = oracle::column_means(w.train.x);
    std::mt19937_64 rng(5);
    double worst = 0;
    std::size_t rows = 0;
    std::string per_family;
    for (auto fam : {models::Family::logit, models::Family::cart, models::Family::rf, models::Family::gbt,
                     models::Family::nn}) {
        auto cfg = bench::default_grid(fam).front();
        auto model = models::fit_model(cfg, w.train, 9);
        if (model.background_mean().empty()) model.set_background_mean(mean);
        double fam_worst = 0;
        for (int i = 0; i < 200; ++i) {
            const auto r = static_cast<std::size_t>(rng() % w.test.size());
            const auto row = w.test.x.row(r);
            const auto e = explain::explain_row(model, row);
            fam_worst = std::max(fam_worst, std::abs(e.output() - model.raw_output(row)));
            ++rows;
        }
        worst = std::max(worst, fam_worst);
        per_family += std::string(models::to_string(fam)) + " " + fmt(fam_worst, 3) + "; ";
    }
    return {worst <= kLocalTol && rows == 1000, std::to_string(rows) + " rows, max |base + sum(phi) - output|: " + per_family};
}

// Full benchmark config used by criteria 6 and 8.
void write_full_config(const fs::path& path) {
    write_file(path, R"({ "generator": {"n_firms": 2000, "n_rows": 28342},
  "families": ["logit", "rf", "gbt"] }
)");
}

struct FullRun {
    int exit_code = -1;
    double seconds = 0;
    fs::path dir;
};

std::map<std::string, FullRun> g_runs;

FullRun full_run(std::uint64_t seed, int jobs, const std::string& tag) {
    const auto cfg = work_dir() / "full.json";
    if (!fs::exists(cfg)) write_full_config(cfg);
    FullRun r;
    r.dir = work_dir() / tag;
    fs::remove_all(r.dir);
    const auto t0 = std::chrono::steady_clock::now();
    r.exit_code = run_cli("--config " + cfg.string() + " --seed " + std::to_string(seed) + " --jobs " +
                              std::to_string(jobs) + " --out-dir " + r.dir.string() + " run-benchmark",
                          work_dir() / (tag + ".log"));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    g_runs[tag] = r;
    return r;
}

Outcome criterion6() {
    const std::vector<std::string> families{"logit", "rf", "gbt"};
    std::map<std::string, int> recall_up, gmean_up, type2_up;
    double slowest = 0;
    int failed_runs = 0;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        const auto r = full_run(static_cast<std::uint64_t>(seed), 1, "seed" + std::to_string(seed));
        slowest = std::max(slowest, r.seconds);
        if (r.exit_code != 0) {
            ++failed_runs;
            continue;
        }
        const Table t = read_table(r.dir / "comparisons.csv");
        for (const auto& row : t.rows) {
            const auto& fam = row[t.column("family")];
            const auto& metric = row[t.column("metric")];
            const double delta = parse_double(row[t.column("mean_delta")]);
            // type2 deltas are stored as without - with.
            if (metric == "recall") recall_up[fam] += delta > 0;
            if (metric == "gmean") gmean_up[fam] += delta > 0;
            if (metric == "type2") type2_up[fam] += delta > 0;
        }
        std::cout << "  seed " << seed << " done in " << fmt(r.seconds, 3) << " s" << std::endl;
    }
    bool pass = failed_runs == 0 && slowest <= kRunLimitSeconds;
    std::string detail;
    for (const auto& f : families) {
        pass = pass && recall_up[f] >= kSeedsNeeded && gmean_up[f] >= kSeedsNeeded && type2_up[f] >= kSeedsNeeded;
        detail += f + " recall+ " + std::to_string(recall_up[f]) + "/10 gmean+ " + std::to_string(gmean_up[f]) +
                  "/10 typeII+ " + std::to_string(type2_up[f]) + "/10; ";
    }
    detail += "slowest run " + fmt(slowest, 4) + " s";
    if (failed_runs) detail += "; failed runs " + std::to_string(failed_runs);
    return {pass, detail};
}

// Schema line and header of every delimited output, keyed by relative path.
std::map<std::string, std::string> schema_fingerprint(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir).string();
        if (e.path().extension() == ".csv") {
            const Table t = read_table(e.path());
            std::string h = t.meta.count("schema") ? t.meta.at("schema") : "";
            for (const auto& c : t.header) h += "|" + c;
            out[rel] = h;
        } else {
            out[rel] = "";
        }
    }
    return out;
}

Outcome criterion7() {
    const auto plan = protocol::make_split_plan(2023, 2009, 2022);
    const bool shape = plan.size() == 14 && plan.window(plan.size() - 1) == protocol::Window{2022, 2022} &&
                       plan.window(0) == protocol::Window{2009, 2022} && plan.test_year == 2023;

    const auto cfg = work_dir() / "years.json";
    write_file(cfg, R"({ "generator": {"n_firms": 600, "n_rows": 0}, "families": ["logit", "gbt"],
  "grids": {"gbt": [{"n_rounds": 30, "learning_rate": 0.1, "max_depth": 2}]},
  "cv_folds": 3, "bootstrap": 500, "explain_rows": 20 }
)");
    std::map<int, std::map<std::string, std::string>> prints;
    std::map<int, std::string> manifests;
    std::string detail = std::string("plan ") + (shape ? "14 windows, shortest [2022, 2022], test 2023" : "WRONG");
    bool ok = shape;
    for (int year : {2023, 2022, 2021}) {
        const auto dir = work_dir() / ("year" + std::to_string(year));
        const int code = run_cli("--config " + cfg.string() + " --test-year " + std::to_string(year) + " --out-dir " +
                                     dir.string() + " run-benchmark",
                                 work_dir() / ("year" + std::to_string(year) + ".log"));
        if (code != 0) {
            ok = false;
            detail += "; test year " + std::to_string(year) + " exit " + std::to_string(code);
            continue;
        }
        prints[year] = schema_fingerprint(dir);
        manifests[year] = read_file(dir / "manifest.json");
        const Table win = read_table(dir / "windows.csv");
        std::set<std::string> tests;
        for (const auto& r : win.rows) tests.insert(r[win.column("test_year")]);
        ok = ok && tests == std::set<std::string>{std::to_string(year)};
    }
    if (prints.size() == 3) {
        const bool same = prints[2021] == prints[2023] && prints[2022] == prints[2023];
        const bool distinct = manifests[2021] != manifests[2023] && manifests[2022] != manifests[2023];
        ok = ok && same && distinct;
        detail += "; test years 2021/2022: " + std::string(same ? "identical schemas" : "SCHEMAS DIFFER") + " over " +
                  std::to_string(prints[2023].size()) + " files, manifests " + (distinct ? "distinct" : "IDENTICAL");
    }
    return {ok, detail};
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files, std::string& first_diff) {
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) names_a.insert(fs::relative(e.path(), a).string());
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file()) names_b.insert(fs::relative(e.path(), b).string());
    }
    files = names_a.size();
    if (names_a != names_b) {
        first_diff = "file lists differ";
        return false;
    }
    for (const auto& n : names_a) {
        if (read_file(a / n) != read_file(b / n)) {
            first_diff = n;
            return false;
        }
    }
    return true;
}

Outcome criterion8() {
    FullRun first = g_runs.count("seed1") ? g_runs["seed1"] : full_run(1, 1, "seed1");
    const auto again = full_run(1, 1, "seed1_again");
    const auto wide = full_run(1, 8, "seed1_jobs8");
    if (first.exit_code || again.exit_code || wide.exit_code) return {false, "a run failed"};
    std::size_t files = 0;
    std::string diff;
    const bool rep = same_tree(first.dir, again.dir, files, diff);
    const bool par = rep && same_tree(first.dir, wide.dir, files, diff);
    return {rep && par, std::to_string(files) + " files; jobs 1 rerun " + (rep ? "identical" : "differs") +
                            ", jobs 8 " + (par ? "identical" : "differs") + (diff.empty() ? "" : " at " + diff) +
                            " (jobs 8 run " + fmt(wide.seconds, 4) + " s)"};
}

Outcome criterion9() {
    int rate_ok = 0, share_ok = 0;
    double rate_lo = 1, rate_hi = 0, share_lo = 1, share_hi = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::GeneratorConfig g;
        g.seed = seed;
        const auto s = panel::summarize_panel(synth::to_panel(synth::generate(g)));
        double share = 0;
        for (const auto& p : s.prevalence) {
            if (p.year == 2020 || p.year == 2021) {
                share += 0.5 * (p.healthy[8] * p.n_healthy + p.distressed[8] * p.n_distressed) /
                         static_cast<double>(p.n_healthy + p.n_distressed);
            }
        }
        rate_ok += std::abs(s.distress_rate - kRateTarget) <= kRateTol;
        share_ok += std::abs(share - kShareTarget) <= kShareTol;
        rate_lo = std::min(rate_lo, s.distress_rate);
        rate_hi = std::max(rate_hi, s.distress_rate);
        share_lo = std::min(share_lo, share);
        share_hi = std::max(share_hi, share);
    }
    return {rate_ok == 20 && share_ok == 20,
            "distress rate in [" + fmt(100 * rate_lo) + "%, " + fmt(100 * rate_hi) + "%] (" + std::to_string(rate_ok) +
                "/20 in band); 2020-2021 AI share in [" + fmt(100 * share_lo) + "%, " + fmt(100 * share_hi) + "%] (" +
                std::to_string(share_ok) + "/20 in band)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metric formulas on averaged counts", criterion1},
        {"oracle equivalence", criterion2},
        {"gradient checks", criterion3},
        {"leakage sentinel", criterion4},
        {"local accuracy", criterion5},
        {"directional replication", criterion6},
        {"protocol shape", criterion7},
        {"reproducibility", criterion8},
        {"generator calibration", criterion9},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
                  << o.detail << " [" << std::fixed << std::setprecision(1) << sec << " s]" << std::defaultfloat
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
