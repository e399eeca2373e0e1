// ews: command-line entry point for the early-warning pipeline.
#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ews/benchmark.hpp"
#include "ews/csv.hpp"
#include "ews/explain.hpp"
#include "ews/lexicon.hpp"
#include "ews/model_io.hpp"
#include "ews/synth.hpp"
#include "ews/text_features.hpp"

namespace fs = std::filesystem;
using namespace ews;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    int jobs = 1;
    std::optional<int> test_year;
};

struct UsageError : Error {
    using Error::Error;
};

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw UsageError(what + " is required");
    if (!fs::is_regular_file(path)) throw UsageError(what + " not found: " + path);
}

fs::path out_path(const Globals& g, const std::string& explicit_path, const std::string& name) {
    return explicit_path.empty() ? fs::path(g.out_dir) / name : fs::path(explicit_path);
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::string corpus, lexicon, patents, out;
};

std::vector<text::PatentRecord> read_patents(const fs::path& path) {
    const Table t = read_table(path);
    const auto c_firm = t.column("firm_id"), c_year = t.column("year"), c_kind = t.column("kind"),
               c_title = t.column("title"), c_abs = t.column("abstract");
    std::vector<text::PatentRecord> out;
    for (const auto& r : t.rows) {
        out.push_back({r[c_firm], static_cast<int>(parse_int(r[c_year])), text::parse_patent_kind(r[c_kind]),
                       r[c_title], r[c_abs]});
    }
    return out;
}

int cmd_extract(const Globals& g, const ExtractArgs& a) {
    const std::string lex_path = a.lexicon.empty() ? text::Lexicon::default_path().string() : a.lexicon;
    require_file(lex_path, "lexicon");
    if (a.corpus.empty() || !fs::is_directory(a.corpus)) throw UsageError("corpus directory not found: " + a.corpus);
    const auto lex = text::Lexicon::load(lex_path);
    std::vector<text::PatentRecord> patents;
    if (!a.patents.empty()) {
        require_file(a.patents, "patent file");
        patents = read_patents(a.patents);
    }

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.corpus)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<panel::AiFeatureRow> rows;
    std::ostringstream flags;
    CsvWriter fw(flags);
    fw.row({"firm_id", "year", "mdna_absent", "narrative_fallback", "zero_length"});
    std::size_t with_ai = 0;
    for (const auto& path : files) {
        const std::string stem = path.stem().string();
        const auto us = stem.rfind('_');
        if (us == std::string::npos || us == 0) throw Error("corpus file name is not <firm_id>_<year>.txt: " + path.string());
        const std::string firm = stem.substr(0, us);
        int year = 0;
        try {
            year = static_cast<int>(parse_int(stem.substr(us + 1)));
        } catch (const Error&) {
            throw Error("corpus file name is not <firm_id>_<year>.txt: " + path.string());
        }
        std::string content;
        try {
            content = read_file(path);
        } catch (const Error& e) {
            throw Error("cannot read " + path.string() + ": " + e.what());
        }
        const auto doc = text::parse_document(firm, year, content);
        const auto r = text::extract_ai_features(doc, patents, lex);
        rows.push_back({firm, year, r.features});
        with_ai += r.features.any_nonzero();
        fw.row({firm, std::to_string(year), r.flags.mdna_absent ? "1" : "0", r.flags.narrative_fallback ? "1" : "0",
                r.flags.zero_length ? "1" : "0"});
    }
    const auto out = out_path(g, a.out, "ai_features.csv");
    write_file(out, panel::format_ai_feature_rows(rows));
    fs::path flag_path = out;
    flag_path.replace_extension(".flags.csv");
    write_file(flag_path, flags.str());
    if (files.empty()) std::cerr << "warning: corpus is empty\n";
    std::cout << "documents " << files.size() << ", with AI terms " << with_ai << ", lexicon " << lex.version()
              << " (" << lex.groups().size() << " groups)\nwrote " << out.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct PanelArgs {
    std::string financial, ai, out;
    bool impute = false;
};

int cmd_build_panel(const Globals& g, const PanelArgs& a) {
    require_file(a.financial, "financial file");
    require_file(a.ai, "AI feature file");
    auto built = panel::build_panel(panel::read_financial_rows(a.financial), panel::read_ai_feature_rows(a.ai));
    for (const auto& w : built.report.warnings) std::cerr << "warning: " << w << "\n";
    panel::Panel p = std::move(built.panel);
    const auto out = out_path(g, a.out, "panel.csv");
    if (a.impute) {
        panel::ImputationConfig ic;
        if (g.seed) ic.seed = *g.seed;
        auto imp = panel::impute_missing(p, ic);
        p = std::move(imp.panel);
        fs::path rep = out;
        rep.replace_extension(".imputation.json");
        write_file(rep, imp.report.to_json() + "\n");
    }
    write_file(out, panel::format_panel(p));
    std::cout << "panel rows " << p.size() << ", financial-industry rows dropped "
              << built.report.financial_rows_dropped << ", rows without AI " << built.report.rows_without_ai
              << "\nwrote " << out.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::size_t text_docs = 0;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
    synth::GeneratorConfig cfg;
    if (!g.config.empty()) {
        require_file(g.config, "generator config");
        cfg = synth::config_from_json(read_file(g.config));
    }
    if (g.seed) cfg.seed = *g.seed;
    const auto data = synth::generate(cfg);
    const fs::path dir(g.out_dir);
    synth::write_outputs(data, cfg, dir);
    if (a.text_docs > 0) synth::write_text_corpus(data, dir, a.text_docs);
    write_file(dir / "benchmark.json",
               "{\n  \"financial\": \"financial.csv\",\n  \"ai_features\": \"ai_features.csv\"\n}\n");
    std::cout << "rows " << data.truth.n_rows << ", distressed rows " << data.truth.n_distressed_rows
              << ", intercept " << format_double(data.truth.intercept) << "\nwrote " << dir.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

int cmd_run_benchmark(const Globals& g, bool show_progress) {
    require_file(g.config, "--config");
    auto cfg = bench::load_run_config(g.config);
    if (g.seed) {
        cfg.seed = *g.seed;
        if (cfg.generator) cfg.generator->seed = *g.seed;
    }
    if (g.test_year) {
        cfg.test_year = *g.test_year;
        cfg.end_year = 0;
    }
    cfg.jobs = g.jobs;
    cfg.validate();
    auto input = bench::load_panel(cfg);
    bench::ProgressFn progress;
    if (show_progress) {
        progress = [](const bench::TaskResult& t, std::size_t done, std::size_t total) {
            std::cerr << "[" << done << "/" << total << "] window " << t.window << " "
                      << models::to_string(t.family) << " " << panel::to_string(t.feature_set) << " "
                      << (t.ok ? "ok" : "failed") << " " << std::fixed << std::setprecision(1) << t.seconds
                      << "s\n";
        };
    }
    const auto res = bench::run_benchmark(cfg, std::move(input), progress);
    bench::write_outputs(res, g.out_dir);
    const std::size_t done = res.completed_windows();
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "windows completed " << done << "/" << res.plan.size() << ", tasks "
              << std::count_if(res.tasks.begin(), res.tasks.end(), [](const auto& t) { return t.ok; }) << "/"
              << res.tasks.size() << "\nwrote " << g.out_dir << "\n";
    return done == 0 ? kFailure : kOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string results, out;
    int bootstrap = inference::kDefaultBootstrap;
};

int cmd_compare(const Globals& g, const CompareArgs& a) {
    require_file(a.results, "results file");
    const std::uint64_t seed = g.seed.value_or(20240601);
    const auto text = bench::compare_results_file(a.results, a.bootstrap, seed);
    const auto out = out_path(g, a.out, "comparisons.csv");
    write_file(out, text);
    std::cout << "wrote " << out.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct ExplainArgs {
    std::string model, rows, out;
    std::vector<std::string> row_ids;
};

int cmd_explain(const Globals& g, const ExplainArgs& a) {
    require_file(a.model, "model file");
    require_file(a.rows, "rows file");
    const auto model = models::load_model(a.model);
    const Table t = read_table(a.rows);
    std::vector<std::size_t> cols;
    for (const auto& name : model.schema()) cols.push_back(t.column(name));
    const auto c_row = t.find_column("row_id");
    const auto c_firm = t.find_column("firm_id");

    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", "ews.explanations/1");
    w.meta("model", fs::path(a.model).filename().string());
    w.row({"row_id", "firm_id", "output_space", "feature", "phi", "base_value", "output", "probability"});
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string row_id = c_row ? r[*c_row] : std::to_string(i);
        const std::string firm = c_firm ? r[*c_firm] : "";
        if (!a.row_ids.empty() &&
            std::find_if(a.row_ids.begin(), a.row_ids.end(),
                         [&](const std::string& id) { return id == row_id || id == firm; }) == a.row_ids.end()) {
            continue;
        }
        std::vector<double> x;
        for (auto c : cols) x.push_back(parse_double(r[c]));
        const auto e = explain::explain_row(model, x);
        const double prob = model.predict_proba_row(x);
        for (std::size_t j = 0; j < e.phi.size(); ++j) {
            w.row({row_id, firm, std::string(models::to_string(e.output_space)), model.schema()[j],
                   format_double(e.phi[j]), format_double(e.base_value), format_double(e.output()),
                   format_double(prob)});
        }
        ++n;
    }
    const auto path = out_path(g, a.out, "explain.csv");
    write_file(path, out.str());
    std::cout << "explained " << n << " rows\nwrote " << path.string() << "\n";
    return n == 0 && !a.row_ids.empty() ? kFailure : kOk;
}

// ---------------------------------------------------------------------------

struct SummarizeArgs {
    std::string panel, financial, ai, out;
};

int cmd_summarize(const Globals& g, const SummarizeArgs& a) {
    panel::Panel p;
    if (!a.panel.empty()) {
        require_file(a.panel, "panel file");
        p = panel::read_panel(a.panel);
    } else {
        require_file(a.financial, "financial file");
        require_file(a.ai, "AI feature file");
        p = panel::build_panel(panel::read_financial_rows(a.financial), panel::read_ai_feature_rows(a.ai)).panel;
    }
    if (p.empty()) throw Error("panel is empty");
    const auto s = panel::summarize_panel(p);
    const auto path = out_path(g, a.out, "prevalence.csv");
    write_file(path, bench::format_summary(s));
    std::cout << "observations " << s.n_observations << ", distressed " << s.n_distressed << " ("
              << format_double(std::round(s.distress_rate * 1e4) / 1e2) << "%), firms " << s.n_firms
              << "\nwrote " << path.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Financial-distress early warning with AI-disclosure features"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Configuration file (JSON)");
    app.add_option("--seed", g.seed, "Master seed override");
    app.add_option("--out-dir", g.out_dir, "Output directory");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--test-year", g.test_year, "Test year override");

    ExtractArgs ex;
    auto* s_ex = app.add_subcommand("extract-features", "Scan a text corpus for AI terms");
    s_ex->add_option("--corpus", ex.corpus, "Directory of <firm_id>_<year>.txt files")->required();
    s_ex->add_option("--lexicon", ex.lexicon, "Lexicon file (default: shipped lexicon)");
    s_ex->add_option("--patents", ex.patents, "Patent file: firm_id,year,kind,title,abstract");
    s_ex->add_option("--out", ex.out, "Output feature table");

    PanelArgs pa;
    auto* s_pa = app.add_subcommand("build-panel", "Merge financial and AI rows into a panel");
    s_pa->add_option("--financial", pa.financial)->required();
    s_pa->add_option("--ai", pa.ai)->required();
    s_pa->add_option("--out", pa.out);
    s_pa->add_flag("--impute", pa.impute, "Fill missing financials by chained equations");

    SynthArgs sy;
    auto* s_sy = app.add_subcommand("synth", "Generate a synthetic panel");
    s_sy->add_option("--text-docs", sy.text_docs, "Also emit this many synthetic text documents");

    bool show_progress = false;
    auto* s_rb = app.add_subcommand("run-benchmark", "Run the pruned-window benchmark");
    s_rb->add_flag("--progress", show_progress, "Report each finished task on stderr");

    CompareArgs cmp;
    auto* s_cmp = app.add_subcommand("compare", "Paired with/without-AI comparisons from a results file");
    s_cmp->add_option("--results", cmp.results)->required();
    s_cmp->add_option("--bootstrap", cmp.bootstrap)->check(CLI::PositiveNumber);
    s_cmp->add_option("--out", cmp.out);

    ExplainArgs xp;
    auto* s_xp = app.add_subcommand("explain", "Local attributions for rows under a saved model");
    s_xp->add_option("--model", xp.model)->required();
    s_xp->add_option("--rows", xp.rows, "CSV with the model's feature columns")->required();
    s_xp->add_option("--row-ids", xp.row_ids, "Restrict to these row_id or firm_id values")->delimiter(',');
    s_xp->add_option("--out", xp.out);

    SummarizeArgs sm;
    auto* s_sm = app.add_subcommand("summarize", "Per-year AI prevalence by health class");
    s_sm->add_option("--panel", sm.panel);
    s_sm->add_option("--financial", sm.financial);
    s_sm->add_option("--ai", sm.ai);
    s_sm->add_option("--out", sm.out);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "extract-features") return cmd_extract(g, ex);
        if (name == "build-panel") return cmd_build_panel(g, pa);
        if (name == "synth") return cmd_synth(g, sy);
        if (name == "run-benchmark") return cmd_run_benchmark(g, show_progress);
        if (name == "compare") return cmd_compare(g, cmp);
        if (name == "explain") return cmd_explain(g, xp);
        if (name == "summarize") return cmd_summarize(g, sm);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}
