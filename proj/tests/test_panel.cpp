#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "ews/panel.hpp"

using namespace ews;
using namespace ews::panel;

namespace {

FinancialRow fin(std::string id, int year, bool st = false, Industry ind = Industry::non_financial) {
    FinancialRow f;
    f.firm_id = std::move(id);
    f.year = year;
    f.x = {0.1, 0.2, 0.3, 0.4, 0.5};
    f.x[0] = year / 1000.0;
    f.st_flag = st;
    f.industry = ind;
    return f;
}

AiFeatureRow ai_row(std::string id, int year, double level) {
    AiFeatureRow a;
    a.firm_id = std::move(id);
    a.year = year;
    a.ai.ai_level = level;
    return a;
}

Panel make(std::vector<FinancialRow> rows) {
    return build_panel(rows, std::vector<AiFeatureRow>{}).panel;
}

}  // namespace

TEST_CASE("financial firms are excluded") {
    std::vector<FinancialRow> rows{fin("A", 2020), fin("B", 2020), fin("C", 2020, false, Industry::financial)};
    auto r = build_panel(rows, std::vector<AiFeatureRow>{});
    CHECK(r.panel.size() == 2);
    CHECK(r.report.financial_rows_dropped == 1);
    CHECK(r.panel.find("C", 2020) == nullptr);
    CHECK(r.panel.find("A", 2020) != nullptr);
}

TEST_CASE("duplicate keys are rejected with the key named") {
    std::vector<FinancialRow> rows{fin("A", 2020), fin("A", 2020)};
    try {
        build_panel(rows, std::vector<AiFeatureRow>{});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("(A, 2020)") != std::string::npos);
    }
    std::vector<FinancialRow> one{fin("A", 2020)};
    std::vector<AiFeatureRow> ai{ai_row("A", 2020, 1), ai_row("A", 2020, 2)};
    CHECK_THROWS_AS(build_panel(one, ai), Error);
}

TEST_CASE("AI join flags missing rows and warns on unjoined ones") {
    std::vector<FinancialRow> rows{fin("A", 2020), fin("B", 2020)};
    std::vector<AiFeatureRow> ai{ai_row("A", 2020, 3), ai_row("Z", 2020, 1)};
    auto r = build_panel(rows, ai);
    CHECK(r.report.ai_rows_unjoined == 1);
    CHECK(r.report.rows_without_ai == 1);
    CHECK(r.report.warnings.size() == 2);
    CHECK(r.panel.find("A", 2020)->ai.ai_level == 3);
    CHECK_FALSE(r.panel.find("A", 2020)->ai_missing);
    CHECK(r.panel.find("B", 2020)->ai_missing);
    CHECK_FALSE(r.panel.find("B", 2020)->ai.any_nonzero());
}

TEST_CASE("missing financial cells survive the build") {
    auto f = fin("A", 2020);
    f.x[2] = std::numeric_limits<double>::quiet_NaN();
    auto p = make({f});
    CHECK(std::isnan(p.find("A", 2020)->x[2]));
}

TEST_CASE("labeling rules") {
    // D: ST in 2023 only. E: ST in 2021 and 2023. H: never ST.
    std::vector<FinancialRow> rows;
    for (int y = 2019; y <= 2023; ++y) {
        rows.push_back(fin("D", y, y == 2023));
        rows.push_back(fin("E", y, y == 2021 || y == 2023));
        rows.push_back(fin("H", y));
    }
    auto p = make(rows);
    auto lab = label_instances(p, 2023, 2023);
    REQUIRE(lab.instances.size() == 2);
    const auto& d = lab.instances[0];
    CHECK(d.firm_id == "D");
    CHECK(d.distressed);
    CHECK(d.label_year == 2023);
    CHECK(d.feature_year == 2021);
    CHECK(d.features[0] == doctest::Approx(2.021));
    CHECK(lab.instances[1].firm_id == "H");
    CHECK_FALSE(lab.instances[1].distressed);
    CHECK(lab.dropped_already_distressed == 1);

    // The never-flagged firm yields one instance per pairable year.
    auto all = label_instances(p, 2019, 2023);
    int h = 0;
    for (const auto& i : all.instances) {
        if (i.firm_id == "H") ++h;
    }
    CHECK(h == 3);
    CHECK(all.skipped_missing_base == 2);  // H in 2019 and 2020
}

TEST_CASE("labeling soundness on random panels") {
    std::mt19937_64 rng(7);
    std::bernoulli_distribution st(0.15), gap(0.1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<FinancialRow> rows;
        for (int f = 0; f < 12; ++f) {
            for (int y = 2010; y <= 2020; ++y) {
                if (gap(rng)) continue;
                rows.push_back(fin("F" + std::to_string(f), y, st(rng)));
            }
        }
        auto p = make(rows);
        std::set<std::string> flagged;
        for (const auto& r : p.rows()) {
            if (r.st_status) flagged.insert(r.firm_id);
        }
        auto lab = label_instances(p, 2012, 2020);
        for (const auto& i : lab.instances) {
            CHECK(i.feature_year == i.label_year - 2);
            const auto* base = p.find(i.firm_id, i.feature_year);
            REQUIRE(base != nullptr);
            if (i.distressed) CHECK_FALSE(base->st_status);
            if (!i.distressed) CHECK(flagged.count(i.firm_id) == 0);
            CHECK(i.distressed == p.find(i.firm_id, i.label_year)->st_status);
        }
    }
}

TEST_CASE("horizon below one is rejected") {
    auto p = make({fin("A", 2020)});
    CHECK_THROWS_AS(label_instances(p, 2020, 2020, 0), Error);
}

TEST_CASE("summary on a hand-built four-row panel") {
    // 2022: A healthy with level 2, B distressed-firm with no AI.
    // 2023: A healthy with level 4 and patents 1, B flagged with level 1.
    std::vector<FinancialRow> rows{fin("A", 2022), fin("B", 2022), fin("A", 2023), fin("B", 2023, true)};
    std::vector<AiFeatureRow> ai{ai_row("A", 2022, 2), ai_row("B", 2022, 0), ai_row("A", 2023, 4),
                                 ai_row("B", 2023, 1)};
    ai[2].ai.ai_patents_total = 1;
    auto p = build_panel(rows, ai).panel;
    auto s = summarize_panel(p);
    CHECK(s.n_observations == 4);
    CHECK(s.n_distressed == 1);
    CHECK(s.distress_rate == 0.25);
    CHECK(s.n_firms == 2);
    CHECK(s.n_distressed_firms == 1);
    REQUIRE(s.prevalence.size() == 2);
    const auto& y22 = s.prevalence[0];
    const auto& y23 = s.prevalence[1];
    CHECK(y22.year == 2022);
    CHECK(y22.n_healthy == 1);
    CHECK(y22.n_distressed == 1);
    // Column 0 is patents, 4 is level, 8 is any AI.
    CHECK(y22.healthy[4] == 1.0);
    CHECK(y22.distressed[4] == 0.0);
    CHECK(y22.healthy[8] == 1.0);
    CHECK(y22.distressed[8] == 0.0);
    CHECK(y23.healthy[0] == 1.0);
    CHECK(y23.distressed[0] == 0.0);
    CHECK(y23.distressed[4] == 1.0);
    CHECK(y23.distressed[8] == 1.0);
    CHECK(s.healthy_means[4] == 3.0);
    CHECK(s.distressed_means[4] == 0.5);
    CHECK(s.healthy_means_final_year[4] == 4.0);
    CHECK(s.distressed_means_final_year[4] == 1.0);
    CHECK(s.healthy_means[0] == 0.5);
}

TEST_CASE("all-zero AI panel has zero prevalence") {
    std::vector<FinancialRow> rows;
    for (int y = 2018; y <= 2021; ++y) {
        rows.push_back(fin("A", y, y == 2020));
        rows.push_back(fin("B", y));
    }
    auto s = summarize_panel(make(rows));
    for (const auto& p : s.prevalence) {
        for (double v : p.healthy) CHECK(v == 0.0);
        for (double v : p.distressed) CHECK(v == 0.0);
    }
    CHECK(s.distress_rate == static_cast<double>(s.n_distressed) / s.n_observations);
    CHECK_THROWS_AS(summarize_panel(Panel{}), Error);
}

TEST_CASE("panel text round-trip") {
    auto f = fin("A", 2020, true);
    f.x[1] = std::numeric_limits<double>::quiet_NaN();
    f.x[3] = -0.1234567890123;
    std::vector<FinancialRow> rows{f, fin("B", 2021)};
    std::vector<AiFeatureRow> ai{ai_row("A", 2020, 7)};
    ai[0].ai.ai_density_full = 1.0 / 3.0;
    auto p = build_panel(rows, ai).panel;
    const auto text = format_panel(p);
    auto q = parse_panel(text);
    REQUIRE(q.size() == 2);
    const auto* a = q.find("A", 2020);
    CHECK(a->st_status);
    CHECK(std::isnan(a->x[1]));
    CHECK(a->x[3] == f.x[3]);
    CHECK(a->ai.ai_density_full == 1.0 / 3.0);
    CHECK(q.find("B", 2021)->ai_missing);
    CHECK(format_panel(q) == text);
}
