#include "ews/panel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ews/csv.hpp"

namespace ews::panel {

std::string_view to_string(Industry industry) {
    return industry == Industry::financial ? "financial" : "non_financial";
}

Industry parse_industry(std::string_view s) {
    if (s == "financial") return Industry::financial;
    if (s == "non_financial") return Industry::non_financial;
    throw Error("unknown industry class '" + std::string(s) + "'");
}

const std::array<std::string, kNumFeatures>& feature_names() {
    static const std::array<std::string, kNumFeatures> names = [] {
        std::array<std::string, kNumFeatures> n{"X01", "X02", "X03", "X04", "X05"};
        const auto& ai = text::ai_feature_names();
        for (std::size_t i = 0; i < ai.size(); ++i) n[kNumFinancial + i] = std::string(ai[i]);
        return n;
    }();
    return names;
}

const std::array<std::string_view, kNumFinancial>& financial_column_names() {
    static const std::array<std::string_view, kNumFinancial> names = {"x01", "x02", "x03", "x04", "x05"};
    return names;
}

std::string_view to_string(FeatureSet fs) { return fs == FeatureSet::with_ai ? "with_ai" : "without_ai"; }

FeatureSet parse_feature_set(std::string_view s) {
    if (s == "with_ai") return FeatureSet::with_ai;
    if (s == "without_ai") return FeatureSet::without_ai;
    throw Error("unknown feature set '" + std::string(s) + "'");
}

std::vector<std::size_t> feature_columns(FeatureSet fs) {
    const std::size_t n = fs == FeatureSet::with_ai ? kNumFeatures : kNumFinancial;
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return cols;
}

FeatureVector FirmYearRecord::features() const {
    FeatureVector v{};
    std::copy(x.begin(), x.end(), v.begin());
    const auto a = ai.to_array();
    std::copy(a.begin(), a.end(), v.begin() + kNumFinancial);
    return v;
}

Panel::Panel(std::vector<FirmYearRecord> rows) : rows_(std::move(rows)) {
    std::sort(rows_.begin(), rows_.end(), [](const FirmYearRecord& a, const FirmYearRecord& b) {
        return std::tie(a.firm_id, a.year) < std::tie(b.firm_id, b.year);
    });
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto [it, inserted] = index_.emplace(std::make_pair(rows_[i].firm_id, rows_[i].year), i);
        if (!inserted) {
            throw Error("duplicate firm-year (" + rows_[i].firm_id + ", " + std::to_string(rows_[i].year) + ")");
        }
    }
}

const FirmYearRecord* Panel::find(std::string_view firm_id, int year) const {
    auto it = index_.find(std::make_pair(std::string(firm_id), year));
    return it == index_.end() ? nullptr : &rows_[it->second];
}

std::pair<int, int> Panel::year_range() const {
    if (rows_.empty()) return {0, -1};
    int lo = rows_.front().year, hi = rows_.front().year;
    for (const auto& r : rows_) {
        lo = std::min(lo, r.year);
        hi = std::max(hi, r.year);
    }
    return {lo, hi};
}

BuildResult build_panel(std::span<const FinancialRow> financial, std::span<const AiFeatureRow> ai) {
    using Key = std::pair<std::string, int>;
    std::map<Key, const AiFeatureRow*> ai_index;
    for (const auto& a : ai) {
        auto [it, inserted] = ai_index.emplace(Key{a.firm_id, a.year}, &a);
        if (!inserted) {
            throw Error("duplicate AI feature row for (" + a.firm_id + ", " + std::to_string(a.year) + ")");
        }
    }

    BuildResult result;
    std::set<Key> seen;
    std::vector<FirmYearRecord> rows;
    rows.reserve(financial.size());
    for (const auto& f : financial) {
        Key key{f.firm_id, f.year};
        if (!seen.insert(key).second) {
            throw Error("duplicate financial row for (" + f.firm_id + ", " + std::to_string(f.year) + ")");
        }
        if (f.industry == Industry::financial) {
            ++result.report.financial_rows_dropped;
            continue;
        }
        FirmYearRecord r;
        r.firm_id = f.firm_id;
        r.year = f.year;
        r.x = f.x;
        r.st_status = f.st_flag;
        r.industry = f.industry;
        if (auto it = ai_index.find(key); it != ai_index.end()) {
            r.ai = it->second->ai;
        } else {
            r.ai_missing = true;
            ++result.report.rows_without_ai;
        }
        rows.push_back(std::move(r));
    }
    for (const auto& [key, row] : ai_index) {
        if (!seen.count(key)) ++result.report.ai_rows_unjoined;
    }
    if (result.report.ai_rows_unjoined) {
        result.report.warnings.push_back(std::to_string(result.report.ai_rows_unjoined) +
                                         " AI feature rows have no matching financial row");
    }
    if (result.report.rows_without_ai) {
        result.report.warnings.push_back(std::to_string(result.report.rows_without_ai) +
                                         " firm-years have no AI feature row; AI fields set to 0 and flagged");
    }
    result.panel = Panel(std::move(rows));
    return result;
}

LabelingResult label_instances(const Panel& panel, int first_label_year, int last_label_year, int horizon) {
    if (horizon < 1) throw Error("labeling horizon must be at least one year");
    std::set<std::string, std::less<>> ever_flagged;
    for (const auto& r : panel.rows()) {
        if (r.st_status) ever_flagged.insert(r.firm_id);
    }
    LabelingResult out;
    for (const auto& r : panel.rows()) {
        if (r.year < first_label_year || r.year > last_label_year) continue;
        const bool flagged_firm = ever_flagged.count(r.firm_id) > 0;
        if (!r.st_status && flagged_firm) continue;
        const FirmYearRecord* base = panel.find(r.firm_id, r.year - horizon);
        if (!base) {
            ++out.skipped_missing_base;
            continue;
        }
        if (r.st_status && base->st_status) {
            ++out.dropped_already_distressed;
            continue;
        }
        out.instances.push_back({r.firm_id, r.year, base->year, r.st_status, base->features()});
    }
    return out;
}

PanelSummary summarize_panel(const Panel& panel) {
    if (panel.empty()) throw Error("cannot summarize an empty panel");
    PanelSummary s;
    std::set<std::string, std::less<>> flagged, firms;
    for (const auto& r : panel.rows()) {
        firms.insert(r.firm_id);
        if (r.st_status) {
            flagged.insert(r.firm_id);
            ++s.n_distressed;
        }
    }
    s.n_observations = panel.size();
    s.distress_rate = static_cast<double>(s.n_distressed) / static_cast<double>(s.n_observations);
    s.n_firms = firms.size();
    s.n_distressed_firms = flagged.size();

    const auto [lo, hi] = panel.year_range();
    constexpr std::size_t kCols = text::kNumAiFeatures;
    std::map<int, ClassPrevalence> by_year;
    std::array<double, kCols> sum_h{}, sum_d{}, fin_h{}, fin_d{};
    std::size_t n_h = 0, n_d = 0, n_fin_h = 0, n_fin_d = 0;
    for (const auto& r : panel.rows()) {
        auto& p = by_year[r.year];
        p.year = r.year;
        const bool distressed = flagged.count(r.firm_id) > 0;
        auto& counts = distressed ? p.distressed : p.healthy;
        (distressed ? p.n_distressed : p.n_healthy) += 1;
        const auto a = r.ai.to_array();
        for (std::size_t c = 0; c < kCols; ++c) {
            if (a[c] != 0.0) counts[c] += 1;
        }
        if (r.ai.any_nonzero()) counts[kCols] += 1;
        auto& sum = distressed ? sum_d : sum_h;
        for (std::size_t c = 0; c < kCols; ++c) sum[c] += a[c];
        (distressed ? n_d : n_h) += 1;
        if (r.year == hi) {
            auto& fin = distressed ? fin_d : fin_h;
            for (std::size_t c = 0; c < kCols; ++c) fin[c] += a[c];
            (distressed ? n_fin_d : n_fin_h) += 1;
        }
    }
    for (auto& [year, p] : by_year) {
        for (std::size_t c = 0; c <= kCols; ++c) {
            p.healthy[c] = p.n_healthy ? p.healthy[c] / static_cast<double>(p.n_healthy) : 0.0;
            p.distressed[c] = p.n_distressed ? p.distressed[c] / static_cast<double>(p.n_distressed) : 0.0;
        }
        s.prevalence.push_back(p);
    }
    for (std::size_t c = 0; c < kCols; ++c) {
        s.healthy_means[c] = n_h ? sum_h[c] / static_cast<double>(n_h) : 0.0;
        s.distressed_means[c] = n_d ? sum_d[c] / static_cast<double>(n_d) : 0.0;
        s.healthy_means_final_year[c] = n_fin_h ? fin_h[c] / static_cast<double>(n_fin_h) : 0.0;
        s.distressed_means_final_year[c] = n_fin_d ? fin_d[c] / static_cast<double>(n_fin_d) : 0.0;
    }
    (void)lo;
    return s;
}

namespace {

bool parse_flag(std::string_view s) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false" || s.empty()) return false;
    throw Error("invalid 0/1 flag '" + std::string(s) + "'");
}

text::AiFeatures read_ai_columns(const Table& t, const CsvRow& row) {
    std::array<double, text::kNumAiFeatures> v{};
    const auto& names = text::ai_feature_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        v[c] = parse_double(row[t.column(names[c])]);
        if (std::isnan(v[c])) throw Error("AI column '" + std::string(names[c]) + "' may not be blank");
    }
    return text::AiFeatures::from_array(v);
}

}  // namespace

std::vector<FinancialRow> read_financial_rows(const std::filesystem::path& path) {
    const Table t = read_table(path);
    std::vector<FinancialRow> rows;
    rows.reserve(t.rows.size());
    const auto c_firm = t.column("firm_id"), c_year = t.column("year");
    const auto c_st = t.column("st_flag"), c_ind = t.column("industry_class");
    std::array<std::size_t, kNumFinancial> c_x{};
    for (std::size_t j = 0; j < kNumFinancial; ++j) c_x[j] = t.column(financial_column_names()[j]);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        try {
            FinancialRow f;
            f.firm_id = row[c_firm];
            f.year = static_cast<int>(parse_int(row[c_year]));
            for (std::size_t j = 0; j < kNumFinancial; ++j) f.x[j] = parse_double(row[c_x[j]]);
            f.st_flag = parse_flag(row[c_st]);
            f.industry = parse_industry(row[c_ind]);
            rows.push_back(std::move(f));
        } catch (const Error& e) {
            throw Error(path.string() + ": row " + std::to_string(i + 2) + ": " + e.what());
        }
    }
    return rows;
}

std::vector<AiFeatureRow> read_ai_feature_rows(const std::filesystem::path& path) {
    const Table t = read_table(path);
    std::vector<AiFeatureRow> rows;
    rows.reserve(t.rows.size());
    const auto c_firm = t.column("firm_id"), c_year = t.column("year");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        try {
            rows.push_back({row[c_firm], static_cast<int>(parse_int(row[c_year])), read_ai_columns(t, row)});
        } catch (const Error& e) {
            throw Error(path.string() + ": row " + std::to_string(i + 2) + ": " + e.what());
        }
    }
    return rows;
}

std::string format_financial_rows(std::span<const FinancialRow> rows) {
    std::ostringstream out;
    CsvWriter w(out);
    CsvRow header{"firm_id", "year"};
    for (auto n : financial_column_names()) header.emplace_back(n);
    header.insert(header.end(), {"st_flag", "industry_class"});
    w.row(header);
    for (const auto& f : rows) {
        CsvRow r{f.firm_id, std::to_string(f.year)};
        for (double v : f.x) r.push_back(format_double(v));
        r.push_back(f.st_flag ? "1" : "0");
        r.emplace_back(to_string(f.industry));
        w.row(r);
    }
    return out.str();
}

std::string format_ai_feature_rows(std::span<const AiFeatureRow> rows) {
    std::ostringstream out;
    CsvWriter w(out);
    CsvRow header{"firm_id", "year"};
    for (auto n : text::ai_feature_names()) header.emplace_back(n);
    w.row(header);
    for (const auto& a : rows) {
        CsvRow r{a.firm_id, std::to_string(a.year)};
        for (double v : a.ai.to_array()) r.push_back(format_double(v));
        w.row(r);
    }
    return out.str();
}

std::string format_panel(const Panel& panel) {
    std::ostringstream out;
    CsvWriter w(out);
    w.meta("schema", kPanelSchema);
    CsvRow header{"firm_id", "year"};
    for (const auto& n : feature_names()) header.push_back(n);
    header.insert(header.end(), {"st_flag", "industry_class", "ai_missing"});
    w.row(header);
    for (const auto& r : panel.rows()) {
        CsvRow row{r.firm_id, std::to_string(r.year)};
        for (double v : r.features()) row.push_back(format_double(v));
        row.push_back(r.st_status ? "1" : "0");
        row.emplace_back(to_string(r.industry));
        row.push_back(r.ai_missing ? "1" : "0");
        w.row(row);
    }
    return out.str();
}

Panel parse_panel(std::string_view content) {
    const Table t = parse_table(content);
    auto it = t.meta.find("schema");
    if (it == t.meta.end() || it->second != kPanelSchema) {
        throw Error("panel file lacks the '" + std::string(kPanelSchema) + "' schema header");
    }
    const auto c_firm = t.column("firm_id"), c_year = t.column("year");
    const auto c_st = t.column("st_flag"), c_ind = t.column("industry_class"), c_miss = t.column("ai_missing");
    std::array<std::size_t, kNumFinancial> c_x{};
    for (std::size_t j = 0; j < kNumFinancial; ++j) c_x[j] = t.column(feature_names()[j]);
    std::vector<FirmYearRecord> rows;
    rows.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        try {
            FirmYearRecord r;
            r.firm_id = row[c_firm];
            r.year = static_cast<int>(parse_int(row[c_year]));
            for (std::size_t j = 0; j < kNumFinancial; ++j) r.x[j] = parse_double(row[c_x[j]]);
            r.ai = read_ai_columns(t, row);
            r.st_status = parse_flag(row[c_st]);
            r.industry = parse_industry(row[c_ind]);
            r.ai_missing = parse_flag(row[c_miss]);
            rows.push_back(std::move(r));
        } catch (const Error& e) {
            throw Error("panel row " + std::to_string(i + 3) + ": " + e.what());
        }
    }
    return Panel(std::move(rows));
}

Panel read_panel(const std::filesystem::path& path) {
    try {
        return parse_panel(read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace ews::panel
