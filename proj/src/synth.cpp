#include "ews/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ews/csv.hpp"
#include "ews/hash.hpp"
#include "json.hpp"

namespace ews::synth {

void GeneratorConfig::validate() const {
    if (n_firms < 1) throw Error("n_firms must be positive");
    if (n_financial_firms < 0) throw Error("n_financial_firms must be non-negative");
    if (last_year - first_year + 1 < 4) throw Error("year range must span at least 4 years");
    const int years = last_year - first_year + 1;
    if (n_rows != 0 && (n_rows < 3 * n_firms || n_rows > years * n_firms)) {
        throw Error("n_rows must lie in [3 * n_firms, years * n_firms] or be 0");
    }
    if (!(distress_rate > 0 && distress_rate < 1)) throw Error("distress_rate must lie in (0, 1)");
    if (!(ai_ceiling > 0 && ai_ceiling <= 1)) throw Error("ai_ceiling must lie in (0, 1]");
    if (!(ai_slope > 0)) throw Error("ai_slope must be positive");
    if (!(persistence > 0 && persistence <= 1)) throw Error("persistence must lie in (0, 1]");
    if (!(risk_autocorrelation >= 0 && risk_autocorrelation < 1)) throw Error("risk_autocorrelation must lie in [0, 1)");
    if (!(missing_rate >= 0 && missing_rate < 1)) throw Error("missing_rate must lie in [0, 1)");
    if (!(signal_strength >= 0)) throw Error("signal_strength must be non-negative");
    if (!(adoption_frailty_link > -1 && adoption_frailty_link < 1)) {
        throw Error("adoption_frailty_link must lie in (-1, 1)");
    }
}

namespace {

// Population moments of the simulated ratios (X04 and X05 on the log scale).
struct RatioModel {
    double intercept, load, noise;
    bool log_scale;
};
constexpr std::array<RatioModel, panel::kNumFinancial> kRatios = {{
    {0.20, -0.08, 0.12, false},
    {0.10, -0.12, 0.15, false},
    {0.05, -0.04, 0.05, false},
    {0.80, -0.35, 0.60, true},
    {-0.40, -0.10, 0.45, true},
}};

constexpr double kFrailtyLoad = 0.8;  // z = 0.8 u + 0.6 r, unit variance
constexpr double kRiskLoad = 0.6;
constexpr int kBurnIn = 2;

double ratio_sd(const RatioModel& m) { return std::sqrt(m.load * m.load + m.noise * m.noise); }

struct YearDraw {
    std::array<double, panel::kNumFinancial> x{};     // true ratios
    std::array<bool, panel::kNumFinancial> missing{};
    double ai_term = 0;
    text::AiFeatures ai;
    double hazard_u = 0;
    int duration = 1;
};

struct FirmSim {
    std::string id;
    panel::Industry industry = panel::Industry::non_financial;
    int entry = 0;
    int sim_start = 0;
    double frailty = 0;
    std::vector<YearDraw> years;  // sim_start .. last_year
    std::vector<double> linear;   // onset log-odds without intercept, entry .. last_year

    const YearDraw& at(int year) const { return years[static_cast<std::size_t>(year - sim_start)]; }
};

std::vector<int> entry_offsets(const GeneratorConfig& c) {
    const int years = c.last_year - c.first_year + 1;
    std::vector<int> off(static_cast<std::size_t>(c.n_firms), 0);
    if (c.n_rows == 0) return off;
    const long long deficit = static_cast<long long>(years) * c.n_firms - c.n_rows;
    const int max_off = years - 3;
    std::mt19937_64 rng(derive_seed(c.seed, {0xE17}));
    const double mean_late = 0.5 * (1 + max_off);
    const double share = std::clamp(static_cast<double>(deficit) / c.n_firms / mean_late, 0.0, 1.0);
    std::bernoulli_distribution late(share);
    std::uniform_int_distribution<int> when(1, max_off);
    long long total = 0;
    for (auto& o : off) {
        const bool l = late(rng);
        const int w = when(rng);
        o = l ? w : 0;
        total += o;
    }
    std::uniform_int_distribution<std::size_t> pick(0, off.size() - 1);
    while (total != deficit) {
        auto& o = off[pick(rng)];
        if (total < deficit && o < max_off) {
            ++o;
            ++total;
        } else if (total > deficit && o > 0) {
            --o;
            --total;
        }
    }
    return off;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ramp(const GeneratorConfig& c, int year) {
    return c.ai_ceiling / (1.0 + std::exp(-c.ai_slope * (year - c.ai_midpoint)));
}

FirmSim simulate_firm(const GeneratorConfig& c, std::size_t index, int entry, panel::Industry industry) {
    std::mt19937_64 rng(derive_seed(c.seed, {1, index}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    FirmSim f;
    std::ostringstream id;
    id << (industry == panel::Industry::financial ? "B" : "F");
    id.width(5);
    id.fill('0');
    id << index;
    f.id = id.str();
    f.industry = industry;
    f.entry = entry;
    f.sim_start = entry - kBurnIn;
    f.frailty = normal(rng);
    const double intensity = normal(rng);
    const double a = c.adoption_frailty_link;
    const double threshold = normal_cdf(a * f.frailty + std::sqrt(1 - a * a) * normal(rng));
    const double rho = c.risk_autocorrelation;
    double risk = normal(rng);
    int adopt_year = -1;

    for (int t = f.sim_start; t <= c.last_year; ++t) {
        YearDraw d;
        if (t > f.sim_start) risk = rho * risk + std::sqrt(1 - rho * rho) * normal(rng);
        const double z = kFrailtyLoad * f.frailty + kRiskLoad * risk;
        for (std::size_t k = 0; k < panel::kNumFinancial; ++k) {
            const auto& m = kRatios[k];
            const double v = m.intercept + m.load * z + m.noise * normal(rng);
            d.x[k] = m.log_scale ? std::exp(v) : v;
            d.missing[k] = unif(rng) < c.missing_rate;
        }
        d.hazard_u = unif(rng);
        const double stay = unif(rng);
        d.duration = c.persistence >= 1.0
                         ? 1
                         : 1 + static_cast<int>(std::floor(std::log1p(-stay) / std::log1p(-c.persistence)));

        const double noise_level = normal(rng), noise_len = normal(rng), u_mdna = unif(rng), u_narr = unif(rng),
                     u_pat = unif(rng);
        const bool adopted = threshold < ramp(c, t);
        if (adopted && adopt_year < 0) adopt_year = t;
        if (adopted) {
            const double age = t - adopt_year;
            d.ai_term = 1.0 + 0.25 * intensity;
            const double count = std::max(1.0, std::round(std::exp(1.6 + 0.8 * intensity + 0.12 * age + 0.35 * noise_level)));
            const double length = std::round(std::exp(11.0 + 0.25 * noise_len));
            // Deterministic binomial-style splits from single uniforms keep the draw count fixed.
            const double mdna = std::floor(count * 0.4 + u_mdna * 0.999);
            const double narrative = std::floor((count - mdna) * 0.6 + u_narr * 0.999);
            std::mt19937_64 prng(derive_seed(c.seed, {2, index, static_cast<std::uint64_t>(t)}));
            std::poisson_distribution<int> pat(std::exp(-1.2 + 0.9 * intensity + 0.15 * age) * (0.5 + u_pat));
            const int total = pat(prng);
            std::binomial_distribution<int> inv_split(total, 0.55);
            const int inv = inv_split(prng);
            std::binomial_distribution<int> util_split(total - inv, 0.85);
            const int util = util_split(prng);
            const int des = total - inv - util;
            d.ai.ai_patents_total = std::log1p(total);
            d.ai.ai_invention = std::log1p(inv);
            d.ai.ai_utility = std::log1p(util);
            d.ai.ai_design = std::log1p(des);
            d.ai.ai_level = std::log1p(count);
            d.ai.ai_level_mdna = std::log1p(mdna);
            d.ai.ai_density_full = count / length;
            d.ai.ai_density_chen = narrative / std::round(0.4 * length);
        }
        f.years.push_back(d);
    }

    for (int t = entry; t <= c.last_year; ++t) {
        const auto& base = f.at(t - kBurnIn);
        // Centered on the year's expected adoption so the ramp alone does not
        // move the base rate.
        double lin = c.frailty_effect * f.frailty - c.signal_strength * (base.ai_term - ramp(c, t - kBurnIn));
        for (std::size_t k = 0; k < panel::kNumFinancial; ++k) {
            const auto& m = kRatios[k];
            const double v = m.log_scale ? std::log(base.x[k]) : base.x[k];
            lin += c.financial_effects[k] * (v - m.intercept) / ratio_sd(m);
        }
        f.linear.push_back(lin);
    }
    return f;
}

// Flags per emitted year for a given intercept.
std::vector<bool> st_path(const FirmSim& f, double intercept, int last_year) {
    std::vector<bool> st(static_cast<std::size_t>(last_year - f.entry + 1), false);
    int until = f.entry - 1;
    for (int t = f.entry; t <= last_year; ++t) {
        const auto i = static_cast<std::size_t>(t - f.entry);
        if (t <= until) {
            st[i] = true;
            continue;
        }
        const auto& d = f.at(t);
        if (d.hazard_u < sigmoid(intercept + f.linear[i])) {
            until = t + d.duration - 1;
            st[i] = true;
        }
    }
    return st;
}

std::size_t count_flagged(const std::vector<FirmSim>& firms, double intercept, int last_year) {
    std::size_t n = 0;
    for (const auto& f : firms) {
        if (f.industry != panel::Industry::non_financial) continue;
        for (bool b : st_path(f, intercept, last_year)) n += b;
    }
    return n;
}

}  // namespace

SynthData generate(const GeneratorConfig& c) {
    c.validate();
    const auto offsets = entry_offsets(c);
    std::vector<FirmSim> firms;
    firms.reserve(static_cast<std::size_t>(c.n_firms + c.n_financial_firms));
    std::size_t rows = 0;
    for (int i = 0; i < c.n_firms; ++i) {
        const int entry = c.first_year + offsets[static_cast<std::size_t>(i)];
        firms.push_back(simulate_firm(c, static_cast<std::size_t>(i + 1), entry, panel::Industry::non_financial));
        rows += static_cast<std::size_t>(c.last_year - entry + 1);
    }
    for (int i = 0; i < c.n_financial_firms; ++i) {
        firms.push_back(simulate_firm(c, static_cast<std::size_t>(c.n_firms + i + 1), c.first_year,
                                      panel::Industry::financial));
    }

    const auto target = static_cast<std::size_t>(std::llround(c.distress_rate * static_cast<double>(rows)));
    if (target == 0) throw Error("distress target rounds to zero flagged rows");
    double lo = -30.0, hi = 15.0;
    if (count_flagged(firms, hi, c.last_year) < target) throw Error("distress target is not attainable");
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_flagged(firms, mid, c.last_year) < target ? lo : hi) = mid;
    }
    const double alpha = std::abs(static_cast<double>(count_flagged(firms, lo, c.last_year)) - double(target)) <
                                 std::abs(static_cast<double>(count_flagged(firms, hi, c.last_year)) - double(target))
                             ? lo
                             : hi;

    SynthData out;
    auto& truth = out.truth;
    truth.intercept = alpha;
    truth.financial_effects = c.financial_effects;
    truth.frailty_effect = c.frailty_effect;
    truth.signal_strength = c.signal_strength;
    for (const auto& f : firms) {
        const auto st = st_path(f, alpha, c.last_year);
        for (int t = f.entry; t <= c.last_year; ++t) {
            const auto i = static_cast<std::size_t>(t - f.entry);
            const auto& d = f.at(t);
            panel::FinancialRow fr;
            fr.firm_id = f.id;
            fr.year = t;
            for (std::size_t k = 0; k < panel::kNumFinancial; ++k) {
                fr.x[k] = d.missing[k] ? std::nan("") : d.x[k];
            }
            fr.st_flag = st[i];
            fr.industry = f.industry;
            out.financial.push_back(fr);
            out.ai.push_back({f.id, t, d.ai});
            if (f.industry == panel::Industry::non_financial) {
                truth.onset_log_odds.push_back(alpha + f.linear[i]);
                truth.onset.push_back(st[i] && (i == 0 || !st[i - 1]));
                ++truth.n_rows;
                truth.n_distressed_rows += st[i];
            } else {
                truth.onset_log_odds.push_back(std::nan(""));
                truth.onset.push_back(false);
            }
        }
    }
    return out;
}

panel::Panel to_panel(const SynthData& data) { return panel::build_panel(data.financial, data.ai).panel; }

void write_outputs(const SynthData& data, const GeneratorConfig& config, const std::filesystem::path& dir) {
    write_file(dir / "financial.csv", panel::format_financial_rows(data.financial));
    write_file(dir / "ai_features.csv", panel::format_ai_feature_rows(data.ai));
    std::ostringstream gt;
    CsvWriter w(gt);
    w.meta("schema", "ews.ground_truth/1");
    w.meta("intercept", format_double(data.truth.intercept));
    w.meta("signal_strength", format_double(data.truth.signal_strength));
    w.meta("frailty_effect", format_double(data.truth.frailty_effect));
    for (std::size_t k = 0; k < panel::kNumFinancial; ++k) {
        w.meta("effect_" + std::string(panel::financial_column_names()[k]),
               format_double(data.truth.financial_effects[k]));
    }
    w.row({"firm_id", "year", "onset_log_odds", "onset"});
    for (std::size_t i = 0; i < data.financial.size(); ++i) {
        const auto& f = data.financial[i];
        w.row({f.firm_id, std::to_string(f.year), format_double(data.truth.onset_log_odds[i]),
               data.truth.onset[i] ? "1" : "0"});
    }
    write_file(dir / "ground_truth.csv", gt.str());
    write_file(dir / "generator.json", config_to_json(config) + "\n");
}

void write_text_corpus(const SynthData& data, const std::filesystem::path& dir, std::size_t limit) {
    static constexpr std::string_view kTerm = "artificial intelligence";
    static constexpr std::string_view kPatentTerm = "machine learning";
    std::filesystem::create_directories(dir / "corpus");
    std::ostringstream patents;
    CsvWriter pw(patents);
    pw.row({"firm_id", "year", "kind", "title", "abstract"});
    std::size_t written = 0;
    auto repeat = [](std::ostringstream& s, std::string_view w, long n) {
        for (long i = 0; i < n; ++i) s << "We expanded " << w << " capacity. ";
    };
    for (const auto& row : data.ai) {
        if (written >= limit) break;
        if (!row.ai.any_nonzero()) continue;
        const long total = std::lround(std::expm1(row.ai.ai_level));
        const long mdna = std::lround(std::expm1(row.ai.ai_level_mdna));
        const long narrative = row.ai.ai_density_chen > 0 ? std::max(1L, (total - mdna) / 2) : 0;
        std::ostringstream doc;
        doc << "Annual report of " << row.firm_id << " for " << row.year << ".\n";
        repeat(doc, kTerm, total - mdna - narrative);
        doc << "\n===MDNA===\n";
        repeat(doc, kTerm, mdna);
        doc << "Revenue was stable.\n===NARRATIVE===\n";
        repeat(doc, kTerm, narrative);
        doc << "Outlook remains cautious.\n===END===\nFinancial statements follow.\n";
        write_file(dir / "corpus" / (row.firm_id + "_" + std::to_string(row.year) + ".txt"), doc.str());
        const std::array<std::pair<double, std::string_view>, 3> kinds = {
            {{row.ai.ai_invention, "invention"}, {row.ai.ai_utility, "utility"}, {row.ai.ai_design, "design"}}};
        for (const auto& [value, kind] : kinds) {
            const long n = std::lround(std::expm1(value));
            for (long i = 0; i < n; ++i) {
                pw.row({row.firm_id, std::to_string(row.year), std::string(kind),
                        "System using " + std::string(kPatentTerm), "A method for data processing."});
            }
        }
        ++written;
    }
    write_file(dir / "patents.csv", patents.str());
}

std::string config_to_json(const GeneratorConfig& c) {
    nlohmann::ordered_json j;
    j["n_firms"] = c.n_firms;
    j["n_financial_firms"] = c.n_financial_firms;
    j["first_year"] = c.first_year;
    j["last_year"] = c.last_year;
    j["n_rows"] = c.n_rows;
    j["distress_rate"] = c.distress_rate;
    j["ai_midpoint"] = c.ai_midpoint;
    j["ai_slope"] = c.ai_slope;
    j["ai_ceiling"] = c.ai_ceiling;
    j["signal_strength"] = c.signal_strength;
    j["adoption_frailty_link"] = c.adoption_frailty_link;
    j["financial_effects"] = c.financial_effects;
    j["frailty_effect"] = c.frailty_effect;
    j["persistence"] = c.persistence;
    j["risk_autocorrelation"] = c.risk_autocorrelation;
    j["missing_rate"] = c.missing_rate;
    j["seed"] = c.seed;
    return j.dump(2);
}

GeneratorConfig config_from_json(const std::string& text) {
    GeneratorConfig c;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        c.n_firms = j.value("n_firms", c.n_firms);
        c.n_financial_firms = j.value("n_financial_firms", c.n_financial_firms);
        c.first_year = j.value("first_year", c.first_year);
        c.last_year = j.value("last_year", c.last_year);
        c.n_rows = j.value("n_rows", c.n_rows);
        c.distress_rate = j.value("distress_rate", c.distress_rate);
        c.ai_midpoint = j.value("ai_midpoint", c.ai_midpoint);
        c.ai_slope = j.value("ai_slope", c.ai_slope);
        c.ai_ceiling = j.value("ai_ceiling", c.ai_ceiling);
        c.signal_strength = j.value("signal_strength", c.signal_strength);
        c.adoption_frailty_link = j.value("adoption_frailty_link", c.adoption_frailty_link);
        c.financial_effects = j.value("financial_effects", c.financial_effects);
        c.frailty_effect = j.value("frailty_effect", c.frailty_effect);
        c.persistence = j.value("persistence", c.persistence);
        c.risk_autocorrelation = j.value("risk_autocorrelation", c.risk_autocorrelation);
        c.missing_rate = j.value("missing_rate", c.missing_rate);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("generator config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace ews::synth
