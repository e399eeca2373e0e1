#include "ews/text_features.hpp"

#include <cmath>

#include "ews/common.hpp"

namespace ews::text {

std::size_t text_length(std::string_view utf8) {
    const std::u32string cps = decode_utf8(utf8);
    std::size_t length = 0;
    bool in_token = false;
    for (char32_t c : cps) {
        if (is_cjk(c)) {
            ++length;
            in_token = false;
        } else if (is_latin_word_char(c)) {
            if (!in_token) ++length;
            in_token = true;
        } else {
            in_token = false;
        }
    }
    return length;
}

std::string_view to_string(PatentKind kind) {
    switch (kind) {
        case PatentKind::invention: return "invention";
        case PatentKind::utility: return "utility";
        case PatentKind::design: return "design";
    }
    return "invention";
}

PatentKind parse_patent_kind(std::string_view s) {
    if (s == "invention") return PatentKind::invention;
    if (s == "utility") return PatentKind::utility;
    if (s == "design") return PatentKind::design;
    throw Error("unknown patent kind '" + std::string(s) + "'");
}

std::array<double, kNumAiFeatures> AiFeatures::to_array() const {
    return {ai_patents_total, ai_invention, ai_utility,    ai_design,
            ai_level,         ai_level_mdna, ai_density_full, ai_density_chen};
}

AiFeatures AiFeatures::from_array(const std::array<double, kNumAiFeatures>& v) {
    return AiFeatures{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

bool AiFeatures::any_nonzero() const {
    for (double v : to_array()) {
        if (v != 0.0) return true;
    }
    return false;
}

const std::array<std::string_view, kNumAiFeatures>& ai_feature_names() {
    static const std::array<std::string_view, kNumAiFeatures> names = {
        "AI patents total", "AI invention",  "AI utility",      "AI design",
        "AI level",         "AI level MD&A", "AI density full", "AI density ChEn"};
    return names;
}

ExtractionResult extract_ai_features(const DocumentRecord& doc, std::span<const PatentRecord> patents,
                                     const Lexicon& lex) {
    ExtractionResult r;
    r.count_full = lex.count_terms(doc.full_text);
    r.length_full = text_length(doc.full_text);

    r.features.ai_level = std::log1p(static_cast<double>(r.count_full));
    if (doc.mdna_text) {
        r.count_mdna = lex.count_terms(*doc.mdna_text);
        r.features.ai_level_mdna = std::log1p(static_cast<double>(r.count_mdna));
    } else {
        r.flags.mdna_absent = true;
    }

    if (r.length_full == 0) {
        r.flags.zero_length = true;
    } else {
        r.features.ai_density_full = static_cast<double>(r.count_full) / static_cast<double>(r.length_full);
    }

    if (doc.narrative_text) {
        r.count_narrative = lex.count_terms(*doc.narrative_text);
        r.length_narrative = text_length(*doc.narrative_text);
        if (r.length_narrative == 0) {
            r.flags.zero_length = true;
        } else {
            r.features.ai_density_chen =
                static_cast<double>(r.count_narrative) / static_cast<double>(r.length_narrative);
        }
    } else {
        r.flags.narrative_fallback = true;
        r.features.ai_density_chen = r.features.ai_density_full;
    }

    for (const auto& p : patents) {
        if (p.firm_id != doc.firm_id || p.year != doc.year) continue;
        std::string text = p.title;
        text.push_back('\n');
        text += p.abstract;
        if (lex.count_terms(text) >= 1) ++r.ai_patents[static_cast<std::size_t>(p.kind)];
    }
    r.features.ai_invention = std::log1p(static_cast<double>(r.ai_patents[0]));
    r.features.ai_utility = std::log1p(static_cast<double>(r.ai_patents[1]));
    r.features.ai_design = std::log1p(static_cast<double>(r.ai_patents[2]));
    r.features.ai_patents_total =
        std::log1p(static_cast<double>(r.ai_patents[0] + r.ai_patents[1] + r.ai_patents[2]));
    return r;
}

namespace {

bool is_marker_line(std::string_view line, std::string_view& name) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.size() < 7 || line.substr(0, 3) != "===" || line.substr(line.size() - 3) != "===") return false;
    name = line.substr(3, line.size() - 6);
    return !name.empty();
}

}  // namespace

DocumentRecord parse_document(std::string firm_id, int year, std::string_view content) {
    DocumentRecord doc;
    doc.firm_id = std::move(firm_id);
    doc.year = year;
    enum class Section { body, mdna, narrative, other } section = Section::body;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        const bool has_newline = end != std::string_view::npos;
        if (!has_newline) end = content.size();
        std::string_view line = content.substr(pos, end - pos);
        std::string_view marker;
        if (is_marker_line(line, marker)) {
            if (marker == "MDNA") {
                section = Section::mdna;
                if (!doc.mdna_text) doc.mdna_text.emplace();
            } else if (marker == "NARRATIVE") {
                section = Section::narrative;
                if (!doc.narrative_text) doc.narrative_text.emplace();
            } else {
                section = marker == "END" ? Section::body : Section::other;
            }
        } else {
            std::string_view with_nl = content.substr(pos, (has_newline ? end + 1 : end) - pos);
            doc.full_text.append(with_nl);
            if (section == Section::mdna) doc.mdna_text->append(with_nl);
            if (section == Section::narrative) doc.narrative_text->append(with_nl);
        }
        pos = has_newline ? end + 1 : end;
    }
    return doc;
}

}  // namespace ews::text
