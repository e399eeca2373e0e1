#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ews/lexicon.hpp"

namespace ews::text {

// Lexical units: CJK codepoints plus contiguous Latin letter/digit tokens.
std::size_t text_length(std::string_view utf8);

struct DocumentRecord {
    std::string firm_id;
    int year = 0;
    std::string full_text;
    std::optional<std::string> mdna_text;
    std::optional<std::string> narrative_text;
};

enum class PatentKind { invention, utility, design };

std::string_view to_string(PatentKind kind);
PatentKind parse_patent_kind(std::string_view s);

struct PatentRecord {
    std::string firm_id;
    int year = 0;
    PatentKind kind = PatentKind::invention;
    std::string title;
    std::string abstract;
};

inline constexpr std::size_t kNumAiFeatures = 8;

// Column order follows the variable table: patents first, then text measures.
struct AiFeatures {
    double ai_patents_total = 0;
    double ai_invention = 0;
    double ai_utility = 0;
    double ai_design = 0;
    double ai_level = 0;
    double ai_level_mdna = 0;
    double ai_density_full = 0;
    double ai_density_chen = 0;

    std::array<double, kNumAiFeatures> to_array() const;
    static AiFeatures from_array(const std::array<double, kNumAiFeatures>& v);
    bool any_nonzero() const;
    bool operator==(const AiFeatures&) const = default;
};

// Output column names, exactly as in the variable definitions table.
const std::array<std::string_view, kNumAiFeatures>& ai_feature_names();

struct FeatureFlags {
    bool mdna_absent = false;
    bool narrative_fallback = false;
    bool zero_length = false;
};

struct ExtractionResult {
    AiFeatures features;
    FeatureFlags flags;
    std::size_t count_full = 0;
    std::size_t count_mdna = 0;
    std::size_t count_narrative = 0;
    std::size_t length_full = 0;
    std::size_t length_narrative = 0;
    std::array<std::size_t, 3> ai_patents{};  // invention, utility, design
};

// Patents of other firm-years are ignored.
ExtractionResult extract_ai_features(const DocumentRecord& doc, std::span<const PatentRecord> patents,
                                     const Lexicon& lex);

// Splits a corpus file into full text and the optional ===MDNA=== and
// ===NARRATIVE=== sections. A section runs until the next ===...=== marker
// line or end of file; marker lines are not part of any text.
DocumentRecord parse_document(std::string firm_id, int year, std::string_view content);

}  // namespace ews::text
