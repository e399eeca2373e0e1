#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ews::text {

enum class Language { zh, en };

std::string_view to_string(Language lang);
Language parse_language(std::string_view s);

struct Surface {
    std::string text;
    Language language;
};

struct TermGroup {
    std::string canonical_id;
    std::vector<Surface> surfaces;
};

// One row of a lexicon file.
struct LexiconEntry {
    std::string canonical_id;
    Language language;
    std::string surface;
};

struct Match {
    std::size_t begin;   // offset in normalized codepoints
    std::size_t length;  // codepoints
    std::size_t group;   // index into Lexicon::groups()
};

// Compiled bilingual term lexicon. Immutable after construction, so one
// instance can be shared by any number of concurrent scans.
class Lexicon {
public:
    // Rejects duplicate surfaces (naming both groups), empty surfaces, and
    // script mismatches. When expected_groups is set the group count must match.
    static Lexicon compile(const std::vector<LexiconEntry>& entries, std::string version,
                           std::optional<std::size_t> expected_groups = std::nullopt);
    static Lexicon load(const std::filesystem::path& path,
                        std::optional<std::size_t> expected_groups = std::nullopt);
    static Lexicon parse(std::string_view file_content, std::string version_hint,
                         std::optional<std::size_t> expected_groups = std::nullopt);

    // Shipped default lexicon (72 canonical groups).
    static std::filesystem::path default_path();
    static constexpr std::size_t kDefaultGroupCount = 72;

    const std::vector<TermGroup>& groups() const { return groups_; }
    const std::string& version() const { return version_; }

    // Non-overlapping matches, longest-match-first, scanning left to right.
    std::vector<Match> find_matches(std::string_view utf8) const;
    std::size_t count_terms(std::string_view utf8) const;

private:
    struct TrieNode {
        std::vector<std::pair<char32_t, int>> next;  // sorted by codepoint
        int group = -1;
        bool needs_boundary_before = false;
        bool needs_boundary_after = false;
    };

    int child(int node, char32_t c) const;
    int add_child(int node, char32_t c);

    std::vector<TermGroup> groups_;
    std::string version_;
    std::vector<TrieNode> trie_;
};

// Codepoint helpers shared with the text-length scanner.
std::u32string decode_utf8(std::string_view utf8);
bool is_cjk(char32_t c);
bool is_latin_word_char(char32_t c);

// Lower-cases ASCII and collapses whitespace runs to one space; the
// normalized stream is what surfaces are matched against.
std::u32string normalize_for_matching(std::string_view utf8);

}  // namespace ews::text
