#include "ews/lexicon.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ews/common.hpp"
#include "ews/csv.hpp"
#include "ews/hash.hpp"

namespace ews::text {

std::string_view to_string(Language lang) { return lang == Language::zh ? "zh" : "en"; }

Language parse_language(std::string_view s) {
    if (s == "zh") return Language::zh;
    if (s == "en") return Language::en;
    throw Error("unknown lexicon language '" + std::string(s) + "' (expected zh or en)");
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 >> 5) == 0x6) {
            len = 2;
        } else if ((b0 >> 4) == 0xE) {
            len = 3;
        } else if ((b0 >> 3) == 0x1E) {
            len = 4;
        }
        if (len > 1) {
            if (i + len > s.size()) {
                len = 1;
            } else {
                cp = b0 & (0xFF >> (len + 1));
                for (std::size_t k = 1; k < len; ++k) {
                    const auto b = static_cast<unsigned char>(s[i + k]);
                    if ((b >> 6) != 0x2) {
                        cp = 0xFFFD;
                        len = 1;
                        break;
                    }
                    cp = (cp << 6) | (b & 0x3F);
                }
            }
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

bool is_cjk(char32_t c) {
    return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) || (c >= 0xF900 && c <= 0xFAFF) ||
           (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0x2A700 && c <= 0x2EBEF) || (c >= 0x30000 && c <= 0x3134F);
}

bool is_latin_word_char(char32_t c) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
    // Latin-1 supplement and Latin Extended-A/B letters, minus the two operators.
    return c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7;
}

namespace {

bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0x3000 || c == 0xA0;
}

}  // namespace

std::u32string normalize_for_matching(std::string_view utf8) {
    std::u32string raw = decode_utf8(utf8);
    std::u32string out;
    out.reserve(raw.size());
    bool prev_space = false;
    for (char32_t c : raw) {
        if (is_space(c)) {
            if (!prev_space) out.push_back(U' ');
            prev_space = true;
            continue;
        }
        prev_space = false;
        if (c >= 'A' && c <= 'Z') c = c - 'A' + 'a';
        out.push_back(c);
    }
    return out;
}

namespace {

std::u32string trim(std::u32string s) {
    while (!s.empty() && s.back() == U' ') s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == U' ') ++b;
    return s.substr(b);
}

}  // namespace

int Lexicon::child(int node, char32_t c) const {
    const auto& next = trie_[static_cast<std::size_t>(node)].next;
    auto it = std::lower_bound(next.begin(), next.end(), c,
                               [](const std::pair<char32_t, int>& p, char32_t v) { return p.first < v; });
    if (it != next.end() && it->first == c) return it->second;
    return -1;
}

int Lexicon::add_child(int node, char32_t c) {
    if (int existing = child(node, c); existing >= 0) return existing;
    const int id = static_cast<int>(trie_.size());
    trie_.emplace_back();
    auto& next = trie_[static_cast<std::size_t>(node)].next;
    auto it = std::lower_bound(next.begin(), next.end(), c,
                               [](const std::pair<char32_t, int>& p, char32_t v) { return p.first < v; });
    next.insert(it, {c, id});
    return id;
}

Lexicon Lexicon::compile(const std::vector<LexiconEntry>& entries, std::string version,
                         std::optional<std::size_t> expected_groups) {
    if (entries.empty()) throw Error("lexicon is empty");

    std::map<std::string, std::vector<Surface>> by_group;
    for (const auto& e : entries) {
        if (e.canonical_id.empty()) throw Error("lexicon entry with empty canonical id");
        by_group[e.canonical_id].push_back(Surface{e.surface, e.language});
    }

    Lexicon lex;
    lex.version_ = std::move(version);
    lex.trie_.emplace_back();
    std::map<std::u32string, std::string> owner;  // normalized surface -> group

    for (auto& [id, surfaces] : by_group) {
        const std::size_t group_index = lex.groups_.size();
        TermGroup group{id, {}};
        for (auto& s : surfaces) {
            std::u32string norm = trim(normalize_for_matching(s.text));
            if (norm.empty()) throw Error("lexicon group '" + id + "' has an empty surface");
            const bool has_cjk = std::any_of(norm.begin(), norm.end(), is_cjk);
            if (s.language == Language::zh && !has_cjk) {
                throw Error("zh surface '" + s.text + "' in group '" + id + "' has no CJK character");
            }
            if (s.language == Language::en && has_cjk) {
                throw Error("en surface '" + s.text + "' in group '" + id + "' contains CJK characters");
            }
            auto [it, inserted] = owner.emplace(norm, id);
            if (!inserted) {
                throw Error("duplicate surface '" + s.text + "' in groups '" + it->second + "' and '" + id + "'");
            }
            int node = 0;
            for (char32_t c : norm) node = lex.add_child(node, c);
            auto& terminal = lex.trie_[static_cast<std::size_t>(node)];
            terminal.group = static_cast<int>(group_index);
            terminal.needs_boundary_before = is_latin_word_char(norm.front());
            terminal.needs_boundary_after = is_latin_word_char(norm.back());
            group.surfaces.push_back(std::move(s));
        }
        lex.groups_.push_back(std::move(group));
    }

    if (expected_groups && lex.groups_.size() != *expected_groups) {
        throw Error("lexicon has " + std::to_string(lex.groups_.size()) + " canonical groups, expected " +
                    std::to_string(*expected_groups));
    }
    return lex;
}

Lexicon Lexicon::parse(std::string_view content, std::string version_hint,
                       std::optional<std::size_t> expected_groups) {
    const Table table = parse_table(content);
    if (table.header.empty()) throw Error("lexicon is empty");
    const auto c_id = table.column("canonical_id");
    const auto c_lang = table.column("language");
    const auto c_surface = table.column("surface");
    std::vector<LexiconEntry> entries;
    entries.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        entries.push_back({row[c_id], parse_language(row[c_lang]), row[c_surface]});
    }
    std::string version = version_hint;
    if (auto it = table.meta.find("version"); it != table.meta.end()) version = it->second;
    if (version.empty()) {
        std::ostringstream ss;
        ss << "fnv1a64:" << std::hex << fnv1a64(content);
        version = ss.str();
    }
    return compile(entries, std::move(version), expected_groups);
}

Lexicon Lexicon::load(const std::filesystem::path& path, std::optional<std::size_t> expected_groups) {
    const std::string content = read_file(path);
    try {
        return parse(content, "", expected_groups);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::filesystem::path Lexicon::default_path() {
    return std::filesystem::path(EWS_DATA_DIR) / "ai_lexicon.csv";
}

std::vector<Match> Lexicon::find_matches(std::string_view utf8) const {
    std::vector<Match> matches;
    if (groups_.empty()) return matches;
    const std::u32string text = normalize_for_matching(utf8);
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const bool boundary_before = i == 0 || !is_latin_word_char(text[i - 1]);
        int node = 0;
        std::size_t best_len = 0;
        int best_group = -1;
        for (std::size_t j = i; j < n; ++j) {
            node = child(node, text[j]);
            if (node < 0) break;
            const auto& t = trie_[static_cast<std::size_t>(node)];
            if (t.group < 0) continue;
            if (t.needs_boundary_before && !boundary_before) continue;
            if (t.needs_boundary_after && j + 1 < n && is_latin_word_char(text[j + 1])) continue;
            best_len = j + 1 - i;
            best_group = t.group;
        }
        if (best_group >= 0) {
            matches.push_back({i, best_len, static_cast<std::size_t>(best_group)});
            i += best_len;
        } else {
            ++i;
        }
    }
    return matches;
}

std::size_t Lexicon::count_terms(std::string_view utf8) const { return find_matches(utf8).size(); }

}  // namespace ews::text
