#include "stylegap/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "stylegap/util.hpp"

namespace stylegap::lexicon {

namespace {

std::string line_prefix(int line) {
    return "line " + std::to_string(line) + ": ";
}

std::vector<std::string_view> split_lines(std::string_view source) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < source.size()) {
                lines.push_back(source.substr(start));
            }
            break;
        }
        lines.push_back(source.substr(start, end - start));
        start = end + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
    }
    return lines;
}

bool ignorable(std::string_view line) {
    return line.empty() || line.front() == '#';
}

int parse_category_id(std::string_view field, int line) {
    int id = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DictionaryError(line, line_prefix(line) + "malformed category id '" +
                                        std::string(field) + "'");
    }
    if (id <= 0) {
        throw DictionaryError(line, line_prefix(line) + "category id must be positive, got " +
                                        std::string(field));
    }
    return id;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

// Classifies a raw (already lowercased) pattern field. Validates the
// trailing-asterisk-only wildcard rule and the 2-3 token phrase cap.
Pattern classify_pattern(std::string_view field, int line) {
    if (field.find(' ') == std::string_view::npos) {
        std::size_t star = field.find('*');
        if (star == std::string_view::npos) {
            return {PatternKind::Exact, std::string(field)};
        }
        if (star != field.size() - 1) {
            throw DictionaryError(line, line_prefix(line) +
                                            "wildcard '*' only allowed at the end of a word in '" +
                                            std::string(field) + "'");
        }
        auto stem = field.substr(0, field.size() - 1);
        if (stem.empty()) {
            throw DictionaryError(line, line_prefix(line) + "empty stem pattern '*'");
        }
        return {PatternKind::Stem, std::string(stem)};
    }

    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (start <= field.size()) {
        std::size_t space = field.find(' ', start);
        if (space == std::string_view::npos) {
            tokens.push_back(field.substr(start));
            break;
        }
        tokens.push_back(field.substr(start, space - start));
        start = space + 1;
    }
    if (tokens.size() < 2 || tokens.size() > 3) {
        throw DictionaryError(line, line_prefix(line) + "phrase must have 2 or 3 tokens, got " +
                                        std::to_string(tokens.size()) + " in '" +
                                        std::string(field) + "'");
    }
    for (auto token : tokens) {
        if (token.empty()) {
            throw DictionaryError(line, line_prefix(line) +
                                            "phrase tokens must be separated by single spaces in '" +
                                            std::string(field) + "'");
        }
        std::size_t star = token.find('*');
        if (star != std::string_view::npos && star != token.size() - 1) {
            throw DictionaryError(line, line_prefix(line) +
                                            "wildcard '*' only allowed at the end of a word in '" +
                                            std::string(field) + "'");
        }
        if (token == "*") {
            throw DictionaryError(line, line_prefix(line) + "empty stem token in phrase '" +
                                            std::string(field) + "'");
        }
    }
    return {PatternKind::Phrase, std::string(field)};
}

}  // namespace

DictionaryError::DictionaryError(int line, const std::string& message)
    : std::runtime_error(message), line_(line) {}

const std::string* Lexicon::category_name(int id) const {
    for (const auto& cat : categories) {
        if (cat.id == id) {
            return &cat.name;
        }
    }
    return nullptr;
}

std::optional<int> Lexicon::category_id(std::string_view name) const {
    for (const auto& cat : categories) {
        if (cat.name == name) {
            return cat.id;
        }
    }
    return std::nullopt;
}

Lexicon parse_dictionary(std::string_view source) {
    Lexicon lex;
    const auto lines = split_lines(source);

    enum class Section { Preamble, Categories, Entries };
    Section section = Section::Preamble;

    std::unordered_set<int> seen_ids;
    std::unordered_set<std::string> seen_names;
    std::unordered_set<std::string> seen_patterns;

    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const int line_no = static_cast<int>(idx) + 1;
        std::string_view line = lines[idx];
        if (ignorable(line)) {
            continue;
        }
        if (section == Section::Preamble) {
            if (line != "%") {
                throw DictionaryError(line_no, line_prefix(line_no) +
                                                   "malformed header: expected '%' before the "
                                                   "category table");
            }
            section = Section::Categories;
            continue;
        }
        if (section == Section::Categories) {
            if (line == "%") {
                section = Section::Entries;
                continue;
            }
            const auto fields = split_tabs(line);
            if (fields.size() != 2 || fields[1].empty()) {
                throw DictionaryError(line_no, line_prefix(line_no) +
                                                   "malformed category line, expected "
                                                   "<id><TAB><name>");
            }
            const int id = parse_category_id(fields[0], line_no);
            if (!seen_ids.insert(id).second) {
                throw DictionaryError(line_no, line_prefix(line_no) + "duplicate category id " +
                                                   std::to_string(id));
            }
            std::string name(fields[1]);
            if (!seen_names.insert(name).second) {
                throw DictionaryError(line_no,
                                      line_prefix(line_no) + "duplicate category name '" + name + "'");
            }
            lex.categories.push_back({id, std::move(name)});
            continue;
        }

        // entries
        const auto fields = split_tabs(line);
        if (fields.size() < 2 || fields[0].empty()) {
            throw DictionaryError(line_no, line_prefix(line_no) +
                                               "malformed entry line, expected "
                                               "<pattern><TAB><id>[<TAB><id>...]");
        }
        const std::string raw_pattern = to_lower_ascii(fields[0]);
        if (!seen_patterns.insert(raw_pattern).second) {
            throw DictionaryError(line_no, line_prefix(line_no) + "duplicate pattern '" +
                                               raw_pattern + "'");
        }
        Entry entry;
        entry.pattern = classify_pattern(raw_pattern, line_no);
        for (std::size_t f = 1; f < fields.size(); ++f) {
            const int id = parse_category_id(fields[f], line_no);
            if (!seen_ids.contains(id)) {
                throw DictionaryError(line_no, line_prefix(line_no) + "unknown category id " +
                                                   std::to_string(id) + " in entry '" +
                                                   raw_pattern + "'");
            }
            entry.categories.insert(id);
        }
        lex.entries.push_back(std::move(entry));
    }

    if (section == Section::Preamble) {
        throw DictionaryError(0, "malformed header: missing '%' delimiters");
    }
    if (section == Section::Categories) {
        const int line_no = static_cast<int>(lines.size());
        throw DictionaryError(line_no,
                              line_prefix(line_no) +
                                  "malformed header: missing closing '%' after the category table");
    }
    return lex;
}

namespace {

std::string pattern_field(const Pattern& pattern) {
    switch (pattern.kind) {
        case PatternKind::Stem:
            return pattern.text + "*";
        case PatternKind::Exact:
        case PatternKind::Phrase:
            return pattern.text;
    }
    return pattern.text;
}

}  // namespace

std::string serialize_dictionary(const Lexicon& lex) {
    std::string out = "%\n";
    for (const auto& cat : lex.categories) {
        out += std::to_string(cat.id);
        out.push_back('\t');
        out += cat.name;
        out.push_back('\n');
    }
    out += "%\n";
    for (const auto& entry : lex.entries) {
        out += pattern_field(entry.pattern);
        for (int id : entry.categories) {
            out.push_back('\t');
            out += std::to_string(id);
        }
        out.push_back('\n');
    }
    return out;
}

Matcher compile_matcher(const Lexicon& lex) {
    Matcher m;
    m.categories_ = lex.categories;

    auto insert_word = [&m](std::string_view word) -> Matcher::Node& {
        int node = 0;
        for (char c : word) {
            auto it = m.nodes_[static_cast<std::size_t>(node)].next.find(c);
            if (it == m.nodes_[static_cast<std::size_t>(node)].next.end()) {
                m.nodes_.push_back({});
                const int fresh = static_cast<int>(m.nodes_.size()) - 1;
                m.nodes_[static_cast<std::size_t>(node)].next.emplace(c, fresh);
                node = fresh;
            } else {
                node = it->second;
            }
        }
        return m.nodes_[static_cast<std::size_t>(node)];
    };

    for (const auto& entry : lex.entries) {
        switch (entry.pattern.kind) {
            case PatternKind::Exact: {
                auto& node = insert_word(entry.pattern.text);
                node.has_exact = true;
                node.exact.insert(entry.categories.begin(), entry.categories.end());
                break;
            }
            case PatternKind::Stem: {
                auto& node = insert_word(entry.pattern.text);
                node.has_stem = true;
                node.stem.insert(entry.categories.begin(), entry.categories.end());
                break;
            }
            case PatternKind::Phrase: {
                Matcher::CompiledPhrase phrase;
                std::size_t start = 0;
                const std::string& text = entry.pattern.text;
                while (start <= text.size()) {
                    std::size_t space = text.find(' ', start);
                    std::string token = space == std::string::npos
                                            ? text.substr(start)
                                            : text.substr(start, space - start);
                    Matcher::CompiledPhrase::Token compiled;
                    if (!token.empty() && token.back() == '*') {
                        compiled.is_stem = true;
                        token.pop_back();
                    }
                    compiled.text = std::move(token);
                    phrase.tokens.push_back(std::move(compiled));
                    if (space == std::string::npos) {
                        break;
                    }
                    start = space + 1;
                }
                phrase.categories = entry.categories;
                m.max_phrase_len_ = std::max(m.max_phrase_len_,
                                             static_cast<int>(phrase.tokens.size()));
                m.phrases_.push_back(std::move(phrase));
                break;
            }
        }
    }

    std::stable_sort(m.phrases_.begin(), m.phrases_.end(),
                     [](const auto& a, const auto& b) { return a.tokens.size() > b.tokens.size(); });
    return m;
}

std::set<int> Matcher::match_token(std::string_view token) const {
    std::set<int> result;
    int node = 0;
    for (std::size_t i = 0; i < token.size(); ++i) {
        const auto& current = nodes_[static_cast<std::size_t>(node)];
        auto it = current.next.find(token[i]);
        if (it == current.next.end()) {
            return result;
        }
        node = it->second;
        const auto& reached = nodes_[static_cast<std::size_t>(node)];
        if (reached.has_stem) {
            result.insert(reached.stem.begin(), reached.stem.end());
        }
        if (i == token.size() - 1 && reached.has_exact) {
            result.insert(reached.exact.begin(), reached.exact.end());
        }
    }
    return result;
}

std::vector<PhraseMatch> Matcher::match_phrases(std::span<const std::string> window) const {
    std::vector<PhraseMatch> matches;
    for (const auto& phrase : phrases_) {
        if (phrase.tokens.size() > window.size()) {
            continue;
        }
        bool ok = true;
        for (std::size_t i = 0; i < phrase.tokens.size(); ++i) {
            const auto& pt = phrase.tokens[i];
            if (pt.is_stem ? !window[i].starts_with(pt.text) : window[i] != pt.text) {
                ok = false;
                break;
            }
        }
        if (ok) {
            matches.push_back({static_cast<int>(phrase.tokens.size()), phrase.categories});
        }
    }
    return matches;
}

}  // namespace stylegap::lexicon
