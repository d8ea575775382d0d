#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stylegap::lexicon {

enum class PatternKind { Exact, Stem, Phrase };

// A dictionary pattern. `text` is lowercase. Stem text excludes the trailing
// asterisk; phrase text keeps per-token asterisks and joins 2-3 tokens with
// single spaces ("in spite* of").
struct Pattern {
    PatternKind kind = PatternKind::Exact;
    std::string text;

    bool operator==(const Pattern&) const = default;
    auto operator<=>(const Pattern&) const = default;
};

struct Category {
    int id = 0;
    std::string name;

    bool operator==(const Category&) const = default;
};

struct Entry {
    Pattern pattern;
    std::set<int> categories;

    bool operator==(const Entry&) const = default;
};

class DictionaryError : public std::runtime_error {
public:
    DictionaryError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

// Parsed dictionary: ordered category table plus entries in file order.
struct Lexicon {
    std::vector<Category> categories;
    std::vector<Entry> entries;

    bool operator==(const Lexicon&) const = default;

    const std::string* category_name(int id) const;
    std::optional<int> category_id(std::string_view name) const;
};

// Percent-delimited dictionary text -> Lexicon. Errors carry the offending
// line number. Entry and category order are preserved.
Lexicon parse_dictionary(std::string_view source);

// Inverse of parse_dictionary: parse(serialize(lex)) == lex.
std::string serialize_dictionary(const Lexicon& lex);

struct PhraseMatch {
    int length = 0;              // tokens consumed from the window
    std::set<int> categories;
};

// Compiled lookup structure. Immutable once built; safe to share across
// threads. Lookups must agree with a linear scan over the source entries.
class Matcher {
public:
    // Union of categories from the exact entry equal to `token` and every
    // stem entry whose text prefixes it. Empty set when nothing matches.
    std::set<int> match_token(std::string_view token) const;

    // All phrase entries matching a prefix of the window (at most 3 tokens),
    // longest first; ties keep entry order.
    std::vector<PhraseMatch> match_phrases(std::span<const std::string> window) const;

    int max_phrase_len() const { return max_phrase_len_; }
    const std::vector<Category>& categories() const { return categories_; }

private:
    friend Matcher compile_matcher(const Lexicon& lex);

    struct Node {
        std::map<char, int> next;
        std::set<int> exact;
        std::set<int> stem;
        bool has_exact = false;
        bool has_stem = false;
    };

    struct CompiledPhrase {
        struct Token {
            std::string text;
            bool is_stem = false;
        };
        std::vector<Token> tokens;
        std::set<int> categories;
    };

    std::vector<Node> nodes_{Node{}};
    std::vector<CompiledPhrase> phrases_;  // sorted longest first, then entry order
    std::vector<Category> categories_;
    int max_phrase_len_ = 1;
};

Matcher compile_matcher(const Lexicon& lex);

}  // namespace stylegap::lexicon
