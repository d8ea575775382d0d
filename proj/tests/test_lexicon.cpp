#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stylegap/lexicon.hpp"

using namespace stylegap;
using lexicon::DictionaryError;
using lexicon::Lexicon;
using lexicon::Pattern;
using lexicon::PatternKind;

namespace {

using Rng = std::mt19937_64;

std::string random_word(Rng& rng, int min_len = 2, int max_len = 8) {
    std::uniform_int_distribution<int> len_dist(min_len, max_len);
    std::uniform_int_distribution<int> ch_dist(0, 25);
    std::string word;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) {
        word.push_back(static_cast<char>('a' + ch_dist(rng)));
    }
    return word;
}

struct GeneratedDictionary {
    std::string text;
    Lexicon expected;
};

// Builds a random valid dictionary file, sprinkling comments, blank lines,
// and multi-id entries so the parser sees realistic variety.
GeneratedDictionary generate_dictionary(Rng& rng) {
    GeneratedDictionary gen;
    std::uniform_int_distribution<int> cat_count_dist(1, 10);
    std::uniform_int_distribution<int> entry_count_dist(1, 40);
    std::uniform_int_distribution<int> coin(0, 99);

    const int n_cats = cat_count_dist(rng);
    std::vector<int> ids;
    std::set<int> used_ids;
    std::set<std::string> used_names;
    std::uniform_int_distribution<int> id_dist(1, 500);
    while (static_cast<int>(ids.size()) < n_cats) {
        const int id = id_dist(rng);
        if (used_ids.insert(id).second) {
            ids.push_back(id);
        }
    }
    gen.text = "# generated fixture\n%\n";
    for (int id : ids) {
        std::string name;
        do {
            name = random_word(rng, 3, 9);
        } while (!used_names.insert(name).second);
        gen.expected.categories.push_back({id, name});
        gen.text += std::to_string(id) + "\t" + name + "\n";
        if (coin(rng) < 10) {
            gen.text += "# comment between categories\n";
        }
    }
    gen.text += "%\n";

    const int n_entries = entry_count_dist(rng);
    std::set<std::string> used_patterns;
    std::uniform_int_distribution<std::size_t> pick_cat(0, ids.size() - 1);
    for (int e = 0; e < n_entries; ++e) {
        std::string field;
        if (coin(rng) < 60) {
            field = random_word(rng);
            if (coin(rng) < 35) {
                field.push_back('*');
            }
        } else {
            const int tokens = coin(rng) < 50 ? 2 : 3;
            for (int t = 0; t < tokens; ++t) {
                if (t > 0) {
                    field.push_back(' ');
                }
                field += random_word(rng);
            }
            if (coin(rng) < 30) {
                field.push_back('*');
            }
        }
        if (!used_patterns.insert(field).second) {
            continue;
        }

        lexicon::Entry entry;
        entry.pattern = [&]() -> Pattern {
            if (field.find(' ') != std::string::npos) {
                return {PatternKind::Phrase, field};
            }
            if (field.back() == '*') {
                return {PatternKind::Stem, field.substr(0, field.size() - 1)};
            }
            return {PatternKind::Exact, field};
        }();
        const int n_ids = 1 + coin(rng) % 3;
        for (int k = 0; k < n_ids; ++k) {
            entry.categories.insert(ids[pick_cat(rng)]);
        }
        gen.expected.entries.push_back(entry);

        gen.text += field;
        for (int id : entry.categories) {
            gen.text += "\t" + std::to_string(id);
        }
        gen.text += "\n";
        if (coin(rng) < 8) {
            gen.text += "\n";
        }
    }
    return gen;
}

bool lexicons_equal(const Lexicon& a, const Lexicon& b) {
    if (a.categories.size() != b.categories.size() || a.entries.size() != b.entries.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.categories.size(); ++i) {
        if (a.categories[i].id != b.categories[i].id ||
            a.categories[i].name != b.categories[i].name) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        const auto& ea = a.entries[i];
        const auto& eb = b.entries[i];
        if (ea.pattern.kind != eb.pattern.kind || ea.pattern.text != eb.pattern.text ||
            ea.categories != eb.categories) {
            return false;
        }
    }
    return true;
}

// Trie-free reference used to cross-check the compiled matcher.
std::set<int> linear_match_token(const Lexicon& lex, const std::string& token) {
    std::set<int> out;
    for (const auto& entry : lex.entries) {
        const bool hit = (entry.pattern.kind == PatternKind::Exact &&
                          token == entry.pattern.text) ||
                         (entry.pattern.kind == PatternKind::Stem &&
                          token.starts_with(entry.pattern.text));
        if (hit) {
            out.insert(entry.categories.begin(), entry.categories.end());
        }
    }
    return out;
}

std::vector<std::string> split_spaces(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t space = s.find(' ', start);
        if (space == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, space - start));
        start = space + 1;
    }
    return parts;
}

std::multiset<std::pair<int, std::set<int>>> linear_match_phrases(
    const Lexicon& lex, const std::vector<std::string>& window) {
    std::multiset<std::pair<int, std::set<int>>> out;
    for (const auto& entry : lex.entries) {
        if (entry.pattern.kind != PatternKind::Phrase) {
            continue;
        }
        const auto parts = split_spaces(entry.pattern.text);
        if (parts.size() > window.size()) {
            continue;
        }
        bool ok = true;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const std::string& p = parts[i];
            if (!p.empty() && p.back() == '*') {
                if (!window[i].starts_with(p.substr(0, p.size() - 1))) {
                    ok = false;
                    break;
                }
            } else if (window[i] != p) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.insert({static_cast<int>(parts.size()), entry.categories});
        }
    }
    return out;
}

// Draws a query token related to the dictionary vocabulary often enough to
// exercise hits, misses, prefixes, and extensions.
std::string query_token(Rng& rng, const Lexicon& lex) {
    std::uniform_int_distribution<int> coin(0, 99);
    if (!lex.entries.empty() && coin(rng) < 70) {
        std::uniform_int_distribution<std::size_t> pick(0, lex.entries.size() - 1);
        const auto& entry = lex.entries[pick(rng)];
        std::string base = entry.pattern.kind == PatternKind::Phrase
                               ? split_spaces(entry.pattern.text).front()
                               : entry.pattern.text;
        if (!base.empty() && base.back() == '*') {
            base.pop_back();
        }
        const int mode = coin(rng) % 4;
        if (mode == 1 && !base.empty()) {
            base.pop_back();  // strict prefix of the pattern
        } else if (mode == 2) {
            base += random_word(rng, 1, 3);  // extension past the pattern
        } else if (mode == 3 && !base.empty()) {
            base[base.size() / 2] = 'z';  // near miss
        }
        if (base.empty()) {
            base = random_word(rng);
        }
        return base;
    }
    return random_word(rng);
}

}  // namespace

TEST_CASE("random dictionaries survive parse/serialize/parse round trips") {
    Rng rng(0x5eed0001);
    for (int iter = 0; iter < 100; ++iter) {
        const auto gen = generate_dictionary(rng);
        Lexicon first = lexicon::parse_dictionary(gen.text);
        REQUIRE(lexicons_equal(first, gen.expected));
        const std::string serialized = lexicon::serialize_dictionary(first);
        Lexicon second = lexicon::parse_dictionary(serialized);
        REQUIRE(lexicons_equal(first, second));
        REQUIRE(serialized == lexicon::serialize_dictionary(second));
    }
}

TEST_CASE("malformed dictionaries raise line-numbered errors") {
    struct Case {
        const char* text;
        int line;
        const char* message_part;
    };
    const Case cases[] = {
        {"", 0, "missing '%'"},
        {"# a comment only\n", 0, "missing '%'"},
        {"%\n1\tone\n", 2, "missing closing '%'"},
        {"junk before header\n%\n%\n", 1, "expected '%'"},
        {"%\n1 one\n%\n", 2, "malformed category line"},
        {"%\nx\tone\n%\n", 2, "malformed category id 'x'"},
        {"%\n0\tone\n%\n", 2, "must be positive"},
        {"%\n-3\tone\n%\n", 2, "must be positive"},
        {"%\n7\t\n%\n", 2, "malformed category line"},
        {"%\n1\tone\n1\ttwo\n%\n", 3, "duplicate category id 1"},
        {"%\n1\tone\n2\tone\n%\n", 3, "duplicate category name 'one'"},
        {"%\n1\tone\n%\nword\n", 4, "malformed entry line"},
        {"%\n1\tone\n%\n\t1\n", 4, "malformed entry line"},
        {"%\n1\tone\n%\nword\t2\n", 4, "unknown category id 2"},
        {"%\n1\tone\n%\nword\tx\n", 4, "malformed category id 'x'"},
        {"%\n1\tone\n%\nword\t1\nword\t1\n", 5, "duplicate pattern 'word'"},
        {"%\n1\tone\n%\nWORD\t1\nword\t1\n", 5, "duplicate pattern 'word'"},
        {"%\n1\tone\n%\nfo*o\t1\n", 4, "wildcard '*' only allowed at the end"},
        {"%\n1\tone\n%\n*\t1\n", 4, "empty stem pattern"},
        {"%\n1\tone\n%\naa bb cc dd\t1\n", 4, "2 or 3 tokens"},
        {"%\n1\tone\n%\naa  bb\t1\n", 4, "single spaces"},
        {"%\n1\tone\n%\nin sp*ite of\t1\n", 4, "wildcard '*' only allowed at the end"},
        {"%\n1\tone\n%\naa * bb\t1\n", 4, "empty stem token"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.text);
        bool threw = false;
        try {
            lexicon::parse_dictionary(c.text);
        } catch (const DictionaryError& e) {
            threw = true;
            CHECK(e.line() == c.line);
            CHECK(std::string(e.what()).find(c.message_part) != std::string::npos);
            if (c.line > 0) {
                const std::string prefix = "line " + std::to_string(c.line) + ":";
                CHECK(std::string(e.what()).rfind(prefix, 0) == 0);
            }
        }
        CHECK(threw);
    }
}

TEST_CASE("patterns are lowercased and comments ignored") {
    const Lexicon lex = lexicon::parse_dictionary(
        "# preamble chatter\n"
        "%\n"
        "1\talpha\n"
        "# mid-table comment\n"
        "2\tbeta\n"
        "%\n"
        "\n"
        "THE\t1\n"
        "Run*\t2\n"
        "Kind OF\t1\t2\n");
    REQUIRE(lex.entries.size() == 3);
    CHECK(lex.entries[0].pattern.kind == PatternKind::Exact);
    CHECK(lex.entries[0].pattern.text == "the");
    CHECK(lex.entries[1].pattern.kind == PatternKind::Stem);
    CHECK(lex.entries[1].pattern.text == "run");
    CHECK(lex.entries[2].pattern.kind == PatternKind::Phrase);
    CHECK(lex.entries[2].pattern.text == "kind of");
    CHECK(lex.entries[2].categories == std::set<int>{1, 2});
}

TEST_CASE("compiled matcher equals a linear scan on randomized queries") {
    Rng rng(0x5eed0002);
    int token_queries = 0;
    int phrase_queries = 0;
    for (int iter = 0; iter < 25; ++iter) {
        const auto gen = generate_dictionary(rng);
        const Lexicon lex = lexicon::parse_dictionary(gen.text);
        const lexicon::Matcher matcher = lexicon::compile_matcher(lex);

        for (int q = 0; q < 120; ++q) {
            const std::string token = query_token(rng, lex);
            CAPTURE(token);
            REQUIRE(matcher.match_token(token) == linear_match_token(lex, token));
            ++token_queries;
        }
        std::uniform_int_distribution<int> window_dist(1, 4);
        for (int q = 0; q < 60; ++q) {
            std::vector<std::string> window;
            const int len = window_dist(rng);
            for (int i = 0; i < len; ++i) {
                window.push_back(query_token(rng, lex));
            }
            std::multiset<std::pair<int, std::set<int>>> got;
            for (const auto& match : matcher.match_phrases(window)) {
                got.insert({match.length, match.categories});
            }
            REQUIRE(got == linear_match_phrases(lex, window));
            ++phrase_queries;
        }
    }
    CHECK(token_queries == 25 * 120);
    CHECK(phrase_queries == 25 * 60);
}

TEST_CASE("stem and exact entries sharing a prefix both contribute") {
    const Lexicon lex = lexicon::parse_dictionary(
        "%\n"
        "1\tshort\n"
        "2\tlong\n"
        "3\texactly\n"
        "%\n"
        "influen*\t1\n"
        "influence*\t2\n"
        "influence\t3\n");
    const auto matcher = lexicon::compile_matcher(lex);
    CHECK(matcher.match_token("influential") == std::set<int>{1});
    CHECK(matcher.match_token("influences") == std::set<int>{1, 2});
    CHECK(matcher.match_token("influence") == std::set<int>{1, 2, 3});
    CHECK(matcher.match_token("influe") == std::set<int>{});
    CHECK(matcher.match_token("unrelated") == std::set<int>{});
}

TEST_CASE("phrase matching anchors at the window start and unions lengths") {
    const Lexicon lex = lexicon::parse_dictionary(
        "%\n"
        "1\ttwo\n"
        "2\tthree\n"
        "%\n"
        "as a\t1\n"
        "as a result\t2\n"
        "lead* to\t1\n");
    const auto matcher = lexicon::compile_matcher(lex);

    const std::vector<std::string> window = {"as", "a", "result"};
    const auto matches = matcher.match_phrases(window);
    REQUIRE(matches.size() == 2);
    // Longest phrases are tried first.
    CHECK(matches[0].length == 3);
    CHECK(matches[0].categories == std::set<int>{2});
    CHECK(matches[1].length == 2);
    CHECK(matches[1].categories == std::set<int>{1});

    const std::vector<std::string> offset = {"see", "as", "a"};
    CHECK(matcher.match_phrases(offset).empty());

    const std::vector<std::string> stem_window = {"leads", "to"};
    REQUIRE(matcher.match_phrases(stem_window).size() == 1);
    const std::vector<std::string> short_window = {"leads"};
    CHECK(matcher.match_phrases(short_window).empty());
}

TEST_CASE("adding entries never removes existing matches") {
    Rng rng(0x5eed0003);
    for (int iter = 0; iter < 20; ++iter) {
        auto gen = generate_dictionary(rng);
        Lexicon lex = lexicon::parse_dictionary(gen.text);
        const auto before = lexicon::compile_matcher(lex);

        lexicon::Entry extra;
        extra.pattern = {PatternKind::Stem, "zzz" + random_word(rng)};
        extra.categories.insert(lex.categories.front().id);
        lex.entries.push_back(extra);
        const auto after = lexicon::compile_matcher(lex);

        for (int q = 0; q < 40; ++q) {
            const std::string token = query_token(rng, lex);
            const auto old_ids = before.match_token(token);
            const auto new_ids = after.match_token(token);
            CHECK(std::includes(new_ids.begin(), new_ids.end(), old_ids.begin(), old_ids.end()));
        }
    }
}
