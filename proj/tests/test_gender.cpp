#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "stylegap/gender.hpp"

using namespace stylegap;
using gender::GenderLabel;
using gender::NameLexicon;

namespace {

NameLexicon fixture_lexicon() {
    return NameLexicon::parse(
        "name,female_count,male_count\n"
        "alice,990,10\n"
        "mary,999,1\n"
        "bob,5,995\n"
        "james,20,980\n"
        "casey,503,497\n"
        "robin,700,300\n"
        "zero,0,0\n");
}

}  // namespace

TEST_CASE("first-name keys handle comma order, spacing, and punctuation") {
    CHECK(gender::first_name_key("Mary Collins") == "mary");
    CHECK(gender::first_name_key("Collins, Mary") == "mary");
    CHECK(gender::first_name_key("  collins ,   MARY Anne ") == "mary");
    CHECK(gender::first_name_key("O'Neill, (Robin)") == "robin");
    CHECK(gender::first_name_key("robin.") == "robin");
    CHECK(gender::first_name_key("Smith,") == "");
    CHECK(gender::first_name_key("") == "");
    CHECK(gender::first_name_key("  ,  ") == "");
}

TEST_CASE("name inference applies the share threshold symmetrically") {
    const auto lex = fixture_lexicon();
    CHECK(gender::infer_name_gender("Alice Doe", lex, 0.9) == GenderLabel::Female);
    CHECK(gender::infer_name_gender("Bob Doe", lex, 0.9) == GenderLabel::Male);
    CHECK(gender::infer_name_gender("Casey Doe", lex, 0.9) == GenderLabel::Unknown);
    CHECK(gender::infer_name_gender("Robin Doe", lex, 0.9) == GenderLabel::Unknown);
    // A 0.7 share meets a 0.7 threshold (>=, not >).
    CHECK(gender::infer_name_gender("Robin Doe", lex, 0.7) == GenderLabel::Female);
    // Unlisted names and zero-count rows stay unknown at any threshold.
    CHECK(gender::infer_name_gender("Zanzibar Doe", lex, 0.51) == GenderLabel::Unknown);
    CHECK(gender::infer_name_gender("Zero Doe", lex, 0.51) == GenderLabel::Unknown);
    CHECK(gender::infer_name_gender("", lex, 0.9) == GenderLabel::Unknown);
}

TEST_CASE("thresholds outside (0.5, 1] are rejected") {
    const auto lex = fixture_lexicon();
    CHECK_THROWS_AS(gender::infer_name_gender("Alice", lex, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(gender::infer_name_gender("Alice", lex, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gender::infer_name_gender("Alice", lex, 1.0001), std::invalid_argument);
    CHECK_THROWS_AS(gender::infer_name_gender("Alice", lex, -1.0), std::invalid_argument);
    CHECK_NOTHROW(gender::infer_name_gender("Alice", lex, 1.0));
    CHECK_NOTHROW(gender::infer_name_gender("Alice", lex, 0.5001));
}

TEST_CASE("raising the threshold never flips a label between female and male") {
    const auto lex = fixture_lexicon();
    const char* names[] = {"alice", "mary", "bob", "james", "casey", "robin", "zero", "new"};
    for (const char* name : names) {
        GenderLabel previous = GenderLabel::Unknown;
        bool first = true;
        for (double threshold = 0.51; threshold <= 1.0; threshold += 0.01) {
            const GenderLabel label = gender::infer_name_gender(name, lex, threshold);
            if (!first && label != previous) {
                // The only allowed transition under a stricter threshold is
                // losing the decision, never swapping it.
                CHECK(label == GenderLabel::Unknown);
                CHECK(previous != GenderLabel::Unknown);
            }
            previous = label;
            first = false;
        }
    }
}

TEST_CASE("publication labels follow the any-female/any-male rule") {
    using L = GenderLabel;
    CHECK(gender::classify_publication({}) == L::Unknown);
    CHECK(gender::classify_publication({L::Unknown}) == L::Unknown);
    CHECK(gender::classify_publication({L::Female}) == L::Female);
    CHECK(gender::classify_publication({L::Male}) == L::Male);
    CHECK(gender::classify_publication({L::Female, L::Male}) == L::MixedGender);
    CHECK(gender::classify_publication({L::Male, L::Female, L::Unknown}) == L::MixedGender);
    CHECK(gender::classify_publication({L::Female, L::Unknown}) == L::Female);
    CHECK(gender::classify_publication({L::Unknown, L::Male, L::Unknown}) == L::Male);
}

TEST_CASE("label summaries always report all four labels and partition the input") {
    std::mt19937_64 rng(0x5eed0020);
    std::uniform_int_distribution<int> label_dist(0, 3);
    std::uniform_int_distribution<int> size_dist(0, 60);
    const GenderLabel all[] = {GenderLabel::Female, GenderLabel::Male,
                               GenderLabel::MixedGender, GenderLabel::Unknown};
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<GenderLabel> labels;
        const int n = size_dist(rng);
        for (int i = 0; i < n; ++i) {
            labels.push_back(all[label_dist(rng)]);
        }
        const auto summary = gender::summarize_gender_distribution(labels);
        REQUIRE(summary.size() == 4);
        std::size_t total = 0;
        for (const auto& [label, count] : summary) {
            total += count;
        }
        CHECK(total == labels.size());
    }
}

TEST_CASE("name lexicon parsing merges duplicates and validates rows") {
    const auto merged = NameLexicon::parse(
        "name,female_count,male_count\n"
        "kim,10,5\n"
        "KIM,20,5\n");
    const auto counts = merged.lookup("kim");
    REQUIRE(counts.has_value());
    CHECK(counts->female == 30);
    CHECK(counts->male == 10);

    // The header row is optional.
    CHECK(NameLexicon::parse("ada,9,1\n").lookup("ada").has_value());

    CHECK_THROWS_WITH_AS(NameLexicon::parse("ada,9\n"),
                         doctest::Contains("row 1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(NameLexicon::parse("name,female_count,male_count\nada,x,1\n"),
                         doctest::Contains("non-numeric count"), std::runtime_error);
    CHECK_THROWS_WITH_AS(NameLexicon::parse("name,female_count,male_count\n,9,1\n"),
                         doctest::Contains("empty name"), std::runtime_error);
}

TEST_CASE("label names round-trip through their string forms") {
    for (GenderLabel label : {GenderLabel::Female, GenderLabel::Male, GenderLabel::MixedGender,
                              GenderLabel::Unknown}) {
        const auto text = gender::to_string(label);
        const auto parsed = gender::label_from_string(text);
        REQUIRE(parsed.has_value());
        CHECK(*parsed == label);
    }
    CHECK(gender::to_string(GenderLabel::MixedGender) == "Mixed-Gender");
    CHECK_FALSE(gender::label_from_string("female").has_value());
    CHECK_FALSE(gender::label_from_string("").has_value());
}
