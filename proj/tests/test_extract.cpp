#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "stylegap/extract.hpp"
#include "stylegap/lexicon.hpp"

using namespace stylegap;
using extract::DocumentInput;
using extract::FeatureVector;

namespace {

const lexicon::Matcher& fixture_matcher() {
    static const lexicon::Matcher matcher = lexicon::compile_matcher(lexicon::parse_dictionary(
        "%\n"
        "1\ttone_pos\n"
        "2\ttone_neg\n"
        "3\ttech\n"
        "4\tcause\n"
        "5\ttentat\n"
        "%\n"
        "good\t1\n"
        "great\t1\n"
        "happ*\t1\n"
        "bad\t2\n"
        "fail*\t2\n"
        "machine*\t3\n"
        "machine learning\t3\n"
        "because\t4\n"
        "as a result\t4\n"
        "a result\t4\n"
        "lead* to\t4\n"
        "maybe\t5\n"
        "perhap*\t5\n"));
    return matcher;
}

std::vector<extract::CompositeDef> tone_composite() {
    return extract::parse_composites(
        R"([{"name": "Tone", "intercept": 50, "terms": {"tone_pos": 1, "tone_neg": -1}}])");
}

double feature(const FeatureVector& row, std::string_view name) {
    const auto idx = extract::feature_index(name);
    REQUIRE(idx.has_value());
    return row.values[*idx];
}

}  // namespace

TEST_CASE("tokenizer lowercases and keeps internal hyphens, slashes, apostrophes") {
    CHECK(extract::tokenize("State-of-the-art DON'T stop!") ==
          std::vector<std::string>{"state-of-the-art", "don't", "stop"});
    CHECK(extract::tokenize("input/output, twenty-one.") ==
          std::vector<std::string>{"input", "output", "twenty-one"});
    CHECK(extract::tokenize("trailing- dash' ends") ==
          std::vector<std::string>{"trailing", "dash", "ends"});
    CHECK(extract::tokenize("3.5 km (approx.)") == std::vector<std::string>{"3", "5", "km", "approx"});
    CHECK(extract::tokenize("  ") == std::vector<std::string>{});
    CHECK(extract::tokenize("?!--") == std::vector<std::string>{});
    // Bytes >= 0x80 are word bytes, so UTF-8 words stay whole.
    CHECK(extract::tokenize("caf\xc3\xa9 tables") == std::vector<std::string>{"caf\xc3\xa9", "tables"});
}

TEST_CASE("category percentages match hand counts, including stacked phrase hits") {
    const auto& matcher = fixture_matcher();

    // WC = 10. tech: "machine" (stem) + "machine learning" (phrase) = 2.
    // tone_neg: "failed". cause: "because". tone_pos: "good" + "happened"(happ*) = 2.
    const auto tokens = extract::tokenize(
        "The machine learning demo failed because good results happened again.");
    REQUIRE(tokens.size() == 10);
    const auto raw = extract::category_percentages(matcher, tokens);
    CHECK(raw.at("tech") == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(raw.at("tone_neg") == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(raw.at("cause") == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(raw.at("tone_pos") == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(raw.at("tentat") == 0.0);
}

TEST_CASE("overlapping phrases all count because no position is consumed") {
    const auto& matcher = fixture_matcher();
    // "as a result" matches at position 0; "a result" matches at position 1.
    const auto tokens = extract::tokenize("as a result");
    const auto raw = extract::category_percentages(matcher, tokens);
    // cause count = 2 over WC 3.
    CHECK(raw.at("cause") == doctest::Approx(100.0 * 2 / 3).epsilon(1e-12));
}

TEST_CASE("percentages are clamped to 100 when matches stack past the word count") {
    const auto matcher = lexicon::compile_matcher(lexicon::parse_dictionary(
        "%\n1\tpos\n%\n"
        "very\t1\n"
        "happy\t1\n"
        "very happy\t1\n"));
    const auto tokens = extract::tokenize("very happy");
    const auto raw = extract::category_percentages(matcher, tokens);
    // 3 hits over 2 tokens would be 150; the percentage is capped.
    CHECK(raw.at("pos") == 100.0);
}

TEST_CASE("empty documents are degenerate with zeroed categories") {
    const auto row = extract::extract_features(fixture_matcher(), tone_composite(),
                                               {"r1", "human", "?! --"});
    CHECK(row.degenerate);
    CHECK(feature(row, "WC") == 0.0);
    CHECK(feature(row, "Segment") == 1.0);
    CHECK(feature(row, "tone_pos") == 0.0);
    CHECK(feature(row, "Tone") == 50.0);  // intercept only
}

TEST_CASE("feature vector resolves Segment, WC, composites, then raw categories") {
    const auto row = extract::extract_features(
        fixture_matcher(), tone_composite(),
        {"r1", "human", "Good results today, maybe a great failure tomorrow."});
    // WC 8; tone_pos = good + great = 25%; tone_neg = failure (fail*) = 12.5%;
    // tentat = maybe = 12.5%.
    CHECK(feature(row, "Segment") == 1.0);
    CHECK(feature(row, "WC") == 8.0);
    CHECK(feature(row, "tone_pos") == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(feature(row, "tone_neg") == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(feature(row, "tentat") == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(feature(row, "Tone") == doctest::Approx(50.0 + 25.0 - 12.5).epsilon(1e-12));
    // Categories absent from the dictionary fall through to zero.
    CHECK(feature(row, "politic") == 0.0);
    CHECK_FALSE(row.degenerate);
}

TEST_CASE("composite definitions shadow same-named raw categories and clamp") {
    const auto composites = extract::parse_composites(
        R"([{"name": "tone_pos", "intercept": 120, "terms": {}},
            {"name": "Tone", "intercept": -10, "terms": {"tone_neg": -1}}])");
    const auto row = extract::extract_features(fixture_matcher(), composites,
                                               {"r1", "human", "good bad"});
    CHECK(feature(row, "tone_pos") == 100.0);  // composite wins, clamped high
    CHECK(feature(row, "Tone") == 0.0);        // clamped low
}

TEST_CASE("composite parsing rejects malformed definitions") {
    CHECK_THROWS_WITH_AS(extract::parse_composites("{}"),
                         doctest::Contains("top-level value must be an array"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(extract::parse_composites("[{\"intercept\": 1}]"),
                         doctest::Contains("needs a string 'name'"), std::runtime_error);
    CHECK_THROWS_WITH_AS(extract::parse_composites(
                             "[{\"name\": \"X\", \"terms\": {\"a\": \"b\"}}]"),
                         doctest::Contains("must be a number"), std::runtime_error);
    CHECK_THROWS_WITH_AS(extract::parse_composites("not json"),
                         doctest::Contains("invalid JSON"), std::runtime_error);
    // Unknown category referenced by a term surfaces at computation time.
    const auto defs = extract::parse_composites(
        R"([{"name": "X", "terms": {"nope": 1}}])");
    CHECK_THROWS_WITH_AS(extract::extract_features(fixture_matcher(), defs, {"r", "v", "words"}),
                         doctest::Contains("unknown category 'nope'"), std::runtime_error);
}

TEST_CASE("parallel extraction equals sequential extraction") {
    std::mt19937_64 rng(0x5eed0010);
    std::uniform_int_distribution<int> len_dist(0, 60);
    std::uniform_int_distribution<int> word_dist(0, 11);
    const char* vocab[] = {"good",    "bad",   "machine", "learning", "because", "maybe",
                           "results", "as",    "a",       "result",   "leads",   "to"};
    std::vector<DocumentInput> docs;
    for (int i = 0; i < 64; ++i) {
        std::string text;
        const int len = len_dist(rng);
        for (int w = 0; w < len; ++w) {
            if (w > 0) {
                text.push_back(' ');
            }
            text += vocab[word_dist(rng)];
        }
        docs.push_back({"r" + std::to_string(i), "human", text});
    }
    const auto sequential = extract::extract_corpus(fixture_matcher(), tone_composite(), docs, 1);
    const auto parallel = extract::extract_corpus(fixture_matcher(), tone_composite(), docs, 4);
    REQUIRE(sequential.size() == parallel.size());
    for (std::size_t i = 0; i < sequential.size(); ++i) {
        CHECK(sequential[i].record_id == parallel[i].record_id);
        CHECK(sequential[i].degenerate == parallel[i].degenerate);
        for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
            CHECK(sequential[i].values[f] == parallel[i].values[f]);
        }
    }
}

TEST_CASE("percentages are bounded and invariant under document repetition") {
    std::mt19937_64 rng(0x5eed0011);
    std::uniform_int_distribution<int> len_dist(1, 40);
    std::uniform_int_distribution<int> word_dist(0, 9);
    std::uniform_int_distribution<int> reps_dist(2, 5);
    const char* vocab[] = {"good", "bad",    "machine", "learning", "because",
                           "xyzq", "happen", "fails",   "perhaps",  "result"};
    const auto composites = tone_composite();
    for (int iter = 0; iter < 200; ++iter) {
        std::string text;
        const int len = len_dist(rng);
        for (int w = 0; w < len; ++w) {
            if (w > 0) {
                text.push_back(' ');
            }
            text += vocab[word_dist(rng)];
        }
        // End on a word no phrase can start at or continue through, so that
        // concatenated copies cannot create new matches across the seam.
        text += " xyzq";
        const auto once = extract::extract_features(fixture_matcher(), composites,
                                                    {"r", "human", text});
        for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
            const std::string name(extract::feature_schema()[f]);
            if (name == "WC") {
                continue;
            }
            CHECK(once.values[f] >= 0.0);
            CHECK(once.values[f] <= 100.0);
        }

        const int reps = reps_dist(rng);
        std::string repeated = text;
        for (int r = 1; r < reps; ++r) {
            repeated += " " + text;
        }
        const auto many = extract::extract_features(fixture_matcher(), composites,
                                                    {"r", "human", repeated});
        CHECK(feature(many, "WC") == reps * feature(once, "WC"));
        for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
            const std::string name(extract::feature_schema()[f]);
            if (name == "WC") {
                continue;
            }
            // Counts and word totals scale together, so ratios are unchanged.
            CHECK(many.values[f] == doctest::Approx(once.values[f]).epsilon(1e-12));
        }
    }
}

TEST_CASE("feature tables round-trip through CSV including non-finite values") {
    std::vector<FeatureVector> rows(2);
    rows[0].record_id = "r1";
    rows[0].variant = "human";
    rows[0].degenerate = false;
    for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
        rows[0].values[f] = 0.1 * static_cast<double>(f);
    }
    rows[1].record_id = "r2";
    rows[1].variant = "mock";
    rows[1].degenerate = true;
    rows[1].values.fill(0.0);
    rows[1].values[5] = std::nan("");

    const std::string csv = extract::feature_table_csv(rows);
    const auto parsed = extract::parse_feature_table(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].record_id == "r1");
    CHECK(parsed[1].degenerate);
    for (std::size_t f = 0; f < extract::kFeatureCount; ++f) {
        CHECK(parsed[0].values[f] == rows[0].values[f]);
    }
    CHECK(std::isnan(parsed[1].values[5]));

    CHECK_THROWS_WITH_AS(extract::parse_feature_table("nope\n"),
                         doctest::Contains("header"), std::runtime_error);
    const std::string bad_flag = csv.substr(0, csv.find("\nr1,") + 1) + "r1,human,2,0\n";
    CHECK_THROWS_AS(extract::parse_feature_table(bad_flag), std::runtime_error);
}
