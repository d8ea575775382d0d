#include "stylegap/extract.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "stylegap/csv.hpp"
#include "stylegap/util.hpp"

namespace stylegap::extract {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kSchema = {
    "Segment",   "WC",        "Analytic", "Clout",    "Tone",      "affiliation",
    "achieve",   "power",     "insight",  "cause",    "discrep",   "tentat",
    "certitude", "differ",    "tone_pos", "tone_neg", "emotion",   "emo_pos",
    "emo_neg",   "emo_anx",   "emo_anger", "emo_sad", "prosocial", "polite",
    "conflict",  "moral",     "comm",     "politic",  "ethnicity", "tech",
    "reward",    "risk",      "curiosity", "allure",
};

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_schema() {
    return kSchema;
}

std::optional<std::size_t> feature_index(std::string_view name) {
    for (std::size_t i = 0; i < kSchema.size(); ++i) {
        if (kSchema[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<CompositeDef> parse_composites(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("composites: invalid JSON: ") + e.what());
    }
    if (!doc.is_array()) {
        throw std::runtime_error("composites: top-level value must be an array");
    }
    std::vector<CompositeDef> defs;
    defs.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
            throw std::runtime_error("composites: each definition needs a string 'name'");
        }
        CompositeDef def;
        def.name = item["name"].get<std::string>();
        if (def.name.empty()) {
            throw std::runtime_error("composites: 'name' must not be empty");
        }
        if (item.contains("intercept")) {
            if (!item["intercept"].is_number()) {
                throw std::runtime_error("composites: 'intercept' must be a number in '" +
                                         def.name + "'");
            }
            def.intercept = item["intercept"].get<double>();
        }
        if (item.contains("terms")) {
            if (!item["terms"].is_object()) {
                throw std::runtime_error("composites: 'terms' must be an object in '" +
                                         def.name + "'");
            }
            for (const auto& [category, weight] : item["terms"].items()) {
                if (!weight.is_number()) {
                    throw std::runtime_error("composites: weight for '" + category +
                                             "' must be a number in '" + def.name + "'");
                }
                def.terms.emplace_back(category, weight.get<double>());
            }
        }
        defs.push_back(std::move(def));
    }
    return defs;
}

std::vector<CompositeDef> load_composites(const std::filesystem::path& path) {
    return parse_composites(read_file(path));
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::string token;
        while (i < n) {
            const unsigned char c = static_cast<unsigned char>(text[i]);
            if (is_word_byte(c)) {
                token.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                         : static_cast<char>(c));
                ++i;
            } else if ((c == '\'' || c == '-') && i + 1 < n &&
                       is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
                token.push_back(static_cast<char>(c));
                ++i;
            } else {
                break;
            }
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

std::map<std::string, double> category_percentages(const lexicon::Matcher& matcher,
                                                   std::span<const std::string> tokens) {
    std::map<int, long long> counts;
    const std::size_t n = tokens.size();
    const std::size_t max_window = static_cast<std::size_t>(matcher.max_phrase_len());
    for (std::size_t i = 0; i < n; ++i) {
        for (int id : matcher.match_token(tokens[i])) {
            ++counts[id];
        }
        const std::size_t window = std::min(max_window, n - i);
        if (window >= 2) {
            for (const auto& match : matcher.match_phrases(tokens.subspan(i, window))) {
                for (int id : match.categories) {
                    ++counts[id];
                }
            }
        }
    }

    std::map<std::string, double> out;
    for (const auto& cat : matcher.categories()) {
        double value = 0.0;
        if (n > 0) {
            auto it = counts.find(cat.id);
            if (it != counts.end()) {
                value = 100.0 * static_cast<double>(it->second) / static_cast<double>(n);
            }
        }
        out[cat.name] = std::clamp(value, 0.0, 100.0);
    }
    return out;
}

std::map<std::string, double> compute_composites(const std::map<std::string, double>& raw,
                                                 const std::vector<CompositeDef>& defs) {
    std::map<std::string, double> out;
    for (const auto& def : defs) {
        double value = def.intercept;
        for (const auto& [category, weight] : def.terms) {
            auto it = raw.find(category);
            if (it == raw.end()) {
                throw std::runtime_error("composite '" + def.name +
                                         "' references unknown category '" + category + "'");
            }
            value += weight * it->second;
        }
        out[def.name] = std::clamp(value, 0.0, 100.0);
    }
    return out;
}

FeatureVector extract_features(const lexicon::Matcher& matcher,
                               const std::vector<CompositeDef>& composites,
                               const DocumentInput& doc) {
    FeatureVector out;
    out.record_id = doc.record_id;
    out.variant = doc.variant;

    const auto tokens = tokenize(doc.text);
    out.degenerate = tokens.empty();
    const auto raw = category_percentages(matcher, tokens);
    const auto derived = compute_composites(raw, composites);

    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const std::string name(kSchema[f]);
        if (name == "Segment") {
            out.values[f] = 1.0;
        } else if (name == "WC") {
            out.values[f] = static_cast<double>(tokens.size());
        } else if (auto it = derived.find(name); it != derived.end()) {
            out.values[f] = it->second;
        } else if (auto rit = raw.find(name); rit != raw.end()) {
            out.values[f] = rit->second;
        } else {
            out.values[f] = 0.0;
        }
    }
    return out;
}

std::vector<FeatureVector> extract_corpus(const lexicon::Matcher& matcher,
                                          const std::vector<CompositeDef>& composites,
                                          const std::vector<DocumentInput>& docs,
                                          int workers) {
    std::vector<FeatureVector> results(docs.size());
    const int thread_count =
        std::min<int>(std::max(workers, 1), static_cast<int>(std::max<std::size_t>(docs.size(), 1)));
    if (thread_count <= 1) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            results[i] = extract_features(matcher, composites, docs[i]);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= docs.size()) {
                return;
            }
            results[i] = extract_features(matcher, composites, docs[i]);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return results;
}

namespace {

std::vector<std::string> table_header() {
    std::vector<std::string> header = {"record_id", "variant", "degenerate"};
    for (auto name : kSchema) {
        header.emplace_back(name);
    }
    return header;
}

}  // namespace

std::string feature_table_csv(const std::vector<FeatureVector>& rows) {
    std::string out = csv::join_row(table_header());
    for (const auto& row : rows) {
        std::vector<std::string> fields;
        fields.reserve(3 + kFeatureCount);
        fields.push_back(row.record_id);
        fields.push_back(row.variant);
        fields.push_back(row.degenerate ? "1" : "0");
        for (double v : row.values) {
            fields.push_back(format_full(v));
        }
        out += csv::join_row(fields);
    }
    return out;
}

std::vector<FeatureVector> parse_feature_table(std::string_view csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty() || rows.front() != table_header()) {
        throw std::runtime_error("feature table: missing or unexpected header row");
    }
    std::vector<FeatureVector> out;
    out.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (fields.size() != 3 + kFeatureCount) {
            throw std::runtime_error("feature table: row " + std::to_string(r + 1) +
                                     " has " + std::to_string(fields.size()) + " fields");
        }
        FeatureVector row;
        row.record_id = fields[0];
        row.variant = fields[1];
        if (fields[2] == "1") {
            row.degenerate = true;
        } else if (fields[2] == "0") {
            row.degenerate = false;
        } else {
            throw std::runtime_error("feature table: row " + std::to_string(r + 1) +
                                     " has invalid degenerate flag '" + fields[2] + "'");
        }
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const std::string& field = fields[3 + f];
            char* end = nullptr;
            row.values[f] = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size() || field.empty()) {
                throw std::runtime_error("feature table: row " + std::to_string(r + 1) +
                                         " has non-numeric value '" + field + "'");
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

void write_feature_table(const std::filesystem::path& path,
                         const std::vector<FeatureVector>& rows) {
    atomic_write_file(path, feature_table_csv(rows));
}

std::vector<FeatureVector> read_feature_table(const std::filesystem::path& path) {
    return parse_feature_table(read_file(path));
}

}  // namespace stylegap::extract
