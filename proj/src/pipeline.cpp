#include "stylegap/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>

#include <json.hpp>

#include "stylegap/corpus.hpp"
#include "stylegap/csv.hpp"
#include "stylegap/extract.hpp"
#include "stylegap/gender.hpp"
#include "stylegap/lexicon.hpp"
#include "stylegap/report.hpp"
#include "stylegap/stats.hpp"
#include "stylegap/util.hpp"

namespace stylegap::pipeline {

namespace {

constexpr std::string_view kHumanVariant = "human";

// ---- stage state -----------------------------------------------------------

struct StageState {
    std::string fingerprint;
    std::map<std::string, std::string> outputs;  // rel path -> content hash
};

using StateMap = std::map<std::string, StageState>;

std::filesystem::path state_path(const RunConfig& config) {
    return config.out_dir / "stage_state.json";
}

StateMap load_state(const RunConfig& config) {
    StateMap state;
    const auto path = state_path(config);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        return state;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const std::exception&) {
        return state;  // corrupt state just disables skipping
    }
    if (!doc.is_object() || !doc.contains("stages") || !doc["stages"].is_object()) {
        return state;
    }
    for (const auto& [stage, entry] : doc["stages"].items()) {
        if (!entry.is_object() || !entry.contains("fingerprint")) {
            continue;
        }
        StageState s;
        s.fingerprint = entry.value("fingerprint", std::string{});
        if (entry.contains("outputs") && entry["outputs"].is_object()) {
            for (const auto& [rel, hash] : entry["outputs"].items()) {
                if (hash.is_string()) {
                    s.outputs.emplace(rel, hash.get<std::string>());
                }
            }
        }
        state.emplace(stage, std::move(s));
    }
    return state;
}

void save_state(const RunConfig& config, const StateMap& state) {
    nlohmann::ordered_json stages = nlohmann::ordered_json::object();
    for (const auto& [stage, entry] : state) {
        nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
        for (const auto& [rel, hash] : entry.outputs) {
            outputs[rel] = hash;
        }
        stages[stage] = {{"fingerprint", entry.fingerprint}, {"outputs", std::move(outputs)}};
    }
    nlohmann::ordered_json doc;
    doc["stages"] = std::move(stages);
    atomic_write_file(state_path(config), doc.dump(2) + "\n");
}

std::string rel_path(const RunConfig& config, const std::filesystem::path& path) {
    return path.lexically_relative(config.out_dir).generic_string();
}

bool up_to_date(const RunConfig& config, const StateMap& state, const std::string& stage,
                const std::string& fingerprint, const std::vector<std::string>& expected) {
    auto it = state.find(stage);
    if (it == state.end() || it->second.fingerprint != fingerprint) {
        return false;
    }
    for (const auto& rel : expected) {
        auto out = it->second.outputs.find(rel);
        if (out == it->second.outputs.end()) {
            return false;
        }
        if (file_hash(config.out_dir / rel) != out->second) {
            return false;
        }
    }
    return it->second.outputs.size() == expected.size();
}

void record_stage(const RunConfig& config, StateMap& state, const std::string& stage,
                  const std::string& fingerprint, const std::vector<std::string>& outputs) {
    StageState entry;
    entry.fingerprint = fingerprint;
    for (const auto& rel : outputs) {
        entry.outputs[rel] = file_hash(config.out_dir / rel);
    }
    state[stage] = std::move(entry);
    save_state(config, state);
}

// ---- shared helpers --------------------------------------------------------

std::vector<rewrite::ProviderConfig> selected_providers(const RunConfig& config,
                                                        const std::vector<std::string>& filter) {
    if (filter.empty()) {
        return config.providers;
    }
    std::vector<rewrite::ProviderConfig> selected;
    for (const auto& wanted : filter) {
        auto it = std::find_if(config.providers.begin(), config.providers.end(),
                               [&](const auto& p) { return p.name == wanted; });
        if (it == config.providers.end()) {
            throw ConfigError("config: --models names unknown provider '" + wanted + "'");
        }
        selected.push_back(*it);
    }
    return selected;
}

void require_file(const std::filesystem::path& path, const std::string& producer) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw MissingIntermediateError("missing intermediate " + path.string() + "; run the " +
                                       producer + " stage first");
    }
}

std::string opt_full(const std::optional<double>& v) {
    return v.has_value() ? format_full(*v) : "nan";
}

std::optional<double> parse_opt(const std::string& field, const char* where) {
    if (field == "nan" || field == "NaN" || field == "-nan") {
        return std::nullopt;
    }
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw std::runtime_error(std::string(where) + ": non-numeric value '" + field + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& field, const char* where) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw std::runtime_error(std::string(where) + ": non-numeric count '" + field + "'");
    }
    return static_cast<std::size_t>(v);
}

struct VariantLine {
    std::string record_id;
    std::string provider;
    std::string status;
    std::string text;
    int attempts = 0;
    std::string fingerprint;
    std::string error;
};

std::vector<VariantLine> read_variants_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<VariantLine> lines;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string_view line = end == std::string_view::npos
                                    ? std::string_view(text).substr(start)
                                    : std::string_view(text).substr(start, end - start);
        ++line_no;
        if (!line.empty()) {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw std::runtime_error("variants file " + path.string() + ": line " +
                                         std::to_string(line_no) + ": " + e.what());
            }
            VariantLine v;
            v.record_id = doc.value("record_id", std::string{});
            v.provider = doc.value("provider", std::string{});
            v.status = doc.value("status", std::string{});
            v.text = doc.value("text", std::string{});
            v.attempts = doc.value("attempts", 0);
            v.fingerprint = doc.value("fingerprint", std::string{});
            v.error = doc.value("error", std::string{});
            lines.push_back(std::move(v));
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return lines;
}

std::filesystem::path compare_diagonal_path(const RunConfig& config, const std::string& provider) {
    return config.out_dir / "compare" / ("diagonal_" + provider + ".csv");
}

// ---- compare/report file formats -------------------------------------------

std::string correlation_long_csv(const stats::CorrelationMatrix& matrix) {
    std::string out = csv::join_row({"feature_a", "feature_b", "r", "p", "n"});
    for (const auto& row : matrix) {
        for (const auto& cell : row) {
            out += csv::join_row({cell.feature_a, cell.feature_b, opt_full(cell.r),
                                  opt_full(cell.p), std::to_string(cell.n)});
        }
    }
    return out;
}

std::string diagonal_long_csv(const std::vector<stats::CorrelationResult>& cells) {
    std::string out = csv::join_row({"feature", "r", "p", "n"});
    for (const auto& cell : cells) {
        out += csv::join_row({cell.feature_a, opt_full(cell.r), opt_full(cell.p),
                              std::to_string(cell.n)});
    }
    return out;
}

std::string ttests_long_csv(const std::vector<stats::VariantTTests>& variants) {
    std::string out = csv::join_row({"variant", "feature", "t", "df", "p", "mean_female",
                                     "mean_male", "n_female", "n_male", "significant"});
    for (const auto& variant : variants) {
        for (const auto& r : variant.results) {
            out += csv::join_row({variant.variant, r.feature, opt_full(r.t), opt_full(r.df),
                                  opt_full(r.p), format_full(r.mean_female),
                                  format_full(r.mean_male), std::to_string(r.n_female),
                                  std::to_string(r.n_male), r.significant ? "1" : "0"});
        }
    }
    return out;
}

struct ParsedMatrix {
    std::vector<std::vector<std::optional<double>>> r;
    std::vector<std::vector<std::optional<double>>> p;
};

ParsedMatrix parse_correlation_long(const std::filesystem::path& path) {
    const auto rows = csv::parse(read_file(path));
    const auto& schema = extract::feature_schema();
    const std::size_t n = schema.size();
    if (rows.empty() || rows.front() != std::vector<std::string>{"feature_a", "feature_b", "r",
                                                                 "p", "n"}) {
        throw std::runtime_error("correlation file " + path.string() + ": unexpected header");
    }
    if (rows.size() != 1 + n * n) {
        throw std::runtime_error("correlation file " + path.string() + ": expected " +
                                 std::to_string(n * n) + " cells");
    }
    ParsedMatrix m;
    m.r.assign(n, std::vector<std::optional<double>>(n));
    m.p.assign(n, std::vector<std::optional<double>>(n));
    for (std::size_t k = 0; k < n * n; ++k) {
        const auto& fields = rows[k + 1];
        if (fields.size() != 5) {
            throw std::runtime_error("correlation file " + path.string() + ": malformed row");
        }
        const std::size_t i = k / n;
        const std::size_t j = k % n;
        if (fields[0] != schema[i] || fields[1] != schema[j]) {
            throw std::runtime_error("correlation file " + path.string() +
                                     ": cells out of schema order");
        }
        m.r[i][j] = parse_opt(fields[2], "correlation file");
        m.p[i][j] = parse_opt(fields[3], "correlation file");
    }
    return m;
}

std::vector<stats::CorrelationResult> parse_diagonal_long(const std::filesystem::path& path) {
    const auto rows = csv::parse(read_file(path));
    const auto& schema = extract::feature_schema();
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"feature", "r", "p", "n"}) {
        throw std::runtime_error("diagonal file " + path.string() + ": unexpected header");
    }
    if (rows.size() != 1 + schema.size()) {
        throw std::runtime_error("diagonal file " + path.string() + ": expected " +
                                 std::to_string(schema.size()) + " rows");
    }
    std::vector<stats::CorrelationResult> cells;
    cells.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& fields = rows[i + 1];
        if (fields.size() != 4 || fields[0] != schema[i]) {
            throw std::runtime_error("diagonal file " + path.string() +
                                     ": rows out of schema order");
        }
        stats::CorrelationResult cell;
        cell.feature_a = fields[0];
        cell.feature_b = fields[0];
        cell.r = parse_opt(fields[1], "diagonal file");
        cell.p = parse_opt(fields[2], "diagonal file");
        cell.n = parse_count(fields[3], "diagonal file");
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::vector<stats::VariantTTests> parse_ttests_long(const std::filesystem::path& path,
                                                    const std::vector<std::string>& expected_order) {
    const auto rows = csv::parse(read_file(path));
    const std::vector<std::string> header = {"variant",     "feature",   "t",
                                             "df",          "p",         "mean_female",
                                             "mean_male",   "n_female",  "n_male",
                                             "significant"};
    if (rows.empty() || rows.front() != header) {
        throw std::runtime_error("t-test file " + path.string() + ": unexpected header");
    }
    const auto& schema = extract::feature_schema();
    if (rows.size() != 1 + expected_order.size() * schema.size()) {
        throw std::runtime_error("t-test file " + path.string() + ": unexpected row count");
    }
    std::vector<stats::VariantTTests> variants;
    std::size_t row = 1;
    for (const auto& name : expected_order) {
        stats::VariantTTests block;
        block.variant = name;
        for (std::size_t i = 0; i < schema.size(); ++i, ++row) {
            const auto& fields = rows[row];
            if (fields.size() != header.size() || fields[0] != name || fields[1] != schema[i]) {
                throw std::runtime_error("t-test file " + path.string() +
                                         ": rows out of order at line " + std::to_string(row + 1));
            }
            stats::TTestResult r;
            r.feature = fields[1];
            r.t = parse_opt(fields[2], "t-test file");
            r.df = parse_opt(fields[3], "t-test file");
            r.p = parse_opt(fields[4], "t-test file");
            r.mean_female = parse_opt(fields[5], "t-test file").value_or(0.0);
            r.mean_male = parse_opt(fields[6], "t-test file").value_or(0.0);
            r.n_female = parse_count(fields[7], "t-test file");
            r.n_male = parse_count(fields[8], "t-test file");
            r.significant = fields[9] == "1";
            block.results.push_back(std::move(r));
        }
        variants.push_back(std::move(block));
    }
    return variants;
}

std::vector<std::string> variant_order(const RunConfig& config,
                                       const std::vector<rewrite::ProviderConfig>& providers) {
    std::vector<std::string> order = {std::string(kHumanVariant)};
    for (const auto& p : providers) {
        order.push_back(p.name);
    }
    (void)config;
    return order;
}

}  // namespace

// ---- paths -----------------------------------------------------------------

std::filesystem::path gendered_corpus_path(const RunConfig& config) {
    return config.out_dir / "gendered_corpus.jsonl";
}

std::filesystem::path gender_summary_path(const RunConfig& config) {
    return config.out_dir / "gender_summary.json";
}

std::filesystem::path variants_path(const RunConfig& config, const std::string& provider) {
    return config.out_dir / "rewrites" / (provider + ".jsonl");
}

std::filesystem::path rewrite_report_path(const RunConfig& config) {
    return config.out_dir / "rewrites" / "report.csv";
}

std::filesystem::path features_path(const RunConfig& config, const std::string& variant) {
    return config.out_dir / "features" / (variant + ".csv");
}

std::filesystem::path compare_correlation_path(const RunConfig& config,
                                               const std::string& provider) {
    return config.out_dir / "compare" / ("correlation_" + provider + ".csv");
}

std::filesystem::path compare_ttest_path(const RunConfig& config) {
    return config.out_dir / "compare" / "ttests.csv";
}

std::filesystem::path report_dir(const RunConfig& config) {
    return config.out_dir / "report";
}

// ---- stages ----------------------------------------------------------------

StageOutcome run_gender(const RunConfig& config) {
    StageOutcome outcome;
    outcome.stage = "gender";
    outcome.outputs = {rel_path(config, gendered_corpus_path(config)),
                       rel_path(config, gender_summary_path(config))};

    const std::string fingerprint =
        hash_hex("gender\n" + file_hash(config.corpus) + "\n" + file_hash(config.name_lexicon) +
                 "\n" + format_full(config.gender_threshold));

    StateMap state = load_state(config);
    if (up_to_date(config, state, outcome.stage, fingerprint, outcome.outputs)) {
        outcome.skipped = true;
        return outcome;
    }

    auto records = corpus::read_jsonl(config.corpus);
    const auto lexicon = gender::NameLexicon::load(config.name_lexicon);
    std::vector<gender::GenderLabel> labels;
    labels.reserve(records.size());
    for (auto& record : records) {
        std::vector<gender::GenderLabel> authors;
        authors.reserve(record.authors.size());
        for (const auto& author : record.authors) {
            authors.push_back(
                gender::infer_name_gender(author, lexicon, config.gender_threshold));
        }
        record.gender = gender::classify_publication(authors);
        labels.push_back(record.gender);
    }
    corpus::write_jsonl(gendered_corpus_path(config), records, /*with_gender=*/true);

    const auto summary = gender::summarize_gender_distribution(labels);
    nlohmann::ordered_json doc;
    for (const auto label : {gender::GenderLabel::Female, gender::GenderLabel::Male,
                             gender::GenderLabel::MixedGender, gender::GenderLabel::Unknown}) {
        doc[std::string(gender::to_string(label))] = summary.at(label);
    }
    doc["total"] = records.size();
    atomic_write_file(gender_summary_path(config), doc.dump(2) + "\n");

    record_stage(config, state, outcome.stage, fingerprint, outcome.outputs);
    return outcome;
}

StageOutcome run_rewrite(const RunConfig& config, const StageOptions& options) {
    StageOutcome outcome;
    outcome.stage = "rewrite";

    require_file(gendered_corpus_path(config), "gender");
    const auto providers = selected_providers(config, options.model_filter);
    for (const auto& provider : providers) {
        outcome.outputs.push_back(rel_path(config, variants_path(config, provider.name)));
    }
    outcome.outputs.push_back(rel_path(config, rewrite_report_path(config)));

    std::string fp_input = "rewrite\n" + file_hash(gendered_corpus_path(config));
    for (const auto& provider : providers) {
        fp_input += "\n" + provider.name + "\x1f" + provider.kind + "\x1f" + provider.model +
                    "\x1f" + provider.base_url + "\x1f" + std::to_string(provider.max_attempts);
    }
    for (const auto& phrase : config.refusal_phrases) {
        fp_input += "\n!" + phrase;
    }
    const std::string fingerprint = hash_hex(fp_input);

    StateMap state = load_state(config);
    if (up_to_date(config, state, outcome.stage, fingerprint, outcome.outputs)) {
        outcome.skipped = true;
        return outcome;
    }

    const auto records = corpus::read_jsonl(gendered_corpus_path(config));
    std::vector<rewrite::CorpusDocument> docs;
    docs.reserve(records.size());
    for (const auto& record : records) {
        docs.push_back({record.id, record.abstract});
    }

    const rewrite::Cache cache(config.cache_dir);
    std::string report_csv = csv::join_row({"provider", "ok", "refused", "failed"});

    for (const auto& provider_config : providers) {
        auto provider = rewrite::make_provider(provider_config, options.transport);
        rewrite::RewriteOptions opts;
        opts.retry.max_attempts = provider_config.max_attempts;
        opts.refusal_phrases = config.refusal_phrases;
        opts.max_in_flight = config.max_in_flight;

        std::vector<std::unique_ptr<rewrite::Provider>> one;
        one.push_back(std::move(provider));
        const auto results = rewrite::rewrite_corpus(one, docs, &cache, opts);

        std::string jsonl;
        std::size_t ok = 0;
        std::size_t refused = 0;
        std::size_t failed = 0;
        for (const auto& result : results) {
            nlohmann::ordered_json line;
            line["record_id"] = result.record_id;
            line["provider"] = result.provider;
            line["status"] = std::string(rewrite::to_string(result.status));
            line["attempts"] = result.attempts;
            line["fingerprint"] = result.fingerprint;
            line["text"] = result.text;
            line["error"] = result.error;
            jsonl += line.dump();
            jsonl.push_back('\n');
            switch (result.status) {
                case rewrite::RewriteStatus::Ok:
                    ++ok;
                    break;
                case rewrite::RewriteStatus::Refused:
                    ++refused;
                    break;
                case rewrite::RewriteStatus::Failed:
                    ++failed;
                    break;
            }
        }
        atomic_write_file(variants_path(config, provider_config.name), jsonl);
        report_csv += csv::join_row({provider_config.name, std::to_string(ok),
                                     std::to_string(refused), std::to_string(failed)});
    }
    atomic_write_file(rewrite_report_path(config), report_csv);

    record_stage(config, state, outcome.stage, fingerprint, outcome.outputs);
    return outcome;
}

StageOutcome run_extract(const RunConfig& config, const StageOptions& options) {
    StageOutcome outcome;
    outcome.stage = "extract";

    require_file(gendered_corpus_path(config), "gender");
    const auto providers = selected_providers(config, options.model_filter);
    for (const auto& provider : providers) {
        require_file(variants_path(config, provider.name), "rewrite");
    }

    outcome.outputs.push_back(
        rel_path(config, features_path(config, std::string(kHumanVariant))));
    for (const auto& provider : providers) {
        outcome.outputs.push_back(rel_path(config, features_path(config, provider.name)));
    }

    std::string fp_input = "extract\n" + file_hash(config.dictionary) + "\n" +
                           file_hash(config.composites) + "\n" +
                           file_hash(gendered_corpus_path(config));
    for (const auto& provider : providers) {
        fp_input += "\n" + provider.name + "\x1f" +
                    file_hash(variants_path(config, provider.name));
    }
    const std::string fingerprint = hash_hex(fp_input);

    StateMap state = load_state(config);
    if (up_to_date(config, state, outcome.stage, fingerprint, outcome.outputs)) {
        outcome.skipped = true;
        return outcome;
    }

    const auto lexicon = lexicon::parse_dictionary(read_file(config.dictionary));
    const auto matcher = lexicon::compile_matcher(lexicon);
    const auto composites = extract::load_composites(config.composites);
    const auto records = corpus::read_jsonl(gendered_corpus_path(config));

    std::vector<extract::DocumentInput> human_docs;
    human_docs.reserve(records.size());
    for (const auto& record : records) {
        human_docs.push_back({record.id, std::string(kHumanVariant), record.abstract});
    }
    extract::write_feature_table(
        features_path(config, std::string(kHumanVariant)),
        extract::extract_corpus(matcher, composites, human_docs, config.max_in_flight));

    for (const auto& provider : providers) {
        const auto lines = read_variants_file(variants_path(config, provider.name));
        std::vector<extract::DocumentInput> docs;
        for (const auto& line : lines) {
            if (line.status == "ok") {
                docs.push_back({line.record_id, provider.name, line.text});
            }
        }
        extract::write_feature_table(
            features_path(config, provider.name),
            extract::extract_corpus(matcher, composites, docs, config.max_in_flight));
    }

    record_stage(config, state, outcome.stage, fingerprint, outcome.outputs);
    return outcome;
}

StageOutcome run_compare(const RunConfig& config, const StageOptions& options) {
    StageOutcome outcome;
    outcome.stage = "compare";

    const auto providers = selected_providers(config, options.model_filter);
    require_file(gendered_corpus_path(config), "gender");
    require_file(features_path(config, std::string(kHumanVariant)), "extract");
    for (const auto& provider : providers) {
        require_file(features_path(config, provider.name), "extract");
    }

    for (const auto& provider : providers) {
        outcome.outputs.push_back(
            rel_path(config, compare_correlation_path(config, provider.name)));
        outcome.outputs.push_back(rel_path(config, compare_diagonal_path(config, provider.name)));
    }
    outcome.outputs.push_back(rel_path(config, compare_ttest_path(config)));

    std::string fp_input =
        "compare\n" + file_hash(gendered_corpus_path(config)) + "\n" +
        file_hash(features_path(config, std::string(kHumanVariant))) + "\n" +
        format_full(config.alpha) + "\n" + (config.equal_var ? "pooled" : "welch");
    for (const auto& provider : providers) {
        fp_input += "\n" + provider.name + "\x1f" +
                    file_hash(features_path(config, provider.name));
    }
    const std::string fingerprint = hash_hex(fp_input);

    StateMap state = load_state(config);
    if (up_to_date(config, state, outcome.stage, fingerprint, outcome.outputs)) {
        outcome.skipped = true;
        return outcome;
    }

    const auto human_table =
        extract::read_feature_table(features_path(config, std::string(kHumanVariant)));

    for (const auto& provider : providers) {
        const auto table = extract::read_feature_table(features_path(config, provider.name));
        const auto matrix = stats::correlation_matrix(human_table, table);
        atomic_write_file(compare_correlation_path(config, provider.name),
                          correlation_long_csv(matrix));
        atomic_write_file(compare_diagonal_path(config, provider.name),
                          diagonal_long_csv(stats::diagonal(matrix)));
    }

    std::map<std::string, gender::GenderLabel> record_gender;
    for (const auto& record : corpus::read_jsonl(gendered_corpus_path(config))) {
        record_gender[record.id] = record.gender;
    }
    std::vector<stats::VariantTTests> tests;
    tests.push_back(stats::gender_gap_tests_for_variant(std::string(kHumanVariant), human_table,
                                                        record_gender, config.alpha,
                                                        config.equal_var));
    for (const auto& provider : providers) {
        const auto table = extract::read_feature_table(features_path(config, provider.name));
        tests.push_back(stats::gender_gap_tests_for_variant(provider.name, table, record_gender,
                                                            config.alpha, config.equal_var));
    }
    atomic_write_file(compare_ttest_path(config), ttests_long_csv(tests));

    record_stage(config, state, outcome.stage, fingerprint, outcome.outputs);
    return outcome;
}

StageOutcome run_report(const RunConfig& config, const StageOptions& options) {
    StageOutcome outcome;
    outcome.stage = "report";

    const auto providers = selected_providers(config, options.model_filter);
    for (const auto& provider : providers) {
        require_file(compare_correlation_path(config, provider.name), "compare");
        require_file(compare_diagonal_path(config, provider.name), "compare");
    }
    require_file(compare_ttest_path(config), "compare");
    require_file(gender_summary_path(config), "gender");

    const auto dir = report_dir(config);
    std::vector<std::filesystem::path> files = {dir / "correlation_diagonal.csv",
                                                dir / "gender_ttests.csv"};
    for (const auto& provider : providers) {
        files.push_back(dir / ("heatmap_r_" + provider.name + ".svg"));
        files.push_back(dir / ("heatmap_p_" + provider.name + ".svg"));
    }
    files.push_back(dir / "significant_t.svg");
    files.push_back(dir / "manifest.json");
    for (const auto& file : files) {
        outcome.outputs.push_back(rel_path(config, file));
    }

    std::string fp_input = "report\n" + config.config_hash + "\n" + format_full(config.alpha) +
                           "\n" + file_hash(compare_ttest_path(config)) + "\n" +
                           file_hash(gender_summary_path(config));
    for (const auto& provider : providers) {
        fp_input += "\n" + provider.name + "\x1f" +
                    file_hash(compare_correlation_path(config, provider.name)) + "\x1f" +
                    file_hash(compare_diagonal_path(config, provider.name));
    }
    const std::string fingerprint = hash_hex(fp_input);

    StateMap state = load_state(config);
    if (up_to_date(config, state, outcome.stage, fingerprint, outcome.outputs)) {
        outcome.skipped = true;
        return outcome;
    }

    const auto& schema = extract::feature_schema();
    std::vector<std::string> labels(schema.begin(), schema.end());

    std::vector<std::string> model_names;
    std::vector<std::vector<stats::CorrelationResult>> diagonals;
    for (const auto& provider : providers) {
        model_names.push_back(provider.name);
        diagonals.push_back(parse_diagonal_long(compare_diagonal_path(config, provider.name)));
    }
    report::write_text_file(dir / "correlation_diagonal.csv",
                            report::correlation_table_csv(model_names, diagonals));

    const auto tests =
        parse_ttests_long(compare_ttest_path(config), variant_order(config, providers));
    report::write_text_file(dir / "gender_ttests.csv",
                            report::ttest_table_csv(tests, config.alpha));

    for (const auto& provider : providers) {
        const auto matrix = parse_correlation_long(compare_correlation_path(config, provider.name));
        report::write_text_file(
            dir / ("heatmap_r_" + provider.name + ".svg"),
            report::heatmap_svg(matrix.r, labels, labels, report::HeatmapScale::DivergingR,
                                config.alpha,
                                "Pearson r: human vs " + provider.name));
        report::write_text_file(
            dir / ("heatmap_p_" + provider.name + ".svg"),
            report::heatmap_svg(matrix.p, labels, labels, report::HeatmapScale::SequentialP,
                                config.alpha,
                                "Correlation p-values: human vs " + provider.name));
    }

    report::write_text_file(dir / "significant_t.svg",
                            report::significant_t_barchart_svg(tests, config.alpha));

    // Manifest: inputs, configuration, per-stage counts, and output hashes.
    nlohmann::ordered_json manifest;
    manifest["config_hash"] = config.config_hash;
    manifest["alpha"] = config.alpha;
    manifest["equal_var"] = config.equal_var;
    manifest["gender_threshold"] = config.gender_threshold;
    manifest["inputs"] = {{"corpus", file_hash(config.corpus)},
                          {"dictionary", file_hash(config.dictionary)},
                          {"composites", file_hash(config.composites)},
                          {"name_lexicon", file_hash(config.name_lexicon)}};

    nlohmann::ordered_json counts;
    {
        nlohmann::json summary = nlohmann::json::parse(read_file(gender_summary_path(config)));
        counts["gender"] = summary;
    }
    {
        nlohmann::ordered_json rewrites = nlohmann::ordered_json::object();
        for (const auto& provider : providers) {
            const auto path = variants_path(config, provider.name);
            std::error_code ec;
            if (!std::filesystem::is_regular_file(path, ec)) {
                continue;
            }
            std::size_t ok = 0;
            std::size_t refused = 0;
            std::size_t failed = 0;
            for (const auto& line : read_variants_file(path)) {
                if (line.status == "ok") {
                    ++ok;
                } else if (line.status == "refused") {
                    ++refused;
                } else {
                    ++failed;
                }
            }
            rewrites[provider.name] = {{"ok", ok}, {"refused", refused}, {"failed", failed}};
        }
        counts["rewrites"] = std::move(rewrites);
    }
    {
        nlohmann::ordered_json feature_rows = nlohmann::ordered_json::object();
        for (const auto& name : variant_order(config, providers)) {
            const auto path = features_path(config, name);
            std::error_code ec;
            if (std::filesystem::is_regular_file(path, ec)) {
                feature_rows[name] = extract::read_feature_table(path).size();
            }
        }
        counts["feature_rows"] = std::move(feature_rows);
    }
    {
        nlohmann::ordered_json pairs = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < providers.size(); ++i) {
            pairs[providers[i].name] = diagonals[i].front().n;
        }
        counts["correlation_pairs"] = std::move(pairs);
    }
    manifest["counts"] = std::move(counts);

    std::vector<std::filesystem::path> artifacts = {gendered_corpus_path(config),
                                                    gender_summary_path(config),
                                                    rewrite_report_path(config)};
    for (const auto& provider : providers) {
        artifacts.push_back(variants_path(config, provider.name));
    }
    artifacts.push_back(features_path(config, std::string(kHumanVariant)));
    for (const auto& provider : providers) {
        artifacts.push_back(features_path(config, provider.name));
        artifacts.push_back(compare_correlation_path(config, provider.name));
        artifacts.push_back(compare_diagonal_path(config, provider.name));
    }
    artifacts.push_back(compare_ttest_path(config));
    for (const auto& file : files) {
        if (file.filename() != "manifest.json") {
            artifacts.push_back(file);
        }
    }
    std::map<std::string, std::string> output_hashes;
    for (const auto& artifact : artifacts) {
        std::error_code ec;
        if (std::filesystem::is_regular_file(artifact, ec)) {
            output_hashes[rel_path(config, artifact)] = file_hash(artifact);
        }
    }
    nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
    for (const auto& [rel, hash] : output_hashes) {
        outputs[rel] = hash;
    }
    manifest["outputs"] = std::move(outputs);
    atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    record_stage(config, state, outcome.stage, fingerprint, outcome.outputs);
    return outcome;
}

std::vector<StageOutcome> run_all(const RunConfig& config, const StageOptions& options) {
    std::vector<StageOutcome> outcomes;
    outcomes.push_back(run_gender(config));
    outcomes.push_back(run_rewrite(config, options));
    outcomes.push_back(run_extract(config, options));
    outcomes.push_back(run_compare(config, options));
    outcomes.push_back(run_report(config, options));
    return outcomes;
}

}  // namespace stylegap::pipeline
