#include "stylegap/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stylegap/config.hpp"
#include "stylegap/lexicon.hpp"
#include "stylegap/pipeline.hpp"
#include "stylegap/rewrite.hpp"
#include "stylegap/util.hpp"

#include <json.hpp>

namespace stylegap::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInput = 2;
constexpr int kExitCredential = 3;
constexpr int kExitMissingIntermediate = 4;

std::vector<std::string> split_csv_list(const std::string& csv) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= csv.size() && !csv.empty()) {
        const std::size_t comma = csv.find(',', start);
        std::string item = comma == std::string::npos ? csv.substr(start)
                                                      : csv.substr(start, comma - start);
        if (!item.empty()) {
            items.push_back(std::move(item));
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return items;
}

bool looks_like_input_error(const std::string& message) {
    for (const char* prefix : {"corpus:", "config:", "name lexicon:", "composites:",
                               "feature table:", "variants file "}) {
        if (message.rfind(prefix, 0) == 0) {
            return true;
        }
    }
    return false;
}

void print_outcome(const pipeline::StageOutcome& outcome) {
    std::cout << outcome.stage << ": " << (outcome.skipped ? "skipped" : "ran") << " ("
              << outcome.outputs.size() << " outputs)\n";
}

void print_gender_counts(const RunConfig& config) {
    const auto path = pipeline::gender_summary_path(config);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        return;
    }
    try {
        const auto summary = nlohmann::json::parse(read_file(path));
        std::cout << "gender counts:";
        for (const char* label : {"Female", "Male", "Mixed-Gender", "Unknown"}) {
            if (summary.contains(label)) {
                std::cout << " " << label << "=" << summary[label].get<std::size_t>();
            }
        }
        if (summary.contains("total")) {
            std::cout << " total=" << summary["total"].get<std::size_t>();
        }
        std::cout << "\n";
    } catch (const std::exception&) {
        // summary is informational; a malformed file is reported by its stage
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Corpus style audit: LLM rewrites of abstracts, psycholinguistic feature "
                 "extraction, correlation and gender-gap statistics"};
    app.name("stylegap");
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string models_csv;
    std::optional<double> alpha_override;
    std::optional<double> threshold_override;
    std::optional<int> max_in_flight_override;
    bool equal_var_flag = false;

    const std::vector<std::string> stage_names = {"gender",  "rewrite", "extract",
                                                  "compare", "report",  "pipeline"};
    const std::vector<std::string> stage_blurbs = {
        "Annotate the corpus with author-gender labels and write the distribution summary",
        "Request one rewrite per (record, provider) pair, using the on-disk cache",
        "Extract the feature table for the human corpus and every provider variant",
        "Compute correlation matrices and gender t-tests from the feature tables",
        "Render the report tables, heatmaps, bar chart, and manifest",
        "Run every stage in order with hash-based skipping",
    };
    for (std::size_t i = 0; i < stage_names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(stage_names[i], stage_blurbs[i]);
        sub->add_option("--config", config_path, "Run configuration JSON file")
            ->required();
        sub->add_option("--out", out_override, "Override the configured output directory");
        sub->add_option("--models", models_csv,
                        "Comma-separated provider names (default: all configured)");
        sub->add_option("--alpha", alpha_override, "Override the significance level");
        sub->add_flag("--equal-var", equal_var_flag,
                      "Use pooled-variance t-tests instead of Welch");
        sub->add_option("--threshold", threshold_override,
                        "Override the gender-inference threshold");
        sub->add_option("--max-in-flight", max_in_flight_override,
                        "Override the per-provider worker bound");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    const std::string stage = app.get_subcommands().front()->get_name();
    try {
        RunConfig config = RunConfig::load(config_path);
        if (!out_override.empty()) {
            config.out_dir = out_override;
        }
        if (alpha_override) {
            config.alpha = *alpha_override;
        }
        if (threshold_override) {
            config.gender_threshold = *threshold_override;
        }
        if (max_in_flight_override) {
            config.max_in_flight = *max_in_flight_override;
        }
        if (equal_var_flag) {
            config.equal_var = true;
        }
        config.validate();

        pipeline::StageOptions options;
        options.model_filter = split_csv_list(models_csv);
        // Reject unknown --models names up front; the filter's validity does
        // not depend on which intermediates already exist.
        for (const auto& wanted : options.model_filter) {
            const bool known =
                std::any_of(config.providers.begin(), config.providers.end(),
                            [&](const auto& p) { return p.name == wanted; });
            if (!known) {
                throw ConfigError("config: --models names unknown provider '" + wanted + "'");
            }
        }

        if (stage == "gender") {
            print_outcome(pipeline::run_gender(config));
            print_gender_counts(config);
        } else if (stage == "rewrite") {
            print_outcome(pipeline::run_rewrite(config, options));
        } else if (stage == "extract") {
            print_outcome(pipeline::run_extract(config, options));
        } else if (stage == "compare") {
            print_outcome(pipeline::run_compare(config, options));
        } else if (stage == "report") {
            print_outcome(pipeline::run_report(config, options));
        } else {
            for (const auto& outcome : pipeline::run_all(config, options)) {
                print_outcome(outcome);
            }
            print_gender_counts(config);
        }
        return kExitOk;
    } catch (const rewrite::CredentialError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCredential;
    } catch (const pipeline::MissingIntermediateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingIntermediate;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const lexicon::DictionaryError& e) {
        std::cerr << "error: dictionary " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        const std::string message = e.what();
        std::cerr << "error: " << message << "\n";
        return looks_like_input_error(message) ? kExitInput : kExitOther;
    }
}

}  // namespace stylegap::cli
