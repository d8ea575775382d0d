#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylegap/config.hpp"
#include "stylegap/rewrite.hpp"

namespace stylegap::pipeline {

class MissingIntermediateError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageOutcome {
    std::string stage;
    bool skipped = false;
    std::vector<std::string> outputs;  // paths relative to out_dir
};

struct StageOptions {
    std::vector<std::string> model_filter;  // empty = all providers
    rewrite::Transport transport;           // test hook; null = real HTTP
};

// Stages persist their input fingerprints in <out>/stage_state.json and
// skip when the fingerprint matches and every output is present with the
// recorded hash. Outputs are written atomically.
StageOutcome run_gender(const RunConfig& config);
StageOutcome run_rewrite(const RunConfig& config, const StageOptions& options = {});
StageOutcome run_extract(const RunConfig& config, const StageOptions& options = {});
StageOutcome run_compare(const RunConfig& config, const StageOptions& options = {});
StageOutcome run_report(const RunConfig& config, const StageOptions& options = {});

// gender -> rewrite -> extract -> compare -> report, stopping at the first
// failure. Byte-identical to running the stages individually.
std::vector<StageOutcome> run_all(const RunConfig& config, const StageOptions& options = {});

// Output file names, shared between stages and tests.
std::filesystem::path gendered_corpus_path(const RunConfig& config);
std::filesystem::path gender_summary_path(const RunConfig& config);
std::filesystem::path variants_path(const RunConfig& config, const std::string& provider);
std::filesystem::path rewrite_report_path(const RunConfig& config);
std::filesystem::path features_path(const RunConfig& config, const std::string& variant);
std::filesystem::path compare_correlation_path(const RunConfig& config, const std::string& provider);
std::filesystem::path compare_ttest_path(const RunConfig& config);
std::filesystem::path report_dir(const RunConfig& config);

}  // namespace stylegap::pipeline
