#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "stylegap/rewrite.hpp"

namespace stylegap {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One JSON file drives the whole pipeline. Relative paths resolve against
// the config file's directory; out_dir and cache_dir may be overridden on
// the command line.
struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path dictionary;
    std::filesystem::path composites;
    std::filesystem::path name_lexicon;
    std::vector<rewrite::ProviderConfig> providers;
    double alpha = 0.05;
    double gender_threshold = 0.9;
    int max_in_flight = 4;
    std::filesystem::path cache_dir;
    std::filesystem::path out_dir;
    bool equal_var = false;
    std::vector<std::string> refusal_phrases;
    std::string config_hash;  // fingerprint of the loaded file content

    // Throws ConfigError on unreadable input paths, alpha outside (0,1),
    // threshold outside (0.5,1], or duplicate provider names.
    static RunConfig load(const std::filesystem::path& file);
    static RunConfig parse(std::string_view json_text, const std::filesystem::path& base_dir);

    void validate() const;
};

}  // namespace stylegap
