#include "stylegap/config.hpp"

#include <set>
#include <utility>

#include <json.hpp>

#include "stylegap/util.hpp"

namespace stylegap {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_absolute() || base_dir.empty()) {
        return p;
    }
    return base_dir / p;
}

std::string require_string(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_string() || doc[key].get<std::string>().empty()) {
        throw ConfigError(std::string("config: missing string field '") + key + "'");
    }
    return doc[key].get<std::string>();
}

double number_or(const nlohmann::json& doc, const char* key, double fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    if (!doc[key].is_number()) {
        throw ConfigError(std::string("config: '") + key + "' must be a number");
    }
    return doc[key].get<double>();
}

}  // namespace

RunConfig RunConfig::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config: top-level value must be an object");
    }

    RunConfig config;
    config.config_hash = hash_hex(json_text);
    config.corpus = resolve(base_dir, require_string(doc, "corpus"));
    config.dictionary = resolve(base_dir, require_string(doc, "dictionary"));
    config.composites = resolve(base_dir, require_string(doc, "composites"));
    config.name_lexicon = resolve(base_dir, require_string(doc, "name_lexicon"));
    config.alpha = number_or(doc, "alpha", config.alpha);
    config.gender_threshold = number_or(doc, "gender_threshold", config.gender_threshold);
    config.max_in_flight =
        static_cast<int>(number_or(doc, "max_in_flight", config.max_in_flight));
    config.equal_var = doc.value("equal_var", false);
    config.cache_dir = resolve(base_dir, doc.value("cache_dir", std::string("cache")));
    config.out_dir = resolve(base_dir, doc.value("out_dir", std::string("out")));

    if (doc.contains("refusal_phrases")) {
        if (!doc["refusal_phrases"].is_array()) {
            throw ConfigError("config: 'refusal_phrases' must be an array of strings");
        }
        for (const auto& phrase : doc["refusal_phrases"]) {
            if (!phrase.is_string()) {
                throw ConfigError("config: 'refusal_phrases' must be an array of strings");
            }
            config.refusal_phrases.push_back(phrase.get<std::string>());
        }
    }

    if (!doc.contains("providers") || !doc["providers"].is_array() || doc["providers"].empty()) {
        throw ConfigError("config: 'providers' must be a non-empty array");
    }
    for (const auto& item : doc["providers"]) {
        if (!item.is_object()) {
            throw ConfigError("config: provider entries must be objects");
        }
        rewrite::ProviderConfig provider;
        provider.name = require_string(item, "name");
        provider.kind = require_string(item, "kind");
        provider.model = item.value("model", std::string{});
        provider.base_url = item.value("base_url", std::string{});
        provider.api_key_env = item.value("api_key_env", std::string{});
        provider.timeout_s = number_or(item, "timeout_s", provider.timeout_s);
        provider.max_attempts = static_cast<int>(number_or(item, "max_attempts",
                                                           provider.max_attempts));
        config.providers.push_back(std::move(provider));
    }

    config.validate();
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
    std::string text;
    try {
        text = read_file(file);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse(text, file.parent_path());
}

void RunConfig::validate() const {
    const std::pair<const char*, const std::filesystem::path*> inputs[] = {
        {"corpus", &corpus},
        {"dictionary", &dictionary},
        {"composites", &composites},
        {"name_lexicon", &name_lexicon},
    };
    for (const auto& [label, path] : inputs) {
        std::error_code ec;
        if (!std::filesystem::is_regular_file(*path, ec)) {
            throw ConfigError("config: " + std::string(label) + " file not found: " +
                              path->string());
        }
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ConfigError("config: alpha must be in (0, 1)");
    }
    if (!(gender_threshold > 0.5) || !(gender_threshold <= 1.0)) {
        throw ConfigError("config: gender_threshold must be in (0.5, 1]");
    }
    if (max_in_flight < 1) {
        throw ConfigError("config: max_in_flight must be at least 1");
    }
    std::set<std::string> names;
    for (const auto& provider : providers) {
        if (!names.insert(provider.name).second) {
            throw ConfigError("config: duplicate provider name '" + provider.name + "'");
        }
        if (provider.kind != "mock" && provider.kind != "anthropic" &&
            provider.kind != "gemini" && provider.kind != "mistral" &&
            provider.kind != "openai") {
            throw ConfigError("config: unknown provider kind '" + provider.kind + "' for '" +
                              provider.name + "'");
        }
        if (provider.max_attempts < 1) {
            throw ConfigError("config: max_attempts must be at least 1 for '" + provider.name +
                              "'");
        }
    }
}

}  // namespace stylegap
