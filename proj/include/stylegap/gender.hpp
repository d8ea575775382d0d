#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stylegap::gender {

enum class GenderLabel { Female, Male, MixedGender, Unknown };

std::string_view to_string(GenderLabel label);
std::optional<GenderLabel> label_from_string(std::string_view s);

struct NameCounts {
    std::uint64_t female = 0;
    std::uint64_t male = 0;
};

// First-name frequency table. CSV format: name,female_count,male_count
// (header row optional). Immutable after load; lookups are thread safe.
class NameLexicon {
public:
    static NameLexicon load(const std::filesystem::path& path);
    static NameLexicon parse(std::string_view csv_text);

    void add(std::string name, NameCounts counts);
    std::optional<NameCounts> lookup(std::string_view lowercase_name) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, NameCounts> entries_;
};

// Lookup key for a full author name: honors "Lastname, Firstname" by
// splitting on the comma first, then takes the first whitespace token,
// stripped of surrounding punctuation and lowercased.
std::string first_name_key(std::string_view full_name);

// Female when female_count/(female+male) >= threshold, Male symmetrically,
// Unknown otherwise or when the name is absent. Never returns MixedGender.
GenderLabel infer_name_gender(std::string_view full_name, const NameLexicon& lexicon,
                              double threshold);

// Female/Male when all resolved authors agree (and at least one resolved),
// MixedGender when both appear, Unknown when nobody resolved.
GenderLabel classify_publication(const std::vector<GenderLabel>& author_genders);

// Exact counts per label; values sum to the number of inputs.
std::map<GenderLabel, std::size_t> summarize_gender_distribution(
    const std::vector<GenderLabel>& publication_labels);

}  // namespace stylegap::gender
