#include "stylegap/gender.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

#include "stylegap/csv.hpp"
#include "stylegap/util.hpp"

namespace stylegap::gender {

std::string_view to_string(GenderLabel label) {
    switch (label) {
        case GenderLabel::Female:
            return "Female";
        case GenderLabel::Male:
            return "Male";
        case GenderLabel::MixedGender:
            return "Mixed-Gender";
        case GenderLabel::Unknown:
            return "Unknown";
    }
    return "Unknown";
}

std::optional<GenderLabel> label_from_string(std::string_view s) {
    if (s == "Female") {
        return GenderLabel::Female;
    }
    if (s == "Male") {
        return GenderLabel::Male;
    }
    if (s == "Mixed-Gender") {
        return GenderLabel::MixedGender;
    }
    if (s == "Unknown") {
        return GenderLabel::Unknown;
    }
    return std::nullopt;
}

namespace {

std::uint64_t parse_count(const std::string& field, std::size_t row) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw std::runtime_error("name lexicon: row " + std::to_string(row) +
                                 " has non-numeric count '" + field + "'");
    }
    return value;
}

}  // namespace

NameLexicon NameLexicon::parse(std::string_view csv_text) {
    NameLexicon lexicon;
    const auto rows = csv::parse(csv_text);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (r == 0 && !fields.empty() && fields[0] == "name") {
            continue;  // optional header
        }
        if (fields.size() != 3) {
            throw std::runtime_error("name lexicon: row " + std::to_string(r + 1) +
                                     " needs name,female_count,male_count");
        }
        if (fields[0].empty()) {
            throw std::runtime_error("name lexicon: row " + std::to_string(r + 1) +
                                     " has an empty name");
        }
        lexicon.add(to_lower_ascii(fields[0]),
                    {parse_count(fields[1], r + 1), parse_count(fields[2], r + 1)});
    }
    return lexicon;
}

NameLexicon NameLexicon::load(const std::filesystem::path& path) {
    return parse(read_file(path));
}

void NameLexicon::add(std::string name, NameCounts counts) {
    auto [it, inserted] = entries_.emplace(std::move(name), counts);
    if (!inserted) {
        it->second.female += counts.female;
        it->second.male += counts.male;
    }
}

std::optional<NameCounts> NameLexicon::lookup(std::string_view lowercase_name) const {
    auto it = entries_.find(std::string(lowercase_name));
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string first_name_key(std::string_view full_name) {
    // "Lastname, Firstname ..." -> take what follows the first comma.
    if (auto comma = full_name.find(','); comma != std::string_view::npos) {
        full_name = full_name.substr(comma + 1);
    }
    std::size_t start = 0;
    while (start < full_name.size() &&
           std::isspace(static_cast<unsigned char>(full_name[start])) != 0) {
        ++start;
    }
    std::size_t end = start;
    while (end < full_name.size() &&
           std::isspace(static_cast<unsigned char>(full_name[end])) == 0) {
        ++end;
    }
    std::string_view token = full_name.substr(start, end - start);
    while (!token.empty() && std::isalnum(static_cast<unsigned char>(token.front())) == 0 &&
           static_cast<unsigned char>(token.front()) < 0x80) {
        token.remove_prefix(1);
    }
    while (!token.empty() && std::isalnum(static_cast<unsigned char>(token.back())) == 0 &&
           static_cast<unsigned char>(token.back()) < 0x80) {
        token.remove_suffix(1);
    }
    return to_lower_ascii(token);
}

GenderLabel infer_name_gender(std::string_view full_name, const NameLexicon& lexicon,
                              double threshold) {
    if (!(threshold > 0.5) || !(threshold <= 1.0)) {
        throw std::invalid_argument("infer_name_gender: threshold must be in (0.5, 1]");
    }
    const std::string key = first_name_key(full_name);
    if (key.empty()) {
        return GenderLabel::Unknown;
    }
    const auto counts = lexicon.lookup(key);
    if (!counts) {
        return GenderLabel::Unknown;
    }
    const double total = static_cast<double>(counts->female) + static_cast<double>(counts->male);
    if (total == 0.0) {
        return GenderLabel::Unknown;
    }
    const double female_share = static_cast<double>(counts->female) / total;
    if (female_share >= threshold) {
        return GenderLabel::Female;
    }
    if (1.0 - female_share >= threshold) {
        return GenderLabel::Male;
    }
    return GenderLabel::Unknown;
}

GenderLabel classify_publication(const std::vector<GenderLabel>& author_genders) {
    bool any_female = false;
    bool any_male = false;
    for (GenderLabel g : author_genders) {
        any_female = any_female || g == GenderLabel::Female;
        any_male = any_male || g == GenderLabel::Male;
    }
    if (any_female && any_male) {
        return GenderLabel::MixedGender;
    }
    if (any_female) {
        return GenderLabel::Female;
    }
    if (any_male) {
        return GenderLabel::Male;
    }
    return GenderLabel::Unknown;
}

std::map<GenderLabel, std::size_t> summarize_gender_distribution(
    const std::vector<GenderLabel>& publication_labels) {
    std::map<GenderLabel, std::size_t> summary = {
        {GenderLabel::Female, 0},
        {GenderLabel::Male, 0},
        {GenderLabel::MixedGender, 0},
        {GenderLabel::Unknown, 0},
    };
    for (GenderLabel g : publication_labels) {
        ++summary[g];
    }
    return summary;
}

}  // namespace stylegap::gender
