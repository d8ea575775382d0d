#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stylegap/gender.hpp"

namespace stylegap::corpus {

struct CorpusRecord {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;
    gender::GenderLabel gender = gender::GenderLabel::Unknown;
};

// JSON-lines, one record per line with fields id/title/abstract/authors and
// optionally gender. Duplicate ids are an error (reported with line number).
std::vector<CorpusRecord> parse_jsonl(std::string_view text);
std::vector<CorpusRecord> read_jsonl(const std::filesystem::path& path);
std::string to_jsonl(const std::vector<CorpusRecord>& records, bool with_gender);
void write_jsonl(const std::filesystem::path& path, const std::vector<CorpusRecord>& records,
                 bool with_gender);

// Convenience importer: CSV with header id,title,abstract,authors where
// authors are separated by semicolons.
std::vector<CorpusRecord> read_csv(const std::filesystem::path& path);

}  // namespace stylegap::corpus
