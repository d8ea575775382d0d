#include "stylegap/corpus.hpp"

#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "stylegap/csv.hpp"
#include "stylegap/util.hpp"

namespace stylegap::corpus {

namespace {

std::string line_message(std::size_t line, const std::string& what) {
    return "corpus: line " + std::to_string(line) + ": " + what;
}

CorpusRecord record_from_json(const nlohmann::json& doc, std::size_t line) {
    if (!doc.is_object()) {
        throw std::runtime_error(line_message(line, "record must be a JSON object"));
    }
    for (const char* field : {"id", "title", "abstract"}) {
        if (!doc.contains(field) || !doc[field].is_string()) {
            throw std::runtime_error(
                line_message(line, std::string("missing string field '") + field + "'"));
        }
    }
    if (!doc.contains("authors") || !doc["authors"].is_array()) {
        throw std::runtime_error(line_message(line, "missing array field 'authors'"));
    }

    CorpusRecord record;
    record.id = doc["id"].get<std::string>();
    record.title = doc["title"].get<std::string>();
    record.abstract = doc["abstract"].get<std::string>();
    if (record.id.empty()) {
        throw std::runtime_error(line_message(line, "'id' must not be empty"));
    }
    for (const auto& author : doc["authors"]) {
        if (!author.is_string()) {
            throw std::runtime_error(line_message(line, "'authors' entries must be strings"));
        }
        record.authors.push_back(author.get<std::string>());
    }
    if (doc.contains("gender")) {
        if (!doc["gender"].is_string()) {
            throw std::runtime_error(line_message(line, "'gender' must be a string"));
        }
        const auto label = gender::label_from_string(doc["gender"].get<std::string>());
        if (!label) {
            throw std::runtime_error(line_message(
                line, "unrecognized gender label '" + doc["gender"].get<std::string>() + "'"));
        }
        record.gender = *label;
    }
    return record;
}

}  // namespace

std::vector<CorpusRecord> parse_jsonl(std::string_view text) {
    std::vector<CorpusRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line = end == std::string_view::npos
                                    ? text.substr(start)
                                    : text.substr(start, end - start);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (!line.empty()) {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw std::runtime_error(line_message(line_no, std::string("invalid JSON: ") +
                                                                   e.what()));
            }
            CorpusRecord record = record_from_json(doc, line_no);
            if (!seen_ids.insert(record.id).second) {
                throw std::runtime_error(
                    line_message(line_no, "duplicate record id '" + record.id + "'"));
            }
            records.push_back(std::move(record));
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return records;
}

std::vector<CorpusRecord> read_jsonl(const std::filesystem::path& path) {
    return parse_jsonl(read_file(path));
}

std::string to_jsonl(const std::vector<CorpusRecord>& records, bool with_gender) {
    std::string out;
    for (const auto& record : records) {
        nlohmann::ordered_json doc;
        doc["id"] = record.id;
        doc["title"] = record.title;
        doc["abstract"] = record.abstract;
        doc["authors"] = record.authors;
        if (with_gender) {
            doc["gender"] = std::string(gender::to_string(record.gender));
        }
        out += doc.dump();
        out.push_back('\n');
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<CorpusRecord>& records,
                 bool with_gender) {
    atomic_write_file(path, to_jsonl(records, with_gender));
}

std::vector<CorpusRecord> read_csv(const std::filesystem::path& path) {
    const auto rows = csv::parse(read_file(path));
    const std::vector<std::string> expected = {"id", "title", "abstract", "authors"};
    if (rows.empty() || rows.front() != expected) {
        throw std::runtime_error("corpus: CSV needs header id,title,abstract,authors");
    }
    std::vector<CorpusRecord> records;
    std::unordered_set<std::string> seen_ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (fields.size() != 4) {
            throw std::runtime_error("corpus: CSV row " + std::to_string(r + 1) +
                                     " needs 4 fields");
        }
        CorpusRecord record;
        record.id = fields[0];
        record.title = fields[1];
        record.abstract = fields[2];
        if (record.id.empty()) {
            throw std::runtime_error("corpus: CSV row " + std::to_string(r + 1) +
                                     " has an empty id");
        }
        if (!seen_ids.insert(record.id).second) {
            throw std::runtime_error("corpus: CSV row " + std::to_string(r + 1) +
                                     " duplicates id '" + record.id + "'");
        }
        std::size_t start = 0;
        const std::string& authors = fields[3];
        while (start <= authors.size() && !authors.empty()) {
            std::size_t semi = authors.find(';', start);
            std::string author = semi == std::string::npos
                                     ? authors.substr(start)
                                     : authors.substr(start, semi - start);
            while (!author.empty() && author.front() == ' ') {
                author.erase(author.begin());
            }
            while (!author.empty() && author.back() == ' ') {
                author.pop_back();
            }
            if (!author.empty()) {
                record.authors.push_back(std::move(author));
            }
            if (semi == std::string::npos) {
                break;
            }
            start = semi + 1;
        }
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace stylegap::corpus
