#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stylegap::csv {

// RFC-4180 style: fields quoted only when they contain a comma, quote, or
// newline; embedded quotes doubled. Rows joined with LF.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

// Parses quoted and unquoted fields; accepts CRLF input, drops a trailing
// empty line. Throws std::runtime_error on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace stylegap::csv
