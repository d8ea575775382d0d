#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace stylegap {

// 64-bit FNV-1a over raw bytes. Stable across runs and platforms; used for
// cache keys, stage fingerprints, and manifest content hashes.
std::uint64_t fnv1a64(std::string_view data);

// fnv1a64 rendered as 16 lowercase hex digits.
std::string hash_hex(std::string_view data);

// Whole-file read; throws std::runtime_error on failure.
std::string read_file(const std::filesystem::path& path);

// Hash of a file's content, or "missing" if the file does not exist.
std::string file_hash(const std::filesystem::path& path);

// Write-temp-then-rename so readers never observe a partial file.
// Creates parent directories as needed.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// Fixed-point formatting with round-half-to-even ties, as emitted into
// report CSVs. Non-finite values render as "NaN"; negative zero is
// normalized to zero.
std::string format_fixed(double v, int decimals);

// Shortest lossless representation ("%.17g") for full-precision tables.
std::string format_full(double v);

std::string to_lower_ascii(std::string_view s);

}  // namespace stylegap
