#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace devlore::text {

/// Splits on '\n'. A trailing newline does not produce an empty final element.
/// Carriage returns are kept as part of the line.
std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::string_view ltrim(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

/// Token estimate used everywhere a budget is checked: ceil(chars / 4).
std::size_t estimate_tokens(std::string_view text);

/// Largest prefix of `s` no longer than `max_bytes` that does not split a UTF-8 sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
/// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// POSIX single-quote escaping for /bin/sh.
std::string shell_quote(std::string_view s);

}  // namespace devlore::text
