#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pcnsim {

/// Comma-separated rows, fields trimmed; blank lines and lines starting
/// with '#' are skipped. No quoting support (none of our schemas need it).
std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text);

/// Locale-independent, round-trippable enough for reports ("%.10g").
std::string format_double(double value);

std::string read_text_file(const std::string& path);
/// Throws pcnsim::Error if the file cannot be written.
void write_text_file(const std::string& path, const std::string& contents);

} // namespace pcnsim
