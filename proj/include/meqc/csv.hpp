#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace meqc::csv {

using Record = std::vector<std::string>;

// 12 significant digits, '.' decimal separator, no locale.
std::string format_number(double value);

// Quotes a field when it holds a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Header plus records, LF line endings.
std::string render(const Record& header, const std::vector<Record>& records);

std::vector<Record> parse(std::string_view text);

/// Writes to `path`.partial and renames on success. On failure the partial
/// file is left behind as a marker and an Error is thrown.
void write_file(const std::string& path, const std::string& contents);

}  // namespace meqc::csv
