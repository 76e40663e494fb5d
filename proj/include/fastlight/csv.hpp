#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fastlight {

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;
};

/// Doubles use 17 significant digits; identical data gives identical bytes.
/// Throws ValidationError for ragged rows.
std::string format_csv(const CsvTable& table);

/// Writes format_csv(table) to `path` and returns its SHA-256 (hex).
/// Throws IoError naming the path.
std::string write_series(const std::string& path, const CsvTable& table);

std::string format_double(double v);

std::string sha256_hex(std::string_view bytes);

/// Throws IoError naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace fastlight
