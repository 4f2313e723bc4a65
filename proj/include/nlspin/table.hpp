#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nlspin {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

/// Numeric table with a fixed column schema.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws ValidationError if a row width differs from the schema.
  void validate() const;
};

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Header row plus one line per row, LF endings, round-trip exact floats.
std::string to_csv(const Table& table);
/// Array of {column: value} objects; NaN and infinities become null.
std::string to_json(const Table& table);

Table parse_csv(const std::string& text);
Table read_csv(const std::filesystem::path& path);

/// Writes text to path, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Writes the table in the requested format. With json_mirror, a CSV write
/// also produces the same data as <stem>.json next to it.
void emit_table(const Table& table, const std::filesystem::path& path, OutputFormat format,
                bool json_mirror = false);

}  // namespace nlspin
