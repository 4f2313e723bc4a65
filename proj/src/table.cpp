#include "nlspin/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "nlspin/errors.hpp"

namespace nlspin {

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ValidationError("format must be 'csv' or 'json', got '" + text + "'");
}

void Table::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != columns.size()) {
      throw ValidationError("table row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " cells, schema has " +
                            std::to_string(columns.size()));
    }
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  table.validate();
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  table.validate();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isfinite(row[c])) {
        obj[table.columns[c]] = row[c];
      } else {
        obj[table.columns[c]] = nullptr;
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows.dump(2) + "\n";
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ValidationError("csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
  }
  return value;
}

}  // namespace

Table parse_csv(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.columns.empty()) {
      table.columns = split(line);
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_cell(cell, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw ValidationError("csv has no header row");
  table.validate();
  return table;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void emit_table(const Table& table, const std::filesystem::path& path, OutputFormat format,
                bool json_mirror) {
  if (format == OutputFormat::json) {
    write_text(path, to_json(table));
    return;
  }
  write_text(path, to_csv(table));
  if (json_mirror) {
    std::filesystem::path mirror = path;
    mirror.replace_extension(".json");
    write_text(mirror, to_json(table));
  }
}

}  // namespace nlspin
