#include "pyramask/report.hpp"

#include <cmath>
#include <cstdio>

namespace pyramask {

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string fmt_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string fmt_percent(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt_fixed(100.0 * value, decimals) + "%";
}

std::string fmt_int(long value) { return std::to_string(value); }

std::string render_csv(const ReportTable& table) {
  std::string out;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_markdown(const std::vector<ReportTable>& tables) {
  std::string out;
  for (const ReportTable& table : tables) {
    if (!out.empty()) out += '\n';
    out += "## " + table.title + "\n\n";
    out += '|';
    for (const auto& c : table.columns) out += ' ' + c + " |";
    out += "\n|";
    for (size_t i = 0; i < table.columns.size(); ++i) out += " --- |";
    out += '\n';
    for (const auto& row : table.rows) {
      out += '|';
      for (const auto& cell : row) out += ' ' + cell + " |";
      out += '\n';
    }
  }
  return out;
}

}  // namespace pyramask
