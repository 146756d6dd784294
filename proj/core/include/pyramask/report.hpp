#pragma once

#include <string>
#include <vector>

namespace pyramask {

// Cells are pre-formatted strings: numbers are rendered once (fmt_*) and
// every output format prints the same bytes, so CSV and Markdown cannot
// drift apart on a numeric cell.
struct ReportTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string fmt_fixed(double value, int decimals);
// "12.34%"; infinity renders as "inf" (a zero baseline).
std::string fmt_percent(double value, int decimals);
std::string fmt_int(long value);

// RFC-4180-style: cells containing commas, quotes or newlines are quoted.
std::string render_csv(const ReportTable& table);
// All tables concatenated, each under an H2 heading.
std::string render_markdown(const std::vector<ReportTable>& tables);

}  // namespace pyramask
