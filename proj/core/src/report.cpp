#include "cenn/report.hpp"

#include "cenn/common.hpp"

#include <cstdio>
#include <sstream>

namespace cenn {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size())
    throw Error(ErrorKind::shape_mismatch, "report",
                "row has " + std::to_string(row.size()) + " cells, header has " + std::to_string(header.size()));
  rows.push_back(std::move(row));
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void join(std::ostringstream& os, const std::vector<std::string>& cells, const char* sep, bool quote) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << sep;
    os << (quote ? csv_cell(cells[i]) : cells[i]);
  }
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream os;
  join(os, header, ",", true);
  os << '\n';
  for (const auto& r : rows) {
    join(os, r, ",", true);
    os << '\n';
  }
  return os.str();
}

std::string Table::to_markdown() const {
  std::ostringstream os;
  os << "| ";
  join(os, header, " | ", false);
  os << " |\n|";
  for (std::size_t i = 0; i < header.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& r : rows) {
    os << "| ";
    join(os, r, " | ", false);
    os << " |\n";
  }
  return os.str();
}

}  // namespace cenn
