#pragma once

#include <string>
#include <vector>

namespace cenn {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_number(double v);

/// Rows of text cells under a fixed header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  /// RFC 4180 quoting; lines end with '\n'.
  std::string to_csv() const;
  std::string to_markdown() const;
};

}  // namespace cenn
