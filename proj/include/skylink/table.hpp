#pragma once

#include <string>
#include <vector>

namespace skylink {

/// A parsed comma-separated file: `#` comment lines, one header row and data
/// rows kept as text. Numeric access parses on demand; empty cells read as NaN.
struct Table {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
  std::vector<double> numbers(const std::string& column_name) const;
};

Table parse_table(const std::string& text);
Table read_table(const std::string& path);

}  // namespace skylink
