#pragma once

// Column tables and their CSV / JSON rendering.

#include <map>
#include <string>
#include <vector>

namespace formidex {

enum class Format { Csv, Json };

Format parse_format(const std::string& name);

struct Table {
  std::vector<std::string> columns;
  /// One vector per column, all of equal length.
  std::vector<std::vector<double>> data;
  /// Comment lines written before the header row (without the '#').
  std::vector<std::string> header_notes;
  /// Comment lines written after the last row.
  std::vector<std::string> footer_notes;
  /// Echoed under "config" in JSON output; values are kept as strings.
  std::vector<std::pair<std::string, std::string>> config;

  void add_column(std::string name, std::vector<double> values);
  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

/// printf("%.9g") with a '.' separator regardless of locale.
std::string format_number(double v);

std::string render_csv(const Table& t);
std::string render_json(const Table& t);
std::string render(const Table& t, Format f);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace formidex
