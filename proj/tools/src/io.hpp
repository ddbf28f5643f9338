#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace aptsense::cli {

// One rectangular result table plus free-form metadata.  CSV keeps the
// table only; JSON carries the metadata alongside columns/rows.
struct Table {
  using Cell = std::variant<double, long long, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json meta = nlohmann::json::object();

  void add_row(std::vector<Cell> cells);
  std::string to_csv() const;   // header + rows, LF line ends
  std::string to_json() const;  // meta fields + "columns" + "rows"
};

// 17-significant-digit scientific form; round-trips through strtod.
std::string format_double(double v);

// Parses "start:stop:count"; count >= 1, start < stop for count > 1.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  long long count = 0;
};
GridSpec parse_grid(const std::string& text);

// Expands to a strictly increasing grid; log spacing requires 0 < start.
std::vector<double> expand_grid(const GridSpec& spec, bool log_spacing);

// Parses "lo:hi" into a pair.
std::pair<double, double> parse_window(const std::string& text);

// Writes the rendered table to the path, or to stdout for "-".  The
// content is fully assembled before the first byte is written.
void write_output(const std::string& path, const std::string& content);

// Reads a whole file, or stdin for "-".
std::string read_input(const std::string& path);

}  // namespace aptsense::cli
