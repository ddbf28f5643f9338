#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace aptsense::cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void Table::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns.size()) {
    throw std::logic_error("Table: row width does not match header");
  }
  rows.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* d = std::get_if<double>(&row[i])) {
        out += format_double(*d);
      } else if (const long long* n = std::get_if<long long>(&row[i])) {
        out += std::to_string(*n);
      } else {
        out += std::get<std::string>(row[i]);
      }
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  nlohmann::json j = meta;
  j["columns"] = columns;
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const auto& cell : row) {
      if (const double* d = std::get_if<double>(&cell)) {
        jrow.push_back(*d);  // non-finite values serialise as null
      } else if (const long long* n = std::get_if<long long>(&cell)) {
        jrow.push_back(*n);
      } else {
        jrow.push_back(std::get<std::string>(cell));
      }
    }
    jrows.push_back(std::move(jrow));
  }
  j["rows"] = std::move(jrows);
  return j.dump(2) + "\n";
}

GridSpec parse_grid(const std::string& text) {
  GridSpec spec;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lld%c", &spec.start, &spec.stop,
                  &spec.count, &extra) != 3) {
    throw std::invalid_argument("grid must be start:stop:count, got '" + text +
                                "'");
  }
  if (!std::isfinite(spec.start) || !std::isfinite(spec.stop)) {
    throw std::invalid_argument("grid bounds must be finite");
  }
  if (spec.count < 1 || spec.count > 100000000) {
    throw std::invalid_argument("grid count out of range");
  }
  if (spec.count > 1 && !(spec.start < spec.stop)) {
    throw std::invalid_argument("grid needs start < stop");
  }
  return spec;
}

std::vector<double> expand_grid(const GridSpec& spec, bool log_spacing) {
  std::vector<double> grid;
  grid.reserve(spec.count);
  if (spec.count == 1) {
    grid.push_back(spec.start);
    return grid;
  }
  if (log_spacing) {
    if (!(spec.start > 0.0)) {
      throw std::invalid_argument("log spacing requires start > 0");
    }
    const double la = std::log(spec.start), lb = std::log(spec.stop);
    for (long long i = 0; i < spec.count; ++i) {
      grid.push_back(std::exp(la + (lb - la) * i / double(spec.count - 1)));
    }
    // Pin the endpoints so they round-trip exactly.
    grid.front() = spec.start;
    grid.back() = spec.stop;
  } else {
    for (long long i = 0; i < spec.count; ++i) {
      grid.push_back(spec.start +
                     (spec.stop - spec.start) * i / double(spec.count - 1));
    }
    grid.front() = spec.start;
    grid.back() = spec.stop;
  }
  return grid;
}

std::pair<double, double> parse_window(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf%c", &lo, &hi, &extra) != 2) {
    throw std::invalid_argument("window must be lo:hi, got '" + text + "'");
  }
  return {lo, hi};
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw std::runtime_error("short write to '" + path + "'");
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open input file '" + path + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace aptsense::cli
