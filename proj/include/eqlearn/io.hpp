#pragma once

// Numeric CSV: one header row of column names, then rows of doubles written
// in shortest round-trip form.

#include "eqlearn/error.hpp"
#include "eqlearn/types.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace eqlearn {

struct Table {
  std::vector<std::string> columns;
  Matrix values;

  /// Column position by name, -1 if absent.
  int find(std::string_view name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == name) return static_cast<int>(j);
    return -1;
  }
};

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Table read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedData, "missing header row");
  Table t;
  for (auto f : detail::split_fields(line)) {
    f = detail::trim(f);
    if (f.empty()) throw Error(ErrorCode::MalformedData, "empty column name");
    t.columns.emplace_back(f);
  }

  std::vector<double> flat;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != t.columns.size())
      throw Error(ErrorCode::MalformedData, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(t.columns.size()) + " fields");
    for (auto f : fields) {
      f = detail::trim(f);
      if (!f.empty() && f.front() == '+') f.remove_prefix(1);
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || f.empty())
        throw Error(ErrorCode::MalformedData, "line " + std::to_string(line_no) + ": bad number '" + std::string(f) + "'");
      flat.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::MalformedData, "no data rows");

  t.values.resize(static_cast<Index>(rows), static_cast<Index>(t.columns.size()));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < t.columns.size(); ++j)
      t.values(static_cast<Index>(i), static_cast<Index>(j)) = flat[i * t.columns.size() + j];
  if (!t.values.allFinite()) throw Error(ErrorCode::MalformedData, "non-finite value");
  return t;
}

inline Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedData, "cannot open " + path);
  return read_csv(in);
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
  out << '\n';
  for (Index i = 0; i < t.values.rows(); ++i) {
    for (Index j = 0; j < t.values.cols(); ++j) out << (j ? "," : "") << format_double(t.values(i, j));
    out << '\n';
  }
}

inline std::string to_csv_string(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace eqlearn
