#pragma once

// Minimal RFC 4180 writer: CRLF line ends, fields quoted when needed,
// doubles printed in shortest round-trip form.

#include <cmath>
#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "tribeam/errors.hpp"

namespace tribeam {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> columns) : path_(path), columns_(std::move(columns)), os_(path) {
    if (!os_) throw IoError("cannot write " + path);
    row(columns_);
    rows_ = 0;
  }

  static std::string field(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  }
  static std::string field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_.size()) throw DataError("CSV row width does not match header of " + path_);
    for (std::size_t i = 0; i < fields.size(); ++i) os_ << (i ? "," : "") << field(fields[i]);
    os_ << "\r\n";
    if (!os_) throw IoError("write failed: " + path_);
    ++rows_;
  }

  const std::string& path() const { return path_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_; }

 private:
  std::string path_;
  std::vector<std::string> columns_;
  std::ofstream os_;
  std::size_t rows_ = 0;
};

}  // namespace tribeam
