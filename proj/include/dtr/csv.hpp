#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dtr/errors.hpp"

namespace dtr::csv {

/// Minimal reader for the plain numeric CSV files this project exchanges:
/// comma separated, no quoting, first line is a header.
class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!next_line(line)) throw InputError("'" + path + "' is empty (expected a header line)");
    header_ = split(line);
  }

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::string& path() const noexcept { return path_; }
  std::size_t line_number() const noexcept { return line_no_; }

  /// Reads the next non-empty record. Returns false at end of file.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    if (!next_line(line)) return false;
    fields = split(line);
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  std::int64_t to_int(std::string_view s) const {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("expected integer, got '" + std::string(s) + "'");
    return v;
  }

  double to_double(std::string_view s) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("expected number, got '" + std::string(s) + "'");
    return v;
  }

 private:
  bool next_line(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  static std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      out.emplace_back(b == std::string_view::npos ? std::string_view{} : field.substr(b, e - b + 1));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t line_no_ = 0;
};

/// Shortest round-trip decimal representation of a double.
inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ec == std::errc{} ? p : buf);
}

}  // namespace dtr::csv
