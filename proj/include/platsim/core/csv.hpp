#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "platsim/core/errors.hpp"

namespace platsim {

/// Minimal RFC 4180 reader: comma separated, double-quote escaping, LF or CRLF rows.
class CsvReader {
 public:
  explicit CsvReader(std::istream& is) : is_(&is) {}

  /// Reads the next record into `row`; returns false at end of input.
  bool next(std::vector<std::string>& row) {
    row.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = is_->get()) != std::char_traits<char>::eof()) {
      any = true;
      const char c = static_cast<char>(ch);
      if (in_quotes) {
        if (c == '"') {
          if (is_->peek() == '"') {
            field.push_back('"');
            is_->get();
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        row.push_back(std::move(field));
        last_terminated_ = true;
        return true;
      } else {
        field.push_back(c);
      }
    }
    if (!any) return false;
    if (in_quotes) fail(Errc::SchemaError, "unterminated quoted field");
    row.push_back(std::move(field));
    last_terminated_ = false;
    return true;
  }

  /// False when the final record was not terminated by a newline.
  bool ended_cleanly() const { return last_terminated_; }

 private:
  std::istream* is_;
  bool last_terminated_ = true;
};

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << '\n';
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    fail(Errc::SchemaError, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    fail(Errc::SchemaError, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace platsim
