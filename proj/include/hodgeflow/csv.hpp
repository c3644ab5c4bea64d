// Minimal RFC 4180 reading and writing: comma delimiter, double-quoted fields,
// embedded quotes doubled, newlines allowed inside quotes.
#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hodgeflow {

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record into `fields`. Returns false at end of input.
  // Throws std::runtime_error on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  // Line on which the last record started (1-based).
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t current_line_ = 1;
  std::size_t record_line_ = 0;
};

// Maps header names to column positions.
class CsvHeader {
 public:
  explicit CsvHeader(std::vector<std::string> names);
  std::optional<std::size_t> find(std::string_view name) const;
  // Throws std::runtime_error naming the missing column.
  std::size_t require(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

// Shortest decimal that round-trips.
std::string format_double(double value);

// Strict numeric parses; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string trim(std::string_view text);

}  // namespace hodgeflow
