#include "hodgeflow/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace hodgeflow {

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  int ch = in_.get();
  if (ch == EOF) return false;
  record_line_ = current_line_;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (;; ch = in_.get()) {
    if (quoted) {
      if (ch == EOF) {
        throw std::runtime_error(
            fmt::format("line {}: unterminated quoted field", record_line_));
      }
      if (ch == '"') {
        if (in_.peek() == '"') {
          field += '"';
          in_.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++current_line_;
        field += static_cast<char>(ch);
      }
      continue;
    }
    if (ch == EOF || ch == '\n') {
      if (ch == '\n') ++current_line_;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    }
    if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started = false;
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
      continue;
    }
    field_started = true;
    field += static_cast<char>(ch);
  }
}

CsvHeader::CsvHeader(std::vector<std::string> names) : names_(std::move(names)) {
  for (auto& n : names_) n = trim(n);
  // Strip a UTF-8 byte-order mark from the first column.
  if (!names_.empty() && names_[0].rfind("\xEF\xBB\xBF", 0) == 0) names_[0].erase(0, 3);
}

std::optional<std::size_t> CsvHeader::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvHeader::require(std::string_view name) const {
  if (auto pos = find(name)) return *pos;
  throw std::runtime_error(fmt::format("missing required column '{}'", name));
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{}", value);
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> parse_integer(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

}  // namespace hodgeflow
