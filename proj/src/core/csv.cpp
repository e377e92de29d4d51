#include "evfleet/core/csv.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "evfleet/core/types.hpp"

namespace evfleet::csv {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> SplitLine(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.emplace_back(Trim(line.substr(pos)));
      break;
    }
    out.emplace_back(Trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

double ParseDouble(std::string_view field, std::string_view what, int line_no) {
  double value = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(fmt::format("line {}: bad {} '{}'", line_no, what, field));
  }
  return value;
}

int ParseInt(std::string_view field, std::string_view what, int line_no) {
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("line {}: bad {} '{}'", line_no, what, field));
  }
  return value;
}

Reader::Reader(std::istream& in, std::vector<std::string> expected_header)
    : in_(in), width_(expected_header.size()) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const auto trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (SplitLine(trimmed) != expected_header) {
      throw ConfigError(fmt::format("line {}: expected header '{}'", line_no_,
                                    fmt::join(expected_header, ",")));
    }
    return;
  }
  throw ConfigError(fmt::format("missing header '{}'", fmt::join(expected_header, ",")));
}

bool Reader::Next(std::vector<std::string>& fields) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const auto trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    fields = SplitLine(trimmed);
    if (fields.size() != width_) {
      throw ConfigError(fmt::format("line {}: expected {} fields, got {}", line_no_, width_,
                                    fields.size()));
    }
    return true;
  }
  return false;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace evfleet::csv
