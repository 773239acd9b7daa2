#include "pf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace pf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

real parse_field(std::string_view token, std::size_t line) {
  token = trim(token);
  if (token.empty()) {
    throw ParseError(line, "empty field");
  }
  if (token.front() == '+') token.remove_prefix(1);
  real value = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || end != token.data() + token.size()) {
    throw ParseError(line, "not a number: '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, "non-finite value: '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

ObservationSeries read_csv(std::istream& in, std::size_t dy) {
  if (dy == 0) throw DimensionMismatch("observation dimension must be positive");
  ObservationSeries series;
  std::string text;
  std::size_t line = 0;
  std::vector<real> fields;
  while (std::getline(in, text)) {
    ++line;
    std::string_view view(text);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty()) {
      throw ParseError(line, "empty line");
    }
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      fields.push_back(parse_field(view.substr(start, comma - start), line));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != dy) {
      throw DimensionMismatch("line " + std::to_string(line) + ": expected " + std::to_string(dy) +
                              " fields, found " + std::to_string(fields.size()));
    }
    series.emplace_back(Eigen::Map<const DynVec>(fields.data(), static_cast<Eigen::Index>(dy)));
  }
  if (in.bad()) throw IoError("read failure");
  return series;
}

ObservationSeries read_csv(const std::filesystem::path& path, std::size_t dy) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return read_csv(in, dy);
}

std::string format_real(real value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_row(std::ostream& out, std::span<const real> values) {
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) line += ", ";
    line += format_real(values[i]);
  }
  line += '\n';
  out << line;
  if (!out) throw IoError("write failure");
}

void write_header(std::ostream& out, std::span<const std::string_view> names) {
  std::string line;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) line += ", ";
    line += names[i];
  }
  line += '\n';
  out << line;
  if (!out) throw IoError("write failure");
}

}  // namespace pf
