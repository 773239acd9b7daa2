#ifndef PF_IO_HPP
#define PF_IO_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pf/config.hpp"
#include "pf/errors.hpp"

namespace pf {

/// One observation vector per CSV line.
using ObservationSeries = std::vector<DynVec>;

/**
 * \brief Reads headerless CSV: one row per line, `dy` comma-separated finite numbers.
 *
 * Parsing ignores the locale ('.' decimal point), allows blanks around fields and a trailing
 * '\r'. Errors carry one-based line numbers: ParseError for malformed, empty or non-finite
 * fields, DimensionMismatch for a wrong field count.
 */
[[nodiscard]] ObservationSeries read_csv(std::istream& in, std::size_t dy);

/// As above; throws FileNotFound if `path` cannot be opened.
[[nodiscard]] ObservationSeries read_csv(const std::filesystem::path& path, std::size_t dy);

/// Fixed-size view of a series. Throws DimensionMismatch if a row has another length.
template <int Dy>
[[nodiscard]] std::vector<Vec<Dy>> to_fixed(const ObservationSeries& series) {
  std::vector<Vec<Dy>> out;
  out.reserve(series.size());
  for (const auto& row : series) {
    if (row.size() != Dy) throw DimensionMismatch("observation row has the wrong dimension");
    out.emplace_back(row);
  }
  return out;
}

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_real(real value);

/// Writes values joined by ", " and a trailing '\n'. Throws IoError if the stream fails.
void write_row(std::ostream& out, std::span<const real> values);

void write_header(std::ostream& out, std::span<const std::string_view> names);

}  // namespace pf

#endif  // PF_IO_HPP
