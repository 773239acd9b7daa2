#ifndef PF_COMPARISON_HPP
#define PF_COMPARISON_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "pf/core.hpp"
#include "pf/models/svol.hpp"

namespace pf {

/// Bootstrap vs auxiliary vs SISR on the stochastic volatility model, one output row per observation.
struct ComparisonConfig {
  std::size_t particles = 5000;
  std::uint64_t seed = 1;
  ResamplePolicy policy{ResampleScheme::Multinomial, ResampleTrigger::always()};
  SvolParams params{};
};

inline constexpr std::array<std::string_view, 6> comparison_columns = {
    "bs_mean", "bs_log_cond_like", "apf_mean", "apf_log_cond_like", "sisr_mean", "sisr_log_cond_like"};

using ComparisonRow = std::array<real, 6>;

/// Random stream ids derived from the seed.
enum class StreamId : std::uint64_t { Data = 0, Bootstrap = 1, Auxiliary = 2, Sisr = 3 };

/// The three filters run side by side on `data`, each with its own stream.
/// Throws WeightCollapse (naming the step) if any filter loses all weight.
[[nodiscard]] std::vector<ComparisonRow> run_svol_comparison(std::span<const Vec<1>> data,
                                                             const ComparisonConfig& config);

/// Header line followed by one row per step.
void write_comparison(std::ostream& out, std::span<const ComparisonRow> rows);

/// Observations y_0..y_T of a simulated svol path, using the Data stream of `seed`.
[[nodiscard]] std::vector<Vec<1>> simulate_svol_observations(const SvolParams& params, std::size_t steps,
                                                             std::uint64_t seed);

}  // namespace pf

#endif  // PF_COMPARISON_HPP
