#ifndef PF_CORE_HPP
#define PF_CORE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pf/config.hpp"
#include "pf/errors.hpp"

/**
 * \file
 * \brief Weighted particle ensembles, log-domain weight arithmetic and the resampling policy.
 *
 * All weights are kept as natural logarithms of unnormalized importance weights. Nothing in the
 * library ever exponentiates a raw log-weight without first shifting by the maximum.
 */

namespace pf {

/// log(sum(exp(v))) by max-shift. Throws AllWeightsDegenerate if v is empty or all -inf.
[[nodiscard]] real log_sum_exp(std::span<const real> log_weights);

/// (sum w)^2 / sum w^2, evaluated from log-weights. Result lies in [1, N].
[[nodiscard]] real effective_sample_size(std::span<const real> log_weights);

/// exp(v_i - log_sum_exp(v)) written into `out` (same length as the input).
void normalized_weights(std::span<const real> log_weights, std::span<real> out);

[[nodiscard]] std::vector<real> normalized_weights(std::span<const real> log_weights);

/// N state vectors with their unnormalized log-weights. N never changes after construction.
template <int Dx>
class ParticleEnsemble {
 public:
  using StateVec = Vec<Dx>;

  explicit ParticleEnsemble(std::size_t num_particles)
      : samples_(num_particles, StateVec::Zero()), log_weights_(num_particles, real{0}) {
    if (num_particles == 0) {
      throw InvalidParams("particle ensemble needs at least one particle");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }

  [[nodiscard]] std::span<StateVec> samples() noexcept { return samples_; }
  [[nodiscard]] std::span<const StateVec> samples() const noexcept { return samples_; }

  [[nodiscard]] std::span<real> log_weights() noexcept { return log_weights_; }
  [[nodiscard]] std::span<const real> log_weights() const noexcept { return log_weights_; }

 private:
  std::vector<StateVec> samples_;
  std::vector<real> log_weights_;
};

enum class ResampleScheme { Multinomial, Residual, Stratified, Systematic };

/// When a filter resamples after its weight update.
class ResampleTrigger {
 public:
  enum class Kind { Always, Never, EssBelow };

  static constexpr ResampleTrigger always() noexcept { return ResampleTrigger(Kind::Always, 1); }
  static constexpr ResampleTrigger never() noexcept { return ResampleTrigger(Kind::Never, 0); }
  /// Resample when ESS < ratio * N. Requires ratio in (0, 1].
  static ResampleTrigger ess_below(real ratio);

  [[nodiscard]] constexpr Kind kind() const noexcept { return kind_; }
  [[nodiscard]] constexpr real ratio() const noexcept { return ratio_; }

  [[nodiscard]] bool should_resample(real ess, std::size_t num_particles) const noexcept;

  friend constexpr bool operator==(const ResampleTrigger&, const ResampleTrigger&) = default;

 private:
  constexpr ResampleTrigger(Kind kind, real ratio) noexcept : kind_(kind), ratio_(ratio) {}

  Kind kind_;
  real ratio_;
};

struct ResamplePolicy {
  ResampleScheme scheme = ResampleScheme::Multinomial;
  ResampleTrigger trigger = ResampleTrigger::ess_below(real{0.5});
};

/// "multinomial" | "residual" | "stratified" | "systematic". Throws InvalidParams otherwise.
[[nodiscard]] ResampleScheme parse_scheme(std::string_view name);
[[nodiscard]] std::string to_string(ResampleScheme scheme);

/// "always" | "never" | "ess:<ratio>". Throws InvalidParams otherwise.
[[nodiscard]] ResampleTrigger parse_trigger(std::string_view text);
[[nodiscard]] std::string to_string(const ResampleTrigger& trigger);

}  // namespace pf

#endif  // PF_CORE_HPP
