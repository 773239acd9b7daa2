#include "pf/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace pf {

namespace {

// Largest entry; rejects empty input, NaN, +inf and all -inf.
real checked_max(std::span<const real> v) {
  if (v.empty()) {
    throw AllWeightsDegenerate("empty log-weight vector");
  }
  real m = -std::numeric_limits<real>::infinity();
  for (const real x : v) {
    if (std::isnan(x)) {
      throw AllWeightsDegenerate("NaN log-weight");
    }
    if (x == std::numeric_limits<real>::infinity()) {
      throw AllWeightsDegenerate("+inf log-weight");
    }
    m = std::max(m, x);
  }
  if (m == -std::numeric_limits<real>::infinity()) {
    throw AllWeightsDegenerate("every log-weight is -inf");
  }
  return m;
}

}  // namespace

real log_sum_exp(std::span<const real> log_weights) {
  const real m = checked_max(log_weights);
  real sum = 0;
  for (const real x : log_weights) {
    sum += std::exp(x - m);
  }
  return m + std::log(sum);
}

real effective_sample_size(std::span<const real> log_weights) {
  const real m = checked_max(log_weights);
  real s1 = 0;
  real s2 = 0;
  for (const real x : log_weights) {
    const real w = std::exp(x - m);
    s1 += w;
    s2 += w * w;
  }
  const real ess = s1 * s1 / s2;
  return std::clamp(ess, real{1}, static_cast<real>(log_weights.size()));
}

void normalized_weights(std::span<const real> log_weights, std::span<real> out) {
  if (out.size() != log_weights.size()) {
    throw DimensionMismatch("normalized_weights: output length differs from input length");
  }
  const real m = checked_max(log_weights);
  real sum = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    out[i] = std::exp(log_weights[i] - m);
    sum += out[i];
  }
  for (real& w : out) {
    w /= sum;
  }
}

std::vector<real> normalized_weights(std::span<const real> log_weights) {
  std::vector<real> out(log_weights.size());
  normalized_weights(log_weights, out);
  return out;
}

ResampleTrigger ResampleTrigger::ess_below(real ratio) {
  if (!(ratio > 0 && ratio <= 1)) {
    throw InvalidParams("ESS trigger ratio must lie in (0, 1]");
  }
  return ResampleTrigger(Kind::EssBelow, ratio);
}

bool ResampleTrigger::should_resample(real ess, std::size_t num_particles) const noexcept {
  switch (kind_) {
    case Kind::Always:
      return true;
    case Kind::Never:
      return false;
    case Kind::EssBelow:
      return ess < ratio_ * static_cast<real>(num_particles);
  }
  return false;
}

ResampleScheme parse_scheme(std::string_view name) {
  if (name == "multinomial") return ResampleScheme::Multinomial;
  if (name == "residual") return ResampleScheme::Residual;
  if (name == "stratified") return ResampleScheme::Stratified;
  if (name == "systematic") return ResampleScheme::Systematic;
  throw InvalidParams("unknown resampling scheme: " + std::string(name));
}

std::string to_string(ResampleScheme scheme) {
  switch (scheme) {
    case ResampleScheme::Multinomial:
      return "multinomial";
    case ResampleScheme::Residual:
      return "residual";
    case ResampleScheme::Stratified:
      return "stratified";
    case ResampleScheme::Systematic:
      return "systematic";
  }
  return "unknown";
}

ResampleTrigger parse_trigger(std::string_view text) {
  if (text == "always") return ResampleTrigger::always();
  if (text == "never") return ResampleTrigger::never();
  constexpr std::string_view prefix = "ess:";
  if (text.starts_with(prefix)) {
    const std::string_view number = text.substr(prefix.size());
    double ratio = 0;
    const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), ratio);
    if (ec == std::errc{} && end == number.data() + number.size()) {
      return ResampleTrigger::ess_below(static_cast<real>(ratio));
    }
  }
  throw InvalidParams("unknown resampling criterion: " + std::string(text) +
                      " (expected always, never or ess:<ratio>)");
}

std::string to_string(const ResampleTrigger& trigger) {
  switch (trigger.kind()) {
    case ResampleTrigger::Kind::Always:
      return "always";
    case ResampleTrigger::Kind::Never:
      return "never";
    case ResampleTrigger::Kind::EssBelow: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), trigger.ratio());
      return "ess:" + std::string(buf, res.ptr);
    }
  }
  return "unknown";
}

}  // namespace pf
