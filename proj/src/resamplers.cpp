#include "pf/resamplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pf {

namespace {

void validate_weights(std::span<const real> weights) {
  if (weights.empty()) {
    throw DegenerateWeights("empty weight vector");
  }
  real sum = 0;
  for (const real w : weights) {
    if (!std::isfinite(w) || w < 0) {
      throw DegenerateWeights("weights must be finite and nonnegative");
    }
    sum += w;
  }
  const real tol = std::max(real{1e-9}, 64 * static_cast<real>(weights.size()) *
                                            std::numeric_limits<real>::epsilon());
  if (std::abs(sum - 1) > tol) {
    throw DegenerateWeights("weights sum to " + std::to_string(sum) + ", not 1");
  }
}

struct Cumulative {
  std::vector<real> values;
  std::size_t last_positive = 0;

  explicit Cumulative(std::span<const real> weights) : values(weights.size()) {
    real running = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      running += weights[i];
      values[i] = running;
      if (weights[i] > 0) last_positive = i;
    }
  }

  [[nodiscard]] real total() const { return values.back(); }

  // Smallest i with u < C_i, never past the last positive weight.
  [[nodiscard]] std::size_t invert(real u) const {
    const auto end = values.begin() + static_cast<std::ptrdiff_t>(last_positive) + 1;
    const auto it = std::upper_bound(values.begin(), end, u);
    return it == end ? last_positive : static_cast<std::size_t>(it - values.begin());
  }
};

void multinomial(const Cumulative& cum, Prng& rng, std::span<std::size_t> out) {
  for (std::size_t& idx : out) {
    idx = cum.invert(rng.uniform01() * cum.total());
  }
}

// Sorted points (i + U_i) / N; `shared_u` selects the systematic variant.
void grid(const Cumulative& cum, Prng& rng, bool shared_u, std::span<std::size_t> out) {
  const auto n = static_cast<real>(out.size());
  const real total = cum.total();
  const real u_shared = shared_u ? rng.uniform01() : real{0};
  std::size_t j = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const real u_i = shared_u ? u_shared : rng.uniform01();
    const real point = (static_cast<real>(i) + u_i) / n * total;
    while (j < cum.last_positive && point >= cum.values[j]) {
      ++j;
    }
    out[i] = j;
  }
}

void residual(std::span<const real> weights, Prng& rng, std::span<std::size_t> out) {
  const std::size_t k = weights.size();
  const std::size_t n = out.size();
  const auto n_real = static_cast<real>(n);
  const real floor_cutoff = real{1e-15} * *std::max_element(weights.begin(), weights.end());

  std::vector<std::size_t> copies(k, 0);
  std::vector<real> remainder(k, 0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (weights[i] < floor_cutoff) continue;
    const real expected = n_real * weights[i];
    copies[i] = static_cast<std::size_t>(std::floor(expected));
    remainder[i] = std::max(real{0}, expected - static_cast<real>(copies[i]));
    assigned += copies[i];
  }
  // Rounding in n * w_i can overshoot by a copy in pathological inputs.
  for (std::size_t i = k; assigned > n && i-- > 0;) {
    while (copies[i] > 0 && assigned > n) {
      --copies[i];
      --assigned;
    }
  }

  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < copies[i]; ++c) {
      out[pos++] = i;
    }
  }
  if (pos == n) return;

  real remainder_total = 0;
  for (const real r : remainder) remainder_total += r;
  const Cumulative cum(remainder_total > 0 ? std::span<const real>(remainder) : weights);
  multinomial(cum, rng, out.subspan(pos));
}

}  // namespace

void draw_ancestors(ResampleScheme scheme, std::span<const real> weights, Prng& rng,
                    std::span<std::size_t> out) {
  validate_weights(weights);
  if (out.empty()) return;
  switch (scheme) {
    case ResampleScheme::Multinomial:
      multinomial(Cumulative(weights), rng, out);
      return;
    case ResampleScheme::Stratified:
      grid(Cumulative(weights), rng, false, out);
      return;
    case ResampleScheme::Systematic:
      grid(Cumulative(weights), rng, true, out);
      return;
    case ResampleScheme::Residual:
      residual(weights, rng, out);
      return;
  }
}

AncestorIndices draw_ancestors(ResampleScheme scheme, std::span<const real> weights, Prng& rng) {
  AncestorIndices out(weights.size());
  draw_ancestors(scheme, weights, rng, out);
  return out;
}

std::vector<std::size_t> offspring_counts(std::span<const std::size_t> ancestors, std::size_t n) {
  std::vector<std::size_t> counts(n, 0);
  for (const std::size_t a : ancestors) {
    if (a >= n) {
      throw DimensionMismatch("ancestor index out of range");
    }
    ++counts[a];
  }
  return counts;
}

}  // namespace pf
