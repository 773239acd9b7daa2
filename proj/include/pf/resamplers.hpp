#ifndef PF_RESAMPLERS_HPP
#define PF_RESAMPLERS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "pf/core.hpp"
#include "pf/rand.hpp"

namespace pf {

using AncestorIndices = std::vector<std::size_t>;

/**
 * \brief Fills `out` with N = out.size() ancestor indices drawn from a probability vector.
 *
 * The weight vector may have any length K >= 1; inside a filter K = N.
 *
 * - Multinomial: N iid inversions, one uniform each, indices in draw order.
 * - Stratified: point (i + U_i) / N per stratum, sorted output, N uniforms.
 * - Systematic: points (i + U) / N for one shared U, sorted output, one uniform.
 * - Residual: floor(N w_i) copies of i in index order, then multinomial draws on the
 *   residual fractions for the remaining slots. No uniform is consumed when the floor
 *   stage already fills all N slots.
 *
 * Index i is selected by a point u when C_{i-1} <= u < C_i (cumulative weights), so
 * zero-weight particles are never chosen.
 *
 * Throws DegenerateWeights unless the weights are finite, nonnegative and sum to 1 within 1e-9.
 */
void draw_ancestors(ResampleScheme scheme, std::span<const real> weights, Prng& rng,
                    std::span<std::size_t> out);

/// N = weights.size() draws.
[[nodiscard]] AncestorIndices draw_ancestors(ResampleScheme scheme, std::span<const real> weights, Prng& rng);

/// Number of times each of `n` particles appears in `ancestors`.
[[nodiscard]] std::vector<std::size_t> offspring_counts(std::span<const std::size_t> ancestors, std::size_t n);

/// Replaces samples[i] by samples[ancestor[i]] and resets every log-weight to 0.
template <int Dx>
void resample(ParticleEnsemble<Dx>& ensemble, ResampleScheme scheme, Prng& rng) {
  const std::size_t n = ensemble.size();
  const std::vector<real> weights = normalized_weights(ensemble.log_weights());
  AncestorIndices ancestors(n);
  draw_ancestors(scheme, weights, rng, ancestors);

  const auto samples = ensemble.samples();
  std::vector<Vec<Dx>> survivors;
  survivors.reserve(n);
  for (const std::size_t a : ancestors) {
    survivors.push_back(samples[a]);
  }
  std::copy(survivors.begin(), survivors.end(), samples.begin());
  for (real& lw : ensemble.log_weights()) {
    lw = 0;
  }
}

}  // namespace pf

#endif  // PF_RESAMPLERS_HPP
