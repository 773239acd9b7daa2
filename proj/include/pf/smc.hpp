#ifndef PF_SMC_HPP
#define PF_SMC_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pf/core.hpp"
#include "pf/model.hpp"
#include "pf/rand.hpp"
#include "pf/resamplers.hpp"

/**
 * \file
 * \brief Bootstrap, SISR and auxiliary particle filters.
 *
 * Every step follows the same bookkeeping:
 *
 *  1. propagate particles and add the log incremental weight to each log-weight;
 *  2. last_log_cond_like = log_sum_exp(new) - log_sum_exp(old), with old = log N at t = 0;
 *  3. expectations of the test functions under the normalized pre-resampling weights;
 *  4. resample if the policy's trigger fires (log-weights then reset to 0).
 *
 * Because step 2 only uses differences of log-sum-exps, the estimate does not depend on the
 * constant the weights are reset to, and summing it over time gives the log of the product
 * estimator of the marginal likelihood.
 *
 * A step either commits completely or throws (WeightCollapse, ShapeMismatch, ...) leaving the
 * state as it was, so no NaN ever reaches the ensemble.
 */

namespace pf {

/// Maps a state to a matrix of fixed shape; its filtering expectation is reported each step.
template <int Dx>
using TestFunction = std::function<DynMat(const Vec<Dx>&)>;

template <int Dx>
using TestFunctions = std::vector<TestFunction<Dx>>;

template <int Dx>
struct FilterState {
  explicit FilterState(std::size_t num_particles) : ensemble(num_particles) {}

  ParticleEnsemble<Dx> ensemble;
  /// Observations processed so far; the next step filters y_time.
  std::size_t time = 0;
  real last_log_cond_like = 0;
  /// Running sum of last_log_cond_like.
  real log_marginal_like = 0;
  /// ESS of the pre-resampling weights of the latest step.
  real last_ess = 0;
  bool resampled = false;
  std::vector<DynMat> expectations;
};

template <int Dx>
const std::vector<DynMat>& get_expectations(const FilterState<Dx>& state) {
  if (state.time == 0) throw NotYetFiltered();
  return state.expectations;
}

template <int Dx>
real get_log_cond_like(const FilterState<Dx>& state) {
  if (state.time == 0) throw NotYetFiltered();
  return state.last_log_cond_like;
}

namespace detail {

// Rejects NaN and +inf increments and the all -inf case, then returns log_sum_exp.
inline real checked_log_sum_exp(std::span<const real> log_weights, std::size_t step, const char* stage) {
  bool any_finite = false;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const real lw = log_weights[i];
    if (std::isnan(lw) || lw == std::numeric_limits<real>::infinity()) {
      throw WeightCollapse(step, std::string(stage) + ": non-finite log-weight at particle " + std::to_string(i));
    }
    any_finite = any_finite || lw > -std::numeric_limits<real>::infinity();
  }
  if (!any_finite) {
    throw WeightCollapse(step, std::string(stage) + ": every particle has zero weight");
  }
  return log_sum_exp(log_weights);
}

template <int Dx>
std::vector<DynMat> weighted_expectations(std::span<const Vec<Dx>> samples, std::span<const real> weights,
                                          const TestFunctions<Dx>& hs, const std::vector<DynMat>& previous) {
  std::vector<DynMat> out;
  out.reserve(hs.size());
  const bool check_previous = !previous.empty();
  if (check_previous && previous.size() != hs.size()) {
    throw ShapeMismatch("number of test functions changed between steps");
  }
  for (std::size_t k = 0; k < hs.size(); ++k) {
    DynMat acc;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const DynMat value = hs[k](samples[i]);
      if (i == 0) {
        if (check_previous && (value.rows() != previous[k].rows() || value.cols() != previous[k].cols())) {
          throw ShapeMismatch("test function " + std::to_string(k) + " changed its output shape");
        }
        acc = DynMat::Zero(value.rows(), value.cols());
      } else if (value.rows() != acc.rows() || value.cols() != acc.cols()) {
        throw ShapeMismatch("test function " + std::to_string(k) + " changed its output shape");
      }
      acc += weights[i] * value;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// Steps 2-4 of the bookkeeping, committing the proposed ensemble into `state`.
template <int Dx>
void commit_step(FilterState<Dx>& state, std::vector<Vec<Dx>>& samples, std::vector<real>& log_weights,
                 real log_cond_like, const ResamplePolicy& policy, Prng& rng, const TestFunctions<Dx>& hs) {
  const std::vector<real> weights = normalized_weights(log_weights);
  std::vector<DynMat> expectations = weighted_expectations<Dx>(samples, weights, hs, state.expectations);
  const real ess = effective_sample_size(log_weights);

  std::copy(samples.begin(), samples.end(), state.ensemble.samples().begin());
  std::copy(log_weights.begin(), log_weights.end(), state.ensemble.log_weights().begin());
  state.last_log_cond_like = log_cond_like;
  state.log_marginal_like += log_cond_like;
  state.last_ess = ess;
  state.expectations = std::move(expectations);
  state.resampled = policy.trigger.should_resample(ess, state.ensemble.size());
  ++state.time;
  if (state.resampled) {
    resample(state.ensemble, policy.scheme, rng);
  }
}

template <class M>
void check_obs(const typename M::ObsVec& yt) {
  if (yt.size() != M::obs_dim) throw DimensionMismatch("observation has the wrong dimension");
  if (!yt.allFinite()) throw DimensionMismatch("observation has non-finite entries");
}

template <int Dx>
real log_num_particles(const FilterState<Dx>& state) {
  return std::log(static_cast<real>(state.ensemble.size()));
}

}  // namespace detail

/**
 * \brief One step of sequential importance sampling with resampling.
 *
 * t = 0: X_0^i ~ q0(. | y0), logw_i = log g(y0 | X) + (log mu(X) - log q0(X | y0)).
 * t > 0: X_t^i ~ q(. | x_{t-1}^i, yt), logw_i += log g(yt | X) + (log f(X | x) - log q(X | x, yt)).
 *
 * The density ratio is grouped before adding log g so that a proposal equal to the transition
 * contributes exactly zero.
 */
template <SisrModel M>
void sisr_step(FilterState<M::state_dim>& state, const M& model, const typename M::ObsVec& yt,
               const ResamplePolicy& policy, Prng& rng, const TestFunctions<M::state_dim>& hs = {}) {
  detail::check_obs<M>(yt);
  const std::size_t n = state.ensemble.size();
  const auto old_samples = state.ensemble.samples();
  const auto old_weights = state.ensemble.log_weights();

  std::vector<typename M::StateVec> samples(n);
  std::vector<real> log_weights(n);
  real old_norm = 0;
  if (state.time == 0) {
    old_norm = detail::log_num_particles(state);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = model.q1_samp(yt, rng);
      log_weights[i] = model.log_g_ev(yt, samples[i]) + (model.log_mu_ev(samples[i]) - model.log_q1_ev(samples[i], yt));
    }
  } else {
    old_norm = log_sum_exp(old_weights);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = model.q_samp(old_samples[i], yt, rng);
      log_weights[i] = old_weights[i] + (model.log_g_ev(yt, samples[i]) + (model.log_f_ev(samples[i], old_samples[i]) -
                                                                           model.log_q_ev(samples[i], old_samples[i], yt)));
    }
  }
  const real new_norm = detail::checked_log_sum_exp(log_weights, state.time, "sisr");
  detail::commit_step(state, samples, log_weights, new_norm - old_norm, policy, rng, hs);
}

/// Bootstrap filter step: proposal = transition, so the increment is log g alone.
template <BootstrapModel M>
void bootstrap_step(FilterState<M::state_dim>& state, const M& model, const typename M::ObsVec& yt,
                    const ResamplePolicy& policy, Prng& rng, const TestFunctions<M::state_dim>& hs = {}) {
  detail::check_obs<M>(yt);
  const std::size_t n = state.ensemble.size();
  const auto old_samples = state.ensemble.samples();
  const auto old_weights = state.ensemble.log_weights();

  std::vector<typename M::StateVec> samples(n);
  std::vector<real> log_weights(n);
  real old_norm = 0;
  if (state.time == 0) {
    old_norm = detail::log_num_particles(state);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = model.mu_samp(rng);
      log_weights[i] = model.log_g_ev(yt, samples[i]);
    }
  } else {
    old_norm = log_sum_exp(old_weights);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = model.f_samp(old_samples[i], rng);
      log_weights[i] = old_weights[i] + model.log_g_ev(yt, samples[i]);
    }
  }
  const real new_norm = detail::checked_log_sum_exp(log_weights, state.time, "bootstrap");
  detail::commit_step(state, samples, log_weights, new_norm - old_norm, policy, rng, hs);
}

/**
 * \brief Auxiliary particle filter step (Pitt-Shephard two-stage construction).
 *
 * t = 0 is the SISR initial step. For t > 0:
 *  - first stage:  lambda_i = logw_i + log g(yt | prop_mu(x_{t-1}^i));
 *  - ancestors a_i drawn from normalized lambda with the policy's scheme;
 *  - X_t^i ~ f(. | x_{t-1}^{a_i});
 *  - second stage: logw_i = log g(yt | X_t^i) - log g(yt | prop_mu(x_{t-1}^{a_i})).
 *
 * last_log_cond_like = [lse(lambda) - lse(old)] + [lse(second) - log N]. The first-stage
 * selection always happens; the trigger then decides about an extra resample after the
 * second stage.
 */
template <ApfModel M>
void apf_step(FilterState<M::state_dim>& state, const M& model, const typename M::ObsVec& yt,
              const ResamplePolicy& policy, Prng& rng, const TestFunctions<M::state_dim>& hs = {}) {
  detail::check_obs<M>(yt);
  const std::size_t n = state.ensemble.size();
  const auto old_samples = state.ensemble.samples();
  const auto old_weights = state.ensemble.log_weights();

  std::vector<typename M::StateVec> samples(n);
  std::vector<real> log_weights(n);
  if (state.time == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = model.q1_samp(yt, rng);
      log_weights[i] = model.log_g_ev(yt, samples[i]) + (model.log_mu_ev(samples[i]) - model.log_q1_ev(samples[i], yt));
    }
    const real new_norm = detail::checked_log_sum_exp(log_weights, state.time, "apf");
    detail::commit_step(state, samples, log_weights, new_norm - detail::log_num_particles(state), policy, rng, hs);
    return;
  }

  const real old_norm = log_sum_exp(old_weights);
  std::vector<real> look_ahead(n);
  std::vector<real> first_stage(n);
  for (std::size_t i = 0; i < n; ++i) {
    look_ahead[i] = model.log_g_ev(yt, model.prop_mu(old_samples[i]));
    first_stage[i] = old_weights[i] + look_ahead[i];
  }
  const real first_norm = detail::checked_log_sum_exp(first_stage, state.time, "apf first stage");
  const std::vector<real> first_weights = normalized_weights(first_stage);
  AncestorIndices ancestors(n);
  draw_ancestors(policy.scheme, first_weights, rng, ancestors);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = ancestors[i];
    samples[i] = model.f_samp(old_samples[a], rng);
    log_weights[i] = model.log_g_ev(yt, samples[i]) - look_ahead[a];
  }
  const real second_norm = detail::checked_log_sum_exp(log_weights, state.time, "apf second stage");
  const real log_cond_like = (first_norm - old_norm) + (second_norm - detail::log_num_particles(state));
  detail::commit_step(state, samples, log_weights, log_cond_like, policy, rng, hs);
}

struct BootstrapAlgorithm {};
struct SisrAlgorithm {};
struct AuxiliaryAlgorithm {};

/// Dispatches one step of the algorithm named by `Algo`.
template <class Algo, class M>
void filter_step(FilterState<M::state_dim>& state, const M& model, const typename M::ObsVec& yt,
                 const ResamplePolicy& policy, Prng& rng, const TestFunctions<M::state_dim>& hs = {}) {
  if constexpr (std::same_as<Algo, BootstrapAlgorithm>) {
    bootstrap_step(state, model, yt, policy, rng, hs);
  } else if constexpr (std::same_as<Algo, SisrAlgorithm>) {
    sisr_step(state, model, yt, policy, rng, hs);
  } else {
    static_assert(std::same_as<Algo, AuxiliaryAlgorithm>, "unknown filtering algorithm");
    apf_step(state, model, yt, policy, rng, hs);
  }
}

/**
 * \brief A model bound to one algorithm, one resampling policy and its own random stream.
 *
 *     pf::BootstrapFilter<pf::SvolModel> bs(model, 5000, policy, pf::Prng(1));
 *     for (const auto& y : data) {
 *       bs.filter(y, hs);
 *       std::cout << bs.expectations()[0] << ", " << bs.log_cond_like() << "\n";
 *     }
 */
template <class Algo, class M>
class ParticleFilter {
 public:
  using StateVec = typename M::StateVec;
  using ObsVec = typename M::ObsVec;

  ParticleFilter(M model, std::size_t num_particles, ResamplePolicy policy, Prng rng)
      : model_(std::move(model)), policy_(policy), rng_(std::move(rng)), state_(num_particles) {}

  void filter(const ObsVec& yt, const TestFunctions<M::state_dim>& hs = {}) {
    filter_step<Algo>(state_, model_, yt, policy_, rng_, hs);
  }

  [[nodiscard]] const std::vector<DynMat>& expectations() const { return get_expectations(state_); }
  [[nodiscard]] real log_cond_like() const { return get_log_cond_like(state_); }
  [[nodiscard]] real log_marginal_like() const { return state_.log_marginal_like; }

  [[nodiscard]] const FilterState<M::state_dim>& state() const noexcept { return state_; }
  [[nodiscard]] const M& model() const noexcept { return model_; }
  [[nodiscard]] const ResamplePolicy& policy() const noexcept { return policy_; }

 private:
  M model_;
  ResamplePolicy policy_;
  Prng rng_;
  FilterState<M::state_dim> state_;
};

template <class M>
using BootstrapFilter = ParticleFilter<BootstrapAlgorithm, M>;
template <class M>
using SisrFilter = ParticleFilter<SisrAlgorithm, M>;
template <class M>
using AuxiliaryFilter = ParticleFilter<AuxiliaryAlgorithm, M>;

}  // namespace pf

#endif  // PF_SMC_HPP
