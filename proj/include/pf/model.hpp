#ifndef PF_MODEL_HPP
#define PF_MODEL_HPP

#include <concepts>

#include "pf/config.hpp"
#include "pf/rand.hpp"

/**
 * \file
 * \brief Capability interfaces a state-space model provides to the filters.
 *
 * A model is a value type with static state and observation dimensions. Each filter asks for
 * the smallest set of density evaluators and samplers it needs:
 *
 * | method                   | meaning                                   |
 * |--------------------------|-------------------------------------------|
 * | log_mu_ev(x0)            | log mu(x0), initial state density         |
 * | mu_samp(rng)             | x0 ~ mu                                   |
 * | log_g_ev(yt, xt)         | log g(yt | xt), observation density       |
 * | g_samp(xt, rng)          | yt ~ g(. | xt)                            |
 * | log_f_ev(xt, xtm1)       | log f(xt | xtm1), transition density      |
 * | f_samp(xtm1, rng)        | xt ~ f(. | xtm1)                          |
 * | q1_samp(y0, rng)         | x0 ~ q0(. | y0), first proposal           |
 * | log_q1_ev(x0, y0)        | log q0(x0 | y0)                           |
 * | q_samp(xtm1, yt, rng)    | xt ~ q(. | xtm1, yt), later proposals     |
 * | log_q_ev(xt, xtm1, yt)   | log q(xt | xtm1, yt)                      |
 * | prop_mu(xtm1)            | representative point E[xt | xtm1]         |
 *
 * Every log-density must include its normalizing constant: likelihood estimates are absolute,
 * not relative. A log-density may return -inf outside its support.
 */

namespace pf {

template <class M>
concept StateSpaceModel = requires {
  { M::state_dim } -> std::convertible_to<int>;
  { M::obs_dim } -> std::convertible_to<int>;
  typename M::StateVec;
  typename M::ObsVec;
} && std::same_as<typename M::StateVec, Vec<M::state_dim>> && std::same_as<typename M::ObsVec, Vec<M::obs_dim>>;

/// Proposal equals the transition: needs mu and f samplers plus the observation density.
template <class M>
concept BootstrapModel = StateSpaceModel<M> && requires(const M& m, const typename M::StateVec& x,
                                                        const typename M::ObsVec& y, Prng& rng) {
  { m.mu_samp(rng) } -> std::same_as<typename M::StateVec>;
  { m.f_samp(x, rng) } -> std::same_as<typename M::StateVec>;
  { m.log_g_ev(y, x) } -> std::convertible_to<real>;
};

template <class M>
concept TransitionDensityModel = StateSpaceModel<M> && requires(const M& m, const typename M::StateVec& x) {
  { m.log_mu_ev(x) } -> std::convertible_to<real>;
  { m.log_f_ev(x, x) } -> std::convertible_to<real>;
};

/// The full sequential importance sampling with resampling interface.
template <class M>
concept SisrModel = StateSpaceModel<M> && requires(const M& m, const typename M::StateVec& x,
                                                   const typename M::ObsVec& y, Prng& rng) {
  { m.log_mu_ev(x) } -> std::convertible_to<real>;
  { m.q1_samp(y, rng) } -> std::same_as<typename M::StateVec>;
  { m.log_q1_ev(x, y) } -> std::convertible_to<real>;
  { m.log_g_ev(y, x) } -> std::convertible_to<real>;
  { m.log_f_ev(x, x) } -> std::convertible_to<real>;
  { m.q_samp(x, y, rng) } -> std::same_as<typename M::StateVec>;
  { m.log_q_ev(x, x, y) } -> std::convertible_to<real>;
};

/// Auxiliary particle filter: SISR-style start, then look-ahead through prop_mu.
template <class M>
concept ApfModel = StateSpaceModel<M> && requires(const M& m, const typename M::StateVec& x,
                                                  const typename M::ObsVec& y, Prng& rng) {
  { m.log_mu_ev(x) } -> std::convertible_to<real>;
  { m.q1_samp(y, rng) } -> std::same_as<typename M::StateVec>;
  { m.log_q1_ev(x, y) } -> std::convertible_to<real>;
  { m.log_g_ev(y, x) } -> std::convertible_to<real>;
  { m.f_samp(x, rng) } -> std::same_as<typename M::StateVec>;
  { m.prop_mu(x) } -> std::same_as<typename M::StateVec>;
};

/// Models that can generate synthetic data.
template <class M>
concept SimulatableModel = BootstrapModel<M> && requires(const M& m, const typename M::StateVec& x, Prng& rng) {
  { m.g_samp(x, rng) } -> std::same_as<typename M::ObsVec>;
};

/// Presents a bootstrap-capable model through the SISR interface with q0 := mu and q := f.
template <class M>
  requires BootstrapModel<M> && TransitionDensityModel<M>
class BootstrapProposal {
 public:
  static constexpr int state_dim = M::state_dim;
  static constexpr int obs_dim = M::obs_dim;
  using StateVec = typename M::StateVec;
  using ObsVec = typename M::ObsVec;

  explicit BootstrapProposal(M model) : model_(std::move(model)) {}

  [[nodiscard]] const M& base() const noexcept { return model_; }

  real log_mu_ev(const StateVec& x0) const { return model_.log_mu_ev(x0); }
  template <RandomSource R>
  StateVec q1_samp(const ObsVec& /*y0*/, R& rng) const {
    return model_.mu_samp(rng);
  }
  real log_q1_ev(const StateVec& x0, const ObsVec& /*y0*/) const { return model_.log_mu_ev(x0); }
  real log_g_ev(const ObsVec& yt, const StateVec& xt) const { return model_.log_g_ev(yt, xt); }
  real log_f_ev(const StateVec& xt, const StateVec& xtm1) const { return model_.log_f_ev(xt, xtm1); }
  template <RandomSource R>
  StateVec q_samp(const StateVec& xtm1, const ObsVec& /*yt*/, R& rng) const {
    return model_.f_samp(xtm1, rng);
  }
  real log_q_ev(const StateVec& xt, const StateVec& xtm1, const ObsVec& /*yt*/) const {
    return model_.log_f_ev(xt, xtm1);
  }

 private:
  M model_;
};

}  // namespace pf

#endif  // PF_MODEL_HPP
