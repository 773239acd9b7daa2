#ifndef PF_MODELS_SVOL_HPP
#define PF_MODELS_SVOL_HPP

#include <cmath>
#include <numbers>

#include "pf/config.hpp"
#include "pf/errors.hpp"
#include "pf/rand.hpp"

namespace pf {

struct SvolParams {
  real phi = real{0.91};
  real beta = real{0.5};
  real sigma = real{1.0};
};

/**
 * \brief Univariate stochastic volatility model.
 *
 *   y_t = beta * exp(x_t / 2) * z_t
 *   x_t = phi * x_{t-1} + sigma * z'_t
 *   x_0 ~ N(0, sigma^2 / (1 - phi^2))
 *
 * Both proposals equal the state distribution (q0 = mu, q = f), so SISR on this model is the
 * bootstrap filter. A negative beta is accepted; only |beta| matters.
 */
class SvolModel {
 public:
  static constexpr int state_dim = 1;
  static constexpr int obs_dim = 1;
  using StateVec = Vec<1>;
  using ObsVec = Vec<1>;

  explicit SvolModel(const SvolParams& params) : params_(params) {
    if (!std::isfinite(params.phi) || !(std::abs(params.phi) < 1)) {
      throw InvalidParams("svol: |phi| must be < 1");
    }
    if (!std::isfinite(params.sigma) || !(params.sigma > 0)) {
      throw InvalidParams("svol: sigma must be positive");
    }
    if (!std::isfinite(params.beta) || params.beta == 0) {
      throw InvalidParams("svol: beta must be nonzero");
    }
    stationary_sd_ = params.sigma / std::sqrt(1 - params.phi * params.phi);
    log_abs_beta_ = std::log(std::abs(params.beta));
  }

  [[nodiscard]] const SvolParams& params() const noexcept { return params_; }
  [[nodiscard]] real stationary_sd() const noexcept { return stationary_sd_; }

  real log_mu_ev(const StateVec& x0) const { return log_norm_pdf(x0(0), 0, stationary_sd_); }

  template <RandomSource R>
  StateVec mu_samp(R& rng) const {
    return StateVec(sample_std_normal(rng) * stationary_sd_);
  }

  template <RandomSource R>
  StateVec q1_samp(const ObsVec& /*y0*/, R& rng) const {
    return mu_samp(rng);
  }

  real log_q1_ev(const StateVec& x0, const ObsVec& /*y0*/) const { return log_mu_ev(x0); }

  // log N(y; 0, beta^2 e^x) written out so that extreme x cannot overflow the scale.
  real log_g_ev(const ObsVec& yt, const StateVec& xt) const {
    const real x = xt(0);
    const real y = yt(0);
    const real quad = y == 0 ? real{0} : y * y / (params_.beta * params_.beta) * std::exp(-x);
    return real{-0.5} * std::log(2 * std::numbers::pi_v<real>) - log_abs_beta_ - x / 2 - quad / 2;
  }

  template <RandomSource R>
  ObsVec g_samp(const StateVec& xt, R& rng) const {
    return ObsVec(std::abs(params_.beta) * std::exp(xt(0) / 2) * sample_std_normal(rng));
  }

  real log_f_ev(const StateVec& xt, const StateVec& xtm1) const {
    return log_norm_pdf(xt(0), params_.phi * xtm1(0), params_.sigma);
  }

  template <RandomSource R>
  StateVec f_samp(const StateVec& xtm1, R& rng) const {
    return StateVec(params_.phi * xtm1(0) + params_.sigma * sample_std_normal(rng));
  }

  template <RandomSource R>
  StateVec q_samp(const StateVec& xtm1, const ObsVec& /*yt*/, R& rng) const {
    return f_samp(xtm1, rng);
  }

  real log_q_ev(const StateVec& xt, const StateVec& xtm1, const ObsVec& /*yt*/) const {
    return log_f_ev(xt, xtm1);
  }

  StateVec prop_mu(const StateVec& xtm1) const { return StateVec(params_.phi * xtm1(0)); }

 private:
  SvolParams params_;
  real stationary_sd_ = 1;
  real log_abs_beta_ = 0;
};

}  // namespace pf

#endif  // PF_MODELS_SVOL_HPP
