#ifndef PF_MODELS_LGSSM_HPP
#define PF_MODELS_LGSSM_HPP

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <optional>
#include <string>

#include "pf/config.hpp"
#include "pf/errors.hpp"
#include "pf/rand.hpp"

namespace pf {

/// Linear-Gaussian state-space model x_t = A x_{t-1} + w_t, y_t = C x_t + v_t,
/// w_t ~ N(0, Q), v_t ~ N(0, R), x_0 ~ N(m0, P0).
template <int Dx, int Dy>
struct LgssmParams {
  Mat<Dx, Dx> A = Mat<Dx, Dx>::Identity();
  Mat<Dy, Dx> C = Mat<Dy, Dx>::Identity();
  Mat<Dx, Dx> Q = Mat<Dx, Dx>::Identity();
  Mat<Dy, Dy> R = Mat<Dy, Dy>::Identity();
  Vec<Dx> m0 = Vec<Dx>::Zero();
  Mat<Dx, Dx> P0 = Mat<Dx, Dx>::Identity();

  /// Throws InvalidParams unless every entry is finite and Q, R, P0 are symmetric PSD.
  void validate() const {
    auto finite = [](const auto& m) { return m.allFinite(); };
    if (!finite(A) || !finite(C) || !finite(Q) || !finite(R) || !finite(m0) || !finite(P0)) {
      throw InvalidParams("lgssm: non-finite parameter");
    }
    check_psd(Q, "Q");
    check_psd(R, "R");
    check_psd(P0, "P0");
  }

 private:
  template <class M>
  static void check_psd(const M& m, const char* name) {
    const real scale = std::max(real{1}, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > real{1e-12} * scale) {
      throw InvalidParams(std::string("lgssm: ") + name + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<M> eig(m, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < real{-1e-10} * scale) {
      throw InvalidParams(std::string("lgssm: ") + name + " is not positive semidefinite");
    }
  }
};

enum class LgssmProposal {
  Transition,      ///< q0 = mu, q = f (bootstrap choice)
  LocallyOptimal,  ///< q0 = p(x0 | y0), q = p(x_t | x_{t-1}, y_t)
};

/**
 * \brief Linear-Gaussian model exposing the bootstrap, SISR and APF capabilities.
 *
 * The observation covariance R must be positive definite. Q and P0 may be singular for the
 * bootstrap interface; evaluating log_f_ev or log_mu_ev then throws NotPositiveDefinite.
 */
template <int Dx, int Dy>
class LgssmModel {
 public:
  static constexpr int state_dim = Dx;
  static constexpr int obs_dim = Dy;
  using StateVec = Vec<Dx>;
  using ObsVec = Vec<Dy>;
  using Params = LgssmParams<Dx, Dy>;

  explicit LgssmModel(const Params& params, LgssmProposal proposal = LgssmProposal::Transition)
      : params_(params),
        proposal_(proposal),
        init_sampler_((params.validate(), params.P0)),
        trans_sampler_(params.Q),
        obs_sampler_(params.R),
        obs_density_(checked_pd(params.R, "R")) {
    if (is_pd(params.P0)) init_density_.emplace(params.P0);
    if (is_pd(params.Q)) trans_density_.emplace(params.Q);

    if (proposal == LgssmProposal::LocallyOptimal) {
      // Conditioning a Gaussian prior N(., P) on y = C x + v.
      auto condition = [&](const Mat<Dx, Dx>& prior_cov) {
        const Mat<Dy, Dy> s = params.C * prior_cov * params.C.transpose() + params.R;
        const Mat<Dx, Dy> gain = prior_cov * params.C.transpose() * s.inverse();
        const Mat<Dx, Dx> ikc = Mat<Dx, Dx>::Identity() - gain * params.C;
        Mat<Dx, Dx> post = ikc * prior_cov * ikc.transpose() + gain * params.R * gain.transpose();
        post = (post + post.transpose()).eval() / 2;
        return std::pair{gain, post};
      };
      auto [gain0, cov0] = condition(params.P0);
      auto [gain, cov] = condition(params.Q);
      if (!is_pd(cov0) || !is_pd(cov)) {
        throw InvalidParams("lgssm: locally optimal proposal needs nondegenerate posterior covariances");
      }
      opt_.emplace(OptimalProposal{gain0, gain, GaussianSampler<Dx>(cov0), GaussianSampler<Dx>(cov),
                                   GaussianDensity<Dx>(cov0), GaussianDensity<Dx>(cov)});
    }
  }

  [[nodiscard]] const Params& params() const noexcept { return params_; }
  [[nodiscard]] LgssmProposal proposal() const noexcept { return proposal_; }

  real log_mu_ev(const StateVec& x0) const { return require(init_density_, "P0").log_pdf(x0, params_.m0); }

  template <RandomSource R>
  StateVec mu_samp(R& rng) const {
    return init_sampler_.sample(params_.m0, rng);
  }

  real log_g_ev(const ObsVec& yt, const StateVec& xt) const { return obs_density_.log_pdf(yt, params_.C * xt); }

  template <RandomSource R>
  ObsVec g_samp(const StateVec& xt, R& rng) const {
    return obs_sampler_.sample(params_.C * xt, rng);
  }

  real log_f_ev(const StateVec& xt, const StateVec& xtm1) const {
    return require(trans_density_, "Q").log_pdf(xt, params_.A * xtm1);
  }

  template <RandomSource R>
  StateVec f_samp(const StateVec& xtm1, R& rng) const {
    return trans_sampler_.sample(params_.A * xtm1, rng);
  }

  StateVec prop_mu(const StateVec& xtm1) const { return params_.A * xtm1; }

  template <RandomSource R>
  StateVec q1_samp(const ObsVec& y0, R& rng) const {
    if (!opt_) return mu_samp(rng);
    return opt_->init_sampler.sample(optimal_init_mean(y0), rng);
  }

  real log_q1_ev(const StateVec& x0, const ObsVec& y0) const {
    if (!opt_) return log_mu_ev(x0);
    return opt_->init_density.log_pdf(x0, optimal_init_mean(y0));
  }

  template <RandomSource R>
  StateVec q_samp(const StateVec& xtm1, const ObsVec& yt, R& rng) const {
    if (!opt_) return f_samp(xtm1, rng);
    return opt_->trans_sampler.sample(optimal_mean(xtm1, yt), rng);
  }

  real log_q_ev(const StateVec& xt, const StateVec& xtm1, const ObsVec& yt) const {
    if (!opt_) return log_f_ev(xt, xtm1);
    return opt_->trans_density.log_pdf(xt, optimal_mean(xtm1, yt));
  }

 private:
  struct OptimalProposal {
    Mat<Dx, Dy> init_gain;
    Mat<Dx, Dy> gain;
    GaussianSampler<Dx> init_sampler;
    GaussianSampler<Dx> trans_sampler;
    GaussianDensity<Dx> init_density;
    GaussianDensity<Dx> trans_density;
  };

  template <class M>
  static bool is_pd(const M& m) {
    Eigen::LLT<M> llt(m);
    return llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all();
  }

  template <class M>
  static const M& checked_pd(const M& m, const char* name) {
    if (!is_pd(m)) throw InvalidParams(std::string("lgssm: ") + name + " must be positive definite");
    return m;
  }

  static const GaussianDensity<Dx>& require(const std::optional<GaussianDensity<Dx>>& d, const char* name) {
    if (!d) throw NotPositiveDefinite(std::string("lgssm: density undefined because ") + name + " is singular");
    return *d;
  }

  StateVec optimal_init_mean(const ObsVec& y0) const {
    return params_.m0 + opt_->init_gain * (y0 - params_.C * params_.m0);
  }

  StateVec optimal_mean(const StateVec& xtm1, const ObsVec& yt) const {
    const StateVec pred = params_.A * xtm1;
    return pred + opt_->gain * (yt - params_.C * pred);
  }

  Params params_;
  LgssmProposal proposal_;
  GaussianSampler<Dx> init_sampler_;
  GaussianSampler<Dx> trans_sampler_;
  GaussianSampler<Dy> obs_sampler_;
  GaussianDensity<Dy> obs_density_;
  std::optional<GaussianDensity<Dx>> init_density_;
  std::optional<GaussianDensity<Dx>> trans_density_;
  std::optional<OptimalProposal> opt_;
};

using ScalarLgssm = LgssmModel<1, 1>;

}  // namespace pf

#endif  // PF_MODELS_LGSSM_HPP
