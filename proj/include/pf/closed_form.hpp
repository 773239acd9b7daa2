#ifndef PF_CLOSED_FORM_HPP
#define PF_CLOSED_FORM_HPP

#include <Eigen/Cholesky>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>

#include "pf/config.hpp"
#include "pf/errors.hpp"
#include "pf/models/hmm.hpp"
#include "pf/models/lgssm.hpp"

namespace pf {

template <int Dx>
struct GaussianBelief {
  Vec<Dx> mean;
  Mat<Dx, Dx> cov;
};

template <int Dx>
struct KalmanStepResult {
  GaussianBelief<Dx> belief;
  real log_cond_like;
};

/**
 * \brief Exact filtering update for a linear-Gaussian model.
 *
 * `previous` is the filtering belief at t-1, or nullopt at t = 0, in which case (m0, P0) is
 * used as the prediction. The covariance update uses the Joseph form
 * P = (I - K C) Pbar (I - K C)' + K R K' and is symmetrized afterwards.
 *
 * Throws SingularInnovationCovariance if C Pbar C' + R is not positive definite.
 */
template <int Dx, int Dy>
KalmanStepResult<Dx> kalman_step(const std::optional<GaussianBelief<Dx>>& previous, const LgssmParams<Dx, Dy>& p,
                                 const Vec<Dy>& yt) {
  Vec<Dx> pred_mean;
  Mat<Dx, Dx> pred_cov;
  if (previous) {
    pred_mean = p.A * previous->mean;
    pred_cov = p.A * previous->cov * p.A.transpose() + p.Q;
  } else {
    pred_mean = p.m0;
    pred_cov = p.P0;
  }
  const Vec<Dy> innovation = yt - p.C * pred_mean;
  Mat<Dy, Dy> s = p.C * pred_cov * p.C.transpose() + p.R;
  s = (s + s.transpose()).eval() / 2;
  const Eigen::LLT<Mat<Dy, Dy>> llt(s);
  if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > 0).all()) {
    throw SingularInnovationCovariance("innovation covariance is not positive definite");
  }
  const Mat<Dx, Dy> gain = llt.solve(p.C * pred_cov.transpose()).transpose();

  const Mat<Dx, Dx> ikc = Mat<Dx, Dx>::Identity(pred_cov.rows(), pred_cov.cols()) - gain * p.C;
  Mat<Dx, Dx> cov = ikc * pred_cov * ikc.transpose() + gain * p.R * gain.transpose();
  cov = (cov + cov.transpose()).eval() / 2;

  const Vec<Dy> z = llt.matrixL().solve(innovation);
  const real log_det = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const auto dy = static_cast<real>(yt.size());
  const real ll = real{-0.5} * (dy * std::log(2 * std::numbers::pi_v<real>) + log_det + z.squaredNorm());

  return {GaussianBelief<Dx>{pred_mean + gain * innovation, cov}, ll};
}

/// Stateful wrapper around kalman_step with the ParticleFilter accessor names.
template <int Dx, int Dy>
class KalmanFilter {
 public:
  explicit KalmanFilter(LgssmParams<Dx, Dy> params) : params_(std::move(params)) { params_.validate(); }

  void filter(const Vec<Dy>& yt) {
    auto [belief, ll] = kalman_step(belief_, params_, yt);
    belief_ = std::move(belief);
    last_log_cond_like_ = ll;
    log_marginal_like_ += ll;
  }

  [[nodiscard]] const GaussianBelief<Dx>& belief() const {
    if (!belief_) throw NotYetFiltered();
    return *belief_;
  }
  [[nodiscard]] real log_cond_like() const {
    if (!belief_) throw NotYetFiltered();
    return last_log_cond_like_;
  }
  [[nodiscard]] real log_marginal_like() const noexcept { return log_marginal_like_; }

 private:
  LgssmParams<Dx, Dy> params_;
  std::optional<GaussianBelief<Dx>> belief_;
  real last_log_cond_like_ = 0;
  real log_marginal_like_ = 0;
};

struct DiscreteBelief {
  DynVec probs;
};

struct HmmStepResult {
  DiscreteBelief belief;
  real log_cond_like;
};

/**
 * Normalized forward recursion: b_k proportional to e_k(y) * sum_j T_jk b_j, with the initial
 * vector as prediction when `previous` is nullopt. log_cond_like is the log normalizer.
 * Throws ZeroLikelihoodObservation when the normalizer is 0.
 */
HmmStepResult hmm_forward_step(const std::optional<DiscreteBelief>& previous, const HmmParams& params,
                               std::size_t symbol);

class HmmFilter {
 public:
  explicit HmmFilter(HmmParams params);

  void filter(std::size_t symbol);

  [[nodiscard]] const DiscreteBelief& belief() const;
  [[nodiscard]] real log_cond_like() const;
  [[nodiscard]] real log_marginal_like() const noexcept { return log_marginal_like_; }

 private:
  HmmParams params_;
  std::optional<DiscreteBelief> belief_;
  real last_log_cond_like_ = 0;
  real log_marginal_like_ = 0;
};

}  // namespace pf

#endif  // PF_CLOSED_FORM_HPP
