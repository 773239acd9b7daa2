#ifndef PF_RAND_HPP
#define PF_RAND_HPP

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

#include "pf/config.hpp"
#include "pf/errors.hpp"

namespace pf {

/**
 * \brief Seedable pseudorandom generator; the only source of randomness in the library.
 *
 * The stream is fully specified: raw 64-bit words come from std::mt19937_64 (whose output
 * sequence is fixed by the C++ standard), uniforms use the top 53 bits (24 for float) and
 * normals use the Box-Muller transform, returning the cosine branch first and caching the
 * sine branch for the next call. No step involves rejection, so the number of raw words
 * consumed per variate is constant.
 *
 * A Prng is a plain value. Copying it forks an identical stream; use one instance per thread.
 */
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, stream_id), derived with splitmix64.
  [[nodiscard]] static Prng stream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  [[nodiscard]] real uniform01();

  [[nodiscard]] real std_normal();

  friend bool operator==(const Prng&, const Prng&) = default;

 private:
  std::mt19937_64 engine_;
  real cached_normal_ = 0;
  bool has_cached_normal_ = false;
};

/// Anything that can feed the model samplers. Prng satisfies it; tests plug in stubs.
template <class R>
concept RandomSource = requires(R& rng) {
  { rng.uniform01() } -> std::convertible_to<real>;
  { rng.std_normal() } -> std::convertible_to<real>;
};

template <RandomSource R>
real sample_std_normal(R& rng) {
  return rng.std_normal();
}

template <RandomSource R>
real sample_uniform01(R& rng) {
  return rng.uniform01();
}

/// Gaussian log-density including the -log(sd*sqrt(2*pi)) constant. Throws InvalidScale if sd <= 0.
[[nodiscard]] real log_norm_pdf(real x, real mean, real sd);

/// Index drawn by inversion from unnormalized nonnegative probabilities.
template <RandomSource R>
std::size_t sample_categorical(std::span<const real> probs, R& rng) {
  real total = 0;
  for (const real p : probs) total += p;
  const real u = sample_uniform01(rng) * total;
  real cumulative = 0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0) last_positive = k;
    cumulative += probs[k];
    if (u < cumulative) return k;
  }
  return last_positive;
}

/// Multivariate Gaussian log-density with the covariance factorized once.
template <int Dim>
class GaussianDensity {
 public:
  using VecT = Vec<Dim>;
  using MatT = Mat<Dim, Dim>;

  /// Throws NotPositiveDefinite unless `cov` is symmetric positive definite.
  explicit GaussianDensity(const MatT& cov) : llt_(cov) {
    if (llt_.info() != Eigen::Success || !(llt_.matrixL().toDenseMatrix().diagonal().array() > 0).all()) {
      throw NotPositiveDefinite("covariance matrix is not positive definite");
    }
    const MatT lower = llt_.matrixL();
    const real log_det = 2 * lower.diagonal().array().log().sum();
    const auto dim = static_cast<real>(cov.rows());
    log_norm_const_ = real{-0.5} * (dim * std::log(2 * std::numbers::pi_v<real>) + log_det);
  }

  [[nodiscard]] real log_pdf(const VecT& x, const VecT& mean) const {
    if (x.size() != mean.size() || x.size() != llt_.rows()) {
      throw DimensionMismatch("Gaussian log-density: argument sizes differ from covariance size");
    }
    const VecT z = llt_.matrixL().solve(x - mean);
    return log_norm_const_ - real{0.5} * z.squaredNorm();
  }

  [[nodiscard]] real log_normalizing_constant() const noexcept { return log_norm_const_; }

 private:
  Eigen::LLT<MatT> llt_;
  real log_norm_const_ = 0;
};

template <int Dim>
[[nodiscard]] real log_mvn_pdf(const Vec<Dim>& x, const Vec<Dim>& mean, const Mat<Dim, Dim>& cov) {
  return GaussianDensity<Dim>(cov).log_pdf(x, mean);
}

/// Draws mean + F z with F F' = cov. Works for any symmetric positive semidefinite cov.
template <int Dim>
class GaussianSampler {
 public:
  using VecT = Vec<Dim>;
  using MatT = Mat<Dim, Dim>;

  explicit GaussianSampler(const MatT& cov) {
    Eigen::SelfAdjointEigenSolver<MatT> eig(cov);
    if (eig.info() != Eigen::Success) {
      throw NotPositiveDefinite("covariance eigendecomposition failed");
    }
    const real tol = real{1e-10} * std::max(real{1}, eig.eigenvalues().cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -tol) {
      throw NotPositiveDefinite("covariance matrix is not positive semidefinite");
    }
    factor_ = eig.eigenvectors() * eig.eigenvalues().cwiseMax(real{0}).cwiseSqrt().asDiagonal();
  }

  template <RandomSource R>
  [[nodiscard]] VecT sample(const VecT& mean, R& rng) const {
    VecT z(mean.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      z(k) = sample_std_normal(rng);
    }
    return mean + factor_ * z;
  }

 private:
  MatT factor_;
};

}  // namespace pf

#endif  // PF_RAND_HPP
