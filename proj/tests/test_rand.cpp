#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "pf/rand.hpp"

using pf::real;

namespace {

constexpr real kLog2Pi = 1.8378770664093454835606594728112;

real std_normal_cdf(real x) { return real{0.5} * std::erfc(-x / std::numbers::sqrt2_v<real>); }

// Direct formula with a dense inverse and determinant, independent of the Cholesky route.
real dense_mvn_oracle(const Eigen::Vector3d& x, const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov) {
  const Eigen::Vector3d d = x - mean;
  return -0.5 * (3 * kLog2Pi + std::log(cov.determinant()) + d.dot(cov.inverse() * d));
}

}  // namespace

TEST_CASE("standard normal moments, seed 42") {
  pf::Prng rng(42);
  const int n = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = pf::sample_std_normal(rng);
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(mean > -0.02);
  CHECK(mean < 0.02);
  CHECK(var > 0.98);
  CHECK(var < 1.02);
}

TEST_CASE("standard normal passes a Kolmogorov-Smirnov check") {
  pf::Prng rng(2024);
  std::vector<real> draws(10000);
  for (auto& z : draws) z = pf::sample_std_normal(rng);
  std::sort(draws.begin(), draws.end());
  const auto n = static_cast<real>(draws.size());
  real ks = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const real cdf = std_normal_cdf(draws[i]);
    ks = std::max({ks, static_cast<real>(i + 1) / n - cdf, cdf - static_cast<real>(i) / n});
  }
  CHECK(ks < 0.02);
}

TEST_CASE("uniform01 range and mean") {
  pf::Prng rng(42);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const real u = pf::sample_uniform01(rng);
    REQUIRE(u >= 0);
    REQUIRE(u < 1);
    sum += u;
  }
  CHECK(sum / n > 0.495);
  CHECK(sum / n < 0.505);
}

TEST_CASE("same seed gives the same stream; copies fork identical streams") {
  pf::Prng a(123);
  pf::Prng b(123);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a.std_normal() == b.std_normal());
    REQUIRE(a.uniform01() == b.uniform01());
  }
  // Copy in the middle of a Box-Muller pair: the cached value must travel with the copy.
  (void)a.std_normal();
  pf::Prng clone = a;
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(clone.std_normal() == a.std_normal());
    REQUIRE(clone.next_u64() == a.next_u64());
  }
  CHECK(clone == a);
}

TEST_CASE("the raw stream is the standard mt19937_64 stream") {
  pf::Prng rng(5489);
  std::mt19937_64 reference(5489);
  for (int i = 0; i < 100; ++i) REQUIRE(rng.next_u64() == reference());
}

TEST_CASE("distinct seeds and stream ids give distinct, equidistributed streams") {
  const std::vector<pf::Prng> gens{pf::Prng(1), pf::Prng(2), pf::Prng::stream(1, 0), pf::Prng::stream(1, 1),
                                   pf::Prng::stream(2, 0)};
  std::vector<std::uint64_t> firsts;
  for (auto g : gens) {
    firsts.push_back(g.next_u64());
    // Chi-square over 10 bins, 10^4 draws: 9 degrees of freedom, 99.9% quantile 27.9.
    std::array<int, 10> bins{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++bins[static_cast<std::size_t>(g.uniform01() * 10)];
    double chi2 = 0;
    for (const int c : bins) chi2 += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
    CHECK(chi2 < 27.9);
  }
  std::sort(firsts.begin(), firsts.end());
  CHECK(std::adjacent_find(firsts.begin(), firsts.end()) == firsts.end());
}

TEST_CASE("log_norm_pdf examples") {
  CHECK(pf::log_norm_pdf(0, 0, 1) == doctest::Approx(-0.9189385332046727).epsilon(1e-15));
  CHECK(pf::log_norm_pdf(1, 1, 5) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi * 25)).epsilon(1e-15));
  CHECK(pf::log_norm_pdf(2, 0, 1) == doctest::Approx(-0.5 * kLog2Pi - 2).epsilon(1e-15));
  CHECK_THROWS_AS((void)pf::log_norm_pdf(0, 0, 0), pf::InvalidScale);
  CHECK_THROWS_AS((void)pf::log_norm_pdf(0, 0, -1), pf::InvalidScale);
}

TEST_CASE("exp(log_norm_pdf) integrates to 1") {
  for (const real sd : {0.1, 1.0, 7.5}) {
    const real mean = 0.3;
    const int steps = 200000;
    const real lo = mean - 10 * sd;
    const real h = 20 * sd / steps;
    real integral = 0;
    for (int k = 0; k <= steps; ++k) {
      const real w = (k == 0 || k == steps) ? 0.5 : 1.0;
      integral += w * std::exp(pf::log_norm_pdf(lo + k * h, mean, sd));
    }
    integral *= h;
    CHECK(std::abs(integral - 1) < 1e-6);
  }
}

TEST_CASE("log_mvn_pdf agrees with the scalar density in one dimension") {
  for (const real x : {-3.0, 0.0, 0.7, 4.2}) {
    const pf::Vec<1> xv(x), mv(0.5);
    const pf::Mat<1, 1> cov(2.25);
    CHECK(pf::log_mvn_pdf<1>(xv, mv, cov) == doctest::Approx(pf::log_norm_pdf(x, 0.5, 1.5)).epsilon(1e-12));
  }
}

TEST_CASE("log_mvn_pdf at the mean with identity covariance") {
  for (const int d : {1, 2, 5}) {
    const pf::DynVec x = pf::DynVec::Constant(d, 1.5);
    CHECK(pf::log_mvn_pdf<Eigen::Dynamic>(x, x, pf::DynMat::Identity(d, d)) ==
          doctest::Approx(-d / 2.0 * kLog2Pi).epsilon(1e-14));
  }
}

TEST_CASE("log_mvn_pdf matches a dense-inverse oracle on random SPD matrices") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Matrix3d b;
    for (int i = 0; i < 9; ++i) b(i) = n01(gen);
    const Eigen::Matrix3d cov = b * b.transpose() + 0.1 * Eigen::Matrix3d::Identity();
    Eigen::Vector3d x, mean;
    for (int i = 0; i < 3; ++i) {
      x(i) = n01(gen);
      mean(i) = n01(gen);
    }
    CHECK(std::abs(pf::log_mvn_pdf<3>(x, mean, cov) - dense_mvn_oracle(x, mean, cov)) < 1e-9);

    // Simultaneous permutation of coordinates leaves the density unchanged.
    Eigen::PermutationMatrix<3> perm;
    perm.indices() << 2, 0, 1;
    const Eigen::Matrix3d pcov = perm * cov * perm.transpose();
    const Eigen::Vector3d px = perm * x, pmean = perm * mean;
    CHECK(std::abs(pf::log_mvn_pdf<3>(px, pmean, pcov) - pf::log_mvn_pdf<3>(x, mean, cov)) < 1e-10);
  }
}

TEST_CASE("log_mvn_pdf rejects non positive definite covariance") {
  Eigen::Matrix2d cov;
  cov << 1, 2, 2, 1;
  CHECK_THROWS_AS((void)pf::log_mvn_pdf<2>(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), cov),
                  pf::NotPositiveDefinite);
  CHECK_THROWS_AS(pf::GaussianDensity<2>{Eigen::Matrix2d::Zero()}, pf::NotPositiveDefinite);
}

TEST_CASE("Gaussian sampler reproduces its covariance") {
  Eigen::Matrix2d cov;
  cov << 2.0, 0.6, 0.6, 0.5;
  const pf::GaussianSampler<2> sampler(cov);
  pf::Prng rng(8);
  const Eigen::Vector2d mean(1, -1);
  const int n = 200000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d x = sampler.sample(mean, rng);
    sum += x;
    outer += (x - mean) * (x - mean).transpose();
  }
  CHECK((sum / n - mean).cwiseAbs().maxCoeff() < 0.02);
  CHECK((outer / n - cov).cwiseAbs().maxCoeff() < 0.03);

  // Singular but PSD covariance is fine for sampling.
  CHECK_NOTHROW(pf::GaussianSampler<2>{Eigen::Matrix2d::Zero()});
  Eigen::Matrix2d indefinite;
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(pf::GaussianSampler<2>{indefinite}, pf::NotPositiveDefinite);
}

TEST_CASE("categorical sampling frequencies") {
  const std::vector<real> probs{0.0, 0.2, 0.0, 0.5, 0.3};
  pf::Prng rng(4);
  std::array<int, 5> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[pf::sample_categorical(probs, rng)];
  CHECK(counts[0] == 0);
  CHECK(counts[2] == 0);
  for (std::size_t k : {1u, 3u, 4u}) {
    const double sd = std::sqrt(n * probs[k] * (1 - probs[k]));
    CHECK(std::abs(counts[k] - n * probs[k]) < 4 * sd);
  }
}
