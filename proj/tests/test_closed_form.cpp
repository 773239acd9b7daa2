#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pf/closed_form.hpp"

using pf::real;

namespace {

constexpr real kLog2Pi = 1.8378770664093454835606594728112;

pf::LgssmParams<1, 1> scalar_params(real a, real c, real q, real r, real m0, real p0) {
  pf::LgssmParams<1, 1> p;
  p.A(0, 0) = a;
  p.C(0, 0) = c;
  p.Q(0, 0) = q;
  p.R(0, 0) = r;
  p.m0(0) = m0;
  p.P0(0, 0) = p0;
  return p;
}

pf::LgssmParams<2, 1> random_params(std::mt19937_64& gen) {
  std::normal_distribution<real> n01;
  pf::LgssmParams<2, 1> p;
  for (int i = 0; i < 4; ++i) p.A(i) = 0.5 * n01(gen);
  p.C << n01(gen), n01(gen);
  Eigen::Matrix2d b;
  for (int i = 0; i < 4; ++i) b(i) = n01(gen);
  p.Q = b * b.transpose() + 0.05 * Eigen::Matrix2d::Identity();
  for (int i = 0; i < 4; ++i) b(i) = n01(gen);
  p.P0 = b * b.transpose() + 0.05 * Eigen::Matrix2d::Identity();
  p.R(0, 0) = 0.3 + std::abs(n01(gen));
  p.m0 << n01(gen), n01(gen);
  return p;
}

// Moments of the stacked vector (x_0..x_T, y_0..y_T), built from the model definition alone.
struct JointGaussian {
  Eigen::VectorXd mean_x, mean_y;
  Eigen::MatrixXd cov_xx, cov_xy, cov_yy;
};

JointGaussian stack_joint(const pf::LgssmParams<2, 1>& p, int steps) {
  const int n = steps + 1;
  std::vector<Eigen::Vector2d> m(n);
  std::vector<Eigen::Matrix2d> marg(n);
  m[0] = p.m0;
  marg[0] = p.P0;
  for (int t = 1; t < n; ++t) {
    m[t] = p.A * m[t - 1];
    marg[t] = p.A * marg[t - 1] * p.A.transpose() + p.Q;
  }
  JointGaussian j;
  j.mean_x.resize(2 * n);
  j.mean_y.resize(n);
  j.cov_xx.resize(2 * n, 2 * n);
  for (int t = 0; t < n; ++t) {
    j.mean_x.segment<2>(2 * t) = m[t];
    j.mean_y(t) = (p.C * m[t])(0);
    for (int s = 0; s <= t; ++s) {
      Eigen::Matrix2d apow = Eigen::Matrix2d::Identity();
      for (int k = s; k < t; ++k) apow = p.A * apow;
      const Eigen::Matrix2d cts = apow * marg[s];  // Cov(x_t, x_s)
      j.cov_xx.block<2, 2>(2 * t, 2 * s) = cts;
      j.cov_xx.block<2, 2>(2 * s, 2 * t) = cts.transpose();
    }
  }
  Eigen::MatrixXd big_c = Eigen::MatrixXd::Zero(n, 2 * n);
  for (int t = 0; t < n; ++t) big_c.block<1, 2>(t, 2 * t) = p.C;
  j.cov_xy = j.cov_xx * big_c.transpose();
  j.cov_yy = big_c * j.cov_xx * big_c.transpose() + p.R(0, 0) * Eigen::MatrixXd::Identity(n, n);
  return j;
}

real dense_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::VectorXd d = x - mean;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  return -0.5 * (static_cast<real>(x.size()) * kLog2Pi + std::log(lu.determinant()) + d.dot(lu.solve(d)));
}

pf::HmmParams random_hmm(std::mt19937_64& gen, int k, int m) {
  std::uniform_real_distribution<real> u(0.05, 1);
  pf::HmmParams p;
  p.transition.resize(k, k);
  p.emission.resize(k, m);
  p.initial.resize(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) p.transition(i, j) = u(gen);
    for (int j = 0; j < m; ++j) p.emission(i, j) = u(gen);
    p.transition.row(i) /= p.transition.row(i).sum();
    p.emission.row(i) /= p.emission.row(i).sum();
    p.initial(i) = u(gen);
  }
  p.initial /= p.initial.sum();
  return p;
}

// Sum over all K^(T+1) paths: returns log p(y_0:T) and the filtering marginal at T.
std::pair<real, Eigen::VectorXd> enumerate_paths(const pf::HmmParams& p, const std::vector<std::size_t>& ys) {
  const auto k = static_cast<std::size_t>(p.initial.size());
  std::size_t paths = 1;
  for (std::size_t t = 0; t < ys.size(); ++t) paths *= k;
  Eigen::VectorXd joint_last = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t code = 0; code < paths; ++code) {
    std::size_t rest = code;
    std::size_t prev = 0;
    real prob = 1;
    for (std::size_t t = 0; t < ys.size(); ++t) {
      const std::size_t x = rest % k;
      rest /= k;
      const auto xi = static_cast<Eigen::Index>(x);
      prob *= (t == 0 ? p.initial(xi) : p.transition(static_cast<Eigen::Index>(prev), xi)) *
              p.emission(xi, static_cast<Eigen::Index>(ys[t]));
      prev = x;
    }
    joint_last(static_cast<Eigen::Index>(prev)) += prob;
  }
  const real total = joint_last.sum();
  return {std::log(total), joint_last / total};
}

real symmetric_gap(const Eigen::MatrixXd& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("static state with exact prior: belief stays at the prior mean") {
  pf::KalmanFilter<1, 1> kf(scalar_params(1, 1, 0, 1, 2.5, 0));
  for (const real y : {0.0, 10.0, -3.0, 7.0}) {
    kf.filter(pf::Vec<1>(y));
    CHECK(kf.belief().mean(0) == 2.5);
    CHECK(kf.belief().cov(0, 0) == 0);
    CHECK(kf.log_cond_like() == doctest::Approx(pf::log_norm_pdf(y, 2.5, 1)).epsilon(1e-14));
  }
}

TEST_CASE("single scalar step against hand algebra") {
  const real m0 = 0.3, p0 = 2.0, c = 1.5, r = 0.7, y = -0.4;
  pf::KalmanFilter<1, 1> kf(scalar_params(0.9, c, 1, r, m0, p0));
  kf.filter(pf::Vec<1>(y));
  const real s = c * c * p0 + r;
  const real k = p0 * c / s;
  CHECK(kf.belief().mean(0) == doctest::Approx(m0 + k * (y - c * m0)).epsilon(1e-12));
  CHECK(kf.belief().cov(0, 0) == doctest::Approx(p0 * r / s).epsilon(1e-12));
  CHECK(std::abs(kf.log_cond_like() - (-0.5 * (kLog2Pi + std::log(s) + (y - c * m0) * (y - c * m0) / s))) < 1e-12);

  // Second step predicts through A and Q.
  const real a = 0.9;
  const real mean1 = m0 + k * (y - c * m0);
  const real pbar = a * a * (p0 * r / s) + 1;
  kf.filter(pf::Vec<1>(1.1));
  const real s2 = c * c * pbar + r;
  CHECK(std::abs(kf.log_cond_like() - pf::log_norm_pdf(1.1, c * a * mean1, std::sqrt(s2))) < 1e-12);
}

TEST_CASE("Kalman filter matches the stacked joint Gaussian") {
  std::mt19937_64 gen(314);
  std::normal_distribution<real> n01;
  const int steps = 5;
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(gen);
    const auto joint = stack_joint(p, steps);
    Eigen::VectorXd ys(steps + 1);
    for (int t = 0; t <= steps; ++t) ys(t) = joint.mean_y(t) + 2 * n01(gen);

    pf::KalmanFilter<2, 1> kf(p);
    for (int t = 0; t <= steps; ++t) {
      kf.filter(pf::Vec<1>(ys(t)));
      const auto& b = kf.belief();
      CHECK(symmetric_gap(b.cov) == 0);
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(b.cov).eigenvalues().minCoeff() > -1e-12);

      // Condition the joint on y_0..y_t.
      const Eigen::Index n = t + 1;
      const Eigen::MatrixXd syy = joint.cov_yy.topLeftCorner(n, n);
      const Eigen::MatrixXd sxy = joint.cov_xy.block(2 * t, 0, 2, n);
      const Eigen::VectorXd dy = ys.head(n) - joint.mean_y.head(n);
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(syy);
      const Eigen::Vector2d mean = joint.mean_x.segment<2>(2 * t) + sxy * lu.solve(dy);
      const Eigen::Matrix2d cov = joint.cov_xx.block<2, 2>(2 * t, 2 * t) - sxy * lu.solve(sxy.transpose());
      CHECK((b.mean - mean).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((b.cov - cov).cwiseAbs().maxCoeff() < 1e-9);
    }
    const real oracle = dense_log_pdf(ys, joint.mean_y, joint.cov_yy);
    CHECK(std::abs(kf.log_marginal_like() - oracle) < 1e-10 * std::max(real{1}, std::abs(oracle)));
  }
}

TEST_CASE("Kalman errors") {
  pf::KalmanFilter<1, 1> kf(scalar_params(0.9, 1, 1, 1, 0, 1));
  CHECK_THROWS_AS((void)kf.belief(), pf::NotYetFiltered);
  CHECK_THROWS_AS((void)kf.log_cond_like(), pf::NotYetFiltered);
  CHECK(kf.log_marginal_like() == 0);

  // R = 0 with C = 0 makes the innovation covariance singular.
  const auto degenerate = scalar_params(1, 0, 1, 0, 0, 1);
  auto step = [&] { return pf::kalman_step<1, 1>(std::nullopt, degenerate, pf::Vec<1>(0)); };
  CHECK_THROWS_AS((void)step(), pf::SingularInnovationCovariance);
}

TEST_CASE("HMM with identity transition and emission tracks the state exactly") {
  pf::HmmParams p;
  p.transition = Eigen::MatrixXd::Identity(3, 3);
  p.emission = Eigen::MatrixXd::Identity(3, 3);
  p.initial = Eigen::VectorXd::Constant(3, 1.0 / 3);
  pf::HmmFilter f(p);
  f.filter(1);
  CHECK(f.belief().probs == Eigen::Vector3d(0, 1, 0));
  CHECK(f.log_cond_like() == doctest::Approx(-std::log(3.0)).epsilon(1e-15));
  f.filter(1);
  CHECK(f.log_cond_like() == 0);
  CHECK_THROWS_AS(f.filter(2), pf::ZeroLikelihoodObservation);
  CHECK_THROWS_AS(f.filter(3), pf::DimensionMismatch);
}

TEST_CASE("HMM with uniform emission gives -log M per step") {
  std::mt19937_64 gen(5);
  auto p = random_hmm(gen, 3, 4);
  p.emission = Eigen::MatrixXd::Constant(3, 4, 0.25);
  pf::HmmFilter f(p);
  for (const std::size_t y : {0u, 3u, 2u, 2u, 1u}) {
    f.filter(y);
    CHECK(f.log_cond_like() == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
  }
}

TEST_CASE("two-state, three-step HMM against a hand-expanded path sum") {
  pf::HmmParams p;
  p.transition.resize(2, 2);
  p.transition << 0.7, 0.3, 0.4, 0.6;
  p.emission.resize(2, 2);
  p.emission << 0.9, 0.1, 0.2, 0.8;
  p.initial = Eigen::Vector2d(0.5, 0.5);
  const std::vector<std::size_t> ys{0, 1, 1};
  real total = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        total += p.initial(a) * p.emission(a, 0) * p.transition(a, b) * p.emission(b, 1) * p.transition(b, c) *
                 p.emission(c, 1);
  pf::HmmFilter f(p);
  for (const auto y : ys) f.filter(y);
  CHECK(std::abs(f.log_marginal_like() - std::log(total)) < 1e-12);
}

TEST_CASE("HMM forward recursion matches brute-force enumeration") {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 60; ++rep) {
    const int k = 1 + rep % 3;
    const int m = 2 + rep % 2;
    const auto p = random_hmm(gen, k, m);
    const std::size_t len = 1 + static_cast<std::size_t>(rep % 7);  // T up to 6
    std::uniform_int_distribution<std::size_t> sym(0, static_cast<std::size_t>(m - 1));
    std::vector<std::size_t> ys(len);
    for (auto& y : ys) y = sym(gen);

    pf::HmmFilter f(p);
    for (const auto y : ys) f.filter(y);
    const auto [log_like, marginal] = enumerate_paths(p, ys);
    CHECK(std::abs(f.log_marginal_like() - log_like) < 1e-12);
    CHECK((f.belief().probs - marginal).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(f.belief().probs.sum() - 1) < 1e-14);
  }
}

TEST_CASE("HMM parameter validation") {
  pf::HmmParams p;
  p.transition = Eigen::MatrixXd::Identity(2, 2);
  p.emission = Eigen::MatrixXd::Identity(2, 2);
  p.initial = Eigen::Vector2d(0.6, 0.6);
  CHECK_THROWS_AS(pf::HmmFilter{p}, pf::InvalidParams);
  p.initial = Eigen::Vector2d(0.5, 0.5);
  pf::HmmFilter f(p);
  CHECK_THROWS_AS((void)f.belief(), pf::NotYetFiltered);
}
