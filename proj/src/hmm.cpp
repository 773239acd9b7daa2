#include "pf/models/hmm.hpp"

#include <limits>
#include <string>

namespace pf {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

template <class V>
void check_distribution(const V& probs, const std::string& what) {
  if (!probs.allFinite() || (probs.array() < 0).any()) {
    throw InvalidParams("hmm: " + what + " has negative or non-finite entries");
  }
  if (std::abs(probs.sum() - 1) > real{1e-12}) {
    throw InvalidParams("hmm: " + what + " does not sum to 1");
  }
}

std::size_t integral_index(real v, std::size_t bound) {
  if (!std::isfinite(v) || v < 0 || v != std::floor(v) || v >= static_cast<real>(bound)) {
    return npos;
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void HmmParams::validate() const {
  const auto k = initial.size();
  if (k == 0) throw InvalidParams("hmm: no states");
  if (transition.rows() != k || transition.cols() != k) {
    throw InvalidParams("hmm: transition matrix must be K x K");
  }
  if (emission.rows() != k || emission.cols() == 0) {
    throw InvalidParams("hmm: emission matrix must be K x M with M >= 1");
  }
  check_distribution(initial, "initial vector");
  for (Eigen::Index j = 0; j < k; ++j) {
    check_distribution(transition.row(j), "transition row " + std::to_string(j));
    check_distribution(emission.row(j), "emission row " + std::to_string(j));
  }
}

HmmModel::HmmModel(HmmParams params) : params_(std::move(params)) {
  params_.validate();
  transition_rows_ = params_.transition.transpose();
  emission_rows_ = params_.emission.transpose();
  log_transition_ = params_.transition.array().log().matrix();
  log_emission_ = params_.emission.array().log().matrix();
  log_initial_ = params_.initial.array().log().matrix();
}

std::size_t HmmModel::state_index(const StateVec& x) const { return integral_index(x(0), params_.num_states()); }

std::size_t HmmModel::checked_state(const StateVec& x) const {
  const std::size_t k = state_index(x);
  if (k == npos) throw DimensionMismatch("hmm: state is not a valid state index");
  return k;
}

std::size_t HmmModel::symbol(const ObsVec& y) const {
  const std::size_t s = integral_index(y(0), params_.num_symbols());
  if (s == npos) throw DimensionMismatch("hmm: observation is not a symbol of the alphabet");
  return s;
}

real HmmModel::log_mu_ev(const StateVec& x0) const {
  const std::size_t k = state_index(x0);
  return k == npos ? -std::numeric_limits<real>::infinity() : log_initial_(static_cast<Eigen::Index>(k));
}

real HmmModel::log_g_ev(const ObsVec& yt, const StateVec& xt) const {
  const auto s = static_cast<Eigen::Index>(symbol(yt));
  const std::size_t k = state_index(xt);
  return k == npos ? -std::numeric_limits<real>::infinity() : log_emission_(static_cast<Eigen::Index>(k), s);
}

real HmmModel::log_f_ev(const StateVec& xt, const StateVec& xtm1) const {
  const std::size_t to = state_index(xt);
  const std::size_t from = state_index(xtm1);
  if (to == npos || from == npos) return -std::numeric_limits<real>::infinity();
  return log_transition_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
}

}  // namespace pf
