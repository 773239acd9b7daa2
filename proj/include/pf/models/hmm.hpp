#ifndef PF_MODELS_HMM_HPP
#define PF_MODELS_HMM_HPP

#include <cmath>
#include <cstddef>
#include <span>

#include "pf/config.hpp"
#include "pf/errors.hpp"
#include "pf/rand.hpp"

namespace pf {

/// Finite-state, finite-alphabet hidden Markov model.
struct HmmParams {
  DynMat transition;  ///< K x K, row j = P(x_t = . | x_{t-1} = j)
  DynMat emission;    ///< K x M, row k = P(y_t = . | x_t = k)
  DynVec initial;     ///< K

  [[nodiscard]] std::size_t num_states() const noexcept { return static_cast<std::size_t>(initial.size()); }
  [[nodiscard]] std::size_t num_symbols() const noexcept { return static_cast<std::size_t>(emission.cols()); }

  /// Throws InvalidParams unless shapes agree and every row is a probability vector (1e-12).
  void validate() const;
};

/**
 * \brief Discrete HMM exposed through the bootstrap interface.
 *
 * The state vector holds the state index and the observation vector the symbol index, both as
 * reals. Non-integral or out-of-range states have zero density. An observation outside the
 * alphabet is a DimensionMismatch.
 */
class HmmModel {
 public:
  static constexpr int state_dim = 1;
  static constexpr int obs_dim = 1;
  using StateVec = Vec<1>;
  using ObsVec = Vec<1>;

  explicit HmmModel(HmmParams params);

  [[nodiscard]] const HmmParams& params() const noexcept { return params_; }

  real log_mu_ev(const StateVec& x0) const;
  real log_g_ev(const ObsVec& yt, const StateVec& xt) const;
  real log_f_ev(const StateVec& xt, const StateVec& xtm1) const;

  template <RandomSource R>
  StateVec mu_samp(R& rng) const {
    return index_vec(sample_categorical(span_of(params_.initial), rng));
  }

  template <RandomSource R>
  StateVec f_samp(const StateVec& xtm1, R& rng) const {
    return index_vec(sample_categorical(span_of(transition_rows_, checked_state(xtm1)), rng));
  }

  template <RandomSource R>
  ObsVec g_samp(const StateVec& xt, R& rng) const {
    return index_vec(sample_categorical(span_of(emission_rows_, checked_state(xt)), rng));
  }

  /// Symbol index of y; throws DimensionMismatch outside the alphabet.
  [[nodiscard]] std::size_t symbol(const ObsVec& y) const;

 private:
  static StateVec index_vec(std::size_t k) { return StateVec(static_cast<real>(k)); }
  static std::span<const real> span_of(const DynVec& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
  }
  // Rows stored as columns of the transposed matrix, contiguous in column-major storage.
  static std::span<const real> span_of(const DynMat& transposed, std::size_t row) {
    return {transposed.col(static_cast<Eigen::Index>(row)).data(), static_cast<std::size_t>(transposed.rows())};
  }

  /// Index of a valid state, or npos.
  [[nodiscard]] std::size_t state_index(const StateVec& x) const;
  [[nodiscard]] std::size_t checked_state(const StateVec& x) const;

  HmmParams params_;
  DynMat transition_rows_;
  DynMat emission_rows_;
  DynMat log_transition_;
  DynMat log_emission_;
  DynVec log_initial_;
};

}  // namespace pf

#endif  // PF_MODELS_HMM_HPP
