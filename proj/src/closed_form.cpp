#include "pf/closed_form.hpp"

namespace pf {

HmmStepResult hmm_forward_step(const std::optional<DiscreteBelief>& previous, const HmmParams& params,
                               std::size_t symbol) {
  if (symbol >= params.num_symbols()) {
    throw DimensionMismatch("hmm: observation symbol outside the alphabet");
  }
  DynVec predicted;
  if (previous) {
    if (previous->probs.size() != params.initial.size()) {
      throw DimensionMismatch("hmm: belief length differs from the number of states");
    }
    predicted = params.transition.transpose() * previous->probs;
  } else {
    predicted = params.initial;
  }
  DynVec unnormalized = predicted.cwiseProduct(params.emission.col(static_cast<Eigen::Index>(symbol)));
  const real normalizer = unnormalized.sum();
  if (!(normalizer > 0)) {
    throw ZeroLikelihoodObservation("hmm: observation has zero probability under the predicted belief");
  }
  return {DiscreteBelief{unnormalized / normalizer}, std::log(normalizer)};
}

HmmFilter::HmmFilter(HmmParams params) : params_(std::move(params)) { params_.validate(); }

void HmmFilter::filter(std::size_t symbol) {
  auto [belief, ll] = hmm_forward_step(belief_, params_, symbol);
  belief_ = std::move(belief);
  last_log_cond_like_ = ll;
  log_marginal_like_ += ll;
}

const DiscreteBelief& HmmFilter::belief() const {
  if (!belief_) throw NotYetFiltered();
  return *belief_;
}

real HmmFilter::log_cond_like() const {
  if (!belief_) throw NotYetFiltered();
  return last_log_cond_like_;
}

}  // namespace pf
