#ifndef PF_MODELS_SIMULATE_HPP
#define PF_MODELS_SIMULATE_HPP

#include <cstddef>
#include <vector>

#include "pf/model.hpp"
#include "pf/rand.hpp"

namespace pf {

template <class M>
struct Simulation {
  std::vector<typename M::StateVec> states;
  std::vector<typename M::ObsVec> observations;
};

/// Draws x_0..x_T and y_0..y_T. The stream is consumed as x0, y0, x1, y1, ...
template <SimulatableModel M>
Simulation<M> simulate(const M& model, std::size_t steps, Prng& rng) {
  Simulation<M> sim;
  sim.states.reserve(steps + 1);
  sim.observations.reserve(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) {
    sim.states.push_back(t == 0 ? model.mu_samp(rng) : model.f_samp(sim.states.back(), rng));
    sim.observations.push_back(model.g_samp(sim.states.back(), rng));
  }
  return sim;
}

}  // namespace pf

#endif  // PF_MODELS_SIMULATE_HPP
