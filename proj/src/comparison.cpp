#include "pf/comparison.hpp"

#include "pf/io.hpp"
#include "pf/models/simulate.hpp"
#include "pf/smc.hpp"

namespace pf {

std::vector<ComparisonRow> run_svol_comparison(std::span<const Vec<1>> data, const ComparisonConfig& config) {
  const SvolModel model(config.params);
  const auto stream = [&](StreamId id) { return Prng::stream(config.seed, static_cast<std::uint64_t>(id)); };

  BootstrapFilter<SvolModel> bs(model, config.particles, config.policy, stream(StreamId::Bootstrap));
  AuxiliaryFilter<SvolModel> apf(model, config.particles, config.policy, stream(StreamId::Auxiliary));
  SisrFilter<SvolModel> sisr(model, config.particles, config.policy, stream(StreamId::Sisr));

  const TestFunctions<1> hs{[](const Vec<1>& x) -> DynMat { return x; }};
  std::vector<ComparisonRow> rows;
  rows.reserve(data.size());
  for (const auto& y : data) {
    bs.filter(y, hs);
    apf.filter(y, hs);
    sisr.filter(y, hs);
    rows.push_back({bs.expectations()[0](0, 0), bs.log_cond_like(), apf.expectations()[0](0, 0),
                    apf.log_cond_like(), sisr.expectations()[0](0, 0), sisr.log_cond_like()});
  }
  return rows;
}

void write_comparison(std::ostream& out, std::span<const ComparisonRow> rows) {
  write_header(out, comparison_columns);
  for (const auto& row : rows) {
    write_row(out, row);
  }
}

std::vector<Vec<1>> simulate_svol_observations(const SvolParams& params, std::size_t steps, std::uint64_t seed) {
  Prng rng = Prng::stream(seed, static_cast<std::uint64_t>(StreamId::Data));
  return simulate(SvolModel(params), steps, rng).observations;
}

}  // namespace pf
