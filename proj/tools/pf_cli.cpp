// Command-line front end: svol filter comparison, data simulation and single-filter runs.
//
//   pf_cli compare  (--data FILE | --simulate T) [--particles N] [--seed S] [--resampler R] [--criterion C]
//   pf_cli simulate --model {svol|lgssm} --steps T [--seed S] [model parameters]
//   pf_cli filter   --model {svol|lgssm} --algorithm {bootstrap|sisr|apf|kalman} --data FILE [...]
//
// Exit codes: 0 success, 1 data or runtime error, 2 invalid command line.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "pf/closed_form.hpp"
#include "pf/comparison.hpp"
#include "pf/io.hpp"
#include "pf/models/lgssm.hpp"
#include "pf/models/simulate.hpp"
#include "pf/models/svol.hpp"
#include "pf/smc.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct PolicyOptions {
  std::string resampler = "multinomial";
  std::string criterion;
};

struct ScalarLgssmOptions {
  double a = 0.9, c = 1.0, q = 1.0, r = 1.0, m0 = 0.0;
  std::optional<double> p0;  // stationary variance when omitted and |a| < 1

  [[nodiscard]] pf::LgssmParams<1, 1> params() const {
    pf::LgssmParams<1, 1> p;
    p.A(0, 0) = a;
    p.C(0, 0) = c;
    p.Q(0, 0) = q;
    p.R(0, 0) = r;
    p.m0(0) = m0;
    if (p0) {
      p.P0(0, 0) = *p0;
    } else if (std::abs(a) < 1) {
      p.P0(0, 0) = q / (1 - a * a);
    } else {
      throw pf::InvalidParams("lgssm: --p0 is required when |a| >= 1");
    }
    return p;
  }
};

void add_policy_options(CLI::App* cmd, PolicyOptions& opts, const std::string& default_criterion) {
  opts.criterion = default_criterion;
  cmd->add_option("--resampler", opts.resampler, "Resampling scheme")
      ->check(CLI::IsMember({"multinomial", "residual", "stratified", "systematic"}))
      ->capture_default_str();
  cmd->add_option("--criterion", opts.criterion, "Resampling trigger: always, never or ess:<ratio>")
      ->capture_default_str();
}

pf::ResamplePolicy make_policy(const PolicyOptions& opts) {
  return {pf::parse_scheme(opts.resampler), pf::parse_trigger(opts.criterion)};
}

void add_svol_options(CLI::App* cmd, pf::SvolParams& p) {
  cmd->add_option("--phi", p.phi, "State persistence")->capture_default_str();
  cmd->add_option("--beta", p.beta, "Observation scale")->capture_default_str();
  cmd->add_option("--sigma", p.sigma, "State noise standard deviation")->capture_default_str();
}

void add_lgssm_options(CLI::App* cmd, ScalarLgssmOptions& o) {
  cmd->add_option("--a", o.a, "Scalar LGSSM transition coefficient")->capture_default_str();
  cmd->add_option("--c", o.c, "Scalar LGSSM observation coefficient")->capture_default_str();
  cmd->add_option("--q", o.q, "Scalar LGSSM state noise variance")->capture_default_str();
  cmd->add_option("--r", o.r, "Scalar LGSSM observation noise variance")->capture_default_str();
  cmd->add_option("--m0", o.m0, "Scalar LGSSM initial mean")->capture_default_str();
  cmd->add_option("--p0", o.p0, "Scalar LGSSM initial variance (default: stationary)");
}

template <class Filter>
std::string run_particle_filter(Filter& filter, std::span<const pf::Vec<1>> data) {
  std::ostringstream out;
  const std::array<std::string_view, 2> header{"mean", "log_cond_like"};
  pf::write_header(out, header);
  const pf::TestFunctions<1> hs{[](const pf::Vec<1>& x) -> pf::DynMat { return x; }};
  for (const auto& y : data) {
    filter.filter(y, hs);
    const std::array<pf::real, 2> row{filter.expectations()[0](0, 0), filter.log_cond_like()};
    pf::write_row(out, row);
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle filtering for state-space models"};
  app.require_subcommand(1);

  // compare
  auto* compare = app.add_subcommand("compare", "Run bootstrap, auxiliary and SISR filters on svol data");
  std::string compare_data;
  std::size_t compare_steps = 0;
  pf::ComparisonConfig cmp;
  PolicyOptions cmp_policy;
  auto* data_opt = compare->add_option("--data", compare_data, "Headerless one-column CSV of observations");
  auto* sim_opt = compare->add_option("--simulate", compare_steps, "Simulate T+1 svol observations instead");
  data_opt->excludes(sim_opt);
  compare->add_option("--particles", cmp.particles, "Number of particles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compare->add_option("--seed", cmp.seed, "64-bit seed")->capture_default_str();
  add_policy_options(compare, cmp_policy, "always");
  add_svol_options(compare, cmp.params);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate observations from a bundled model");
  std::string sim_model = "svol";
  std::size_t sim_steps = 0;
  std::uint64_t sim_seed = 1;
  std::string sim_states_out;
  pf::SvolParams sim_svol;
  ScalarLgssmOptions sim_lgssm;
  simulate->add_option("--model", sim_model, "Model")->check(CLI::IsMember({"svol", "lgssm"}))->capture_default_str();
  simulate->add_option("--steps", sim_steps, "Last time index T (T+1 rows are written)")->required();
  simulate->add_option("--seed", sim_seed, "64-bit seed")->capture_default_str();
  simulate->add_option("--states-out", sim_states_out, "Also write the latent states to this CSV file");
  add_svol_options(simulate, sim_svol);
  add_lgssm_options(simulate, sim_lgssm);

  // filter
  auto* filter = app.add_subcommand("filter", "Run one filter and print its mean and log conditional likelihood");
  std::string flt_model = "svol";
  std::string flt_algorithm = "bootstrap";
  std::string flt_data;
  std::string flt_proposal = "transition";
  std::size_t flt_particles = 5000;
  std::uint64_t flt_seed = 1;
  PolicyOptions flt_policy;
  pf::SvolParams flt_svol;
  ScalarLgssmOptions flt_lgssm;
  filter->add_option("--model", flt_model, "Model")->check(CLI::IsMember({"svol", "lgssm"}))->capture_default_str();
  filter->add_option("--algorithm", flt_algorithm, "Filter")
      ->check(CLI::IsMember({"bootstrap", "sisr", "apf", "kalman"}))
      ->capture_default_str();
  filter->add_option("--data", flt_data, "Headerless one-column CSV of observations")->required();
  filter->add_option("--particles", flt_particles, "Number of particles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  filter->add_option("--seed", flt_seed, "64-bit seed")->capture_default_str();
  filter->add_option("--proposal", flt_proposal, "LGSSM SISR proposal")
      ->check(CLI::IsMember({"transition", "optimal"}))
      ->capture_default_str();
  add_policy_options(filter, flt_policy, "ess:0.5");
  add_svol_options(filter, flt_svol);
  add_lgssm_options(filter, flt_lgssm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::string output;
  try {
    if (compare->parsed()) {
      if (data_opt->count() == 0 && sim_opt->count() == 0) {
        std::cerr << "compare: one of --data or --simulate is required\n";
        return kExitUsage;
      }
      cmp.policy = make_policy(cmp_policy);
      const auto data = sim_opt->count() > 0 ? pf::simulate_svol_observations(cmp.params, compare_steps, cmp.seed)
                                             : pf::to_fixed<1>(pf::read_csv(compare_data, 1));
      const auto rows = pf::run_svol_comparison(data, cmp);
      std::ostringstream out;
      pf::write_comparison(out, rows);
      output = out.str();
    } else if (simulate->parsed()) {
      std::ostringstream obs_out;
      std::ostringstream state_out;
      pf::Prng rng = pf::Prng::stream(sim_seed, static_cast<std::uint64_t>(pf::StreamId::Data));
      auto emit = [&](const auto& sim) {
        for (std::size_t t = 0; t < sim.observations.size(); ++t) {
          pf::write_row(obs_out, std::span<const pf::real>(sim.observations[t].data(), sim.observations[t].size()));
          pf::write_row(state_out, std::span<const pf::real>(sim.states[t].data(), sim.states[t].size()));
        }
      };
      if (sim_model == "svol") {
        emit(pf::simulate(pf::SvolModel(sim_svol), sim_steps, rng));
      } else {
        emit(pf::simulate(pf::ScalarLgssm(sim_lgssm.params()), sim_steps, rng));
      }
      if (!sim_states_out.empty()) {
        std::ofstream states(sim_states_out);
        if (!states) throw pf::IoError("cannot write " + sim_states_out);
        states << state_out.str();
        if (!states) throw pf::IoError("write failure on " + sim_states_out);
      }
      output = obs_out.str();
    } else if (filter->parsed()) {
      const pf::ResamplePolicy policy = make_policy(flt_policy);
      std::optional<pf::SvolModel> svol;
      std::optional<pf::ScalarLgssm> lgssm;
      if (flt_model == "svol") {
        if (flt_algorithm == "kalman") {
          std::cerr << "filter: the kalman algorithm needs --model lgssm\n";
          return kExitUsage;
        }
        svol.emplace(flt_svol);
      } else {
        lgssm.emplace(flt_lgssm.params(),
                      flt_proposal == "optimal" ? pf::LgssmProposal::LocallyOptimal : pf::LgssmProposal::Transition);
      }
      const auto data = pf::to_fixed<1>(pf::read_csv(flt_data, 1));
      pf::Prng rng(flt_seed);
      auto run = [&](const auto& model) -> std::string {
        using M = std::decay_t<decltype(model)>;
        if (flt_algorithm == "bootstrap") {
          pf::BootstrapFilter<M> f(model, flt_particles, policy, rng);
          return run_particle_filter(f, data);
        }
        if (flt_algorithm == "sisr") {
          pf::SisrFilter<M> f(model, flt_particles, policy, rng);
          return run_particle_filter(f, data);
        }
        pf::AuxiliaryFilter<M> f(model, flt_particles, policy, rng);
        return run_particle_filter(f, data);
      };
      if (svol) {
        output = run(*svol);
      } else if (flt_algorithm == "kalman") {
        pf::KalmanFilter<1, 1> kf(lgssm->params());
        std::ostringstream out;
        const std::array<std::string_view, 2> header{"mean", "log_cond_like"};
        pf::write_header(out, header);
        for (const auto& y : data) {
          kf.filter(y);
          const std::array<pf::real, 2> row{kf.belief().mean(0), kf.log_cond_like()};
          pf::write_row(out, row);
        }
        output = out.str();
      } else {
        output = run(*lgssm);
      }
    }
  } catch (const pf::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  std::cout << output;
  std::cout.flush();
  if (!std::cout) {
    std::cerr << "error: failed to write output\n";
    return kExitRuntime;
  }
  return 0;
}
