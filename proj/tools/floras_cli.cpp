// floras: experiment runner, privacy accountant, bound calculator and noise
// validator. Exit codes: 0 ok, 1 other error, 2 validation failure,
// 3 ingestion failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "floras/aircomp.hpp"
#include "floras/bound.hpp"
#include "floras/cauchy.hpp"
#include "floras/channel.hpp"
#include "floras/error.hpp"
#include "floras/experiment.hpp"
#include "floras/kernels.hpp"
#include "floras/privacy.hpp"
#include "floras/seqcode.hpp"

namespace {

using namespace floras;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIngestion = 3;

struct SpecSource {
  std::string preset;
  std::string config;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> eval_every;
};

void add_spec_options(CLI::App* cmd, SpecSource& src) {
  auto* p = cmd->add_option("--preset", src.preset, "Built-in experiment")
                ->check(CLI::IsMember(experiment::preset_names()));
  auto* c = cmd->add_option("--config", src.config, "JSON experiment spec")->check(CLI::ExistingFile);
  p->excludes(c);
  cmd->add_option("--trials", src.trials, "Override the number of Monte Carlo trials");
  cmd->add_option("--rounds", src.rounds, "Override T for every case");
  cmd->add_option("--seed", src.seed, "Override the master seed");
  cmd->add_option("--eval-every", src.eval_every, "Record metrics every n rounds");
}

experiment::ExperimentSpec load_spec(const SpecSource& src) {
  experiment::ExperimentSpec spec;
  if (!src.config.empty()) {
    std::ifstream f(src.config);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("cannot parse " + src.config + ": " + e.what());
    }
    spec = experiment::parse_spec(j);
  } else if (!src.preset.empty()) {
    spec = experiment::preset(src.preset);
  } else {
    throw ConfigError("give --preset or --config");
  }
  if (src.trials) spec.trials = *src.trials;
  if (src.seed) spec.seed = *src.seed;
  for (auto& c : spec.cases) {
    if (src.rounds) c.fl.rounds = *src.rounds;
    if (src.eval_every) c.fl.eval_every = *src.eval_every;
  }
  if (src.rounds) {
    for (auto& a : spec.accountant) a.rounds = *src.rounds;
  }
  return spec;
}

int report_validation(const experiment::ExperimentSpec& spec) {
  const auto errs = experiment::validate_spec(spec);
  if (errs.empty()) {
    std::cout << spec.name << ": ok\n";
    return kExitOk;
  }
  for (const auto& e : errs) std::cerr << spec.name << ": " << e << "\n";
  return kExitValidation;
}

struct AccountantArgs {
  std::string level = "item";
  std::uint64_t rounds = 1000;
  double delta = 1e-5;
  double q = 0.05;
  double clip_norm = 1.0;
  double gap = 5.0;
  std::string rule = "all";
  std::string out;
};

int run_accountant(const AccountantArgs& a) {
  const double q = a.level == "client" ? 1.0 : a.q;
  const double c = privacy::log_term(q, a.clip_norm, a.gap);
  std::vector<privacy::Rule> rules;
  if (a.rule == "all") {
    rules = {privacy::Rule::sequential, privacy::Rule::advanced, privacy::Rule::renyi};
  } else {
    rules = {privacy::parse_rule(a.rule)};
  }
  std::ofstream file;
  if (!a.out.empty()) file.open(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  os << "round,rule,epsilon\n";
  char buf[64];
  for (std::uint64_t t = 1; t <= a.rounds; ++t) {
    for (auto r : rules) {
      double eps = 0.0;
      switch (r) {
        case privacy::Rule::sequential: eps = privacy::compose_sequential(t, c); break;
        case privacy::Rule::advanced: eps = privacy::compose_advanced(t, a.delta, c); break;
        case privacy::Rule::renyi: eps = privacy::compose_renyi(t, a.delta, c); break;
      }
      std::snprintf(buf, sizeof buf, "%.10g", eps);
      os << t << "," << privacy::rule_name(r) << "," << buf << "\n";
    }
  }
  return kExitOk;
}

struct BoundArgs {
  bound::BoundParams p;
  double client_grad = -1.0;  // <0: use H for every client
  std::optional<double> gap;
  std::uint64_t t_max = 1000;
  std::uint64_t step = 1;
};

int run_bound(BoundArgs a) {
  if (a.gap) a.p.epsilon = bound::epsilon_from_gap(a.p.clip_norm, *a.gap);
  a.p.client_grad_bounds.assign(a.p.clients, a.client_grad >= 0.0 ? a.client_grad : a.p.grad_bound);
  bound::validate(a.p);
  if (a.step == 0) throw ArgumentError("--step must be positive");
  std::cout << "t,bound\n";
  char buf[64];
  for (std::uint64_t t = 1; t <= a.t_max; t += a.step) {
    std::snprintf(buf, sizeof buf, "%.10g", bound::convergence_bound(static_cast<double>(t), a.p));
    std::cout << t << "," << buf << "\n";
  }
  return kExitOk;
}

struct NoiseArgs {
  std::size_t n = 25;
  std::size_t k = 20;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double snr_db = 40.0;
  std::size_t bins = 50;
  double range = 20.0;
  std::string hist;
};

int run_verify_noise(const NoiseArgs& a) {
  if (a.n <= a.k) throw ConfigError("verify-noise needs N > K");
  if (a.bins == 0 || !(a.range > 0.0)) throw ArgumentError("--bins and --range must be positive");
  const auto set = seqcode::generate_orthonormal_set(a.n);
  aircomp::DecodeResidualSampler sampler(set, a.k, channel::pilot_snr_to_sigma2(a.snr_db));
  auto rng = make_stream(a.seed, "verify-noise", 0, 0);
  std::vector<double> xs(a.samples);
  for (double& x : xs) x = sampler(rng);
  const cauchy::CauchyParams law{0.0, static_cast<double>(a.n - a.k)};
  const auto ks = cauchy::ks_test(xs, [&](double x) { return cauchy::cdf(x, law); });
  std::printf("N=%zu K=%zu samples=%zu D=%.6g p=%.6g\n", a.n, a.k, a.samples, ks.statistic,
              ks.p_value);
  if (!a.hist.empty()) {
    std::ofstream f(a.hist);
    if (!f) throw ConfigError("cannot write " + a.hist);
    f << "bin_left,bin_right,count,expected\n";
    const double w = 2.0 * a.range / static_cast<double>(a.bins);
    std::vector<std::size_t> counts(a.bins, 0);
    for (double x : xs) {
      if (x < -a.range || x >= a.range) continue;
      counts[static_cast<std::size_t>((x + a.range) / w)]++;
    }
    for (std::size_t b = 0; b < a.bins; ++b) {
      const double lo = -a.range + w * static_cast<double>(b);
      const double expected = static_cast<double>(a.samples) *
                              (cauchy::cdf(lo + w, law) - cauchy::cdf(lo, law));
      f << lo << "," << lo + w << "," << counts[b] << "," << expected << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private over-the-air federated learning simulator"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "Force a kernel variant")->check(CLI::IsMember({"scalar", "avx2"}));

  SpecSource run_src;
  std::string out_dir = "results";
  std::string data_dir;
  std::size_t jobs = 1;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run an experiment preset or spec file");
  add_spec_options(run, run_src);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--data-dir", data_dir, "MNIST IDX directory (default: $FLORAS_DATA_DIR)");
  run->add_option("--jobs", jobs, "Parallel trials")->check(CLI::PositiveNumber);
  run->add_flag("-v,--verbose", verbose, "Log per-trial progress");

  SpecSource val_src;
  auto* validate = app.add_subcommand("validate", "Check a spec without running it");
  add_spec_options(validate, val_src);

  AccountantArgs acc;
  auto* accountant = app.add_subcommand("accountant", "Privacy budget versus rounds");
  accountant->add_option("--level", acc.level)->check(CLI::IsMember({"item", "client"}));
  accountant->add_option("--T", acc.rounds, "Rounds")->check(CLI::PositiveNumber);
  accountant->add_option("--delta", acc.delta);
  accountant->add_option("--q", acc.q, "Sampling rate (item level)");
  accountant->add_option("--C", acc.clip_norm, "Clip norm");
  accountant->add_option("--gap", acc.gap, "N - K");
  accountant->add_option("--rule", acc.rule)
      ->check(CLI::IsMember({"sequential", "advanced", "renyi", "all"}));
  accountant->add_option("--out", acc.out, "CSV path (default stdout)");

  BoundArgs bnd;
  auto* bound_cmd = app.add_subcommand("bound", "Convergence bound versus t");
  bound_cmd->add_option("--mu", bnd.p.mu);
  bound_cmd->add_option("--L", bnd.p.smoothness);
  bound_cmd->add_option("--Gamma", bnd.p.gamma_gap);
  bound_cmd->add_option("--H", bnd.p.grad_bound);
  bound_cmd->add_option("--Hk", bnd.client_grad, "Per-client gradient bound (default H)");
  bound_cmd->add_option("--E", bnd.p.local_steps);
  bound_cmd->add_option("--K", bnd.p.cohort);
  bound_cmd->add_option("--M", bnd.p.clients);
  bound_cmd->add_option("--gamma-shift", bnd.p.gamma_shift);
  bound_cmd->add_option("--C", bnd.p.clip_norm);
  bound_cmd->add_option("--B", bnd.p.truncation);
  auto* eps_opt = bound_cmd->add_option("--eps", bnd.p.epsilon);
  bound_cmd->add_option("--gap", bnd.gap, "N - K; sets eps = 4C/(N-K)")->excludes(eps_opt);
  bound_cmd->add_option("--w0-dist", bnd.p.w0_dist);
  bound_cmd->add_option("--t-max", bnd.t_max);
  bound_cmd->add_option("--step", bnd.step);

  NoiseArgs noise;
  auto* verify = app.add_subcommand("verify-noise", "KS test of the decode residual against Cauchy(0, N-K)");
  verify->add_option("--n", noise.n, "Set size N");
  verify->add_option("--k", noise.k, "Cohort K");
  verify->add_option("--samples", noise.samples);
  verify->add_option("--seed", noise.seed);
  verify->add_option("--snr-db", noise.snr_db);
  verify->add_option("--bins", noise.bins);
  verify->add_option("--range", noise.range, "Histogram half-width");
  verify->add_option("--hist", noise.hist, "Histogram CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!isa.empty()) kernels::select(isa == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar);
    if (*run) {
      const auto spec = load_spec(run_src);
      if (const int rc = report_validation(spec); rc != kExitOk) return rc;
      experiment::RunOptions opts;
      opts.out_dir = out_dir;
      opts.data_dir = data_dir;
      opts.jobs = jobs;
      opts.quiet = !verbose;
      const auto summaries = experiment::run_experiment(spec, opts);
      for (const auto& s : summaries) {
        if (s.acc_mean.empty()) continue;
        std::printf("%s: round %zu loss %.4f acc %.4f +- %.4f\n", s.label.c_str(),
                    s.rounds.back(), s.loss_mean.back(), s.acc_mean.back(), s.acc_std.back());
      }
      return kExitOk;
    }
    if (*validate) return report_validation(load_spec(val_src));
    if (*accountant) return run_accountant(acc);
    if (*bound_cmd) return run_bound(bnd);
    if (*verify) return run_verify_noise(noise);
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kExitIngestion;
  } catch (const std::invalid_argument& e) {
    // ConfigError and ArgumentError
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOk;
}
