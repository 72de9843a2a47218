#pragma once

// Experiment specs, presets and the runner behind `floras run`.
//
// A spec is a JSON document:
//
//   {
//     "name": "fig4_iid",
//     "kind": "training",              // or "accountant"
//     "seed": 20230501, "trials": 5,
//     "n_train": 4000, "n_test": 1000,
//     "delta": 1e-5,
//     "fl": { "clients": 20, "cohort": 20, "local_steps": 1, "batch_size": 50,
//             "learning_rate": 0.005, "rounds": 200, "partition": "iid",
//             "lambda": 0.01, "eval_every": 1 },
//     "cases": [
//       { "label": "floras_0dB", "transport": "floras", "snr_db": 0,
//         "snr_reference": "unit_pilot", "gap": 0, "clip_norm": 0.5,
//         "truncation": 5, "gain_mode": "phase_corrected",
//         "fading": "rayleigh_complex", "key": "00ff...",
//         "threshold": 0.01, "max_power": 1.0,
//         "fl": { ...per-case overrides of the fl block... } } ],
//     "accountant": [ { "label": "q0.05_gap5", "q": 0.05, "gap": 5,
//                       "clip_norm": 1, "rounds": 1000, "level": "item" } ]
//   }
//
// transport is one of noiseless, floras, floras_analytic, channel_inversion.
// A case may give "set_size" (N) instead of "gap" (N - K).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "floras/channel.hpp"
#include "floras/fedavg.hpp"

namespace floras::experiment {

enum class TransportKind { noiseless, floras, floras_analytic, channel_inversion };

struct CaseSpec {
  std::string label;
  TransportKind transport = TransportKind::floras;
  double snr_db = 20.0;
  channel::SnrReference snr_reference = channel::SnrReference::unit_pilot;
  std::size_t gap = 0;                       // N - K
  std::optional<std::size_t> set_size;       // N, overrides gap when present
  double clip_norm = 1.0;                    // C
  double truncation = 0.0;                   // B; 0 picks 10 C for FLORAS
  channel::GainMode gain_mode = channel::GainMode::phase_corrected;
  channel::FadingModel fading = channel::FadingModel::rayleigh_complex;
  std::string key_hex = "464c4f524153";      // assignment key
  double threshold = 0.01;
  double max_power = 1.0;
  fedavg::FLConfig fl;                       // resolved (base + overrides)
};

struct AccountantCase {
  std::string label;
  double q = 0.05;
  double gap = 5.0;
  double clip_norm = 1.0;
  std::uint64_t rounds = 1000;
  bool client_level = false;
};

struct ExperimentSpec {
  std::string name = "experiment";
  bool accountant_only = false;
  std::uint64_t seed = 20230501;
  std::size_t trials = 5;
  std::size_t n_train = 4000;
  std::size_t n_test = 1000;
  double delta = 1e-5;
  std::vector<CaseSpec> cases;
  std::vector<AccountantCase> accountant;
};

// Parses and resolves a spec. Throws ConfigError on malformed JSON or an
// unknown enum string; range checks are left to validate_spec.
ExperimentSpec parse_spec(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentSpec& spec);

// Every problem found, as human-readable lines. Empty means valid.
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

// N for a case: set_size if given, else K + gap.
std::size_t set_size_of(const CaseSpec& c);
// Effective truncation bound (0 = none).
double truncation_of(const CaseSpec& c);
// Noise variance for a case under its SNR reference.
double sigma2_of(const CaseSpec& c);

// Presets: fig2, fig4_iid, fig4_noniid, fig5_iid, fig5_noniid, fig5.
std::vector<std::string> preset_names();
// Throws ConfigError for an unknown preset.
ExperimentSpec preset(const std::string& name);

// Per-case results averaged over trials, keyed like the metrics CSV.
struct CaseSummary {
  std::string label;
  std::vector<std::size_t> rounds;
  std::vector<double> loss_mean, loss_std, acc_mean, acc_std;
  std::vector<double> eps_item, eps_client;
  std::size_t skipped_rounds = 0;
};

struct RunOptions {
  std::filesystem::path data_dir;   // MNIST IDX directory
  std::filesystem::path out_dir;    // empty: write nothing
  std::size_t jobs = 1;
  bool quiet = true;
};

// Runs every case and trial. Writes, per case,
//   <name>_<label>_trials.csv   trial,round,train_loss,test_accuracy,epsilon_item,epsilon_client
//   <name>_<label>_summary.csv  round,train_loss_mean,train_loss_std,test_accuracy_mean,test_accuracy_std,epsilon_item,epsilon_client
// and <name>_series.json with the same summaries. Accountant specs write
//   <name>_<label>.csv          round,rule,epsilon
// Throws ConfigError when validation fails, IngestionError for bad data.
std::vector<CaseSummary> run_experiment(const ExperimentSpec& spec, const RunOptions& opts);

// Data directory: explicit value, else $FLORAS_DATA_DIR, else the build-time
// default.
std::filesystem::path resolve_data_dir(const std::filesystem::path& explicit_dir);

// Item- and client-level epsilon' after `round` rounds for a case; +inf when
// the transport offers no Cauchy noise.
double epsilon_item(const CaseSpec& c, double delta, std::size_t round, std::size_t shard_size);
double epsilon_client(const CaseSpec& c, double delta, std::size_t round);

}  // namespace floras::experiment
