#pragma once

// FedAvg over a multinomial logistic-regression model on 20x20 MNIST.
//
// Parameter layout (d = 4010): W as 10 rows of 400 weights, row-major,
// followed by the 10 biases. Loss is mean softmax cross-entropy plus
// lambda * ||w||^2 over every parameter, biases included.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "floras/aircomp.hpp"
#include "floras/mnist.hpp"
#include "floras/rng.hpp"

namespace floras {
class Transport;
}

namespace floras::fedavg {

using aircomp::ModelVector;

inline constexpr std::size_t kDim = mnist::kClasses * mnist::kFeatures + mnist::kClasses;

// Mean loss over `batch` rows of `data` (all rows when batch is empty),
// writing the gradient into `grad` when it is non-empty.
double loss_and_grad(std::span<const double> w, const mnist::Dataset& data,
                     std::span<const std::size_t> batch, double lambda, std::span<double> grad);

double loss(std::span<const double> w, const mnist::Dataset& data, double lambda);
double accuracy(std::span<const double> w, const mnist::Dataset& data);

enum class Partition { iid, one_label };
std::string_view partition_name(Partition p);
// Throws ConfigError for an unknown name.
Partition parse_partition(std::string_view name);

using Shards = std::vector<std::vector<std::size_t>>;

// iid: shuffle and split into equal shards. one_label: every shard holds a
// single label, clients / 10 shards per label, equal shard sizes (leftover
// examples of a label are dropped). Throws ConfigError when one_label is
// asked for a client count that is not a multiple of 10 or when the data
// cannot fill equal shards.
Shards partition(const mnist::Dataset& data, std::size_t clients, Partition mode, Rng& rng);

struct LocalConfig {
  std::size_t steps = 1;       // E
  std::size_t batch_size = 50;  // clamped to the shard size
  double learning_rate = 0.005;
  double lambda = 0.01;
};

// E mini-batch SGD steps from w_global on the shard; each batch is drawn
// uniformly without replacement. Returns w_global - w_local.
ModelVector local_sgd(std::span<const double> w_global, const mnist::Dataset& data,
                      std::span<const std::size_t> shard, const LocalConfig& cfg, Rng& rng);

struct FLConfig {
  std::size_t clients = 20;  // M
  std::size_t cohort = 20;   // K
  LocalConfig local;
  std::size_t rounds = 200;  // T
  Partition partition = Partition::iid;
  double clip_norm = 1.0;         // C
  double truncation_bound = 0.0;  // B; <= 0 disables truncation
  std::size_t eval_every = 1;     // metrics every n rounds (and after the last)
};

// Throws ConfigError for K > M, K == 0, E == 0, eta <= 0, C <= 0 or a
// truncation bound that does not exceed C.
void validate(const FLConfig& cfg);

struct RoundMetrics {
  std::size_t round = 0;  // 1-based: metrics of w_round
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  bool skipped = false;
};

struct TrainingResult {
  std::vector<RoundMetrics> metrics;
  ModelVector model;
  std::size_t skipped_rounds = 0;
};

// Random streams used by a training run, all derived from (seed, trial):
//   "partition" (round 0), "select" (round t), "sgd/<client>" (round t),
//   "uplink" (round t).
struct RunSeed {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
};

// Federated training through `transport`. Each round samples K of M clients
// without replacement, runs local SGD, normalizes each differential to norm
// C, aggregates through the transport, truncates, de-normalizes and applies
// w <- w - x / K.
TrainingResult run_training(const FLConfig& cfg, const Transport& transport,
                            const mnist::Dataset& train, const mnist::Dataset& test, RunSeed seed);

// Same, with caller-provided shards (shards.size() must equal M).
TrainingResult run_training(const FLConfig& cfg, const Transport& transport,
                            const mnist::Dataset& train, const mnist::Dataset& test,
                            const Shards& shards, RunSeed seed);

// Plain FedAvg: w <- mean of the cohort's local models, sharing every random
// stream with run_training.
TrainingResult run_reference(const FLConfig& cfg, const mnist::Dataset& train,
                             const mnist::Dataset& test, const Shards& shards, RunSeed seed);

}  // namespace floras::fedavg
