#include "floras/fedavg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "floras/error.hpp"
#include "floras/kernels.hpp"
#include "floras/transport.hpp"

namespace floras::fedavg {
namespace {

constexpr std::size_t kC = mnist::kClasses;
constexpr std::size_t kF = mnist::kFeatures;
constexpr std::size_t kBiasOffset = kC * kF;

void check_model(std::span<const double> w) {
  if (w.size() != kDim) {
    throw ArgumentError("model has " + std::to_string(w.size()) + " parameters, expected 4010");
  }
}

// logits = W x + b, then in-place softmax; returns log-sum-exp.
double softmax(std::span<const double> w, std::span<const double> x, std::array<double, kC>& p) {
  kernels::gemv(w.first(kBiasOffset), kC, kF, x, p);
  double mx = -INFINITY;
  for (std::size_t c = 0; c < kC; ++c) {
    p[c] += w[kBiasOffset + c];
    mx = std::max(mx, p[c]);
  }
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : p) v /= z;
  return mx + std::log(z);
}

}  // namespace

double loss_and_grad(std::span<const double> w, const mnist::Dataset& data,
                     std::span<const std::size_t> batch, double lambda, std::span<double> grad) {
  check_model(w);
  if (!grad.empty() && grad.size() != kDim) throw ArgumentError("gradient buffer must hold 4010");
  if (lambda < 0.0) throw ArgumentError("regularization must be non-negative");
  const std::size_t n = batch.empty() ? data.size() : batch.size();
  if (n == 0) throw ArgumentError("empty batch");
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);

  const double inv_n = 1.0 / static_cast<double>(n);
  std::array<double, kC> p{};
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = batch.empty() ? j : batch[j];
    const auto x = data.row(i);
    const std::size_t y = data.labels[i];
    const double lse = softmax(w, x, p);
    double logit_y = w[kBiasOffset + y] + kernels::dot(w.subspan(y * kF, kF), x);
    total += lse - logit_y;
    if (grad.empty()) continue;
    for (std::size_t c = 0; c < kC; ++c) {
      const double r = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
      kernels::axpy(r, x, grad.subspan(c * kF, kF));
      grad[kBiasOffset + c] += r;
    }
  }
  double value = total * inv_n;
  if (lambda > 0.0) {
    value += lambda * kernels::sum_squares(w);
    if (!grad.empty()) kernels::axpy(2.0 * lambda, w, grad);
  }
  return value;
}

double loss(std::span<const double> w, const mnist::Dataset& data, double lambda) {
  return loss_and_grad(w, data, {}, lambda, {});
}

double accuracy(std::span<const double> w, const mnist::Dataset& data) {
  check_model(w);
  if (data.size() == 0) throw ArgumentError("empty dataset");
  std::array<double, kC> logits{};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    kernels::gemv(w.first(kBiasOffset), kC, kF, data.row(i), logits);
    for (std::size_t c = 0; c < kC; ++c) logits[c] += w[kBiasOffset + c];
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    hits += static_cast<std::size_t>(best) == data.labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::string_view partition_name(Partition p) { return p == Partition::iid ? "iid" : "one_label"; }

Partition parse_partition(std::string_view name) {
  if (name == "iid") return Partition::iid;
  if (name == "one_label" || name == "noniid") return Partition::one_label;
  throw ConfigError("unknown partition '" + std::string(name) + "'");
}

Shards partition(const mnist::Dataset& data, std::size_t clients, Partition mode, Rng& rng) {
  if (clients == 0) throw ConfigError("need at least one client");
  Shards shards(clients);
  if (mode == Partition::iid) {
    const std::size_t per = data.size() / clients;
    if (per == 0) throw ConfigError("fewer examples than clients");
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < clients; ++k) {
      shards[k].assign(idx.begin() + static_cast<std::ptrdiff_t>(k * per),
                       idx.begin() + static_cast<std::ptrdiff_t>((k + 1) * per));
    }
    return shards;
  }

  if (clients % kC != 0) {
    throw ConfigError("one_label partition needs a client count that is a multiple of 10, got " +
                      std::to_string(clients));
  }
  std::array<std::vector<std::size_t>, kC> by_label;
  for (std::size_t i = 0; i < data.size(); ++i) by_label[data.labels[i]].push_back(i);
  const std::size_t per_label = clients / kC;
  std::size_t smallest = data.size();
  for (const auto& v : by_label) smallest = std::min(smallest, v.size());
  const std::size_t per = smallest / per_label;
  if (per == 0) throw ConfigError("some label has fewer examples than its clients");
  // Sorted by label; labels are dealt to clients in a random order.
  std::vector<std::size_t> owner(clients);
  std::iota(owner.begin(), owner.end(), std::size_t{0});
  std::shuffle(owner.begin(), owner.end(), rng);
  for (std::size_t label = 0; label < kC; ++label) {
    auto& pool = by_label[label];
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t j = 0; j < per_label; ++j) {
      auto& shard = shards[owner[label * per_label + j]];
      shard.assign(pool.begin() + static_cast<std::ptrdiff_t>(j * per),
                   pool.begin() + static_cast<std::ptrdiff_t>((j + 1) * per));
    }
  }
  return shards;
}

ModelVector local_sgd(std::span<const double> w_global, const mnist::Dataset& data,
                      std::span<const std::size_t> shard, const LocalConfig& cfg, Rng& rng) {
  check_model(w_global);
  if (shard.empty()) throw ArgumentError("client shard is empty");
  ModelVector w(w_global.begin(), w_global.end());
  ModelVector grad(kDim);
  const std::size_t b = std::min(cfg.batch_size, shard.size());
  std::vector<std::size_t> batch(b);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    if (b == shard.size()) {
      std::copy(shard.begin(), shard.end(), batch.begin());
    } else {
      std::sample(shard.begin(), shard.end(), batch.begin(), b, rng);
    }
    loss_and_grad(w, data, batch, cfg.lambda, grad);
    kernels::axpy(-cfg.learning_rate, grad, w);
  }
  ModelVector diff(w_global.begin(), w_global.end());
  kernels::axpy(-1.0, w, diff);
  return diff;
}

void validate(const FLConfig& cfg) {
  if (cfg.cohort == 0 || cfg.cohort > cfg.clients) throw ConfigError("need 1 <= K <= M");
  if (cfg.local.steps == 0) throw ConfigError("E must be at least 1");
  if (cfg.local.batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(cfg.local.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (cfg.local.lambda < 0.0) throw ConfigError("regularization must be non-negative");
  if (!(cfg.clip_norm > 0.0)) throw ConfigError("clip norm C must be positive");
  if (cfg.truncation_bound > 0.0) aircomp::check_truncation_bound(cfg.truncation_bound, cfg.clip_norm);
  if (cfg.eval_every == 0) throw ConfigError("eval_every must be positive");
}

namespace {

std::vector<std::size_t> select_cohort(const FLConfig& cfg, RunSeed seed, std::size_t round) {
  std::vector<std::size_t> all(cfg.clients);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (cfg.cohort == cfg.clients) return all;
  auto rng = make_stream(seed.master, "select", seed.trial, round);
  std::vector<std::size_t> cohort(cfg.cohort);
  std::sample(all.begin(), all.end(), cohort.begin(), cfg.cohort, rng);
  return cohort;
}

ModelVector client_update(const FLConfig& cfg, const mnist::Dataset& train, const Shards& shards,
                          std::span<const double> w, std::size_t client, RunSeed seed,
                          std::size_t round) {
  auto rng = make_stream(seed.master, "sgd/" + std::to_string(client), seed.trial, round);
  return local_sgd(w, train, shards[client], cfg.local, rng);
}

bool due(const FLConfig& cfg, std::size_t round) {
  return round % cfg.eval_every == 0 || round == cfg.rounds;
}

void record(TrainingResult& res, const FLConfig& cfg, const mnist::Dataset& train,
            const mnist::Dataset& test, std::size_t round, bool skipped) {
  if (!due(cfg, round)) return;
  res.metrics.push_back(
      {round, loss(res.model, train, cfg.local.lambda), accuracy(res.model, test), skipped});
}

void check_shards(const FLConfig& cfg, const Shards& shards) {
  if (shards.size() != cfg.clients) throw ConfigError("need one shard per client");
}

}  // namespace

TrainingResult run_training(const FLConfig& cfg, const Transport& transport,
                            const mnist::Dataset& train, const mnist::Dataset& test,
                            const Shards& shards, RunSeed seed) {
  validate(cfg);
  check_shards(cfg, shards);
  TrainingResult res;
  res.model.assign(kDim, 0.0);
  std::vector<ModelVector> sent(cfg.cohort);
  std::vector<aircomp::NormParams> params(cfg.cohort);
  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const auto cohort = select_cohort(cfg, seed, t);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      const auto diff = client_update(cfg, train, shards, res.model, cohort[i], seed, t);
      try {
        auto norm = aircomp::normalize_differential(diff, cfg.clip_norm);
        sent[i] = std::move(norm.values);
        params[i] = norm.params;
      } catch (const DegenerateInputError&) {
        sent[i].assign(kDim, 0.0);
        params[i] = {diff.front(), 0.0};
      }
    }
    auto rng = make_stream(seed.master, "uplink", seed.trial, t);
    auto decoded = transport.aggregate(sent, t, rng);
    if (!decoded) {
      ++res.skipped_rounds;
      record(res, cfg, train, test, t, true);
      continue;
    }
    if (cfg.truncation_bound > 0.0) *decoded = aircomp::truncate(*decoded, cfg.truncation_bound);
    const auto sum = aircomp::denormalize_sum(*decoded, params);
    kernels::axpy(-1.0 / static_cast<double>(cfg.cohort), sum, res.model);
    record(res, cfg, train, test, t, false);
  }
  return res;
}

TrainingResult run_training(const FLConfig& cfg, const Transport& transport,
                            const mnist::Dataset& train, const mnist::Dataset& test, RunSeed seed) {
  validate(cfg);
  auto rng = make_stream(seed.master, "partition", seed.trial, 0);
  const auto shards = partition(train, cfg.clients, cfg.partition, rng);
  return run_training(cfg, transport, train, test, shards, seed);
}

TrainingResult run_reference(const FLConfig& cfg, const mnist::Dataset& train,
                             const mnist::Dataset& test, const Shards& shards, RunSeed seed) {
  validate(cfg);
  check_shards(cfg, shards);
  TrainingResult res;
  res.model.assign(kDim, 0.0);
  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const auto cohort = select_cohort(cfg, seed, t);
    ModelVector next(kDim, 0.0);
    for (std::size_t client : cohort) {
      const auto diff = client_update(cfg, train, shards, res.model, client, seed, t);
      // Local model w - diff, averaged.
      kernels::axpy(1.0, res.model, next);
      kernels::axpy(-1.0, diff, next);
    }
    kernels::scale(1.0 / static_cast<double>(cohort.size()), next);
    res.model = std::move(next);
    record(res, cfg, train, test, t, false);
  }
  return res;
}

}  // namespace floras::fedavg
