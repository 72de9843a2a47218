#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "floras/error.hpp"
#include "floras/fedavg.hpp"
#include "floras/kernels.hpp"
#include "floras/transport.hpp"

using namespace floras;
using namespace floras::fedavg;

namespace {

// n examples, labels cycling 0..9, features uniform in [0, 1].
mnist::Dataset synthetic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mnist::Dataset d;
  d.images.resize(n * mnist::kFeatures);
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.labels[i] = static_cast<std::uint8_t>(i % 10);
    for (std::size_t f = 0; f < mnist::kFeatures; ++f) {
      // A weak class signal in the first 10 features.
      d.images[i * mnist::kFeatures + f] = u(rng) * (f == d.labels[i] ? 2.0 : 1.0) / 2.0;
    }
  }
  return d;
}

ModelVector random_model(Rng& rng, double s) {
  ModelVector w(kDim);
  fill_normal(rng, w, s);
  return w;
}

}  // namespace

TEST_CASE("loss at the zero model") {
  const auto d = synthetic(100, 1);
  const ModelVector w(kDim, 0.0);
  CHECK(loss(w, d, 0.0) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  CHECK(loss(w, d, 0.5) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  const std::vector<std::size_t> batch{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  ModelVector g(kDim);
  CHECK(loss_and_grad(w, d, batch, 0.0, g) == doctest::Approx(2.302585).epsilon(1e-6));
  CHECK_THROWS_AS(loss(ModelVector(10), d, 0.0), ArgumentError);
}

TEST_CASE("gradient matches central differences") {
  const auto d = synthetic(60, 2);
  Rng rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, kDim - 1);
  for (int m = 0; m < 5; ++m) {
    auto w = random_model(rng, 0.1);
    ModelVector g(kDim);
    loss_and_grad(w, d, {}, 0.01, g);
    for (int j = 0; j < 20; ++j) {
      const std::size_t i = j < 2 ? kDim - 1 - j : pick(rng);  // include biases
      const double h = 1e-5, w0 = w[i];
      w[i] = w0 + h;
      const double up = loss(w, d, 0.01);
      w[i] = w0 - h;
      const double dn = loss(w, d, 0.01);
      w[i] = w0;
      const double fd = (up - dn) / (2 * h);
      CAPTURE(i);
      CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
    }
  }
}

TEST_CASE("regularization adds 2 lambda w") {
  const auto d = synthetic(30, 4);
  Rng rng(5);
  const auto w = random_model(rng, 0.2);
  ModelVector g0(kDim), g1(kDim);
  const double l0 = loss_and_grad(w, d, {}, 0.0, g0);
  const double l1 = loss_and_grad(w, d, {}, 0.3, g1);
  CHECK(l1 - l0 == doctest::Approx(0.3 * kernels::sum_squares(w)));
  for (std::size_t i = 0; i < kDim; ++i) REQUIRE(g1[i] - g0[i] == doctest::Approx(0.6 * w[i]));
}

TEST_CASE("accuracy") {
  const auto d = synthetic(50, 6);
  ModelVector w(kDim, 0.0);
  // Bias toward class 3 only.
  w[mnist::kClasses * mnist::kFeatures + 3] = 1.0;
  CHECK(accuracy(w, d) == doctest::Approx(0.1));
}

TEST_CASE("partitions") {
  const auto d = synthetic(4000, 7);
  Rng rng(8);
  const auto iid = partition(d, 20, Partition::iid, rng);
  REQUIRE(iid.size() == 20);
  std::set<std::size_t> seen;
  for (const auto& s : iid) {
    CHECK(s.size() == 200);
    seen.insert(s.begin(), s.end());
    std::array<int, 10> hist{};
    for (auto i : s) hist[d.labels[i]]++;
    for (int h : hist) CHECK(h > 0);
  }
  CHECK(seen.size() == 4000);

  const auto one = partition(d, 20, Partition::one_label, rng);
  seen.clear();
  std::size_t total = 0;
  for (const auto& s : one) {
    CHECK(s.size() == 200);
    std::set<int> labels;
    for (auto i : s) labels.insert(d.labels[i]);
    CHECK(labels.size() == 1);
    seen.insert(s.begin(), s.end());
    total += s.size();
  }
  CHECK(seen.size() == total);
  CHECK(total == 4000);
  CHECK_THROWS_AS(partition(d, 15, Partition::one_label, rng), ConfigError);
  CHECK(parse_partition("noniid") == Partition::one_label);
  CHECK_THROWS_AS(parse_partition("dirichlet"), ConfigError);
}

TEST_CASE("local SGD") {
  const auto d = synthetic(40, 9);
  std::vector<std::size_t> shard(40);
  std::iota(shard.begin(), shard.end(), std::size_t{0});
  Rng rng(10);
  const auto w = random_model(rng, 0.05);

  LocalConfig zero{3, 10, 0.0, 0.01};
  const auto x0 = local_sgd(w, d, shard, zero, rng);
  for (double v : x0) REQUIRE(v == 0.0);

  // One full-batch step: eta * grad.
  LocalConfig one{1, 1000, 0.05, 0.01};
  const auto x1 = local_sgd(w, d, shard, one, rng);
  ModelVector g(kDim);
  loss_and_grad(w, d, shard, 0.01, g);
  for (std::size_t i = 0; i < kDim; ++i) REQUIRE(x1[i] == doctest::Approx(0.05 * g[i]).epsilon(1e-12));

  LocalConfig mini{4, 8, 0.05, 0.01};
  Rng a(11), b(11);
  CHECK(local_sgd(w, d, shard, mini, a) == local_sgd(w, d, shard, mini, b));
}

TEST_CASE("config validation") {
  FLConfig c;
  CHECK_NOTHROW(validate(c));
  c.cohort = 30;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.truncation_bound = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = {};
  c.local.learning_rate = 0.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("noiseless uplinks reproduce plain FedAvg when client scales agree") {
  const auto train = synthetic(50, 12);
  const auto test = synthetic(30, 13);
  std::vector<std::size_t> all(50);
  std::iota(all.begin(), all.end(), std::size_t{0});

  FLConfig cfg;
  cfg.clients = 4;
  cfg.cohort = 4;
  cfg.rounds = 6;
  cfg.local = {2, 50, 0.05, 0.01};
  cfg.clip_norm = 1.0;
  const Shards same(4, all);  // identical data and full batches: identical scales
  const RunSeed seed{42, 0};

  const auto ref = run_reference(cfg, train, test, same, seed);
  NoiselessTransport exact;
  FlorasTransport chips({4, parse_hex("ab"), 0.0});
  for (const Transport* t : {static_cast<const Transport*>(&exact), static_cast<const Transport*>(&chips)}) {
    const auto got = run_training(cfg, *t, train, test, same, seed);
    CAPTURE(t->name());
    REQUIRE(got.metrics.size() == ref.metrics.size());
    for (std::size_t r = 0; r < ref.metrics.size(); ++r) {
      CHECK(std::abs(got.metrics[r].train_loss - ref.metrics[r].train_loss) <= 1e-6);
    }
    for (std::size_t i = 0; i < kDim; ++i) REQUIRE(std::abs(got.model[i] - ref.model[i]) <= 1e-9);
  }

  // K = 1 with partial participation: normalization round-trips exactly.
  cfg.cohort = 1;
  cfg.local.batch_size = 5;
  const Shards split{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {10, 11, 12, 13, 14, 15, 16, 17, 18, 19},
                     {20, 21, 22, 23, 24, 25, 26, 27, 28, 29}, {30, 31, 32, 33, 34, 35, 36, 37, 38, 39}};
  const auto r1 = run_reference(cfg, train, test, split, seed);
  const auto g1 = run_training(cfg, exact, train, test, split, seed);
  CHECK(std::abs(g1.metrics.back().train_loss - r1.metrics.back().train_loss) <= 1e-6);
}

TEST_CASE("training engine") {
  const auto train = synthetic(200, 14);
  const auto test = synthetic(50, 15);
  FLConfig cfg;
  cfg.clients = 20;
  cfg.cohort = 20;
  cfg.rounds = 5;
  cfg.eval_every = 2;
  cfg.local = {1, 5, 0.05, 0.01};
  NoiselessTransport exact;
  const auto a = run_training(cfg, exact, train, test, {7, 1});
  const auto b = run_training(cfg, exact, train, test, {7, 1});
  CHECK(a.model == b.model);
  REQUIRE(a.metrics.size() == 3);  // rounds 2, 4 and the last
  CHECK(a.metrics[0].round == 2);
  CHECK(a.metrics[2].round == 5);
  CHECK(a.metrics.back().train_loss < std::log(10.0));

  // A transport that never delivers leaves the model untouched.
  struct Dead final : Transport {
    std::string_view name() const override { return "dead"; }
    std::optional<ModelVector> aggregate(std::span<const ModelVector>, std::uint64_t, Rng&) const override {
      return std::nullopt;
    }
  } dead;
  const auto z = run_training(cfg, dead, train, test, {7, 1});
  CHECK(z.skipped_rounds == 5);
  CHECK(std::all_of(z.model.begin(), z.model.end(), [](double v) { return v == 0.0; }));
  CHECK(z.metrics.front().skipped);

  // Client order inside the cohort does not matter for an exact sum.
  std::vector<ModelVector> xs{{1, 2}, {3, -1}, {0.5, 0.5}};
  Rng r(0);
  auto fwd = *exact.aggregate(xs, 0, r);
  std::reverse(xs.begin(), xs.end());
  CHECK(*exact.aggregate(xs, 0, r) == fwd);
}
