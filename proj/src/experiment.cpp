#include "floras/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "floras/error.hpp"
#include "floras/privacy.hpp"
#include "floras/transport.hpp"

#ifndef FLORAS_DEFAULT_DATA_DIR
#define FLORAS_DEFAULT_DATA_DIR "data/mnist"
#endif

namespace floras::experiment {

using nlohmann::json;

namespace {

TransportKind parse_transport(const std::string& s) {
  if (s == "noiseless") return TransportKind::noiseless;
  if (s == "floras") return TransportKind::floras;
  if (s == "floras_analytic") return TransportKind::floras_analytic;
  if (s == "channel_inversion") return TransportKind::channel_inversion;
  throw ConfigError("unknown transport '" + s + "'");
}

std::string transport_name(TransportKind k) {
  switch (k) {
    case TransportKind::noiseless: return "noiseless";
    case TransportKind::floras: return "floras";
    case TransportKind::floras_analytic: return "floras_analytic";
    case TransportKind::channel_inversion: return "channel_inversion";
  }
  return "unknown";
}

channel::SnrReference parse_reference(const std::string& s) {
  if (s == "unit_pilot") return channel::SnrReference::unit_pilot;
  if (s == "per_symbol") return channel::SnrReference::per_symbol;
  throw ConfigError("unknown snr_reference '" + s + "'");
}

channel::GainMode parse_gain_mode(const std::string& s) {
  if (s == "phase_corrected") return channel::GainMode::phase_corrected;
  if (s == "real_part") return channel::GainMode::real_part;
  throw ConfigError("unknown gain_mode '" + s + "'");
}

channel::FadingModel parse_fading(const std::string& s) {
  if (s == "rayleigh_complex") return channel::FadingModel::rayleigh_complex;
  if (s == "real_gaussian") return channel::FadingModel::real_gaussian;
  throw ConfigError("unknown fading model '" + s + "'");
}

void apply_fl(fedavg::FLConfig& fl, const json& j) {
  if (!j.is_object()) throw ConfigError("\"fl\" must be an object");
  fl.clients = j.value("clients", fl.clients);
  fl.cohort = j.value("cohort", fl.cohort);
  fl.local.steps = j.value("local_steps", fl.local.steps);
  fl.local.batch_size = j.value("batch_size", fl.local.batch_size);
  fl.local.learning_rate = j.value("learning_rate", fl.local.learning_rate);
  fl.local.lambda = j.value("lambda", fl.local.lambda);
  fl.rounds = j.value("rounds", fl.rounds);
  fl.eval_every = j.value("eval_every", fl.eval_every);
  if (j.contains("partition")) fl.partition = fedavg::parse_partition(j.at("partition").get<std::string>());
}

json fl_json(const fedavg::FLConfig& fl) {
  return {{"clients", fl.clients},
          {"cohort", fl.cohort},
          {"local_steps", fl.local.steps},
          {"batch_size", fl.local.batch_size},
          {"learning_rate", fl.local.learning_rate},
          {"lambda", fl.local.lambda},
          {"rounds", fl.rounds},
          {"eval_every", fl.eval_every},
          {"partition", std::string(fedavg::partition_name(fl.partition))}};
}

bool uses_sequences(TransportKind k) {
  return k == TransportKind::floras || k == TransportKind::floras_analytic;
}

}  // namespace

ExperimentSpec parse_spec(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("spec must be a JSON object");
    ExperimentSpec s;
    s.name = j.value("name", s.name);
    const std::string kind = j.value("kind", std::string("training"));
    if (kind != "training" && kind != "accountant") throw ConfigError("unknown kind '" + kind + "'");
    s.accountant_only = kind == "accountant";
    s.seed = j.value("seed", s.seed);
    s.trials = j.value("trials", s.trials);
    s.n_train = j.value("n_train", s.n_train);
    s.n_test = j.value("n_test", s.n_test);
    s.delta = j.value("delta", s.delta);
    fedavg::FLConfig base;
    if (j.contains("fl")) apply_fl(base, j.at("fl"));
    for (const auto& cj : j.value("cases", json::array())) {
      CaseSpec c;
      c.fl = base;
      c.label = cj.value("label", std::string("case") + std::to_string(s.cases.size()));
      c.transport = parse_transport(cj.value("transport", std::string("floras")));
      c.snr_db = cj.value("snr_db", c.snr_db);
      c.snr_reference = parse_reference(cj.value("snr_reference", std::string("unit_pilot")));
      if (cj.contains("gap")) {
        const auto g = cj.at("gap").get<long long>();
        if (g < 0) throw ConfigError("gap (N - K) must be non-negative");
        c.gap = static_cast<std::size_t>(g);
      }
      if (cj.contains("set_size")) c.set_size = cj.at("set_size").get<std::size_t>();
      c.clip_norm = cj.value("clip_norm", c.clip_norm);
      c.truncation = cj.value("truncation", c.truncation);
      c.gain_mode = parse_gain_mode(cj.value("gain_mode", std::string("phase_corrected")));
      c.fading = parse_fading(cj.value("fading", std::string("rayleigh_complex")));
      c.key_hex = cj.value("key", c.key_hex);
      c.threshold = cj.value("threshold", c.threshold);
      c.max_power = cj.value("max_power", c.max_power);
      if (cj.contains("fl")) apply_fl(c.fl, cj.at("fl"));
      c.fl.clip_norm = c.clip_norm;
      s.cases.push_back(std::move(c));
    }
    for (const auto& aj : j.value("accountant", json::array())) {
      AccountantCase a;
      a.q = aj.value("q", a.q);
      a.gap = aj.value("gap", a.gap);
      a.clip_norm = aj.value("clip_norm", a.clip_norm);
      a.rounds = aj.value("rounds", a.rounds);
      const std::string level = aj.value("level", std::string("item"));
      if (level != "item" && level != "client") throw ConfigError("level must be item or client");
      a.client_level = level == "client";
      a.label = aj.value("label", "q" + std::to_string(a.q) + "_gap" + std::to_string(a.gap));
      s.accountant.push_back(std::move(a));
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed spec: ") + e.what());
  }
}

json to_json(const ExperimentSpec& s) {
  json j = {{"name", s.name},
            {"kind", s.accountant_only ? "accountant" : "training"},
            {"seed", s.seed},
            {"trials", s.trials},
            {"n_train", s.n_train},
            {"n_test", s.n_test},
            {"delta", s.delta}};
  json cases = json::array();
  for (const auto& c : s.cases) {
    json cj = {{"label", c.label},
               {"transport", transport_name(c.transport)},
               {"snr_db", c.snr_db},
               {"snr_reference", c.snr_reference == channel::SnrReference::unit_pilot ? "unit_pilot"
                                                                                       : "per_symbol"},
               {"gap", c.gap},
               {"clip_norm", c.clip_norm},
               {"truncation", c.truncation},
               {"gain_mode", c.gain_mode == channel::GainMode::phase_corrected ? "phase_corrected"
                                                                               : "real_part"},
               {"fading", c.fading == channel::FadingModel::rayleigh_complex ? "rayleigh_complex"
                                                                             : "real_gaussian"},
               {"key", c.key_hex},
               {"threshold", c.threshold},
               {"max_power", c.max_power},
               {"fl", fl_json(c.fl)}};
    if (c.set_size) cj["set_size"] = *c.set_size;
    cases.push_back(std::move(cj));
  }
  j["cases"] = std::move(cases);
  json acc = json::array();
  for (const auto& a : s.accountant) {
    acc.push_back({{"label", a.label},
                   {"q", a.q},
                   {"gap", a.gap},
                   {"clip_norm", a.clip_norm},
                   {"rounds", a.rounds},
                   {"level", a.client_level ? "client" : "item"}});
  }
  j["accountant"] = std::move(acc);
  return j;
}

std::size_t set_size_of(const CaseSpec& c) {
  return c.set_size ? *c.set_size : c.fl.cohort + c.gap;
}

double truncation_of(const CaseSpec& c) {
  if (c.truncation > 0.0) return c.truncation;
  return uses_sequences(c.transport) ? 10.0 * c.clip_norm : 0.0;
}

double sigma2_of(const CaseSpec& c) {
  return channel::sigma2_for(c.snr_reference, c.snr_db, c.clip_norm, fedavg::kDim);
}

std::vector<std::string> validate_spec(const ExperimentSpec& s) {
  std::vector<std::string> errs;
  if (!(s.delta > 0.0 && s.delta < 1.0)) errs.push_back("delta must lie in (0, 1)");
  if (s.accountant_only) {
    if (s.accountant.empty()) errs.push_back("accountant spec has no entries");
    for (const auto& a : s.accountant) {
      const std::string p = "accountant '" + a.label + "': ";
      if (!(a.q > 0.0 && a.q <= 1.0)) errs.push_back(p + "q must lie in (0, 1]");
      if (!(a.gap > 0.0)) errs.push_back(p + "N - K must be positive");
      if (!(a.clip_norm >= 0.0)) errs.push_back(p + "C must be non-negative");
      if (a.rounds == 0) errs.push_back(p + "rounds must be positive");
    }
    return errs;
  }
  if (s.trials == 0) errs.push_back("trials must be positive");
  if (s.cases.empty()) errs.push_back("spec has no cases");
  if (s.n_train == 0 || s.n_test == 0) errs.push_back("n_train and n_test must be positive");
  for (const auto& c : s.cases) {
    const std::string p = "case '" + c.label + "': ";
    const auto& fl = c.fl;
    if (fl.cohort == 0) errs.push_back(p + "cohort K must be positive");
    if (fl.cohort > fl.clients) errs.push_back(p + "cohort K exceeds client count M");
    if (fl.local.steps == 0) errs.push_back(p + "local_steps E must be positive");
    if (fl.local.batch_size == 0) errs.push_back(p + "batch_size must be positive");
    if (!(fl.local.learning_rate > 0.0)) errs.push_back(p + "learning_rate must be positive");
    if (fl.local.lambda < 0.0) errs.push_back(p + "lambda must be non-negative");
    if (fl.rounds == 0) errs.push_back(p + "rounds must be positive");
    if (fl.eval_every == 0) errs.push_back(p + "eval_every must be positive");
    if (fl.partition == fedavg::Partition::one_label && fl.clients % mnist::kClasses != 0) {
      errs.push_back(p + "one_label partition needs M to be a multiple of 10");
    }
    if (fl.clients > 0 && s.n_train / fl.clients == 0) errs.push_back(p + "fewer examples than clients");
    if (!(c.clip_norm > 0.0)) errs.push_back(p + "clip_norm C must be positive");
    if (c.set_size && *c.set_size < fl.cohort) {
      errs.push_back(p + "set smaller than cohort (N < K)");
    }
    const double b = truncation_of(c);
    if (b > 0.0 && c.clip_norm > 0.0 && b < 10.0 * c.clip_norm) {
      errs.push_back(p + "truncation bound B must be at least 10 C");
    }
    if (c.transport == TransportKind::channel_inversion) {
      if (!(c.threshold > 0.0)) errs.push_back(p + "threshold must be positive");
      if (!(c.max_power > 0.0)) errs.push_back(p + "max_power must be positive");
    }
    if (c.transport == TransportKind::floras) {
      try {
        if (parse_hex(c.key_hex).empty()) errs.push_back(p + "key must be non-empty");
      } catch (const ConfigError& e) {
        errs.push_back(p + e.what());
      }
    }
    if (fl.clients > 0 && s.n_train / fl.clients > 0) {
      const double q = std::min<double>(1.0, static_cast<double>(fl.local.batch_size) /
                                                 static_cast<double>(s.n_train / fl.clients));
      if (!(q > 0.0 && q <= 1.0)) errs.push_back(p + "sampling rate q must lie in (0, 1]");
    }
  }
  return errs;
}

namespace {

ExperimentSpec fig4(bool iid) {
  ExperimentSpec s;
  s.name = iid ? "fig4_iid" : "fig4_noniid";
  fedavg::FLConfig fl;
  fl.local.batch_size = 50;
  fl.local.learning_rate = iid ? 0.005 : 0.001;
  fl.partition = iid ? fedavg::Partition::iid : fedavg::Partition::one_label;
  for (double snr : {0.0, 15.0}) {
    for (auto kind : {TransportKind::floras, TransportKind::channel_inversion}) {
      CaseSpec c;
      c.label = std::string(kind == TransportKind::floras ? "floras" : "inversion") + "_" +
                std::to_string(static_cast<int>(snr)) + "dB";
      c.transport = kind;
      c.snr_db = snr;
      c.clip_norm = 0.5;
      c.truncation = 5.0;
      c.fl = fl;
      c.fl.clip_norm = c.clip_norm;
      s.cases.push_back(c);
    }
  }
  return s;
}

void add_fig5_cases(ExperimentSpec& s, bool iid) {
  fedavg::FLConfig fl;
  fl.local.batch_size = 20;
  fl.local.learning_rate = iid ? 0.005 : 0.001;
  fl.partition = iid ? fedavg::Partition::iid : fedavg::Partition::one_label;
  for (std::size_t gap : {0, 1, 5, 10}) {
    CaseSpec c;
    c.label = std::string(iid ? "iid" : "noniid") + "_gap" + std::to_string(gap);
    c.transport = TransportKind::floras;
    c.snr_db = 20.0;
    c.gap = gap;
    c.clip_norm = iid ? 50.0 : 300.0;
    c.truncation = 10.0 * c.clip_norm;
    c.fl = fl;
    c.fl.clip_norm = c.clip_norm;
    s.cases.push_back(c);
  }
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2", "fig4_iid", "fig4_noniid", "fig5_iid", "fig5_noniid", "fig5"};
}

ExperimentSpec preset(const std::string& name) {
  if (name == "fig2") {
    ExperimentSpec s;
    s.name = "fig2";
    s.accountant_only = true;
    s.trials = 1;
    const struct { double q, gap; const char* label; } cfgs[] = {
        {0.05, 5.0, "q0.05_gap5"}, {0.01, 5.0, "q0.01_gap5"}, {0.05, 10.0, "q0.05_gap10"}};
    for (const auto& c : cfgs) s.accountant.push_back({c.label, c.q, c.gap, 1.0, 1000, false});
    return s;
  }
  if (name == "fig4_iid") return fig4(true);
  if (name == "fig4_noniid") return fig4(false);
  if (name == "fig5_iid" || name == "fig5_noniid" || name == "fig5") {
    ExperimentSpec s;
    s.name = name;
    if (name != "fig5_noniid") add_fig5_cases(s, true);
    if (name != "fig5_iid") add_fig5_cases(s, false);
    return s;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::filesystem::path resolve_data_dir(const std::filesystem::path& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("FLORAS_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return FLORAS_DEFAULT_DATA_DIR;
}

double epsilon_item(const CaseSpec& c, double delta, std::size_t round, std::size_t shard_size) {
  const std::size_t n = set_size_of(c);
  if (!uses_sequences(c.transport) || n <= c.fl.cohort || shard_size == 0) {
    return std::numeric_limits<double>::infinity();
  }
  const double q = std::min(1.0, static_cast<double>(c.fl.local.batch_size) /
                                     static_cast<double>(shard_size));
  const double gap = static_cast<double>(n - c.fl.cohort);
  return privacy::compose_renyi(round, delta, privacy::log_term(q, c.clip_norm, gap));
}

double epsilon_client(const CaseSpec& c, double delta, std::size_t round) {
  const std::size_t n = set_size_of(c);
  if (!uses_sequences(c.transport) || n <= c.fl.cohort) {
    return std::numeric_limits<double>::infinity();
  }
  return privacy::compose_client_level(round, delta, c.clip_norm,
                                       static_cast<double>(n - c.fl.cohort));
}

namespace {

std::unique_ptr<Transport> make_transport(const CaseSpec& c) {
  switch (c.transport) {
    case TransportKind::noiseless: return std::make_unique<NoiselessTransport>();
    case TransportKind::floras: {
      FlorasParams p;
      p.set_size = set_size_of(c);
      p.key = parse_hex(c.key_hex);
      p.sigma2 = sigma2_of(c);
      p.fading = c.fading;
      p.gain_mode = c.gain_mode;
      return std::make_unique<FlorasTransport>(std::move(p));
    }
    case TransportKind::floras_analytic:
      return std::make_unique<AnalyticFlorasTransport>(set_size_of(c));
    case TransportKind::channel_inversion: {
      InversionParams p;
      p.sigma2 = sigma2_of(c);
      p.max_power = c.max_power;
      p.threshold = c.threshold;
      p.fading = c.fading;
      return std::make_unique<ChannelInversionTransport>(p);
    }
  }
  throw ConfigError("unknown transport");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

std::vector<CaseSummary> run_accountant(const ExperimentSpec& spec, const RunOptions& opts) {
  std::vector<CaseSummary> out;
  for (const auto& a : spec.accountant) {
    const double c = privacy::log_term(a.client_level ? 1.0 : a.q, a.clip_norm, a.gap);
    CaseSummary s;
    s.label = a.label;
    std::ofstream f;
    if (!opts.out_dir.empty()) {
      f = open_out(opts.out_dir / (spec.name + "_" + a.label + ".csv"));
      f << "round,rule,epsilon\n";
    }
    for (std::uint64_t t = 1; t <= a.rounds; ++t) {
      const double seq = privacy::compose_sequential(t, c);
      const double adv = privacy::compose_advanced(t, spec.delta, c);
      const double ren = privacy::compose_renyi(t, spec.delta, c);
      s.rounds.push_back(t);
      s.eps_item.push_back(ren);
      if (f.is_open()) {
        f << t << ",sequential," << fmt(seq) << "\n"
          << t << ",advanced," << fmt(adv) << "\n"
          << t << ",renyi," << fmt(ren) << "\n";
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<CaseSummary> run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  const auto errs = validate_spec(spec);
  if (!errs.empty()) {
    std::string msg = "invalid spec:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
  if (spec.accountant_only) return run_accountant(spec, opts);

  auto data_rng = make_stream(spec.seed, "data", 0, 0);
  mnist::LoadOptions lo;
  lo.n_train = spec.n_train;
  lo.n_test = spec.n_test;
  const auto data = mnist::load_mnist(resolve_data_dir(opts.data_dir), lo, data_rng);

  std::vector<std::unique_ptr<Transport>> transports;
  for (const auto& c : spec.cases) transports.push_back(make_transport(c));

  const std::size_t jobs_total = spec.cases.size() * spec.trials;
  std::vector<fedavg::TrainingResult> results(jobs_total);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::mutex log_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs_total) return;
      const std::size_t ci = job / spec.trials;
      const std::size_t trial = job % spec.trials;
      try {
        auto cfg = spec.cases[ci].fl;
        cfg.truncation_bound = truncation_of(spec.cases[ci]);
        results[job] = fedavg::run_training(cfg, *transports[ci], data.train, data.test,
                                            {spec.seed, trial});
        if (!opts.quiet) {
          std::lock_guard lock(log_mu);
          std::fprintf(stderr, "[%s] %s trial %zu: final acc %.4f\n", spec.name.c_str(),
                       spec.cases[ci].label.c_str(), trial,
                       results[job].metrics.back().test_accuracy);
        }
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(jobs_total);
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(opts.jobs, 1, jobs_total);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<CaseSummary> summaries;
  json series = json::object();
  for (std::size_t ci = 0; ci < spec.cases.size(); ++ci) {
    const auto& c = spec.cases[ci];
    const std::size_t shard = spec.n_train / c.fl.clients;
    CaseSummary s;
    s.label = c.label;
    const auto& first = results[ci * spec.trials].metrics;
    const std::size_t points = first.size();
    std::ofstream trials_csv;
    if (!opts.out_dir.empty()) {
      trials_csv = open_out(opts.out_dir / (spec.name + "_" + c.label + "_trials.csv"));
      trials_csv << "trial,round,train_loss,test_accuracy,epsilon_item,epsilon_client\n";
    }
    for (std::size_t tr = 0; tr < spec.trials; ++tr) {
      const auto& r = results[ci * spec.trials + tr];
      s.skipped_rounds += r.skipped_rounds;
      if (!trials_csv.is_open()) continue;
      for (const auto& m : r.metrics) {
        trials_csv << tr << "," << m.round << "," << fmt(m.train_loss) << ","
                   << fmt(m.test_accuracy) << "," << fmt(epsilon_item(c, spec.delta, m.round, shard))
                   << "," << fmt(epsilon_client(c, spec.delta, m.round)) << "\n";
      }
    }
    for (std::size_t p = 0; p < points; ++p) {
      double lsum = 0, lsq = 0, asum = 0, asq = 0;
      for (std::size_t tr = 0; tr < spec.trials; ++tr) {
        const auto& m = results[ci * spec.trials + tr].metrics[p];
        lsum += m.train_loss;
        lsq += m.train_loss * m.train_loss;
        asum += m.test_accuracy;
        asq += m.test_accuracy * m.test_accuracy;
      }
      const double n = static_cast<double>(spec.trials);
      const double lm = lsum / n, am = asum / n;
      // Sample standard deviation; zero for a single trial.
      const double denom = spec.trials > 1 ? n - 1.0 : 1.0;
      s.rounds.push_back(first[p].round);
      s.loss_mean.push_back(lm);
      s.loss_std.push_back(std::sqrt(std::max(0.0, (lsq - n * lm * lm) / denom)));
      s.acc_mean.push_back(am);
      s.acc_std.push_back(std::sqrt(std::max(0.0, (asq - n * am * am) / denom)));
      s.eps_item.push_back(epsilon_item(c, spec.delta, first[p].round, shard));
      s.eps_client.push_back(epsilon_client(c, spec.delta, first[p].round));
    }
    if (!opts.out_dir.empty()) {
      auto f = open_out(opts.out_dir / (spec.name + "_" + c.label + "_summary.csv"));
      f << "round,train_loss_mean,train_loss_std,test_accuracy_mean,test_accuracy_std,"
           "epsilon_item,epsilon_client\n";
      for (std::size_t p = 0; p < points; ++p) {
        f << s.rounds[p] << "," << fmt(s.loss_mean[p]) << "," << fmt(s.loss_std[p]) << ","
          << fmt(s.acc_mean[p]) << "," << fmt(s.acc_std[p]) << "," << fmt(s.eps_item[p]) << ","
          << fmt(s.eps_client[p]) << "\n";
      }
      auto finite = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        return a;
      };
      series[c.label] = {{"round", s.rounds},
                         {"train_loss_mean", s.loss_mean},
                         {"train_loss_std", s.loss_std},
                         {"test_accuracy_mean", s.acc_mean},
                         {"test_accuracy_std", s.acc_std},
                         {"epsilon_item", finite(s.eps_item)},
                         {"epsilon_client", finite(s.eps_client)},
                         {"skipped_rounds", s.skipped_rounds}};
    }
    summaries.push_back(std::move(s));
  }
  if (!opts.out_dir.empty()) {
    auto f = open_out(opts.out_dir / (spec.name + "_series.json"));
    f << json{{"spec", to_json(spec)}, {"series", series}}.dump(2) << "\n";
  }
  return summaries;
}

}  // namespace floras::experiment
