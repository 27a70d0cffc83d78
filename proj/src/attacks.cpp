#include "marginalpriv/attacks.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "marginalpriv/fingerprinting.hpp"
#include "marginalpriv/gauss_sv.hpp"
#include "marginalpriv/mechanisms.hpp"
#include "marginalpriv/metrics.hpp"

namespace marginalpriv::attacks {

namespace {

void run_trials(std::int64_t trials, std::int64_t jobs,
                const std::function<void(std::int64_t)>& body) {
  if (trials <= 0) return;
  const std::int64_t workers =
      std::max<std::int64_t>(1, std::min<std::int64_t>(jobs, trials));
  if (workers == 1) {
    for (std::int64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::int64_t t = w; t < trials; t += workers) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

MarginalOracle exact_oracle() {
  return [](const Database& db, Rng&) { return db.marginals(); };
}

MarginalOracle constant_oracle(double value) {
  return [value](const Database& db, Rng&) {
    return MarginalVector::Constant(db.dims(), value);
  };
}

MarginalOracle laplace_oracle(double epsilon) {
  return [epsilon](const Database& db, Rng& rng) {
    return laplace_release(db, epsilon, rng);
  };
}

MarginalOracle gaussian_oracle(double epsilon, double delta) {
  return [epsilon, delta](const Database& db, Rng& rng) {
    return gaussian_release(db, epsilon, delta, rng);
  };
}

MarginalOracle linf_oracle(double epsilon) {
  return [epsilon](const Database& db, Rng& rng) {
    return linf_release(db, epsilon, rng);
  };
}

MarginalOracle gauss_sv_oracle(double epsilon, double delta) {
  return [epsilon, delta](const Database& db, Rng& rng) {
    GaussSvConfig cfg;
    cfg.epsilon = epsilon;
    cfg.delta = delta;
    return gauss_sv_release(db, cfg, rng);
  };
}

Database k_copy_embed(const Database& d_star, const KCopyConfig& cfg,
                      const std::optional<Eigen::VectorXd>& padding_row) {
  if (cfg.k < 1 || cfg.n < 1) throw std::invalid_argument("need k >= 1, n >= 1");
  const std::int64_t n_k = cfg.copies_rows();
  if (n_k < 1) throw std::invalid_argument("k exceeds n");
  if (d_star.rows() != n_k)
    throw std::invalid_argument("source database must have floor(n/k) rows");
  const Index d = d_star.dims();
  const std::size_t stride = d_star.row_stride_words();

  std::vector<std::uint64_t> pad(stride, 0);
  std::vector<std::int64_t> pad_counts(static_cast<std::size_t>(d), 0);
  if (padding_row) {
    if (padding_row->size() != d)
      throw std::invalid_argument("padding row has wrong dimension");
    for (Index j = 0; j < d; ++j) {
      const double v = (*padding_row)[j];
      if (v == 1.0) {
        pad[j >> 6] |= 1ull << (j & 63);
        pad_counts[static_cast<std::size_t>(j)] = 1;
      } else if (v != -1.0) {
        throw std::invalid_argument("padding entries must be exactly +1 or -1");
      }
    }
  } else {
    const int tail_bits = static_cast<int>(d & 63);
    for (std::size_t w = 0; w < stride; ++w) pad[w] = ~0ull;
    if (tail_bits != 0) pad[stride - 1] = (1ull << tail_bits) - 1;
    for (auto& c : pad_counts) c = 1;
  }

  const std::size_t block_words = stride * static_cast<std::size_t>(n_k);
  std::vector<std::uint64_t> words(stride * static_cast<std::size_t>(cfg.n));
  for (std::int64_t copy = 0; copy < cfg.k; ++copy) {
    std::memcpy(words.data() + static_cast<std::size_t>(copy) * block_words,
                d_star.words().data(), block_words * sizeof(std::uint64_t));
  }
  const std::int64_t pad_rows = cfg.n - cfg.k * n_k;
  for (std::int64_t r = 0; r < pad_rows; ++r) {
    std::memcpy(words.data() +
                    (static_cast<std::size_t>(cfg.k) * block_words +
                     static_cast<std::size_t>(r) * stride),
                pad.data(), stride * sizeof(std::uint64_t));
  }

  // Column counts compose exactly: k codebook copies plus the padding rows.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(d));
  const auto& star_counts = d_star.plus_counts();
  for (Index j = 0; j < d; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    counts[sj] = cfg.k * star_counts[sj] + pad_rows * pad_counts[sj];
  }
  return Database::from_words(cfg.n, d, std::move(words), std::move(counts));
}

std::int64_t default_k(std::int64_t n, double delta) {
  if (n < 1 || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("need n >= 1 and delta in (0, 1)");
  const double v = std::log(1.0 / (12.0 * static_cast<double>(n) * delta)) - 1.0;
  return static_cast<std::int64_t>(std::floor(v));
}

TracingAttackReport tracing_attack(const MarginalOracle& oracle,
                                   const TracingAttackConfig& cfg,
                                   std::uint64_t master_seed) {
  if (cfg.n < 1) throw std::invalid_argument("n must be >= 1");
  if (cfg.k < 1 || cfg.k > cfg.n) throw std::invalid_argument("need 1 <= k <= n");
  if (cfg.trials < 0) throw std::invalid_argument("trials must be >= 0");
  const std::int64_t n_k = cfg.n / cfg.k;
  const std::int64_t d =
      cfg.code_length ? *cfg.code_length : fpc::min_length(n_k, cfg.delta);
  if (d < fpc::min_length(n_k, cfg.delta))
    throw std::invalid_argument("code length below minimum for (n_k, delta)");
  if (cfg.excluded_user && (*cfg.excluded_user < 0 || *cfg.excluded_user >= n_k))
    throw std::invalid_argument("excluded user out of range");

  TracingAttackReport report;
  report.config = cfg;
  report.n_k = n_k;
  report.d = d;
  report.master_seed = master_seed;
  report.k_regime_warning = !KCopyConfig{cfg.k, cfg.n}.in_regime();
  report.bound_one_over_12nk = 1.0 / (12.0 * static_cast<double>(n_k));
  if (cfg.mechanism_privacy) {
    const auto gp = group_privacy(*cfg.mechanism_privacy, cfg.k);
    report.group_privacy_rhs =
        std::exp(gp.epsilon_k) * cfg.delta + gp.delta_k;
  }

  report.trials.resize(static_cast<std::size_t>(cfg.trials));
  const KCopyConfig embed_cfg{cfg.k, cfg.n};
  run_trials(cfg.trials, cfg.jobs, [&](std::int64_t t) {
    TracingTrial& out = report.trials[static_cast<std::size_t>(t)];
    out.seed = derive_seed(master_seed, "attack/trial", static_cast<std::uint64_t>(t));
    Rng rng(out.seed);
    fpc::Code code = fpc::Code::generate(n_k, cfg.delta, d, rng);
    const Database* source = &code.codebook();
    std::optional<Database> replaced;
    if (cfg.excluded_user) {
      replaced = code.codebook().with_row_replaced(
          *cfg.excluded_user, Eigen::VectorXd::Ones(d));
      source = &*replaced;
    }
    const Database embedded = k_copy_embed(*source, embed_cfg);
    const MarginalVector answers = oracle(embedded, rng);
    const fpc::TraceResult traced = code.trace(answers);
    out.accused = traced.accused;
    out.l1_error = l1_error(answers, source->marginals());
    out.accuracy_event = out.l1_error <= static_cast<double>(d) / 8.0;
    if (cfg.excluded_user) {
      for (const auto i : out.accused)
        if (i == *cfg.excluded_user) out.excluded_accused = true;
    }
  });

  Eigen::VectorXd user_hits = Eigen::VectorXd::Zero(n_k);
  std::int64_t nonempty = 0, accurate = 0, excluded = 0;
  for (const auto& tr : report.trials) {
    if (!tr.accused.empty()) ++nonempty;
    if (tr.accuracy_event) ++accurate;
    if (tr.excluded_accused) ++excluded;
    for (const auto i : tr.accused) user_hits[i] += 1.0;
  }
  const double denom = cfg.trials > 0 ? static_cast<double>(cfg.trials) : 1.0;
  report.rate_trace_nonempty = static_cast<double>(nonempty) / denom;
  report.rate_accuracy_event = static_cast<double>(accurate) / denom;
  report.rate_excluded_accused = static_cast<double>(excluded) / denom;
  report.per_user_rates = user_hits / denom;
  return report;
}

void write_jsonl(const TracingAttackReport& report, std::ostream& out) {
  using nlohmann::json;
  if (report.config.trials == 0) return;
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    const auto& tr = report.trials[t];
    json rec{{"type", "trial"},
             {"trial", t},
             {"seed", tr.seed},
             {"accused", tr.accused},
             {"l1_error", tr.l1_error},
             {"accuracy_event", tr.accuracy_event}};
    if (report.config.excluded_user)
      rec["excluded_accused"] = tr.excluded_accused;
    out << rec.dump() << "\n";
  }
  json cfg{{"n", report.config.n},
           {"n_k", report.n_k},
           {"k", report.config.k},
           {"d", report.d},
           {"delta", report.config.delta},
           {"trials", report.config.trials},
           {"k_regime_warning", report.k_regime_warning}};
  if (report.config.excluded_user) cfg["excluded_user"] = *report.config.excluded_user;
  if (report.config.mechanism_privacy) {
    cfg["mechanism_epsilon"] = report.config.mechanism_privacy->epsilon;
    cfg["mechanism_delta"] = report.config.mechanism_privacy->delta;
  }
  json bounds{{"trace_rate", report.bound_trace_rate},
              {"markov_tail", report.markov_tail_bound},
              {"accuracy_event_floor", report.accuracy_event_floor}};
  if (report.bound_one_over_12nk) bounds["one_over_12nk"] = *report.bound_one_over_12nk;
  if (report.group_privacy_rhs) bounds["group_privacy_rhs"] = *report.group_privacy_rhs;
  json rates{{"trace_nonempty", report.rate_trace_nonempty},
             {"accuracy_event", report.rate_accuracy_event}};
  if (report.config.excluded_user)
    rates["excluded_accused"] = report.rate_excluded_accused;
  std::vector<double> per_user(report.per_user_rates.data(),
                               report.per_user_rates.data() + report.per_user_rates.size());
  rates["per_user"] = per_user;
  json summary{{"type", "summary"},
               {"seed", report.master_seed},
               {"config", cfg},
               {"rates", rates},
               {"bounds", bounds}};
  out << summary.dump() << "\n";
}

PackingReport packing_experiment(const MarginalOracle& oracle,
                                 const PackingConfig& cfg,
                                 std::uint64_t master_seed) {
  if (cfg.d < 1 || cfg.n < 1) throw std::invalid_argument("need d >= 1, n >= 1");
  if (cfg.trials < 0) throw std::invalid_argument("trials must be >= 0");
  PackingReport report;
  report.config = cfg;
  if (report.config.lambda == 0.0)
    report.config.lambda = std::sqrt(static_cast<double>(cfg.d)) / 20.0;
  report.master_seed = master_seed;
  report.zp_bound = std::exp(-static_cast<double>(cfg.d) / 800.0);
  report.hoeffding_bound =
      std::exp(-report.config.lambda * report.config.lambda / 2.0);

  report.z.resize(static_cast<std::size_t>(cfg.trials));
  report.z_prime.resize(static_cast<std::size_t>(cfg.trials));
  std::vector<double> zp_norm(static_cast<std::size_t>(cfg.trials));
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(master_seed, "packing/trial", static_cast<std::uint64_t>(t)));
    Eigen::VectorXd x(cfg.d), x_prime(cfg.d);
    for (Index j = 0; j < cfg.d; ++j) x[j] = (rng.next_u64() & 1) ? 1.0 : -1.0;
    for (Index j = 0; j < cfg.d; ++j) x_prime[j] = (rng.next_u64() & 1) ? 1.0 : -1.0;
    const Database db = Database::repeat_row(x, cfg.n);
    const Database db_prime = Database::repeat_row(x_prime, cfg.n);
    const MarginalVector m = oracle(db, rng);
    const MarginalVector m_prime = oracle(db_prime, rng);
    report.z[static_cast<std::size_t>(t)] = m.dot(x);
    report.z_prime[static_cast<std::size_t>(t)] = m_prime.dot(x);
    zp_norm[static_cast<std::size_t>(t)] =
        report.config.lambda * m_prime.norm();
  }

  const double threshold = static_cast<double>(cfg.d) / 20.0;
  std::int64_t z_le = 0, zp_gt = 0, zp_gt_norm = 0;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    const auto st = static_cast<std::size_t>(t);
    if (report.z[st] <= threshold) ++z_le;
    if (report.z_prime[st] > threshold) ++zp_gt;
    if (report.z_prime[st] > zp_norm[st]) ++zp_gt_norm;
  }
  const double denom = cfg.trials > 0 ? static_cast<double>(cfg.trials) : 1.0;
  report.rate_z_le_d20 = static_cast<double>(z_le) / denom;
  report.rate_zp_gt_d20 = static_cast<double>(zp_gt) / denom;
  report.rate_zp_gt_lambda_norm = static_cast<double>(zp_gt_norm) / denom;
  return report;
}

}  // namespace marginalpriv::attacks
