// marginalpriv CLI: dataset generation, mechanism runs, tracing-attack
// campaigns, and sample-complexity tables, all reproducible from one
// --seed (env MARGINALPRIV_SEED as fallback).
//
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numeric/parameter
// domain error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "marginalpriv/attacks.hpp"
#include "marginalpriv/bounds.hpp"
#include "marginalpriv/database.hpp"
#include "marginalpriv/fingerprinting.hpp"
#include "marginalpriv/gauss_sv.hpp"
#include "marginalpriv/mechanisms.hpp"
#include "marginalpriv/metrics.hpp"

namespace mp = marginalpriv;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MARGINALPRIV_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("MARGINALPRIV_SEED is not a valid u64");
    }
  }
  return 0;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mp::IoError("cannot open " + path + " for writing");
  return out;
}

struct GenArgs {
  std::int64_t n = 0, d = 0;
  std::string dist = "uniform";
  double p = 0.5;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::string out, format = "bin";
};

int cmd_gen(const GenArgs& a) {
  const std::uint64_t master = resolve_seed(a.seed);
  mp::Rng rng(mp::derive_seed(master, "gen"));
  std::optional<mp::Database> db;
  std::optional<mp::fpc::Code> code;
  if (a.dist == "uniform") {
    db = mp::Database::random_uniform(a.n, a.d, rng);
  } else if (a.dist == "biased") {
    db = mp::Database::random_biased(a.n, a.d, a.p, rng);
  } else if (a.dist == "fpc") {
    if (!a.delta) throw UsageError("--dist fpc requires --delta");
    const std::int64_t d = a.d > 0 ? a.d : mp::fpc::min_length(a.n, *a.delta);
    code = mp::fpc::Code::generate(a.n, *a.delta, d, rng);
    db = code->codebook();
  } else {
    throw UsageError("unknown distribution: " + a.dist);
  }
  if (a.format == "bin")
    db->save_binary(a.out);
  else if (a.format == "text")
    db->save_text(a.out);
  else
    throw UsageError("unknown format: " + a.format);
  if (code) {
    std::ofstream sidecar = open_out(a.out + ".fpc");
    code->write_sidecar(sidecar);
    if (!sidecar) throw mp::IoError("failed writing " + a.out + ".fpc");
  }
  json summary{{"subcommand", "gen"}, {"n", db->rows()},      {"d", db->dims()},
               {"dist", a.dist},      {"seed", master},       {"out", a.out},
               {"format", a.format}};
  std::cout << summary.dump() << "\n";
  return 0;
}

struct ReleaseArgs {
  std::string mechanism, db_path, out, format = "text";
  double epsilon = 0.0;
  std::optional<double> delta;
  std::string calibration = "fixed";
  std::optional<std::uint64_t> seed;
};

int cmd_release(const ReleaseArgs& a) {
  const bool needs_delta = a.mechanism == "gaussian" || a.mechanism == "gauss-sv";
  if (needs_delta && (!a.delta || !(*a.delta > 0.0)))
    throw UsageError(a.mechanism + " requires --delta > 0");
  if (!needs_delta && a.delta)
    throw UsageError(a.mechanism + " is a pure-DP mechanism; --delta not allowed");

  const mp::Database db = mp::Database::load(a.db_path);
  const std::uint64_t master = resolve_seed(a.seed);
  mp::Rng rng(mp::derive_seed(master, "release/" + a.mechanism));

  mp::MarginalVector released;
  if (a.mechanism == "laplace") {
    released = mp::laplace_release(db, a.epsilon, rng);
  } else if (a.mechanism == "linf") {
    released = mp::linf_release(db, a.epsilon, rng);
  } else if (a.mechanism == "gaussian") {
    const auto calib = a.calibration == "analytic"
                           ? mp::GaussianCalibration::kAnalytic
                           : mp::GaussianCalibration::kFixedConstant;
    released = mp::gaussian_release(db, a.epsilon, *a.delta, rng, calib);
  } else if (a.mechanism == "gauss-sv") {
    mp::GaussSvConfig cfg;
    cfg.epsilon = a.epsilon;
    cfg.delta = *a.delta;
    released = mp::gauss_sv_release(db, cfg, rng);
  } else {
    throw UsageError("unknown mechanism: " + a.mechanism);
  }

  std::ofstream out = open_out(a.out);
  if (a.format == "text") {
    for (mp::Index j = 0; j < released.size(); ++j)
      out << fmt12(released[j]) << "\n";
  } else if (a.format == "json") {
    json values = json::array();
    for (mp::Index j = 0; j < released.size(); ++j) values.push_back(released[j]);
    out << json{{"values", values}}.dump() << "\n";
  } else {
    throw UsageError("unknown format: " + a.format);
  }
  if (!out) throw mp::IoError("failed writing " + a.out);

  json summary{{"subcommand", "release"},
               {"mechanism", a.mechanism},
               {"n", db.rows()},
               {"d", db.dims()},
               {"epsilon", a.epsilon},
               {"seed", master},
               {"l1_error", mp::l1_error(released, db.marginals())},
               {"linf_error", mp::linf_error(released, db.marginals())}};
  if (a.delta) summary["delta"] = *a.delta;
  std::cout << summary.dump() << "\n";
  return 0;
}

struct AttackArgs {
  std::string mechanism = "exact";
  std::int64_t n = 0;
  double delta = 0.0;
  std::string k = "auto";
  std::int64_t trials = 0;
  std::optional<std::int64_t> excluded_user;
  std::optional<double> epsilon;
  std::optional<double> mech_delta;
  std::optional<std::int64_t> length;
  std::optional<std::uint64_t> seed;
  std::int64_t jobs = 1;
  std::string out;
};

int cmd_attack(const AttackArgs& a) {
  mp::attacks::MarginalOracle oracle;
  std::optional<mp::PrivacyParams> privacy;
  const bool needs_eps = a.mechanism == "laplace" || a.mechanism == "linf" ||
                         a.mechanism == "gaussian" || a.mechanism == "gauss-sv";
  const bool needs_delta = a.mechanism == "gaussian" || a.mechanism == "gauss-sv";
  if (needs_eps && (!a.epsilon || !(*a.epsilon > 0.0)))
    throw UsageError(a.mechanism + " requires --epsilon > 0");
  if (needs_delta && (!a.mech_delta || !(*a.mech_delta > 0.0)))
    throw UsageError(a.mechanism + " requires --mech-delta > 0");
  if (a.mechanism == "exact") {
    oracle = mp::attacks::exact_oracle();
  } else if (a.mechanism == "constant") {
    oracle = mp::attacks::constant_oracle(0.0);
    privacy = mp::PrivacyParams{0.0, 0.0};
  } else if (a.mechanism == "laplace") {
    oracle = mp::attacks::laplace_oracle(*a.epsilon);
    privacy = mp::PrivacyParams{*a.epsilon, 0.0};
  } else if (a.mechanism == "linf") {
    oracle = mp::attacks::linf_oracle(*a.epsilon);
    privacy = mp::PrivacyParams{*a.epsilon, 0.0};
  } else if (a.mechanism == "gaussian") {
    oracle = mp::attacks::gaussian_oracle(*a.epsilon, *a.mech_delta);
    privacy = mp::PrivacyParams{*a.epsilon, *a.mech_delta};
  } else if (a.mechanism == "gauss-sv") {
    oracle = mp::attacks::gauss_sv_oracle(*a.epsilon, *a.mech_delta);
    privacy = mp::PrivacyParams{*a.epsilon, *a.mech_delta};
  } else {
    throw UsageError("unknown mechanism: " + a.mechanism);
  }

  mp::attacks::TracingAttackConfig cfg;
  cfg.n = a.n;
  cfg.delta = a.delta;
  cfg.trials = a.trials;
  cfg.excluded_user = a.excluded_user;
  cfg.code_length = a.length;
  cfg.mechanism_privacy = privacy;
  cfg.jobs = a.jobs;
  if (a.k == "auto") {
    const std::int64_t hi = std::max<std::int64_t>(1, a.n / 200);
    cfg.k = std::clamp<std::int64_t>(mp::attacks::default_k(a.n, a.delta), 1, hi);
  } else {
    try {
      cfg.k = std::stoll(a.k);
    } catch (const std::exception&) {
      throw UsageError("--k must be 'auto' or an integer");
    }
  }

  const std::uint64_t master = resolve_seed(a.seed);
  const auto report =
      mp::attacks::tracing_attack(oracle, cfg, mp::derive_seed(master, "attack"));
  if (report.k_regime_warning)
    std::cerr << "warning: k above n/200; distortion bookkeeping regime exceeded\n";
  if (a.out.empty()) {
    mp::attacks::write_jsonl(report, std::cout);
  } else {
    std::ofstream out = open_out(a.out);
    mp::attacks::write_jsonl(report, out);
    if (!out) throw mp::IoError("failed writing " + a.out);
  }
  return 0;
}

struct BoundsArgs {
  std::int64_t d = 0;
  double alpha = 0.0, epsilon = 0.0;
  std::optional<double> delta;
  std::string out;
};

std::string bounds_csv(const BoundsArgs& a) {
  const auto b = mp::sample_complexity_bounds(a.d, a.alpha, a.epsilon, a.delta);
  std::ostringstream csv;
  csv << "d,alpha,epsilon,delta,approx-upper,pure-upper,approx-lower,"
         "approx-worstcase-upper,pure-lower\n";
  const auto cell = [](const std::optional<double>& v) {
    return v ? fmt12(*v) : std::string("n/a");
  };
  csv << a.d << "," << fmt12(a.alpha) << "," << fmt12(a.epsilon) << ","
      << cell(a.delta) << "," << cell(b.approx_upper) << ","
      << fmt12(b.pure_upper) << "," << cell(b.approx_lower) << ","
      << cell(b.worstcase_upper) << "," << fmt12(b.pure_lower) << "\n";
  return csv.str();
}

int cmd_bounds(const BoundsArgs& a) {
  const std::string csv = bounds_csv(a);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out = open_out(a.out);
    out << csv;
    if (!out) throw mp::IoError("failed writing " + a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"private release of one-way marginals: mechanisms, attacks, bounds"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a +-1 database");
  gen_cmd->add_option("--n", gen.n)->required();
  gen_cmd->add_option("--d", gen.d);
  gen_cmd->add_option("--dist", gen.dist)
      ->check(CLI::IsMember({"uniform", "biased", "fpc"}));
  gen_cmd->add_option("--p", gen.p);
  gen_cmd->add_option("--delta", gen.delta);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--format", gen.format)->check(CLI::IsMember({"bin", "text"}));

  ReleaseArgs rel;
  auto* rel_cmd = app.add_subcommand("release", "run a mechanism on a database");
  rel_cmd->add_option("--mechanism", rel.mechanism)->required();
  rel_cmd->add_option("--db", rel.db_path)->required();
  rel_cmd->add_option("--epsilon", rel.epsilon)->required();
  rel_cmd->add_option("--delta", rel.delta);
  rel_cmd->add_option("--calibration", rel.calibration)
      ->check(CLI::IsMember({"fixed", "analytic"}));
  rel_cmd->add_option("--seed", rel.seed);
  rel_cmd->add_option("--out", rel.out)->required();
  rel_cmd->add_option("--format", rel.format)->check(CLI::IsMember({"text", "json"}));

  AttackArgs atk;
  auto* atk_cmd = app.add_subcommand("attack", "tracing-attack campaign");
  atk_cmd->add_option("--mechanism", atk.mechanism)->required();
  atk_cmd->add_option("--n", atk.n)->required();
  atk_cmd->add_option("--delta", atk.delta)->required();
  atk_cmd->add_option("--k", atk.k);
  atk_cmd->add_option("--trials", atk.trials)->required();
  atk_cmd->add_option("--excluded-user", atk.excluded_user);
  atk_cmd->add_option("--epsilon", atk.epsilon);
  atk_cmd->add_option("--mech-delta", atk.mech_delta);
  atk_cmd->add_option("--length", atk.length);
  atk_cmd->add_option("--seed", atk.seed);
  atk_cmd->add_option("--jobs", atk.jobs);
  atk_cmd->add_option("--out", atk.out);

  BoundsArgs bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "sample-complexity table (CSV)");
  bnd_cmd->add_option("--d", bnd.d)->required();
  bnd_cmd->add_option("--alpha", bnd.alpha)->required();
  bnd_cmd->add_option("--epsilon", bnd.epsilon)->required();
  bnd_cmd->add_option("--delta", bnd.delta);
  bnd_cmd->add_option("--out", bnd.out);

  try {
    app.parse(argc, argv);
    const auto start = std::chrono::steady_clock::now();
    int rc = 0;
    if (gen_cmd->parsed()) rc = cmd_gen(gen);
    else if (rel_cmd->parsed()) rc = cmd_release(rel);
    else if (atk_cmd->parsed()) rc = cmd_attack(atk);
    else if (bnd_cmd->parsed()) rc = cmd_bounds(bnd);
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    // Wall-clock goes to stderr only, so output files stay replay-identical.
    std::cerr << "duration_ms=" << elapsed.count() << "\n";
    return rc;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const mp::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
