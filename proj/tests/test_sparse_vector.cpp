#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "marginalpriv/calibration.hpp"
#include "marginalpriv/database.hpp"
#include "marginalpriv/mathstat.hpp"
#include "marginalpriv/rng.hpp"
#include "marginalpriv/sparse_vector.hpp"

using namespace marginalpriv;

namespace {

sv::Config desk_config() {
  sv::Config cfg;
  cfg.c = 2;
  cfg.k = 50;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-6;
  cfg.alpha = 0.5;
  cfg.beta = 0.1;
  return cfg;
}

Database balanced_db(Index n) {
  Eigen::MatrixXd m(n, 2);
  for (Index i = 0; i < n; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = i < n / 2 ? 1.0 : -1.0;
  }
  return Database::from_signs(m);
}

}  // namespace

TEST_CASE("config validation") {
  sv::Config cfg = desk_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.c = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = desk_config();
  cfg.c = cfg.k + 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = desk_config();
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = desk_config();
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("init: no budget consumed, threshold deterministic under the seed") {
  const Database db = balanced_db(20000);
  const sv::Config cfg = desk_config();
  sv::Engine a(cfg, db, Rng(7));
  sv::Engine b(cfg, db, Rng(7));
  CHECK(a.transcript().empty());
  CHECK(a.flags_used() == 0);
  CHECK(a.noisy_threshold() == b.noisy_threshold());
  sv::Engine c(cfg, db, Rng(8));
  CHECK(a.noisy_threshold() != c.noisy_threshold());
}

TEST_CASE("budget gate: warning below the calibrated size, never an error") {
  const sv::Config cfg = desk_config();
  const auto needed = static_cast<Index>(std::ceil(sv::required_n(cfg)));
  const Database small = balanced_db(std::max<Index>(2, needed / 8));
  const Database large = balanced_db(needed + 2);
  CHECK(sv::Engine(cfg, small, Rng(1)).budget_warning());
  CHECK_FALSE(sv::Engine(cfg, large, Rng(1)).budget_warning());
}

TEST_CASE("same seed gives the same transcript") {
  const Database db = balanced_db(20000);
  const sv::Config cfg = desk_config();
  sv::Engine a(cfg, db, Rng(9));
  sv::Engine b(cfg, db, Rng(9));
  const auto q0 = sv::LinearQuery::coordinate(0);
  const auto q1 = sv::LinearQuery::coordinate(1);
  for (int j = 0; j < cfg.k; ++j) {
    const auto& q = j % 3 == 0 ? q0 : q1;
    CHECK(a.answer(q) == b.answer(q));
  }
}

TEST_CASE("query budget k is enforced") {
  const Database db = balanced_db(1000);
  sv::Config cfg = desk_config();
  cfg.k = 3;
  cfg.c = 1;
  sv::Engine engine(cfg, db, Rng(10));
  const auto q = sv::LinearQuery::coordinate(1);
  for (int j = 0; j < 3; ++j) engine.answer(q);
  CHECK_THROWS_AS(engine.answer(q), sv::SequenceError);
}

TEST_CASE("constant-zero stream: all answers zero, no flags") {
  const sv::Config cfg = desk_config();
  const auto n = static_cast<Index>(std::ceil(sv::required_n(cfg)));
  const Database db = balanced_db(n);
  sv::Engine engine(cfg, db, Rng(11));
  const auto zero = sv::LinearQuery::coordinate(1);  // exactly balanced column
  for (int j = 0; j < cfg.k; ++j) CHECK(engine.answer(zero) == 0.0);
  CHECK(engine.flags_used() == 0);
}

TEST_CASE("answers always stay in [-1, 1]") {
  sv::Config cfg = desk_config();
  cfg.c = 10;
  cfg.k = 40;
  const Database db = balanced_db(64);  // tiny n: noise scales are huge
  sv::Engine engine(cfg, db, Rng(12));
  const auto big = sv::LinearQuery::coordinate(0);
  for (int j = 0; j < cfg.k; ++j) {
    const double a = engine.answer(big);
    CHECK(a <= 1.0);
    CHECK(a >= -1.0);
  }
}

TEST_CASE("row-oracle evaluation agrees with the closed form") {
  const Database db = balanced_db(500);
  const sv::LinearQuery with_closed_form = sv::LinearQuery::coordinate(0);
  const sv::LinearQuery row_only(
      [](const Database& d, Index i) { return d.entry(i, 0); });
  CHECK(with_closed_form.value(db) == row_only.value(db));
  CHECK(row_only.value(db) == 1.0);
}

TEST_CASE("single large query with c = 1 is flagged and answered accurately") {
  sv::Config cfg;
  cfg.c = 1;
  cfg.k = 10;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-4;
  cfg.alpha = 0.3;
  cfg.beta = 0.05;
  const auto n = static_cast<Index>(std::ceil(sv::required_n(cfg)));
  const Database db = balanced_db(n);
  const auto zero = sv::LinearQuery::coordinate(1);
  const auto one = sv::LinearQuery::coordinate(0);
  const int trials = 10000;
  int good = 0;
  for (int t = 0; t < trials; ++t) {
    sv::Engine engine(cfg, db, Rng(derive_seed(13, "sv/one-large", t)));
    for (int j = 0; j < 9; ++j) engine.answer(zero);
    const double a = engine.answer(one);
    if (engine.transcript().back().flagged && std::abs(a - 1.0) <= cfg.alpha) ++good;
  }
  const double rate = static_cast<double>(good) / trials;
  CHECK(rate >= 1.0 - cfg.beta - 3.0 * rate_stderr(cfg.beta, trials));
}

TEST_CASE("planted-stream contract holds at the calibrated size") {
  sv::Config cfg;
  cfg.c = 3;
  cfg.k = 60;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-5;
  cfg.alpha = 0.25;
  cfg.beta = 0.05;
  const auto n = static_cast<Index>(std::ceil(sv::required_n(cfg)));
  const double fail = calibration::sv_planted_failure_rate(cfg, n, 2000, 14);
  CHECK(fail <= cfg.beta + 0.02);
}

TEST_CASE("failure rate weakly improves with n") {
  sv::Config cfg;
  cfg.c = 3;
  cfg.k = 60;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-5;
  cfg.alpha = 0.25;
  cfg.beta = 0.05;
  // below the calibrated size the contract degrades; above, it holds
  const auto n = static_cast<Index>(std::ceil(sv::required_n(cfg)));
  const double at_half = calibration::sv_planted_failure_rate(cfg, n / 2, 1500, 15);
  const double at_full = calibration::sv_planted_failure_rate(cfg, n, 1500, 15);
  const double at_twice = calibration::sv_planted_failure_rate(cfg, 2 * n, 1500, 15);
  CHECK(at_full <= at_half + 0.02);
  CHECK(at_twice <= at_full + 0.02);
}

TEST_CASE("transcript privacy sanity on a 2-row database") {
  // Worst-case adjacent pair at n = 2: every outcome's frequency ratio must
  // stay within e^eps (plus sampling slack). Noise scales at n = 2 are huge,
  // so this mostly guards against forgetting the sensitivity factor.
  Eigen::MatrixXd m1(2, 1), m2(2, 1);
  m1 << 1, 1;
  m2 << 1, -1;
  const Database d1 = Database::from_signs(m1);
  const Database d2 = Database::from_signs(m2);
  sv::Config cfg;
  cfg.c = 1;
  cfg.k = 1;
  cfg.epsilon = 4.0;
  cfg.delta = 0.01;
  cfg.alpha = 0.8;
  cfg.beta = 0.1;
  const auto q = sv::LinearQuery::coordinate(0);
  const int trials = 100000;
  // outcomes: 0 = not flagged, 1 = flagged & answer < 0, 2 = flagged & >= 0
  int h1[3] = {0, 0, 0}, h2[3] = {0, 0, 0};
  for (int t = 0; t < trials; ++t) {
    sv::Engine e1(cfg, d1, Rng(derive_seed(16, "sv/priv1", t)));
    sv::Engine e2(cfg, d2, Rng(derive_seed(16, "sv/priv2", t)));
    const double a1 = e1.answer(q);
    const double a2 = e2.answer(q);
    ++h1[e1.transcript()[0].flagged ? (a1 < 0 ? 1 : 2) : 0];
    ++h2[e2.transcript()[0].flagged ? (a2 < 0 ? 1 : 2) : 0];
  }
  for (int o = 0; o < 3; ++o) {
    if (h1[o] < 100 || h2[o] < 100) continue;
    const double log_ratio = std::log(static_cast<double>(h1[o]) / h2[o]);
    const double se = std::sqrt(1.0 / h1[o] + 1.0 / h2[o]);
    CHECK(std::abs(log_ratio) <= cfg.epsilon + 4.0 * se);
  }
}
