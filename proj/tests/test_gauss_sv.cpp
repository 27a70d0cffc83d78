#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "marginalpriv/database.hpp"
#include "marginalpriv/gauss_sv.hpp"
#include "marginalpriv/mathstat.hpp"
#include "marginalpriv/metrics.hpp"
#include "marginalpriv/rng.hpp"

using namespace marginalpriv;

TEST_CASE("resolved constants follow the formulas") {
  GaussSvConfig cfg;
  cfg.epsilon = 1.0;
  cfg.delta = 1e-6;
  const Index n = 100000, d = 10000;
  const auto r = resolve_gauss_sv(cfg, n, d);
  const double dd = 10000.0, log_d = std::log(dd);
  CHECK(r.sigma == doctest::Approx(5.0 * std::sqrt(dd * std::log(1e6)) / 1e5)
                       .epsilon(1e-12));
  CHECK(r.alpha ==
        doctest::Approx(8.0 * r.sigma * std::sqrt(std::log(log_d))).epsilon(1e-12));
  // 2d/ln^8 d < 1 at any desk-scale d, so the clamp pins c at 1
  CHECK(2.0 * dd / std::pow(log_d, 8.0) < 1.0);
  CHECK(r.sv.c == 1);
  CHECK(r.sv.k == d);
  // e^{-ln^4 d} underflows; the floor keeps beta positive
  CHECK(r.sv.beta == std::ldexp(1.0, -63));
  CHECK(r.sv.alpha == doctest::Approx(r.alpha / 2.0));
}

TEST_CASE("budget accounting: each stage gets exactly half") {
  GaussSvConfig cfg;
  cfg.epsilon = 0.7;
  cfg.delta = 0.003;
  const auto r = resolve_gauss_sv(cfg, 5000, 64);
  CHECK(r.stage1_epsilon == 0.35);
  CHECK(r.stage1_delta == 0.0015);
  CHECK(r.sv.epsilon == 0.35);
  CHECK(r.sv.delta == 0.0015);
  CHECK(r.total_epsilon() == cfg.epsilon);
  CHECK(r.total_delta() == cfg.delta);
}

TEST_CASE("c clamp engages only when the raw value is below one") {
  GaussSvConfig cfg;
  cfg.epsilon = 1.0;
  cfg.delta = 0.01;
  cfg.c_override = 17;
  const auto r = resolve_gauss_sv(cfg, 1000, 100);
  CHECK(r.sv.c == 17);
}

TEST_CASE("d below 3 is rejected") {
  GaussSvConfig cfg;
  cfg.epsilon = 1.0;
  cfg.delta = 0.01;
  CHECK_THROWS_AS(resolve_gauss_sv(cfg, 100, 2), std::invalid_argument);
  Rng rng(1);
  Eigen::MatrixXd m(4, 2);
  m << 1, 1, -1, 1, 1, -1, -1, -1;
  const Database db = Database::from_signs(m);
  CHECK_THROWS_AS(gauss_sv_release(db, cfg, rng), std::invalid_argument);
}

TEST_CASE("zero-noise pipeline returns the marginals exactly") {
  Rng db_rng(2);
  const Database db = Database::random_uniform(4000, 8, db_rng);
  GaussSvConfig cfg;
  cfg.epsilon = 2.0;
  cfg.delta = 0.01;
  cfg.sigma_override = 0.0;
  cfg.alpha_override = 1.0;
  cfg.c_override = 1;
  cfg.beta_sv_override = 0.05;
  Rng rng(3);
  const auto t = gauss_sv_release_traced(db, cfg, rng);
  CHECK(t.flags_used == 0);
  CHECK(t.output == db.marginals());
  CHECK(t.query_values == Eigen::VectorXd::Zero(8));
}

TEST_CASE("query values are minus half the noise when no clamp binds") {
  Rng db_rng(4);
  const Database db = Database::random_uniform(40000, 16, db_rng);
  GaussSvConfig cfg;
  cfg.epsilon = 2.0;
  cfg.delta = 0.01;
  cfg.sigma_override = 0.01;  // anchors stay far inside [-1, 1]
  cfg.alpha_override = 0.2;
  cfg.c_override = 1;
  cfg.beta_sv_override = 0.05;
  Rng rng(5);
  const auto t = gauss_sv_release_traced(db, cfg, rng);
  for (Index j = 0; j < 16; ++j)
    CHECK(t.query_values[j] == doctest::Approx(-t.noise[j] / 2.0).epsilon(1e-12));
}

TEST_CASE("error chain telescopes and bounds the output error") {
  Rng db_rng(6);
  const Database db = Database::random_uniform(20000, 32, db_rng);
  GaussSvConfig cfg;
  cfg.epsilon = 2.0;
  cfg.delta = 0.01;
  cfg.sigma_override = 0.05;
  cfg.alpha_override = 0.26;
  cfg.c_override = 8;
  cfg.beta_sv_override = 0.05;
  Rng rng(7);
  const auto t = gauss_sv_release_traced(db, cfg, rng);
  const MarginalVector& truth = db.marginals();
  for (Index j = 0; j < 32; ++j) {
    const double telescoped = t.stage1[j] - truth[j] + 2.0 * t.query_values[j];
    CHECK(std::abs(telescoped) <= 1e-12);
    const double lhs = std::abs(t.output[j] - truth[j]);
    const double rhs = std::abs(telescoped) +
                       2.0 * std::abs(t.sv_answers[j] - t.query_values[j]);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("release is deterministic under the seed and stays in range") {
  Rng db_rng(8);
  const Database db = Database::random_uniform(3000, 12, db_rng);
  GaussSvConfig cfg;
  cfg.epsilon = 1.0;
  cfg.delta = 0.01;
  Rng r1(9), r2(9);
  const MarginalVector a = gauss_sv_release(db, cfg, r1);
  const MarginalVector b = gauss_sv_release(db, cfg, r2);
  CHECK(a == b);
  CHECK(a.maxCoeff() <= 1.0);
  CHECK(a.minCoeff() >= -1.0);
}

TEST_CASE("budget warning propagates from the sparse-vector stage") {
  Rng db_rng(10);
  const Database db = Database::random_uniform(50, 8, db_rng);
  GaussSvConfig cfg;
  cfg.epsilon = 1.0;
  cfg.delta = 0.01;
  cfg.sigma_override = 0.05;
  cfg.alpha_override = 0.2;
  Rng rng(11);
  CHECK(gauss_sv_release_traced(db, cfg, rng).budget_warning);
}

TEST_CASE("bad coordinate census: direct counts") {
  CHECK(bad_coordinate_census(Eigen::VectorXd::Zero(5), 0.1) == 0);
  Eigen::Vector3d z(3.0, 0.0, 0.0);
  CHECK(bad_coordinate_census(z, 2.0) == 1);
  CHECK(bad_coordinate_census(z, 3.0) == 0);  // strict inequality
  Eigen::Vector3d neg(-3.0, 2.5, -0.1);
  CHECK(bad_coordinate_census(neg, 2.0) == 2);
}

TEST_CASE("census concentrates at the per-coordinate exceed probability") {
  const Index d = 100000;
  const double p = 0.01;
  // threshold with P[|N(0,1)| > tau] = p
  const double tau = kNormalQuantile995;
  CHECK(normal_two_sided_tail(tau) == doctest::Approx(p).epsilon(1e-9));
  Rng rng(12);
  Eigen::VectorXd z(d);
  for (Index j = 0; j < d; ++j) z[j] = rng.normal();
  const auto census = bad_coordinate_census(z, tau);
  const double rate = static_cast<double>(census) / static_cast<double>(d);
  CHECK(std::abs(rate - p) <= 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(d)));
}
