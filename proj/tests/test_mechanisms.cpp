#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "marginalpriv/database.hpp"
#include "marginalpriv/mathstat.hpp"
#include "marginalpriv/mechanisms.hpp"
#include "marginalpriv/metrics.hpp"
#include "marginalpriv/params.hpp"
#include "marginalpriv/rng.hpp"

using namespace marginalpriv;

namespace {

// n rows, d columns, columns as balanced as parity allows.
Database balanced_db(Index n, Index d) {
  Eigen::MatrixXd m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = (i + j) % 2 == 0 ? 1.0 : -1.0;
  return Database::from_signs(m);
}

}  // namespace

TEST_CASE("noise scales: worked values") {
  CHECK(laplace_marginal_scale(100, 1, 1.0) == doctest::Approx(0.02));
  CHECK(laplace_marginal_scale(1000, 50, 2.0) == doctest::Approx(0.05));
  CHECK(gaussian_sigma(1000, 100, 1.0, std::exp(-10.0),
                       GaussianCalibration::kFixedConstant) ==
        doctest::Approx(5.0 * std::sqrt(1000.0) / 1000.0).epsilon(1e-12));
  CHECK(gaussian_sigma(1000, 100, 1.0, 1e-5, GaussianCalibration::kAnalytic) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * std::log(1.25e5)) * 10.0 / 1000.0)
            .epsilon(1e-12));
  // doubling n halves sigma
  CHECK(gaussian_sigma(2000, 100, 1.0, 1e-5, GaussianCalibration::kFixedConstant) ==
        doctest::Approx(0.5 * gaussian_sigma(1000, 100, 1.0, 1e-5,
                                             GaussianCalibration::kFixedConstant)));
  CHECK_THROWS_AS(gaussian_sigma(10, 1, 1.0, 0.0, GaussianCalibration::kAnalytic),
                  std::invalid_argument);
  CHECK_THROWS_AS(laplace_marginal_scale(10, 1, 0.0), std::invalid_argument);
}

TEST_CASE("laplace release: zero-noise limit recovers the marginals") {
  const Database db = balanced_db(10, 6);
  Rng rng(1);
  const MarginalVector out = laplace_release(db, 1e12, rng);
  CHECK(linf_error(out, db.marginals()) <= 1e-9);
}

TEST_CASE("laplace release: symmetric noise with mean |e| equal to the scale") {
  const Database db = balanced_db(100, 1);  // marginal exactly 0
  Rng rng(2);
  const int trials = 100000;
  const double b = 0.02;
  double sum = 0.0, abs_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double e = laplace_release(db, 1.0, rng)[0];
    sum += e;
    abs_sum += std::abs(e);
  }
  const double mean = sum / trials;
  const double mean_abs = abs_sum / trials;
  // std of e is b*sqrt(2); std of |e| is b
  CHECK(std::abs(mean) <= 4.0 * b * std::sqrt(2.0) / std::sqrt(trials));
  CHECK(std::abs(mean_abs - b) <= 3.0 * b / std::sqrt(trials));
}

TEST_CASE("gaussian release: empirical variance matches sigma^2") {
  const Database db = balanced_db(1000, 1);
  const double sigma = gaussian_sigma(1000, 1, 1.0, 1e-6,
                                      GaussianCalibration::kFixedConstant);
  Rng rng(3);
  const int trials = 100000;
  double sum = 0.0, sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double e = gaussian_release(db, 1.0, 1e-6, rng)[0];
    sum += e;
    sq += e * e;
  }
  const double var = sq / trials - (sum / trials) * (sum / trials);
  CHECK(var / (sigma * sigma) == doctest::Approx(1.0).epsilon(0.03));
  CHECK_THROWS_AS(gaussian_release(db, 1.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("linf sample: radius and magnitude laws") {
  const double eps = 1.0, delta_sens = 0.1;
  for (Index d : {Index(1), Index(5), Index(20)}) {
    Rng rng(100 + static_cast<std::uint64_t>(d));
    const int trials = 100000;
    std::vector<double> radii(trials);
    double mag_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const LinfNoiseSample s = linf_sample(d, eps, delta_sens, rng);
      CHECK(s.offsets.size() == d);
      CHECK(s.offsets.lpNorm<Eigen::Infinity>() <= s.radius);
      radii[static_cast<std::size_t>(t)] = s.radius;
      mag_sum += s.offsets.lpNorm<Eigen::Infinity>();
    }
    const double expected_mean = static_cast<double>(d) * delta_sens / eps;
    CHECK(mag_sum / trials == doctest::Approx(expected_mean).epsilon(0.02));
    const double ks = ks_distance(radii, [&](double x) {
      return gamma_cdf_integer_shape(d + 1, delta_sens / eps, x);
    });
    CHECK(ks <= 0.01);
  }
  Rng rng(5);
  CHECK_THROWS_AS(linf_sample(0, 1.0, 0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(linf_sample(3, -1.0, 0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(linf_sample(3, 1.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("linf sample at d = 1 is exponential") {
  Rng rng(6);
  const int trials = 50000;
  std::vector<double> mags(trials);
  for (int t = 0; t < trials; ++t)
    mags[static_cast<std::size_t>(t)] =
        linf_sample(1, 2.0, 0.5, rng).offsets.lpNorm<Eigen::Infinity>();
  const double ks = ks_distance(
      mags, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x / 0.25); });
  CHECK(ks <= 0.012);
}

TEST_CASE("linf magnitude tail follows the exact gamma law") {
  const Index d = 3;
  const double eps = 1.0, delta_sens = 0.1;
  Rng rng(7);
  const int trials = 200000;
  std::vector<double> mags(trials);
  for (int t = 0; t < trials; ++t)
    mags[static_cast<std::size_t>(t)] =
        linf_sample(d, eps, delta_sens, rng).offsets.lpNorm<Eigen::Infinity>();
  for (double alpha : {0.3, 0.6, 0.9}) {
    int over = 0;
    for (double m : mags)
      if (m >= alpha) ++over;
    const double rate = static_cast<double>(over) / trials;
    const double exact = linf_tail_exact(d, eps, delta_sens, alpha);
    CHECK(std::abs(rate - exact) <= 4.0 * rate_stderr(exact, trials) + 1e-6);
    // the Chernoff form dominates both the law and the samples
    const double chernoff = linf_tail_chernoff(d, eps, delta_sens, alpha);
    CHECK(exact <= chernoff + 1e-12);
    CHECK(rate <= chernoff + 3.0 * rate_stderr(chernoff, trials));
  }
}

TEST_CASE("chernoff bound dominates the exact tail on a grid") {
  for (Index d : {Index(2), Index(5), Index(10), Index(40)}) {
    for (double ratio : {1.2, 2.0, 3.0, 6.0}) {
      const double eps = 1.3, delta_sens = 0.2;
      const double alpha = ratio * static_cast<double>(d) * delta_sens / eps;
      CHECK(linf_tail_exact(d, eps, delta_sens, alpha) <=
            linf_tail_chernoff(d, eps, delta_sens, alpha) + 1e-12);
    }
  }
}

TEST_CASE("linf release: clamped, deterministic, and guarantee arithmetic") {
  Rng rng(8);
  const Database db = Database::random_uniform(640, 20, rng);
  Rng r1(99), r2(99);
  const MarginalVector a = linf_release(db, 1.0, r1);
  const MarginalVector b = linf_release(db, 1.0, r2);
  CHECK(a == b);
  CHECK(a.maxCoeff() <= 1.0);
  CHECK(a.minCoeff() >= -1.0);

  // n = 4d/(eps alpha) makes d equal eps*alpha/(2*Delta) exactly
  for (double alpha : {0.125, 0.25, 0.5}) {
    const double d = 20.0, eps = 1.0;
    const double n = 4.0 * d / (eps * alpha);
    const double delta_sens = 2.0 / n;
    CHECK(eps * alpha / (2.0 * delta_sens) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("linf release failure rate at the guaranteed sample size") {
  // n = 4d/(eps alpha): the worst-case error exceeds alpha with probability
  // Q(d, 2d), the exact gamma tail at twice the mean.
  const Index d = 20;
  const double alpha = 0.125, eps = 1.0;
  const Index n = static_cast<Index>(4.0 * d / (eps * alpha));
  Rng rng(9);
  const Database db = Database::random_uniform(n, d, rng);
  const int trials = 20000;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const MarginalVector out = linf_release(db, eps, rng);
    if (linf_error(out, db.marginals()) >= alpha) ++failures;
  }
  const double rate = static_cast<double>(failures) / trials;
  const double exact = linf_tail_exact(d, eps, 2.0 / static_cast<double>(n), alpha);
  CHECK(rate <= exact + 4.0 * rate_stderr(exact, trials) + 1e-4);
}

TEST_CASE("linf density ratio: identity, equality case, antisymmetry") {
  const double eps = 0.8, delta_sens = 0.3;
  Eigen::Vector3d y(0.1, -0.2, 0.05);
  CHECK(linf_density_ratio(y, y, eps, delta_sens) == 1.0);

  Eigen::Vector3d zero = Eigen::Vector3d::Zero();
  Eigen::Vector3d shifted = zero;
  shifted[1] = delta_sens;
  CHECK(linf_density_ratio(zero, shifted, eps, delta_sens) ==
        doctest::Approx(std::exp(eps)).epsilon(1e-12));

  Rng rng(10);
  for (int t = 0; t < 1000; ++t) {
    Eigen::Vector3d a, b;
    for (int j = 0; j < 3; ++j) {
      a[j] = 2.0 * rng.uniform_symmetric();
      b[j] = 2.0 * rng.uniform_symmetric();
    }
    const double fwd = linf_density_ratio(a, b, eps, delta_sens);
    const double bwd = linf_density_ratio(b, a, eps, delta_sens);
    CHECK(fwd * bwd == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("linf density ratio bounded by e^eps under Delta-bounded shifts") {
  const double eps = 0.7, delta_sens = 0.3;
  Rng rng(11);
  const double bound = std::exp(eps) * (1.0 + 1e-9);
  for (int t = 0; t < 10000; ++t) {
    Eigen::VectorXd y(5), shift(5);
    for (int j = 0; j < 5; ++j) {
      y[j] = 2.0 * rng.uniform_symmetric();
      shift[j] = delta_sens * rng.uniform_symmetric();
    }
    CHECK(linf_density_ratio(y, y + shift, eps, delta_sens) <= bound);
  }
}

TEST_CASE("laplace privacy loss at 2-adjacent inputs stays within the group bound") {
  // d = 1, n = 100, per-coordinate scale b = 2/(n eps). Two databases two
  // rows apart shift the marginal by 4/n; the analytic worst-case loss is
  // k*eps, checked here against an empirical output histogram.
  const Index n = 100;
  const double eps = 0.5;
  const std::int64_t k = 2;
  const Database d_plus = Database::from_signs(Eigen::MatrixXd::Ones(n, 1));
  Eigen::MatrixXd flipped = Eigen::MatrixXd::Ones(n, 1);
  flipped(0, 0) = flipped(1, 0) = -1.0;
  const Database d_minus = Database::from_signs(flipped);

  const auto grp = group_privacy({eps, 0.0}, k);
  CHECK(grp.delta_k == 0.0);

  Rng rng(12);
  const int trials = 200000;
  const int bins = 40;  // over [0.8, 1.0); the clamp atom at 1.0 is separate
  std::vector<int> h1(bins, 0), h2(bins, 0);
  int atom1 = 0, atom2 = 0;
  for (int t = 0; t < trials; ++t) {
    const double v1 = laplace_release(d_plus, eps, rng)[0];
    const double v2 = laplace_release(d_minus, eps, rng)[0];
    if (v1 >= 1.0) ++atom1;
    else if (v1 >= 0.8) ++h1[static_cast<int>((v1 - 0.8) / 0.005)];
    if (v2 >= 1.0) ++atom2;
    else if (v2 >= 0.8) ++h2[static_cast<int>((v2 - 0.8) / 0.005)];
  }
  const double cap = grp.epsilon_k;
  for (int bin = 0; bin < bins; ++bin) {
    if (h1[bin] < 200 || h2[bin] < 200) continue;
    const double log_ratio = std::log(static_cast<double>(h1[bin]) / h2[bin]);
    const double se = std::sqrt(1.0 / h1[bin] + 1.0 / h2[bin]);
    CHECK(std::abs(log_ratio) <= cap + 4.0 * se);
  }
  REQUIRE(atom1 >= 200);
  REQUIRE(atom2 >= 200);
  const double atom_log_ratio = std::log(static_cast<double>(atom1) / atom2);
  const double atom_se = std::sqrt(1.0 / atom1 + 1.0 / atom2);
  CHECK(atom_log_ratio <= cap + 4.0 * atom_se);
  // the clamp atom is where the loss is tight; it should come close to k*eps
  CHECK(atom_log_ratio >= cap - 0.25);
}
