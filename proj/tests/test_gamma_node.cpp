#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "phylosmc/dists.hpp"
#include "phylosmc/gamma_node.hpp"
#include "stat_helpers.hpp"

using namespace phylosmc;

TEST_CASE("poisson count observation") {
  SUBCASE("zero count") {
    GammaNode node(1, 1);
    CHECK(node.observe_poisson_count(1.0, 0) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(node.shape() == doctest::Approx(1.0));
    CHECK(node.scale() == doctest::Approx(0.5));
  }
  SUBCASE("count of two") {
    GammaNode node(1, 1);
    CHECK(node.observe_poisson_count(1.0, 2) ==
          doctest::Approx(std::log(0.125)).epsilon(1e-12));
    CHECK(node.shape() == doctest::Approx(3.0));
    CHECK(node.scale() == doctest::Approx(0.5));
  }
  SUBCASE("zero exposure") {
    GammaNode node(1, 1);
    CHECK(node.observe_poisson_count(0.0, 0) == doctest::Approx(0.0));
    CHECK(node.shape() == doctest::Approx(1.0));
    CHECK(node.scale() == doctest::Approx(1.0));
    CHECK(node.observe_poisson_count(0.0, 3) ==
          -std::numeric_limits<double>::infinity());
  }
  SUBCASE("negative count") {
    GammaNode node(1, 1);
    CHECK_THROWS_AS(node.observe_poisson_count(1.0, -1), std::domain_error);
  }
}

TEST_CASE("poisson count sampling") {
  SUBCASE("marginal mean") {
    Rng rng(21);
    std::vector<double> draws(100000);
    for (double& x : draws) {
      GammaNode node(1, 1);
      x = static_cast<double>(node.sample_poisson_count(1.0, rng));
    }
    CHECK(std::abs(testutil::mean(draws) - 1.0) < 3 * testutil::se(draws));
  }
  SUBCASE("zero exposure") {
    Rng rng(22);
    GammaNode node(1, 1);
    CHECK(node.sample_poisson_count(0.0, rng) == 0);
    CHECK(node.shape() == doctest::Approx(1.0));
    CHECK(node.scale() == doctest::Approx(1.0));
  }
  SUBCASE("shape bookkeeping") {
    Rng rng(23);
    GammaNode node(2, 0.5);
    long total = 0;
    total += node.sample_poisson_count(1.0, rng);
    total += node.sample_poisson_count(0.7, rng);
    CHECK(node.shape() == doctest::Approx(2.0 + total));
  }
}

TEST_CASE("waiting time sampling") {
  SUBCASE("median of the marginal") {
    // Lomax(1, 1) CDF is 1 - (1 + d)^-1, so the median is exactly 1.
    Rng rng(24);
    const std::size_t n = 100000;
    std::vector<double> draws(n);
    for (double& x : draws) {
      GammaNode node(1, 1);
      x = node.sample_waiting_time(rng);
    }
    std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
    const double median = draws[n / 2];
    // Order-statistic SE of the sample median: 1/(2 f(m) sqrt(n)), with
    // f(1) = 1/4 for Lomax(1,1).
    const double se_median = 1.0 / (2.0 * 0.25 * std::sqrt(double(n)));
    CHECK(std::abs(median - 1.0) < 3 * se_median);
  }
  SUBCASE("posterior update") {
    Rng rng(25);
    GammaNode node(1, 1);
    const double d = node.sample_waiting_time(rng);
    CHECK(node.shape() == doctest::Approx(2.0));
    CHECK(node.scale() == doctest::Approx(1.0 / (1.0 + d)).epsilon(1e-12));
  }
  SUBCASE("chained draws match the two-stage law") {
    // (d1 + d2) from chained marginal draws should be distributed as the sum
    // of two iid Exponential(nu) waits with nu ~ Gamma(1,1).
    Rng rng(26);
    const std::size_t n = 100000;
    std::vector<double> chained(n), staged(n);
    for (double& x : chained) {
      GammaNode node(1, 1);
      x = node.sample_waiting_time(rng) + node.sample_waiting_time(rng);
    }
    for (double& x : staged) {
      const double nu = Gamma(1, 1).sample(rng);
      x = Exponential(nu).sample(rng) + Exponential(nu).sample(rng);
    }
    CHECK(testutil::ks_statistic(chained, staged) <
          testutil::ks_critical(1e-3, n, n));
  }
}

TEST_CASE("censored waiting time") {
  SUBCASE("censored draw records exposure only") {
    Rng rng(27);
    for (int i = 0; i < 200; ++i) {
      GammaNode node(1.5, 0.8);
      const double limit = 0.4;
      const auto d = node.sample_waiting_time_censored(limit, rng);
      if (d) {
        CHECK(*d < limit);
        CHECK(node.shape() == doctest::Approx(2.5));
        CHECK(node.scale() ==
              doctest::Approx(0.8 / (1.0 + *d * 0.8)).epsilon(1e-12));
      } else {
        CHECK(node.shape() == doctest::Approx(1.5));
        CHECK(node.scale() ==
              doctest::Approx(0.8 / (1.0 + limit * 0.8)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("censoring probability matches the Lomax tail") {
    Rng rng(28);
    const std::size_t n = 100000;
    const double limit = 1.0;
    std::vector<double> censored(n);
    for (double& x : censored) {
      GammaNode node(1, 1);
      x = node.sample_waiting_time_censored(limit, rng) ? 0.0 : 1.0;
    }
    // P(d >= 1) = (1 + 1)^-1 = 0.5 under Lomax(1, 1).
    CHECK(std::abs(testutil::mean(censored) - 0.5) < 3 * testutil::se(censored));
  }
}

TEST_CASE("exponential zero observation") {
  GammaNode node(1, 1);
  CHECK(node.observe_exponential_zero() == doctest::Approx(0.0));
  CHECK(node.shape() == doctest::Approx(2.0));
  CHECK(node.scale() == doctest::Approx(1.0));
  CHECK(node.observe_exponential_zero() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(node.shape() == doctest::Approx(3.0));

  GammaNode other(3, 2);
  CHECK(other.observe_exponential_zero() ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("marginals match numerical integration of the mixtures") {
  // The negative binomial marginal is the Gamma-Poisson mixture and the Lomax
  // density is the Gamma-exponential mixture; check both against quadrature
  // at 20 points.
  const double k = 1.7, theta = 0.9;
  SUBCASE("gamma-poisson") {
    const double dt = 1.3;
    for (long n = 0; n < 20; ++n) {
      const double numeric = testutil::integrate(
          [&](double nu) {
            return std::exp(gamma_logpdf(k, theta, nu) +
                            poisson_logpmf(nu * dt, n));
          },
          0.0, 200.0, 1e-14);
      GammaNode node(k, theta);
      const double marginal = std::exp(node.observe_poisson_count(dt, n));
      CHECK(std::abs(marginal - numeric) < 1e-9);
    }
  }
  SUBCASE("gamma-exponential") {
    for (int i = 0; i < 20; ++i) {
      const double d = 0.25 * i;
      const double numeric = testutil::integrate(
          [&](double nu) {
            return std::exp(gamma_logpdf(k, theta, nu) +
                            exponential_logpdf(nu, d));
          },
          0.0, 200.0, 1e-14);
      const double marginal = std::exp(lomax_logpdf(1.0 / theta, k, d));
      CHECK(std::abs(marginal - numeric) < 1e-9);
    }
  }
}

TEST_CASE("marginalization identity over an operation sequence") {
  // Product of marginal weights times the posterior density at nu must equal
  // the prior density at nu times the conditional likelihood of the same
  // observations given nu.
  const double k0 = 1.2, t0 = 0.8;
  GammaNode node(k0, t0);
  double log_marginal = 0.0;
  log_marginal += node.observe_poisson_count(0.7, 2);
  log_marginal += node.observe_exponential_zero();
  log_marginal += node.observe_poisson_count(1.3, 0);

  for (double nu : {0.3, 1.0, 2.5}) {
    const double lhs =
        log_marginal + gamma_logpdf(node.shape(), node.scale(), nu);
    const double rhs = gamma_logpdf(k0, t0, nu) +
                       poisson_logpmf(nu * 0.7, 2) + std::log(nu) +
                       poisson_logpmf(nu * 1.3, 0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("scale update in rate form") {
  GammaNode node(2, 0.5);
  node.observe_poisson_count(3.0, 0);
  // 1/theta_new = 1/theta + dt.
  CHECK(1.0 / node.scale() == doctest::Approx(1.0 / 0.5 + 3.0).epsilon(1e-12));
  node.observe_poisson_count(1.5, 0);
  CHECK(1.0 / node.scale() ==
        doctest::Approx(1.0 / 0.5 + 4.5).epsilon(1e-12));
}

TEST_CASE("finalizing a node draws from its posterior") {
  Rng rng(29);
  GammaNode node(4, 0.5);
  std::vector<double> draws(100000);
  for (double& x : draws) x = node.sample_rate(rng);
  CHECK(std::abs(testutil::mean(draws) - 2.0) < 3 * testutil::se(draws));
  CHECK(node.shape() == doctest::Approx(4.0));
}
