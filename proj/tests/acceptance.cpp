// End-to-end acceptance checks. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "phylosmc/crbd.hpp"
#include "phylosmc/dists.hpp"
#include "phylosmc/gamma_node.hpp"
#include "phylosmc/models/crbd_model.hpp"
#include "phylosmc/models/toy.hpp"
#include "phylosmc/newick.hpp"
#include "phylosmc/smc.hpp"
#include "stat_helpers.hpp"

using namespace phylosmc;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << " " << id << ": " << what << "\n";
  if (!ok) ++failures;
}

void skip(int id, const std::string& what) {
  std::cout << "SKIP " << id << ": " << what << "\n";
}

Tree synthetic_tree(int leaves, double lambda, double mu, double origin) {
  for (std::uint64_t seed = 1;; ++seed) {
    Rng rng(seed);
    const Tree t = simulate_crbd(lambda, mu, origin, rng);
    if (stats(t).extant == leaves) return prune(t);
  }
}

std::vector<double> scaled_z(const std::vector<RunRecord>& records,
                             double shift) {
  std::vector<double> z;
  z.reserve(records.size());
  for (const RunRecord& r : records)
    z.push_back(r.degenerate ? 0.0 : std::exp(r.log_z - shift));
  return z;
}

LgssConfig frozen_lgss() {
  LgssConfig cfg;
  Rng rng(2024);
  cfg.y = simulate_lgss_observations(cfg, 10, rng);
  return cfg;
}

// 1. Both engines match the Kalman-exact evidence on the LGSS model.
void check_unbiasedness() {
  const LgssConfig cfg = frozen_lgss();
  const auto model = lgss_program(cfg);
  const double oracle = kalman_log_evidence(cfg);
  bool ok = true;
  std::string detail;
  for (Method method : {Method::bpf, Method::apf}) {
    const BatchResult r = batch(*model, method, 64, 10000, 101);
    const std::vector<double> z = scaled_z(r.records, oracle);
    const double gap = std::abs(testutil::mean(z) - 1.0);
    const double se = testutil::se(z);
    ok = ok && gap < 3 * se;
    detail += (method == Method::bpf ? " bpf" : " apf");
    detail += " |mean-1|=" + std::to_string(gap) + " 3se=" +
              std::to_string(3 * se);
  }
  report(1, ok, "evidence estimates match the Kalman oracle:" + detail);
}

// 2. On all-positive weights the alive filter reduces to the bootstrap
// estimator: P_t = N+1 everywhere and the run estimate equals the
// mean-of-N-weights product.
void check_reduction() {
  const LgssConfig cfg = frozen_lgss();
  const auto model = lgss_program(cfg);
  const int N = 64;
  bool ok = true;
  for (int run = 0; run < 100 && ok; ++run) {
    const RunResult r = run_apf(*model, N, 200 + run);
    double bpf_formula = 0.0;
    for (std::size_t t = 0; t < r.propagations.size(); ++t) {
      ok = ok && r.propagations[t] == N + 1;
      bpf_formula += r.checkpoint_log_sums[t] - std::log(double(N));
    }
    ok = ok && std::abs(r.log_z - bpf_formula) < 1e-12;
  }
  report(2, ok, "alive filter reduces to the bootstrap estimator over 100 runs");
}

// 3. Indicator potentials: mean propagation count per checkpoint is
// (N+1)/p with p = P(|Normal(0,1)| <= 1).
void check_indicator_law() {
  IndicatorConfig cfg;
  const auto model = indicator_program(cfg);
  const int N = 32, M = 10000;
  const double p = std::erf(1.0 / std::sqrt(2.0));
  std::vector<std::vector<double>> per_t(cfg.checkpoints);
  for (int m = 0; m < M; ++m) {
    const RunResult r = run_apf(*model, N, run_seed(301, m));
    for (int t = 0; t < cfg.checkpoints; ++t)
      per_t[t].push_back(static_cast<double>(r.propagations[t]));
  }
  bool ok = true;
  std::string detail;
  for (int t = 0; t < cfg.checkpoints; ++t) {
    const double gap = std::abs(testutil::mean(per_t[t]) - (N + 1) / p);
    ok = ok && gap < 3 * testutil::se(per_t[t]);
    detail += " t" + std::to_string(t) + "=" + std::to_string(gap);
  }
  report(3, ok,
         "mean propagations track (N+1)/p per checkpoint; |gap|:" + detail);
}

// 4. The marginalized observe/sample operations agree with numerical
// integration of the gamma mixtures, and the Lomax sampler with the
// two-stage draw.
void check_conjugacy() {
  const double k = 1.7, theta = 0.9, dt = 1.3;
  bool ok = true;
  for (long n = 0; n < 20; ++n) {
    const double numeric = testutil::integrate(
        [&](double nu) {
          return std::exp(gamma_logpdf(k, theta, nu) +
                          poisson_logpmf(nu * dt, n));
        },
        0.0, 200.0, 1e-14);
    GammaNode node(k, theta);
    ok = ok &&
         std::abs(std::exp(node.observe_poisson_count(dt, n)) - numeric) < 1e-9;
  }
  for (int i = 0; i < 20; ++i) {
    const double d = 0.25 * i;
    const double numeric = testutil::integrate(
        [&](double nu) {
          return std::exp(gamma_logpdf(k, theta, nu) +
                          exponential_logpdf(nu, d));
        },
        0.0, 200.0, 1e-14);
    ok = ok && std::abs(std::exp(lomax_logpdf(1.0 / theta, k, d)) - numeric) <
                   1e-9;
  }

  Rng rng(401);
  const std::size_t draws = 100000;
  std::vector<double> direct(draws), staged(draws);
  for (double& x : direct) x = Lomax(1.0 / theta, k).sample(rng);
  for (double& x : staged)
    x = Exponential(Gamma(k, theta).sample(rng)).sample(rng);
  ok = ok && testutil::ks_statistic(direct, staged) <
                 testutil::ks_critical(1e-3, draws, draws);
  report(4, ok, "marginals match quadrature at 1e-9 and the Lomax KS test");
}

// 5. q(T') w(T') (2^(S+1)/C!) = p(T') for accepted augmentations.
void check_augmentation_identity() {
  const Tree tree = synthetic_tree(10, 1.0, 0.5, 3.0);
  const TreeStats s = stats(tree);
  const double log_const =
      (s.speciations + 1) * std::log(2.0) - std::lgamma(s.extant + 1.0);
  Rng rng(501);
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Augmentation a = propose_augmentation(tree, 1.0, 0.5, rng);
    const double direct = crbd_complete_loglik(a.complete, 1.0, 0.5);
    const double err = std::abs(a.log_q + a.log_w + log_const - direct);
    worst = std::max(worst, err);
    ok = ok && err < 1e-9;
  }
  report(5, ok,
         "1000 augmentations satisfy q*w=p; worst log-space error " +
             std::to_string(worst));
}

// 6. Fixed-rate pure-birth batch mean matches lambda^S exp(-lambda L).
void check_yule_closed_form() {
  const Tree tree = synthetic_tree(20, 1.0, 0.5, 5.0);
  const TreeStats s = stats(tree);
  const double lambda = 0.4;
  const double target =
      s.speciations * std::log(lambda) - lambda * s.branch_length;
  CrbdConfig cfg{tree};
  cfg.sampling = Sampling::fixed;
  cfg.fixed_lambda = lambda;
  cfg.fixed_mu = 0.0;
  const auto model = crbd_program(cfg);
  const BatchResult r = batch(*model, Method::apf, 512, 2000, 601);
  const std::vector<double> z = scaled_z(r.records, target);
  const double gap = std::abs(testutil::mean(z) - 1.0);
  const double se = testutil::se(z);
  report(6, gap < 3 * se,
         "pure-birth batch mean matches the closed form: |mean-1|=" +
             std::to_string(gap) + " 3se=" + std::to_string(3 * se));
}

// 7. All four method x sampling combinations agree in mean, and the alive
// filter with delayed sampling has the smallest log-evidence variance.
void check_cross_mode_consistency() {
  const Tree tree = synthetic_tree(20, 1.0, 0.5, 5.0);
  CrbdConfig cfg{tree};
  cfg.prior_lambda = {1.0, 1.0};
  cfg.prior_mu = {1.0, 1.0};

  struct Combo {
    Method method;
    Sampling sampling;
    const char* name;
  };
  const std::vector<Combo> combos{
      {Method::bpf, Sampling::immediate, "bpf+immediate"},
      {Method::bpf, Sampling::delayed, "bpf+delayed"},
      {Method::apf, Sampling::immediate, "apf+immediate"},
      {Method::apf, Sampling::delayed, "apf+delayed"}};

  std::vector<BatchResult> results;
  std::uint64_t seed = 701;
  for (const Combo& c : combos) {
    cfg.sampling = c.sampling;
    const auto model = crbd_program(cfg);
    results.push_back(batch(*model, c.method, 512, 500, seed++));
  }

  double shift = -std::numeric_limits<double>::infinity();
  for (const BatchResult& r : results)
    for (const RunRecord& rec : r.records)
      shift = std::max(shift, rec.log_z);

  bool ok = true;
  std::string detail;
  std::vector<std::vector<double>> z;
  for (const BatchResult& r : results) z.push_back(scaled_z(r.records, shift));
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const double gap = std::abs(testutil::mean(z[i]) - testutil::mean(z[j]));
      const double se = std::sqrt(testutil::se(z[i]) * testutil::se(z[i]) +
                                  testutil::se(z[j]) * testutil::se(z[j]));
      if (gap >= 3 * se) {
        ok = false;
        detail += std::string(" ") + combos[i].name + " vs " + combos[j].name +
                  " gap=" + std::to_string(gap) + " 3se=" +
                  std::to_string(3 * se);
      }
    }

  const double var_bpf_imm = results[0].summary.var_log_z;
  const double var_apf_del = results[3].summary.var_log_z;
  const bool ordering = var_apf_del < var_bpf_imm;
  ok = ok && ordering;
  detail += " var(bpf+immediate)=" + std::to_string(var_bpf_imm) +
            " var(apf+delayed)=" + std::to_string(var_apf_del);
  report(7, ok, "cross-mode means agree and variances order as expected:" +
                    detail);
}

// 8. Exact batch-metric identities.
void check_metric_identities() {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const int M = 16;
  const std::vector<double> equal(M, -2.5);
  std::vector<double> one_hot(M, kNegInf);
  one_hot[5] = 0.0;
  const std::vector<long long> no_rejection(10, (32 + 1) * 7);
  const bool ok = std::abs(ress(equal) - 1.0) < 1e-12 &&
                  std::abs(ress(one_hot) - 1.0 / M) < 1e-12 &&
                  std::abs(car(equal) - 1.0) < 1e-12 &&
                  std::abs(car(one_hot) - 1.0 / M) < 1e-12 &&
                  std::abs(rho(no_rejection, 32, 7) - 33.0 / 32.0) < 1e-12;
  report(8, ok, "RESS, CAR and rho unit identities hold exactly");
}

// 10. Repeating a command with the same seed gives byte-identical output.
void check_determinism(const char* cli) {
  const std::string base =
      std::string(cli) +
      " infer --model lgss --method apf --sampling immediate --particles 64"
      " --runs 100 --seed 77";
  const std::string a = "/tmp/phylosmc_acc_a", b = "/tmp/phylosmc_acc_b";
  int rc = std::system((base + " --runs-out " + a + ".csv --summary-out " + a +
                        ".json >/dev/null 2>&1")
                           .c_str());
  rc |= std::system((base + " --runs-out " + b + ".csv --summary-out " + b +
                     ".json >/dev/null 2>&1")
                        .c_str());
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const bool ok = rc == 0 && !slurp(a + ".csv").empty() &&
                  slurp(a + ".csv") == slurp(b + ".csv") &&
                  slurp(a + ".json") == slurp(b + ".json");
  report(10, ok, "repeated command output is byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  check_unbiasedness();
  check_reduction();
  check_indicator_law();
  check_conjugacy();
  check_augmentation_identity();
  check_yule_closed_form();
  check_cross_mode_consistency();
  check_metric_identities();
  skip(9, "cetacean tree and body-length states not available");
  if (argc > 1)
    check_determinism(argv[1]);
  else
    report(10, false, "command-line binary path not provided");
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
