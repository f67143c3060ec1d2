#include "phylosmc/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace phylosmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

long long RunResult::total_propagations() const {
  return std::accumulate(propagations.begin(), propagations.end(), 0LL);
}

StarvationError::StarvationError(int checkpoint, long long attempts)
    : std::runtime_error("checkpoint " + std::to_string(checkpoint) +
                         " starved after " + std::to_string(attempts) +
                         " propagation attempts"),
      checkpoint(checkpoint),
      attempts(attempts) {}

double logsumexp(std::span<const double> v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

std::size_t resample_index(std::span<const double> log_weights, Rng& rng) {
  double mx = kNegInf;
  for (double w : log_weights) mx = std::max(mx, w);
  if (!std::isfinite(mx))
    throw std::runtime_error("resample_index: all weights are zero");
  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - mx);
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < log_weights.size(); ++i) {
    cum += std::exp(log_weights[i] - mx);
    if (u < cum) return i;
  }
  return log_weights.size() - 1;
}

RunResult run_bpf(const CheckpointProgram& model, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("run_bpf: N must be >= 1");
  Rng rng(seed);
  const int T = model.checkpoint_count();

  std::vector<std::unique_ptr<ParticleState>> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) states.push_back(model.init(rng));
  std::vector<double> logw(n, 0.0);

  RunResult res;
  for (int t = 0; t < T; ++t) {
    std::vector<std::unique_ptr<ParticleState>> next(n);
    std::vector<double> next_w(n);
    for (int i = 0; i < n; ++i) {
      const std::size_t a = resample_index(logw, rng);
      next[i] = states[a]->clone();
      next_w[i] = model.step(*next[i], t, rng);
    }
    states = std::move(next);
    logw = std::move(next_w);
    res.propagations.push_back(n);
    const double lse = logsumexp(logw);
    res.checkpoint_log_sums.push_back(lse);
    if (!std::isfinite(lse)) {
      res.degenerate = true;
      res.log_z = kNegInf;
      break;
    }
    res.log_z += lse - std::log(static_cast<double>(n));
  }
  res.final_log_weights = std::move(logw);
  res.final_states = std::move(states);
  return res;
}

RunResult run_apf(const CheckpointProgram& model, int n, std::uint64_t seed,
                  long long starvation_cap) {
  if (n < 1) throw std::invalid_argument("run_apf: N must be >= 1");
  Rng rng(seed);
  const int T = model.checkpoint_count();

  std::vector<std::unique_ptr<ParticleState>> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) states.push_back(model.init(rng));
  std::vector<double> logw(n, 0.0);

  RunResult res;
  for (int t = 0; t < T; ++t) {
    std::vector<std::unique_ptr<ParticleState>> next(n);
    std::vector<double> next_w(n);
    long long attempts = 0;
    // N+1 accepted particles; the last one's state and weight are discarded
    // but its propagation attempts still count toward P_t.
    for (int i = 0; i < n + 1; ++i) {
      std::unique_ptr<ParticleState> cand;
      double w;
      do {
        const std::size_t a = resample_index(logw, rng);
        cand = states[a]->clone();
        w = model.step(*cand, t, rng);
        if (++attempts > starvation_cap) throw StarvationError(t, attempts);
      } while (w == kNegInf);
      if (i < n) {
        next[i] = std::move(cand);
        next_w[i] = w;
      }
    }
    states = std::move(next);
    logw = std::move(next_w);
    res.propagations.push_back(attempts);
    const double lse = logsumexp(logw);
    res.checkpoint_log_sums.push_back(lse);
    res.log_z += lse - std::log(static_cast<double>(attempts - 1));
  }
  res.final_log_weights = std::move(logw);
  res.final_states = std::move(states);
  return res;
}

double ress(std::span<const double> log_z) {
  const double m = static_cast<double>(log_z.size());
  const double s1 = logsumexp(log_z);
  if (!std::isfinite(s1)) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> doubled(log_z.begin(), log_z.end());
  for (double& x : doubled) x *= 2.0;
  const double s2 = logsumexp(doubled);
  return std::exp(2.0 * s1 - s2 - std::log(m));
}

double car(std::span<const double> log_z) {
  const double m = static_cast<double>(log_z.size());
  const double s1 = logsumexp(log_z);
  if (!std::isfinite(s1)) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> z(log_z.begin(), log_z.end());
  for (double& x : z) x = std::exp(x - s1);
  std::sort(z.begin(), z.end());
  double cum = 0.0, total = 0.0;
  for (double x : z) {
    cum += x;
    total += cum;  // c_i = sum of i smallest normalized estimates
  }
  return (2.0 * total - 1.0) / m;
}

double rho(std::span<const long long> propagations_per_run, int n_particles,
           int checkpoints) {
  const double total = static_cast<double>(std::accumulate(
      propagations_per_run.begin(), propagations_per_run.end(), 0LL));
  return total / (static_cast<double>(propagations_per_run.size()) *
                  n_particles * checkpoints);
}

BatchResult batch(const CheckpointProgram& model, Method method,
                  int n_particles, int runs, std::uint64_t seed,
                  long long starvation_cap) {
  if (runs < 1) throw std::invalid_argument("batch: runs must be >= 1");
  BatchResult out;
  out.records.reserve(runs);
  for (int m = 0; m < runs; ++m) {
    const std::uint64_t rs = run_seed(seed, m);
    RunRecord rec;
    rec.run = m;
    try {
      RunResult r = method == Method::bpf
                        ? run_bpf(model, n_particles, rs)
                        : run_apf(model, n_particles, rs, starvation_cap);
      rec.log_z = r.log_z;
      rec.propagations = r.total_propagations();
      rec.degenerate = r.degenerate;
      if (!r.degenerate && !r.final_states.empty()) {
        // Draw one particle proportional to the final weights; a fresh stream
        // keeps the draw independent of the filter's internal randomness.
        Rng pick(mix64(rs ^ 0x706f737465726eULL));
        const std::size_t i = resample_index(r.final_log_weights, pick);
        rec.posterior = model.rate_posteriors(*r.final_states[i]);
      }
    } catch (const StarvationError& e) {
      rec.log_z = kNegInf;
      rec.propagations = e.attempts;
      rec.degenerate = true;
      rec.starved = true;
    }
    out.records.push_back(std::move(rec));
  }

  BatchSummary& s = out.summary;
  s.runs = runs;
  s.n_particles = n_particles;
  std::vector<double> log_z;
  std::vector<double> ok_log_z;
  std::vector<long long> props;
  for (const RunRecord& r : out.records) {
    log_z.push_back(r.log_z);
    props.push_back(r.propagations);
    if (r.degenerate)
      s.degenerate_runs += 1;
    else
      ok_log_z.push_back(r.log_z);
  }
  s.all_degenerate = ok_log_z.empty();
  s.ress = ress(log_z);
  s.car = car(log_z);
  s.rho = rho(props, n_particles, model.checkpoint_count());
  if (ok_log_z.size() >= 2) {
    const double mean =
        std::accumulate(ok_log_z.begin(), ok_log_z.end(), 0.0) / ok_log_z.size();
    double ss = 0.0;
    for (double x : ok_log_z) ss += (x - mean) * (x - mean);
    s.var_log_z = ss / (ok_log_z.size() - 1);
  } else {
    s.var_log_z = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace phylosmc
