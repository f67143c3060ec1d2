#ifndef PHYLOSMC_SMC_HPP
#define PHYLOSMC_SMC_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phylosmc/gamma_node.hpp"
#include "phylosmc/rng.hpp"

namespace phylosmc {

struct ParticleState {
  virtual ~ParticleState() = default;
  virtual std::unique_ptr<ParticleState> clone() const = 0;
};

// Model contract for both filters: every execution passes through exactly
// checkpoint_count() checkpoints in the same order. step() advances one
// particle to checkpoint t (0-based) and returns the log-weight increment
// (-inf allowed); it must be pure given (state, rng).
class CheckpointProgram {
 public:
  virtual ~CheckpointProgram() = default;
  virtual int checkpoint_count() const = 0;
  virtual std::unique_ptr<ParticleState> init(Rng& rng) const = 0;
  virtual double step(ParticleState& state, int t, Rng& rng) const = 0;

  // Final gamma posteriors of a particle's marginalized rates, keyed by rate
  // name. Empty for models without delayed rates.
  virtual std::map<std::string, GammaParams> rate_posteriors(
      const ParticleState&) const {
    return {};
  }
};

struct RunResult {
  double log_z = 0.0;
  bool degenerate = false;
  std::vector<long long> propagations;       // P_t per checkpoint
  std::vector<double> checkpoint_log_sums;   // logsumexp of the N weights at t
  std::vector<double> final_log_weights;
  std::vector<std::unique_ptr<ParticleState>> final_states;

  long long total_propagations() const;
};

class StarvationError : public std::runtime_error {
 public:
  StarvationError(int checkpoint, long long attempts);
  int checkpoint;
  long long attempts;
};

// Bootstrap particle filter: multinomial resampling from the previous weights
// at every checkpoint, then propagate and weigh. log_z accumulates
// logsumexp(w_t) - log N; if all weights at some checkpoint vanish the run is
// degenerate, log_z = -inf, and remaining checkpoints are skipped.
RunResult run_bpf(const CheckpointProgram& model, int n_particles,
                  std::uint64_t seed);

// Extended alive particle filter: per checkpoint, resampling and propagation
// are repeated until N+1 particles have strictly positive weight. P_t counts
// every propagation attempt, including those of the (N+1)-th particle, whose
// state and weight are never used otherwise. log_z accumulates
// logsumexp(first N weights) - log(P_t - 1). Throws StarvationError when a
// single checkpoint exceeds `starvation_cap` attempts.
RunResult run_apf(const CheckpointProgram& model, int n_particles,
                  std::uint64_t seed, long long starvation_cap = 1000000);

// Draws an ancestor index with probability proportional to exp(log_weight).
// Throws std::runtime_error when no weight is finite.
std::size_t resample_index(std::span<const double> log_weights, Rng& rng);

double logsumexp(std::span<const double> log_values);

enum class Method { bpf, apf };

struct RunRecord {
  int run = 0;
  double log_z = 0.0;
  long long propagations = 0;
  bool degenerate = false;
  bool starved = false;
  std::map<std::string, GammaParams> posterior;  // one drawn particle per run
};

struct BatchSummary {
  int runs = 0;
  int n_particles = 0;
  double ress = 0.0;
  double car = 0.0;
  double var_log_z = 0.0;
  double rho = 0.0;
  int degenerate_runs = 0;
  bool all_degenerate = false;
};

struct BatchResult {
  std::vector<RunRecord> records;
  BatchSummary summary;
};

// Executes M independent runs with per-run seeds derived from the master seed
// via run_seed(). Degenerate and starved runs are excluded from var_log_z;
// they still contribute zero estimates to RESS and CAR. For models with
// delayed rates, one particle per run is drawn proportional to the final
// weights and its posteriors recorded.
BatchResult batch(const CheckpointProgram& model, Method method,
                  int n_particles, int runs, std::uint64_t seed,
                  long long starvation_cap = 1000000);

// Relative effective sample size of estimates given in log space:
// (sum Z)^2 / (M sum Z^2).
double ress(std::span<const double> log_z);

// Conditional acceptance ratio (2 sum_i c_i - 1)/M, where c_i is the sum of
// the i smallest sum-normalized estimates.
double car(std::span<const double> log_z);

// rho = total propagations / (M N T).
double rho(std::span<const long long> propagations_per_run, int n_particles,
           int checkpoints);

}  // namespace phylosmc

#endif
