#ifndef PHYLOSMC_MODELS_TOY_HPP
#define PHYLOSMC_MODELS_TOY_HPP

#include <memory>
#include <vector>

#include "phylosmc/smc.hpp"

namespace phylosmc {

// Linear-Gaussian state-space model:
//   x_0 ~ Normal(0, prior_var), x_t = a x_{t-1} + Normal(0, trans_var),
//   y_t ~ Normal(c x_t, obs_var).
// Used as an engine-validation oracle: the evidence is exact by Kalman
// prediction/update recursions.
struct LgssConfig {
  double a = 0.9;
  double trans_var = 1.0;
  double c = 1.0;
  double obs_var = 1.0;
  double prior_var = 1.0;
  std::vector<double> y;
};

std::unique_ptr<CheckpointProgram> lgss_program(const LgssConfig& cfg);

// Exact log p(y_{1:T}) by sequential Gaussian prediction/update.
double kalman_log_evidence(const LgssConfig& cfg);

// Draws an observation sequence of length T from the model.
std::vector<double> simulate_lgss_observations(const LgssConfig& cfg, int T,
                                               Rng& rng);

// Indicator-potential model: latent random walk with Normal(0, step_var)
// increments; the per-checkpoint weight is 1 when the increment lies within
// [-half_width, half_width] and 0 otherwise, so every checkpoint has
// acceptance probability 2 Phi(half_width/sqrt(step_var)) - 1 regardless of
// the walk's position. Exercises the APF's zero-weight retries.
struct IndicatorConfig {
  double step_var = 1.0;
  double half_width = 1.0;
  int checkpoints = 5;
};

std::unique_ptr<CheckpointProgram> indicator_program(const IndicatorConfig& cfg);

}  // namespace phylosmc

#endif
