#include "phylosmc/models/toy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phylosmc/dists.hpp"

namespace phylosmc {

namespace {

struct ScalarState : ParticleState {
  double x = 0.0;
  explicit ScalarState(double x) : x(x) {}
  std::unique_ptr<ParticleState> clone() const override {
    return std::make_unique<ScalarState>(x);
  }
};

class LgssProgram : public CheckpointProgram {
 public:
  explicit LgssProgram(LgssConfig cfg) : cfg_(std::move(cfg)) {
    if (!(cfg_.trans_var > 0) || !(cfg_.obs_var > 0) || !(cfg_.prior_var > 0))
      throw std::invalid_argument("lgss_program: variances must be > 0");
  }

  int checkpoint_count() const override {
    return static_cast<int>(cfg_.y.size());
  }

  std::unique_ptr<ParticleState> init(Rng& rng) const override {
    return std::make_unique<ScalarState>(
        Normal(0.0, cfg_.prior_var).sample(rng));
  }

  double step(ParticleState& state, int t, Rng& rng) const override {
    auto& s = static_cast<ScalarState&>(state);
    s.x = cfg_.a * s.x + Normal(0.0, cfg_.trans_var).sample(rng);
    return normal_logpdf(cfg_.c * s.x, cfg_.obs_var, cfg_.y[t]);
  }

 private:
  LgssConfig cfg_;
};

class IndicatorProgram : public CheckpointProgram {
 public:
  explicit IndicatorProgram(IndicatorConfig cfg) : cfg_(cfg) {
    if (!(cfg_.step_var > 0) || cfg_.half_width < 0 || cfg_.checkpoints < 1)
      throw std::invalid_argument("indicator_program: invalid configuration");
  }

  int checkpoint_count() const override { return cfg_.checkpoints; }

  std::unique_ptr<ParticleState> init(Rng&) const override {
    return std::make_unique<ScalarState>(0.0);
  }

  double step(ParticleState& state, int, Rng& rng) const override {
    auto& s = static_cast<ScalarState&>(state);
    const double dx = Normal(0.0, cfg_.step_var).sample(rng);
    s.x += dx;
    return std::abs(dx) <= cfg_.half_width
               ? 0.0
               : -std::numeric_limits<double>::infinity();
  }

 private:
  IndicatorConfig cfg_;
};

}  // namespace

std::unique_ptr<CheckpointProgram> lgss_program(const LgssConfig& cfg) {
  return std::make_unique<LgssProgram>(cfg);
}

double kalman_log_evidence(const LgssConfig& cfg) {
  double m = 0.0, p = cfg.prior_var, log_z = 0.0;
  for (double y : cfg.y) {
    m = cfg.a * m;
    p = cfg.a * cfg.a * p + cfg.trans_var;
    const double s = cfg.c * cfg.c * p + cfg.obs_var;
    log_z += normal_logpdf(cfg.c * m, s, y);
    const double k = p * cfg.c / s;
    m += k * (y - cfg.c * m);
    p *= 1.0 - k * cfg.c;
  }
  return log_z;
}

std::vector<double> simulate_lgss_observations(const LgssConfig& cfg, int T,
                                               Rng& rng) {
  std::vector<double> y;
  y.reserve(T);
  double x = Normal(0.0, cfg.prior_var).sample(rng);
  for (int t = 0; t < T; ++t) {
    x = cfg.a * x + Normal(0.0, cfg.trans_var).sample(rng);
    y.push_back(Normal(cfg.c * x, cfg.obs_var).sample(rng));
  }
  return y;
}

std::unique_ptr<CheckpointProgram> indicator_program(
    const IndicatorConfig& cfg) {
  return std::make_unique<IndicatorProgram>(cfg);
}

}  // namespace phylosmc
