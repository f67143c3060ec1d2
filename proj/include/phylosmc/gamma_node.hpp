#ifndef PHYLOSMC_GAMMA_NODE_HPP
#define PHYLOSMC_GAMMA_NODE_HPP

#include <optional>

#include "phylosmc/rng.hpp"

namespace phylosmc {

struct GammaParams {
  double shape;
  double scale;
};

// A gamma-distributed rate nu ~ Gamma(shape, scale) kept in marginalized form.
// Draws and observations involving the rate go through the negative binomial
// (Poisson likelihood) or Lomax (exponential likelihood) marginals, and the
// node is updated in place to the posterior. The rate itself is never sampled
// unless a concrete value is explicitly requested.
//
// Value-semantic: copying a particle copies its nodes, so each particle owns
// an independent posterior.
class GammaNode {
 public:
  GammaNode(double shape, double scale);

  double shape() const { return shape_; }
  double scale() const { return scale_; }
  GammaParams params() const { return {shape_, scale_}; }

  // Observes count n ~ Poisson(nu * dt). Returns the log marginal pmf
  // (negative binomial) and updates to Gamma(shape + n, scale/(1 + dt*scale)).
  double observe_poisson_count(double dt, long n);

  // Draws n ~ NegativeBinomial(shape, 1/(1 + dt*scale)) and applies the same
  // posterior update as observe_poisson_count.
  long sample_poisson_count(double dt, Rng& rng);

  // Draws a waiting time d ~ Lomax(1/scale, shape) and updates to
  // Gamma(shape + 1, scale/(1 + d*scale)).
  double sample_waiting_time(Rng& rng);

  // Draws a waiting time right-censored at `limit`: if the marginal draw falls
  // within [0, limit) the event happened (full waiting-time update); otherwise
  // no event occurred within the window and only the exposure is recorded
  // (zero-Poisson update over `limit`). Returns nullopt when censored.
  std::optional<double> sample_waiting_time_censored(double limit, Rng& rng);

  // Observes 0 ~ Exponential(nu): returns log(shape * scale) and updates to
  // Gamma(shape + 1, scale).
  double observe_exponential_zero();

  // Finalizes the node into a concrete rate draw from the current posterior.
  double sample_rate(Rng& rng) const;

 private:
  void expose(double dt) { scale_ = scale_ / (1.0 + dt * scale_); }

  double shape_;
  double scale_;
};

}  // namespace phylosmc

#endif
