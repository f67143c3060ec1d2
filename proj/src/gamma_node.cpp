#include "phylosmc/gamma_node.hpp"

#include <cmath>
#include <stdexcept>

#include "phylosmc/dists.hpp"

namespace phylosmc {

GammaNode::GammaNode(double shape, double scale) : shape_(shape), scale_(scale) {
  if (!(shape > 0) || !(scale > 0))
    throw std::invalid_argument("GammaNode: shape and scale must be > 0");
}

double GammaNode::observe_poisson_count(double dt, long n) {
  if (dt < 0) throw std::domain_error("GammaNode: negative exposure");
  if (n < 0) throw std::domain_error("GammaNode: negative count");
  const double p = 1.0 / (1.0 + dt * scale_);
  const double lw = negbinom_logpmf(shape_, p, n);
  expose(dt);
  shape_ += n;
  return lw;
}

long GammaNode::sample_poisson_count(double dt, Rng& rng) {
  if (dt < 0) throw std::domain_error("GammaNode: negative exposure");
  const double p = 1.0 / (1.0 + dt * scale_);
  const long n = NegativeBinomial(shape_, p).sample(rng);
  expose(dt);
  shape_ += n;
  return n;
}

double GammaNode::sample_waiting_time(Rng& rng) {
  const double d = Lomax(1.0 / scale_, shape_).sample(rng);
  expose(d);
  shape_ += 1.0;
  return d;
}

std::optional<double> GammaNode::sample_waiting_time_censored(double limit,
                                                             Rng& rng) {
  const double d = Lomax(1.0 / scale_, shape_).sample(rng);
  if (d < limit) {
    expose(d);
    shape_ += 1.0;
    return d;
  }
  // No event within the window: P(d >= limit) equals the marginal probability
  // of a zero Poisson(nu * limit) count, so only the exposure is recorded.
  expose(limit);
  return std::nullopt;
}

double GammaNode::observe_exponential_zero() {
  const double lw = std::log(shape_ * scale_);
  shape_ += 1.0;
  return lw;
}

double GammaNode::sample_rate(Rng& rng) const {
  return Gamma(shape_, scale_).sample(rng);
}

}  // namespace phylosmc
