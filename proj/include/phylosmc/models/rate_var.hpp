#ifndef PHYLOSMC_MODELS_RATE_VAR_HPP
#define PHYLOSMC_MODELS_RATE_VAR_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "phylosmc/dists.hpp"
#include "phylosmc/gamma_node.hpp"

namespace phylosmc {

// A model rate in one of two representations: a concrete value (fixed-rate
// mode, or immediate sampling where the value was drawn from the prior at
// particle init) or a marginalized GammaNode (delayed sampling). Every
// Poisson/exponential draw or observation involving the rate goes through
// this wrapper so the two modes stay interchangeable in model code.
class RateVar {
 public:
  static RateVar concrete(double value) { return RateVar(value); }
  static RateVar delayed(GammaNode node) { return RateVar(std::move(node)); }

  bool is_delayed() const { return delayed_; }

  double value() const {
    if (delayed_) throw std::logic_error("RateVar: delayed rate has no value");
    return value_;
  }

  GammaParams posterior() const {
    if (!delayed_) throw std::logic_error("RateVar: concrete rate");
    return node_.params();
  }

  // n ~ Poisson(rate * dt), marginalized in delayed mode.
  long sample_poisson(double dt, Rng& rng) {
    if (delayed_) return node_.sample_poisson_count(dt, rng);
    return Poisson(value_ * dt).sample(rng);
  }

  // Log-weight of observing 0 ~ Poisson(rate * dt).
  double observe_poisson_zero(double dt) {
    if (delayed_) return node_.observe_poisson_count(dt, 0);
    return -value_ * dt;
  }

  // Log-weight of observing 0 ~ Exponential(rate).
  double observe_exponential_zero() {
    if (delayed_) return node_.observe_exponential_zero();
    return value_ > 0 ? std::log(value_)
                      : -std::numeric_limits<double>::infinity();
  }

  // d ~ Exponential(rate); infinite when the rate is 0.
  double sample_exponential(Rng& rng) {
    if (delayed_) return node_.sample_waiting_time(rng);
    if (value_ == 0.0) return std::numeric_limits<double>::infinity();
    return Exponential(value_).sample(rng);
  }

  // Exponential waiting time right-censored at `limit`; nullopt when no event
  // occurs within the window.
  std::optional<double> sample_exponential_censored(double limit, Rng& rng) {
    if (delayed_) return node_.sample_waiting_time_censored(limit, rng);
    if (value_ == 0.0) return std::nullopt;
    const double d = Exponential(value_).sample(rng);
    if (d < limit) return d;
    return std::nullopt;
  }

 private:
  explicit RateVar(double value) : delayed_(false), node_(1, 1), value_(value) {
    if (value < 0) throw std::invalid_argument("RateVar: negative rate");
  }
  explicit RateVar(GammaNode node)
      : delayed_(true), node_(std::move(node)), value_(0) {}

  bool delayed_;
  GammaNode node_;
  double value_;
};

}  // namespace phylosmc

#endif
