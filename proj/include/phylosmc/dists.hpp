#ifndef PHYLOSMC_DISTS_HPP
#define PHYLOSMC_DISTS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "phylosmc/rng.hpp"

namespace phylosmc {

// Log pmf of the negative binomial counting failures r before the k-th
// success, success probability p. Non-integer k is allowed (gamma-function
// binomial coefficients). Throws std::domain_error for r < 0.
double negbinom_logpmf(double k, double p, long r);

// Log density of the Lomax distribution with the given scale and shape,
// f(d) = (shape/scale) (1 + d/scale)^-(shape+1). Returns -inf for d < 0.
double lomax_logpdf(double scale, double shape, double d);

double poisson_logpmf(double mean, long n);
double gamma_logpdf(double shape, double scale, double x);
double normal_logpdf(double mean, double var, double x);
double exponential_logpdf(double rate, double x);

struct Exponential {
  double rate;
  explicit Exponential(double rate);
  double sample(Rng& rng) const;
  double logpdf(double x) const { return exponential_logpdf(rate, x); }
};

struct Poisson {
  double mean;
  explicit Poisson(double mean);
  long sample(Rng& rng) const;
  double logpmf(long n) const { return poisson_logpmf(mean, n); }
};

struct Gamma {
  double shape, scale;
  Gamma(double shape, double scale);
  double sample(Rng& rng) const;
  double logpdf(double x) const { return gamma_logpdf(shape, scale, x); }
};

struct Uniform {
  double lo, hi;
  Uniform(double lo, double hi);
  double sample(Rng& rng) const;
  double logpdf(double x) const;
};

struct Normal {
  double mean, var;
  Normal(double mean, double var);
  double sample(Rng& rng) const;
  double logpdf(double x) const { return normal_logpdf(mean, var, x); }
};

struct Categorical {
  std::vector<double> probs;
  explicit Categorical(std::vector<double> probs);
  std::size_t sample(Rng& rng) const;
  double logpmf(std::size_t i) const;
};

struct NegativeBinomial {
  double k, p;
  NegativeBinomial(double k, double p);
  long sample(Rng& rng) const;
  double logpmf(long r) const { return negbinom_logpmf(k, p, r); }
};

struct Lomax {
  double scale, shape;
  Lomax(double scale, double shape);
  // Inverse CDF: scale * (u^(-1/shape) - 1).
  double sample(Rng& rng) const;
  double logpdf(double d) const { return lomax_logpdf(scale, shape, d); }
};

}  // namespace phylosmc

#endif
