#include "phylosmc/dists.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace phylosmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

double negbinom_logpmf(double k, double p, long r) {
  if (r < 0) throw std::domain_error("negbinom_logpmf: failure count r < 0");
  if (!(k > 0) || !(p > 0) || p > 1)
    throw std::invalid_argument("negbinom_logpmf: invalid parameters");
  if (p == 1.0) return r == 0 ? 0.0 : kNegInf;
  return std::lgamma(r + k) - std::lgamma(k) - std::lgamma(r + 1.0) +
         k * std::log(p) + r * std::log1p(-p);
}

double lomax_logpdf(double scale, double shape, double d) {
  if (!(scale > 0) || !(shape > 0))
    throw std::invalid_argument("lomax_logpdf: invalid parameters");
  if (d < 0) return kNegInf;
  return std::log(shape / scale) - (shape + 1.0) * std::log1p(d / scale);
}

double poisson_logpmf(double mean, long n) {
  if (n < 0) return kNegInf;
  if (mean == 0.0) return n == 0 ? 0.0 : kNegInf;
  return n * std::log(mean) - mean - std::lgamma(n + 1.0);
}

double gamma_logpdf(double shape, double scale, double x) {
  if (x <= 0) return kNegInf;
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
         shape * std::log(scale);
}

double normal_logpdf(double mean, double var, double x) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

double exponential_logpdf(double rate, double x) {
  if (x < 0) return kNegInf;
  return std::log(rate) - rate * x;
}

Exponential::Exponential(double rate) : rate(rate) {
  require(rate > 0, "Exponential: rate must be > 0");
}

double Exponential::sample(Rng& rng) const {
  return -std::log(rng.uniform_pos()) / rate;
}

Poisson::Poisson(double mean) : mean(mean) {
  require(mean >= 0, "Poisson: mean must be >= 0");
}

long Poisson::sample(Rng& rng) const {
  if (mean == 0.0) return 0;
  std::poisson_distribution<long> d(mean);
  return d(rng.engine());
}

Gamma::Gamma(double shape, double scale) : shape(shape), scale(scale) {
  require(shape > 0 && scale > 0, "Gamma: shape and scale must be > 0");
}

double Gamma::sample(Rng& rng) const {
  std::gamma_distribution<double> d(shape, scale);
  return d(rng.engine());
}

Uniform::Uniform(double lo, double hi) : lo(lo), hi(hi) {
  require(hi >= lo, "Uniform: hi must be >= lo");
}

double Uniform::sample(Rng& rng) const {
  return lo + (hi - lo) * rng.uniform();
}

double Uniform::logpdf(double x) const {
  if (x < lo || x > hi || hi == lo) return kNegInf;
  return -std::log(hi - lo);
}

Normal::Normal(double mean, double var) : mean(mean), var(var) {
  require(var > 0, "Normal: variance must be > 0");
}

double Normal::sample(Rng& rng) const {
  std::normal_distribution<double> d(mean, std::sqrt(var));
  return d(rng.engine());
}

Categorical::Categorical(std::vector<double> probs_in)
    : probs(std::move(probs_in)) {
  require(!probs.empty(), "Categorical: empty probability vector");
  double total = 0.0;
  for (double p : probs) {
    require(p >= 0 && std::isfinite(p), "Categorical: invalid probability");
    total += p;
  }
  require(total > 0, "Categorical: probabilities sum to zero");
  for (double& p : probs) p /= total;
}

std::size_t Categorical::sample(Rng& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return probs.size() - 1;
}

double Categorical::logpmf(std::size_t i) const {
  if (i >= probs.size() || probs[i] == 0.0) return kNegInf;
  return std::log(probs[i]);
}

NegativeBinomial::NegativeBinomial(double k, double p) : k(k), p(p) {
  require(k > 0 && p > 0 && p <= 1, "NegativeBinomial: invalid parameters");
}

long NegativeBinomial::sample(Rng& rng) const {
  if (p == 1.0) return 0;
  // Gamma-Poisson mixture; exact for non-integer k as well.
  const double g = Gamma(k, (1.0 - p) / p).sample(rng);
  return Poisson(g).sample(rng);
}

Lomax::Lomax(double scale, double shape) : scale(scale), shape(shape) {
  require(scale > 0 && shape > 0, "Lomax: invalid parameters");
}

double Lomax::sample(Rng& rng) const {
  const double u = rng.uniform_pos();
  return scale * std::expm1(-std::log(u) / shape);
}

}  // namespace phylosmc
