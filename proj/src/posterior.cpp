#include "phylosmc/posterior.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <stdexcept>

namespace phylosmc {

double RateMixture::mean() const {
  double m = 0.0;
  for (const MixtureComponent& c : components) m += c.weight * c.shape * c.scale;
  return m;
}

double RateMixture::cdf(double x) const {
  if (x <= 0) return 0.0;
  double f = 0.0;
  for (const MixtureComponent& c : components)
    f += c.weight * boost::math::gamma_p(c.shape, x / c.scale);
  return f;
}

double RateMixture::quantile(double q) const {
  if (!(q > 0) || !(q < 1))
    throw std::invalid_argument("RateMixture::quantile: q must be in (0,1)");
  double lo = 0.0, hi = 1.0;
  while (cdf(hi) < q) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<RateMixture> posterior_mixtures(
    const std::vector<RunRecord>& records) {
  std::vector<double> log_z;
  for (const RunRecord& r : records)
    if (!r.degenerate && !r.posterior.empty()) log_z.push_back(r.log_z);
  if (log_z.empty())
    throw std::runtime_error("posterior_mixtures: no usable runs");
  const double norm = logsumexp(log_z);

  std::map<std::string, RateMixture> by_rate;
  std::size_t i = 0;
  for (const RunRecord& r : records) {
    if (r.degenerate || r.posterior.empty()) continue;
    const double w = std::exp(log_z[i++] - norm);
    for (const auto& [name, params] : r.posterior) {
      RateMixture& mix = by_rate[name];
      mix.rate = name;
      mix.components.push_back({w, params.shape, params.scale});
    }
  }
  std::vector<RateMixture> out;
  out.reserve(by_rate.size());
  for (auto& [name, mix] : by_rate) out.push_back(std::move(mix));
  return out;
}

}  // namespace phylosmc
