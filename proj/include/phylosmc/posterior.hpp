#ifndef PHYLOSMC_POSTERIOR_HPP
#define PHYLOSMC_POSTERIOR_HPP

#include <string>
#include <vector>

#include "phylosmc/smc.hpp"

namespace phylosmc {

struct MixtureComponent {
  double weight;
  double shape;
  double scale;
};

// Posterior of one rate as a gamma mixture: one component per non-degenerate
// run, weighted by that run's evidence estimate.
struct RateMixture {
  std::string rate;
  std::vector<MixtureComponent> components;

  double mean() const;
  double cdf(double x) const;
  // Quantile by numerical inversion of the mixture CDF.
  double quantile(double q) const;
};

// Builds per-rate gamma mixtures from the batch records of delayed-mode runs.
// Throws std::runtime_error when every run is degenerate or no posteriors
// were recorded.
std::vector<RateMixture> posterior_mixtures(
    const std::vector<RunRecord>& records);

}  // namespace phylosmc

#endif
