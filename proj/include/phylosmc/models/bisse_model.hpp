#ifndef PHYLOSMC_MODELS_BISSE_MODEL_HPP
#define PHYLOSMC_MODELS_BISSE_MODEL_HPP

#include <array>
#include <memory>

#include "phylosmc/models/crbd_model.hpp"

namespace phylosmc {

// Binary-state speciation and extinction model: each lineage carries a state
// s in {0,1} with per-state speciation and extinction rates; the state
// switches in both directions at a common rate sigma. The root state is drawn
// uniformly. Extant tips with a known state condition the particle weight on
// a match; unknown states are unconstrained.
struct BisseConfig {
  Tree tree;  // reconstructed phylogeny with tip states attached
  Sampling sampling = Sampling::delayed;
  std::array<GammaParams, 2> prior_lambda{{{1.0, 1.0}, {1.0, 1.0}}};
  std::array<GammaParams, 2> prior_mu{{{1.0, 1.0}, {1.0, 1.0}}};
  GammaParams prior_sigma{1.0, 1.0};
  std::array<double, 2> fixed_lambda{0.0, 0.0};  // fixed mode only
  std::array<double, 2> fixed_mu{0.0, 0.0};
  double fixed_sigma = 0.0;
  long long hidden_branch_budget = 1000000;
};

std::unique_ptr<CheckpointProgram> bisse_program(BisseConfig cfg);

}  // namespace phylosmc

#endif
