#ifndef PHYLOSMC_MODELS_CRBD_MODEL_HPP
#define PHYLOSMC_MODELS_CRBD_MODEL_HPP

#include <memory>

#include "phylosmc/gamma_node.hpp"
#include "phylosmc/smc.hpp"
#include "phylosmc/tree.hpp"

namespace phylosmc {

enum class Sampling { immediate, delayed, fixed };

struct CrbdConfig {
  Tree tree;                      // reconstructed phylogeny
  Sampling sampling = Sampling::delayed;
  GammaParams prior_lambda{1.0, 1.0};
  GammaParams prior_mu{1.0, 1.0};
  double fixed_lambda = 0.0;      // fixed mode only
  double fixed_mu = 0.0;
  long long hidden_branch_budget = 1000000;  // per-step explosion guard
};

// Constant-rate birth-death model over the observed tree's branches, one
// checkpoint per branch in pre-order. Per branch: simulate hidden speciation
// events (each must go extinct, doubling the weight; survival zeroes it),
// observe 0 ~ Exponential(lambda) at observed speciations, and observe
// 0 ~ Poisson(mu * branch length). The constant 2^(S_obs+1)/C! is omitted
// from the weights throughout.
std::unique_ptr<CheckpointProgram> crbd_program(CrbdConfig cfg);

// Hidden-subtree survival simulation: a lineage spawned at age `tau` and its
// descendants reach the present iff the simulated extinction time of some
// lineage passes age 0. `budget` limits the number of simulated hidden
// branches; exceeding it throws std::runtime_error (subcritical explosion).
class RateVar;
bool branch_survives(double tau, RateVar& lambda, RateVar& mu, Rng& rng,
                     long long& budget);

// Counts for one proposed complete-tree augmentation of an observed tree.
struct AugmentationStats {
  long hidden_speciations = 0;     // H': hidden events on observed branches
  long subtree_speciations = 0;    // S': speciations inside hidden subtrees
  long subtree_extinctions = 0;    // X'
  double subtree_length = 0.0;     // L'
  long observed_speciations = 0;   // S_obs
  double observed_length = 0.0;    // L_obs
};

struct Augmentation {
  Tree complete;
  AugmentationStats stats;
  double log_q;  // likelihood of the proposed complete tree
  double log_w;  // proposal weight, without the 2^(S_obs+1)/C! constant
};

// Samples complete-tree augmentations at fixed rates until one is accepted
// (no hidden lineage survives), assembling the full tree alongside the
// closed-form log q and log w. Throws after `max_attempts` rejections.
Augmentation propose_augmentation(const Tree& observed, double lambda,
                                  double mu, Rng& rng,
                                  int max_attempts = 1000000);

}  // namespace phylosmc

#endif
