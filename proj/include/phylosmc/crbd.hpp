#ifndef PHYLOSMC_CRBD_HPP
#define PHYLOSMC_CRBD_HPP

#include "phylosmc/rng.hpp"
#include "phylosmc/tree.hpp"

namespace phylosmc {

// Log likelihood of a complete labeled phylogeny under constant rates:
// log[(2^(S+1)/C!) lambda^S mu^X exp(-(lambda+mu) L)]. Returns -inf when
// mu = 0 and the tree contains extinctions.
double crbd_complete_loglik(const Tree& tree, double lambda, double mu);

// Draws a complete tree from the constant-rate birth-death process started
// with a single lineage at age `origin`. Lineage waiting times are
// Exponential(lambda + mu); each event is a speciation with probability
// lambda/(lambda+mu). The returned tree is rooted at the origin with a single
// child (the initial lineage); with lambda = mu = 0 it degenerates to one
// extant branch.
Tree simulate_crbd(double lambda, double mu, double origin, Rng& rng);

}  // namespace phylosmc

#endif
