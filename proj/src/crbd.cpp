#include "phylosmc/crbd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "phylosmc/dists.hpp"

namespace phylosmc {

double crbd_complete_loglik(const Tree& tree, double lambda, double mu) {
  if (!(lambda > 0) || mu < 0)
    throw std::invalid_argument("crbd_complete_loglik: invalid rates");
  const TreeStats s = stats(tree);
  if (mu == 0.0 && s.extinctions > 0)
    return -std::numeric_limits<double>::infinity();
  double ll = (s.speciations + 1) * std::log(2.0) - std::lgamma(s.extant + 1.0);
  ll += s.speciations * std::log(lambda);
  if (s.extinctions > 0) ll += s.extinctions * std::log(mu);
  ll -= (lambda + mu) * s.branch_length;
  return ll;
}

namespace {

struct CrbdSim {
  double lambda, mu;
  Rng& rng;
  std::vector<TreeNode> nodes;
  int tips = 0;

  int lineage(double age, int parent) {
    const double total = lambda + mu;
    const double wait = total > 0 ? Exponential(total).sample(rng)
                                  : std::numeric_limits<double>::infinity();
    const int self = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[self].parent = parent;
    if (wait >= age) {
      nodes[self].age = 0.0;
      nodes[self].label = "t" + std::to_string(++tips);
      return self;
    }
    const double at = age - wait;
    nodes[self].age = at;
    if (rng.uniform() * total < lambda) {
      nodes[self].left = lineage(at, self);
      nodes[self].right = lineage(at, self);
    } else {
      nodes[self].label = "x" + std::to_string(++tips);
    }
    return self;
  }
};

}  // namespace

Tree simulate_crbd(double lambda, double mu, double origin, Rng& rng) {
  if (lambda < 0 || mu < 0 || !(origin > 0))
    throw std::invalid_argument("simulate_crbd: invalid parameters");
  CrbdSim sim{lambda, mu, rng};
  sim.nodes.push_back({origin, -1, -1, -1, "", -1});
  sim.nodes[0].left = sim.lineage(origin, 0);
  return Tree(std::move(sim.nodes), 0);
}

}  // namespace phylosmc
