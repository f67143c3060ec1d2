#include "phylosmc/models/bisse_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "phylosmc/dists.hpp"
#include "phylosmc/models/rate_var.hpp"

namespace phylosmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BisseState : ParticleState {
  std::array<RateVar, 2> lambda;
  std::array<RateVar, 2> mu;
  RateVar sigma;
  std::vector<signed char> node_state;  // lineage state at each tree node

  BisseState(std::array<RateVar, 2> l, std::array<RateVar, 2> m, RateVar s,
             std::size_t n_nodes)
      : lambda(std::move(l)),
        mu(std::move(m)),
        sigma(std::move(s)),
        node_state(n_nodes, -1) {}

  std::unique_ptr<ParticleState> clone() const override {
    return std::make_unique<BisseState>(*this);
  }
};

struct Branch {
  int node;
  int parent;
  double child_age;
  double delta;
  bool has_children;
  int tip_state;  // -1 unknown
};

class BisseProgram : public CheckpointProgram {
 public:
  explicit BisseProgram(BisseConfig cfg) : cfg_(std::move(cfg)) {
    const Tree& tree = cfg_.tree;
    if (tree.preorder().empty())
      throw std::invalid_argument("bisse_program: tree has no branches");
    if (cfg_.sampling == Sampling::fixed) {
      for (int s : {0, 1})
        if (!(cfg_.fixed_lambda[s] >= 0) || cfg_.fixed_mu[s] < 0)
          throw std::invalid_argument("bisse_program: invalid fixed rates");
      if (cfg_.fixed_sigma < 0)
        throw std::invalid_argument("bisse_program: invalid fixed sigma");
    }
    for (int i : tree.preorder()) {
      const TreeNode& n = tree.node(i);
      branches_.push_back({i, n.parent, n.age, tree.branch_length(i),
                           !n.is_leaf(), n.is_leaf() ? n.tip_state : -1});
    }
  }

  int checkpoint_count() const override {
    return static_cast<int>(branches_.size());
  }

  std::unique_ptr<ParticleState> init(Rng& rng) const override {
    auto state = std::make_unique<BisseState>(
        make_rate_pair(cfg_.prior_lambda, cfg_.fixed_lambda, rng),
        make_rate_pair(cfg_.prior_mu, cfg_.fixed_mu, rng),
        make_rate(cfg_.prior_sigma, cfg_.fixed_sigma, rng),
        cfg_.tree.nodes().size());
    state->node_state[cfg_.tree.root()] = rng.uniform() < 0.5 ? 0 : 1;
    return state;
  }

  double step(ParticleState& state, int t, Rng& rng) const override {
    auto& s = static_cast<BisseState&>(state);
    const Branch& b = branches_[t];
    int cur = s.node_state[b.parent];
    double lw = 0.0;
    long long budget = cfg_.hidden_branch_budget;

    // Walk the branch from the parent downward as alternating constant-state
    // segments delimited by switch events.
    double top = b.child_age + b.delta;
    double remaining = b.delta;
    while (true) {
      const auto sw = s.sigma.sample_exponential_censored(remaining, rng);
      const double seg = sw ? *sw : remaining;
      const long hidden = s.lambda[cur].sample_poisson(seg, rng);
      for (long i = 0; i < hidden; ++i) {
        const double tau = Uniform(top - seg, top).sample(rng);
        if (hidden_survives(tau, cur, s, rng, budget)) return kNegInf;
        lw += std::log(2.0);
      }
      lw += s.mu[cur].observe_poisson_zero(seg);
      if (std::isinf(lw) && lw < 0) return kNegInf;
      if (!sw) break;
      cur ^= 1;
      top -= seg;
      remaining -= seg;
    }
    s.node_state[b.node] = static_cast<signed char>(cur);

    if (b.has_children) {
      lw += s.lambda[cur].observe_exponential_zero();
    } else if (b.tip_state >= 0 && b.tip_state != cur) {
      return kNegInf;
    }
    return lw;
  }

  std::map<std::string, GammaParams> rate_posteriors(
      const ParticleState& state) const override {
    if (cfg_.sampling != Sampling::delayed) return {};
    const auto& s = static_cast<const BisseState&>(state);
    return {{"lambda0", s.lambda[0].posterior()},
            {"lambda1", s.lambda[1].posterior()},
            {"mu0", s.mu[0].posterior()},
            {"mu1", s.mu[1].posterior()},
            {"sigma", s.sigma.posterior()}};
  }

 private:
  RateVar make_rate(const GammaParams& prior, double fixed, Rng& rng) const {
    switch (cfg_.sampling) {
      case Sampling::fixed:
        return RateVar::concrete(fixed);
      case Sampling::immediate:
        return RateVar::concrete(Gamma(prior.shape, prior.scale).sample(rng));
      case Sampling::delayed:
        return RateVar::delayed(GammaNode(prior.shape, prior.scale));
    }
    throw std::logic_error("bisse_program: unreachable");
  }

  std::array<RateVar, 2> make_rate_pair(const std::array<GammaParams, 2>& prior,
                                        const std::array<double, 2>& fixed,
                                        Rng& rng) const {
    return {make_rate(prior[0], fixed[0], rng),
            make_rate(prior[1], fixed[1], rng)};
  }

  // True when the hidden lineage spawned at age tau in state s0, or any of
  // its descendants, reaches the present. Switch and extinction waiting times
  // are drawn right-censored so posterior exposures cover exactly the
  // simulated lifetimes.
  bool hidden_survives(double tau, int s0, BisseState& s, Rng& rng,
                       long long& budget) const {
    struct Lineage {
      double age;
      int state;
    };
    std::vector<Lineage> pending{{tau, s0}};
    while (!pending.empty()) {
      if (--budget < 0)
        throw std::runtime_error(
            "bisse: hidden-subtree explosion (budget exhausted)");
      auto [age, st] = pending.back();
      pending.pop_back();
      bool dead = false;
      while (!dead) {
        const auto sw = s.sigma.sample_exponential_censored(age, rng);
        const double seg = sw ? *sw : age;
        const auto ext = s.mu[st].sample_exponential_censored(seg, rng);
        const double alive = ext ? *ext : seg;
        const long children = s.lambda[st].sample_poisson(alive, rng);
        for (long i = 0; i < children; ++i)
          pending.push_back({Uniform(age - alive, age).sample(rng), st});
        if (ext) {
          dead = true;
        } else if (!sw) {
          return true;  // reached the present
        } else {
          age -= seg;
          st ^= 1;
        }
      }
    }
    return false;
  }

  BisseConfig cfg_;
  std::vector<Branch> branches_;
};

}  // namespace

std::unique_ptr<CheckpointProgram> bisse_program(BisseConfig cfg) {
  return std::make_unique<BisseProgram>(std::move(cfg));
}

}  // namespace phylosmc
