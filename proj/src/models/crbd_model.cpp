#include "phylosmc/models/crbd_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "phylosmc/crbd.hpp"
#include "phylosmc/dists.hpp"
#include "phylosmc/models/rate_var.hpp"

namespace phylosmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

bool branch_survives(double tau, RateVar& lambda, RateVar& mu, Rng& rng,
                     long long& budget) {
  std::vector<double> pending{tau};
  while (!pending.empty()) {
    if (--budget < 0)
      throw std::runtime_error(
          "branch_survives: hidden-subtree explosion (budget exhausted)");
    const double origin = pending.back();
    pending.pop_back();
    const double dt = mu.sample_exponential(rng);
    if (dt >= origin) return true;  // reaches the present
    const long children = lambda.sample_poisson(dt, rng);
    for (long i = 0; i < children; ++i)
      pending.push_back(Uniform(origin - dt, origin).sample(rng));
  }
  return false;
}

namespace {

struct Branch {
  double child_age;
  double delta;
  bool has_children;
};

struct CrbdState : ParticleState {
  RateVar lambda;
  RateVar mu;
  CrbdState(RateVar l, RateVar m) : lambda(std::move(l)), mu(std::move(m)) {}
  std::unique_ptr<ParticleState> clone() const override {
    return std::make_unique<CrbdState>(*this);
  }
};

class CrbdProgram : public CheckpointProgram {
 public:
  explicit CrbdProgram(CrbdConfig cfg) : cfg_(std::move(cfg)) {
    const Tree& tree = cfg_.tree;
    if (tree.preorder().empty())
      throw std::invalid_argument("crbd_program: tree has no branches");
    if (cfg_.sampling == Sampling::fixed) {
      if (!(cfg_.fixed_lambda > 0) || cfg_.fixed_mu < 0)
        throw std::invalid_argument("crbd_program: invalid fixed rates");
    } else {
      check_prior(cfg_.prior_lambda);
      check_prior(cfg_.prior_mu);
    }
    for (int i : tree.preorder())
      branches_.push_back({tree.node(i).age, tree.branch_length(i),
                           !tree.node(i).is_leaf()});
  }

  int checkpoint_count() const override {
    return static_cast<int>(branches_.size());
  }

  std::unique_ptr<ParticleState> init(Rng& rng) const override {
    switch (cfg_.sampling) {
      case Sampling::fixed:
        return std::make_unique<CrbdState>(RateVar::concrete(cfg_.fixed_lambda),
                                           RateVar::concrete(cfg_.fixed_mu));
      case Sampling::immediate:
        return std::make_unique<CrbdState>(
            RateVar::concrete(sample_prior(cfg_.prior_lambda, rng)),
            RateVar::concrete(sample_prior(cfg_.prior_mu, rng)));
      case Sampling::delayed:
        return std::make_unique<CrbdState>(
            RateVar::delayed(
                GammaNode(cfg_.prior_lambda.shape, cfg_.prior_lambda.scale)),
            RateVar::delayed(
                GammaNode(cfg_.prior_mu.shape, cfg_.prior_mu.scale)));
    }
    throw std::logic_error("crbd_program: unreachable");
  }

  double step(ParticleState& state, int t, Rng& rng) const override {
    auto& s = static_cast<CrbdState&>(state);
    const Branch& b = branches_[t];
    double lw = 0.0;
    long long budget = cfg_.hidden_branch_budget;

    const long hidden = s.lambda.sample_poisson(b.delta, rng);
    for (long i = 0; i < hidden; ++i) {
      const double tau = Uniform(b.child_age, b.child_age + b.delta).sample(rng);
      if (branch_survives(tau, s.lambda, s.mu, rng, budget)) return kNegInf;
      lw += std::log(2.0);
    }
    if (b.has_children) lw += s.lambda.observe_exponential_zero();
    lw += s.mu.observe_poisson_zero(b.delta);
    return lw;
  }

  std::map<std::string, GammaParams> rate_posteriors(
      const ParticleState& state) const override {
    if (cfg_.sampling != Sampling::delayed) return {};
    const auto& s = static_cast<const CrbdState&>(state);
    return {{"lambda", s.lambda.posterior()}, {"mu", s.mu.posterior()}};
  }

 private:
  static void check_prior(const GammaParams& p) {
    if (!(p.shape > 0) || !(p.scale > 0))
      throw std::invalid_argument("crbd_program: invalid prior parameters");
  }
  static double sample_prior(const GammaParams& p, Rng& rng) {
    return Gamma(p.shape, p.scale).sample(rng);
  }

  CrbdConfig cfg_;
  std::vector<Branch> branches_;
};

// Builds one augmentation proposal; `rejected` is set when a hidden lineage
// reaches the present.
struct AugmentationBuilder {
  const Tree& obs;
  double lambda, mu;
  Rng& rng;
  std::vector<TreeNode> nodes;
  AugmentationStats st;
  bool rejected = false;

  int add(double age) {
    nodes.push_back({});
    nodes.back().age = age;
    return static_cast<int>(nodes.size()) - 1;
  }

  void link(int parent, int child) {
    (nodes[parent].left < 0 ? nodes[parent].left : nodes[parent].right) = child;
    nodes[child].parent = parent;
  }

  std::vector<double> event_ages(double lo, double hi, long count) {
    std::vector<double> ages(count);
    for (double& a : ages) a = Uniform(lo, hi).sample(rng);
    std::sort(ages.rbegin(), ages.rend());  // oldest first
    return ages;
  }

  // Simulates the extinct lineage spawned at age `tau`, linking it under
  // `parent`. The lineage and all its descendants must die out.
  void hidden_lineage(double tau, int parent) {
    if (rejected) return;
    const double dt = mu > 0 ? Exponential(mu).sample(rng)
                             : std::numeric_limits<double>::infinity();
    if (dt >= tau) {
      rejected = true;
      return;
    }
    st.subtree_extinctions += 1;
    st.subtree_length += dt;
    const double death = tau - dt;
    const long count = Poisson(lambda * dt).sample(rng);
    st.subtree_speciations += count;
    int cur = parent;
    for (double a : event_ages(death, tau, count)) {
      const int sp = add(a);
      link(cur, sp);
      hidden_lineage(a, sp);
      if (rejected) return;
      cur = sp;
    }
    link(cur, add(death));
  }

  // Copies the observed node `oi` (and its subtree), inserting the hidden
  // speciation chain on the branch from its parent at `parent_age`.
  void copy_observed(int oi, int parent, double parent_age) {
    if (rejected) return;
    const TreeNode& n = obs.node(oi);
    const long hidden = Poisson(lambda * (parent_age - n.age)).sample(rng);
    st.hidden_speciations += hidden;
    int attach = parent;
    for (double a : event_ages(n.age, parent_age, hidden)) {
      const int hs = add(a);
      link(attach, hs);
      hidden_lineage(a, hs);
      if (rejected) return;
      attach = hs;
    }
    const int self = add(n.age);
    nodes[self].label = n.label;
    nodes[self].tip_state = n.tip_state;
    link(attach, self);
    if (!n.is_leaf()) {
      copy_observed(n.left, self, n.age);
      copy_observed(n.right, self, n.age);
    }
  }

  bool build() {
    nodes.clear();
    st = {};
    rejected = false;
    const TreeNode& root = obs.node(obs.root());
    add(root.age);
    copy_observed(root.left, 0, root.age);
    if (!rejected && root.right >= 0) copy_observed(root.right, 0, root.age);
    return !rejected;
  }
};

}  // namespace

std::unique_ptr<CheckpointProgram> crbd_program(CrbdConfig cfg) {
  return std::make_unique<CrbdProgram>(std::move(cfg));
}

Augmentation propose_augmentation(const Tree& observed, double lambda,
                                  double mu, Rng& rng, int max_attempts) {
  if (!(lambda > 0) || mu < 0)
    throw std::invalid_argument("propose_augmentation: invalid rates");
  const TreeStats obs_stats = stats(observed);
  AugmentationBuilder builder{observed, lambda, mu, rng};
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (!builder.build()) continue;
    AugmentationStats st = builder.st;
    st.observed_speciations = obs_stats.speciations;
    st.observed_length = obs_stats.branch_length;

    double log_q = st.hidden_speciations * std::log(lambda) -
                   lambda * st.observed_length +
                   st.subtree_speciations * (std::log(2.0) + std::log(lambda)) -
                   (lambda + mu) * st.subtree_length;
    if (st.subtree_extinctions > 0)
      log_q += st.subtree_extinctions * std::log(mu);
    const double log_w = st.hidden_speciations * std::log(2.0) +
                         st.observed_speciations * std::log(lambda) -
                         mu * st.observed_length;
    return {Tree(std::move(builder.nodes), 0), st, log_q, log_w};
  }
  throw std::runtime_error("propose_augmentation: no acceptance within budget");
}

}  // namespace phylosmc
