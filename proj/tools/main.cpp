#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phylosmc/crbd.hpp"
#include "phylosmc/models/bisse_model.hpp"
#include "phylosmc/models/crbd_model.hpp"
#include "phylosmc/models/toy.hpp"
#include "phylosmc/newick.hpp"
#include "phylosmc/posterior.hpp"
#include "phylosmc/smc.hpp"

using namespace phylosmc;

namespace {

constexpr int kExitDomain = 2;
constexpr int kExitUsage = 64;

std::string num(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct InferOptions {
  std::string model = "crbd";
  std::string method = "apf";
  std::string sampling = "delayed";
  int particles = 512;
  int runs = 100;
  std::uint64_t seed = 1;
  long long starvation_cap = 1000000;

  std::string tree_path;
  std::string states_path;
  std::vector<double> prior_lambda{1.0, 1.0};
  std::vector<double> prior_mu{1.0, 1.0};
  std::vector<double> prior_lambda0{1.0, 1.0};
  std::vector<double> prior_lambda1{1.0, 1.0};
  std::vector<double> prior_mu0{1.0, 1.0};
  std::vector<double> prior_mu1{1.0, 1.0};
  std::vector<double> prior_sigma{1.0, 1.0};
  double fixed_lambda = 1.0;
  double fixed_mu = 0.0;
  double fixed_sigma = 0.0;

  // Toy models.
  double lgss_a = 0.9;
  int lgss_t = 10;
  std::uint64_t obs_seed = 1;
  double half_width = 1.0;
  int checkpoints = 5;
};

void add_infer_flags(CLI::App& cmd, InferOptions& o, bool with_method) {
  cmd.add_option("--model", o.model)
      ->check(CLI::IsMember({"crbd", "bisse", "lgss", "indicator"}));
  if (with_method)
    cmd.add_option("--method", o.method)->check(CLI::IsMember({"bpf", "apf"}));
  cmd.add_option("--sampling", o.sampling)
      ->check(CLI::IsMember({"immediate", "delayed", "fixed"}));
  cmd.add_option("--particles", o.particles)->check(CLI::PositiveNumber);
  cmd.add_option("--runs", o.runs)->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed);
  cmd.add_option("--starvation-cap", o.starvation_cap)
      ->check(CLI::PositiveNumber);
  cmd.add_option("--tree", o.tree_path);
  cmd.add_option("--states", o.states_path);
  cmd.add_option("--prior-lambda", o.prior_lambda)->expected(2);
  cmd.add_option("--prior-mu", o.prior_mu)->expected(2);
  cmd.add_option("--prior-lambda0", o.prior_lambda0)->expected(2);
  cmd.add_option("--prior-lambda1", o.prior_lambda1)->expected(2);
  cmd.add_option("--prior-mu0", o.prior_mu0)->expected(2);
  cmd.add_option("--prior-mu1", o.prior_mu1)->expected(2);
  cmd.add_option("--prior-sigma", o.prior_sigma)->expected(2);
  cmd.add_option("--fixed-lambda", o.fixed_lambda);
  cmd.add_option("--fixed-mu", o.fixed_mu);
  cmd.add_option("--fixed-sigma", o.fixed_sigma);
  cmd.add_option("--lgss-a", o.lgss_a);
  cmd.add_option("--lgss-t", o.lgss_t)->check(CLI::PositiveNumber);
  cmd.add_option("--obs-seed", o.obs_seed);
  cmd.add_option("--half-width", o.half_width);
  cmd.add_option("--checkpoints", o.checkpoints)->check(CLI::PositiveNumber);
  cmd.set_config("--config");
}

Sampling parse_sampling(const std::string& s) {
  if (s == "immediate") return Sampling::immediate;
  if (s == "delayed") return Sampling::delayed;
  return Sampling::fixed;
}

GammaParams pair_prior(const std::vector<double>& v) {
  return {v[0], v[1]};
}

Tree load_tree(const InferOptions& o) {
  if (o.tree_path.empty())
    throw CLI::ValidationError("--tree is required for " + o.model);
  Tree tree = parse_newick(read_file(o.tree_path));
  if (!o.states_path.empty())
    tree = with_tip_states(tree, parse_tip_states(read_file(o.states_path)));
  return tree;
}

LgssConfig lgss_config(const InferOptions& o) {
  LgssConfig cfg;
  cfg.a = o.lgss_a;
  Rng rng(o.obs_seed);
  cfg.y = simulate_lgss_observations(cfg, o.lgss_t, rng);
  return cfg;
}

std::unique_ptr<CheckpointProgram> build_model(const InferOptions& o) {
  if (o.model == "crbd") {
    CrbdConfig cfg{load_tree(o)};
    cfg.sampling = parse_sampling(o.sampling);
    cfg.prior_lambda = pair_prior(o.prior_lambda);
    cfg.prior_mu = pair_prior(o.prior_mu);
    cfg.fixed_lambda = o.fixed_lambda;
    cfg.fixed_mu = o.fixed_mu;
    return crbd_program(std::move(cfg));
  }
  if (o.model == "bisse") {
    BisseConfig cfg{load_tree(o)};
    cfg.sampling = parse_sampling(o.sampling);
    cfg.prior_lambda = {pair_prior(o.prior_lambda0),
                        pair_prior(o.prior_lambda1)};
    cfg.prior_mu = {pair_prior(o.prior_mu0), pair_prior(o.prior_mu1)};
    cfg.prior_sigma = pair_prior(o.prior_sigma);
    cfg.fixed_lambda = {o.fixed_lambda, o.fixed_lambda};
    cfg.fixed_mu = {o.fixed_mu, o.fixed_mu};
    cfg.fixed_sigma = o.fixed_sigma;
    return bisse_program(std::move(cfg));
  }
  if (o.sampling != "immediate")
    throw CLI::ValidationError("--sampling " + o.sampling +
                               " is only valid for crbd/bisse");
  if (o.model == "lgss") return lgss_program(lgss_config(o));
  IndicatorConfig cfg;
  cfg.half_width = o.half_width;
  cfg.checkpoints = o.checkpoints;
  return indicator_program(cfg);
}

std::string runs_csv(const InferOptions& o,
                     const std::vector<RunRecord>& records) {
  std::string out = "run,method,sampling,N,logZ,propagations,degenerate\n";
  for (const RunRecord& r : records) {
    out += std::to_string(r.run) + ',' + o.method + ',' + o.sampling + ',' +
           std::to_string(o.particles) + ',' + num(r.log_z) + ',' +
           std::to_string(r.propagations) + ',' + (r.degenerate ? "1" : "0") +
           '\n';
  }
  return out;
}

nlohmann::ordered_json summary_json(const BatchSummary& s) {
  nlohmann::ordered_json j;
  j["M"] = s.runs;
  j["N"] = s.n_particles;
  j["ress"] = s.ress;
  j["car"] = s.car;
  j["var_log_z"] = s.var_log_z;
  j["rho"] = s.rho;
  j["degenerate_runs"] = s.degenerate_runs;
  return j;
}

int cmd_simulate(double lambda, double mu, double age, std::uint64_t seed,
                 const std::string& complete_out,
                 const std::string& pruned_out) {
  Rng rng(seed);
  const Tree complete = simulate_crbd(lambda, mu, age, rng);
  write_file(complete_out, write_newick(complete) + "\n");
  if (stats(complete).extant == 0) {
    std::cerr << "tree is fully extinct; no reconstructed output\n";
    return kExitDomain;
  }
  write_file(pruned_out, write_newick(prune(complete)) + "\n");
  return 0;
}

int cmd_infer(const InferOptions& o, const std::string& runs_out,
              const std::string& summary_out, bool kalman_check) {
  if (kalman_check && o.model != "lgss")
    throw CLI::ValidationError("--kalman-check requires --model lgss");
  const auto model = build_model(o);
  const Method method = o.method == "bpf" ? Method::bpf : Method::apf;
  const BatchResult r =
      batch(*model, method, o.particles, o.runs, o.seed, o.starvation_cap);

  nlohmann::ordered_json j = summary_json(r.summary);
  if (kalman_check) {
    const double oracle = kalman_log_evidence(lgss_config(o));
    std::vector<double> z;
    z.reserve(r.records.size());
    for (const RunRecord& rec : r.records)
      z.push_back(rec.degenerate ? 0.0 : std::exp(rec.log_z - oracle));
    const double mean =
        std::accumulate(z.begin(), z.end(), 0.0) / z.size();
    double ss = 0.0;
    for (double x : z) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (z.size() - 1) / z.size());
    j["oracle_log_z"] = oracle;
    j["z_score"] = (mean - 1.0) / se;
  }

  if (!runs_out.empty()) write_file(runs_out, runs_csv(o, r.records));
  if (!summary_out.empty()) write_file(summary_out, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return r.summary.all_degenerate ? 1 : 0;
}

int cmd_posterior(const InferOptions& o, const std::string& mixture_out,
                  const std::string& quantiles_out) {
  if (o.model != "crbd" && o.model != "bisse")
    throw CLI::ValidationError("posterior requires --model crbd or bisse");
  if (o.sampling != "delayed")
    throw CLI::ValidationError("posterior requires --sampling delayed");
  const auto model = build_model(o);
  const Method method = o.method == "bpf" ? Method::bpf : Method::apf;
  const BatchResult r =
      batch(*model, method, o.particles, o.runs, o.seed, o.starvation_cap);
  const auto mixtures = posterior_mixtures(r.records);

  std::string mix_csv = "rate,component,weight,shape,scale\n";
  std::string q_csv = "rate,mean,q025,q250,q500,q750,q975\n";
  for (const RateMixture& mix : mixtures) {
    for (std::size_t i = 0; i < mix.components.size(); ++i) {
      const MixtureComponent& c = mix.components[i];
      mix_csv += mix.rate + ',' + std::to_string(i) + ',' + num(c.weight) +
                 ',' + num(c.shape) + ',' + num(c.scale) + '\n';
    }
    q_csv += mix.rate + ',' + num(mix.mean());
    for (double q : {0.025, 0.25, 0.5, 0.75, 0.975})
      q_csv += ',' + num(mix.quantile(q));
    q_csv += '\n';
  }
  if (!mixture_out.empty()) write_file(mixture_out, mix_csv);
  if (!quantiles_out.empty()) write_file(quantiles_out, q_csv);
  std::cout << mix_csv;
  return 0;
}

int cmd_toycheck(const InferOptions& o, const std::string& toy) {
  bool pass = true;
  if (toy == "lgss") {
    const LgssConfig cfg = lgss_config(o);
    const auto model = lgss_program(cfg);
    const double oracle = kalman_log_evidence(cfg);
    for (const char* name : {"bpf", "apf"}) {
      const Method method =
          std::string(name) == "bpf" ? Method::bpf : Method::apf;
      const BatchResult r = batch(*model, method, o.particles, o.runs, o.seed);
      std::vector<double> z;
      for (const RunRecord& rec : r.records)
        z.push_back(rec.degenerate ? 0.0 : std::exp(rec.log_z - oracle));
      const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
      double ss = 0.0;
      for (double x : z) ss += (x - mean) * (x - mean);
      const double se = std::sqrt(ss / (z.size() - 1) / z.size());
      const double zscore = (mean - 1.0) / se;
      const bool ok = std::abs(zscore) < 3.0;
      pass = pass && ok;
      std::cout << "lgss " << name << " oracle_log_z=" << num(oracle)
                << " z=" << num(zscore) << (ok ? " pass" : " FAIL") << "\n";
    }
    return pass ? 0 : 1;
  }

  // Indicator: per-checkpoint mean propagation count against (N+1)/p.
  IndicatorConfig cfg;
  cfg.half_width = o.half_width;
  cfg.checkpoints = o.checkpoints;
  const auto model = indicator_program(cfg);
  const double p = std::erf(o.half_width / std::sqrt(2.0));
  std::vector<std::vector<double>> per_t(cfg.checkpoints);
  for (int m = 0; m < o.runs; ++m) {
    try {
      const RunResult r =
          run_apf(*model, o.particles, run_seed(o.seed, m), o.starvation_cap);
      for (int t = 0; t < cfg.checkpoints; ++t)
        per_t[t].push_back(static_cast<double>(r.propagations[t]));
    } catch (const StarvationError& e) {
      std::cout << "indicator FAIL: " << e.what()
                << " (acceptance probability too small)\n";
      return 1;
    }
  }
  const double expected = (o.particles + 1) / p;
  for (int t = 0; t < cfg.checkpoints; ++t) {
    const std::vector<double>& v = per_t[t];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (v.size() - 1) / v.size());
    const double z = (mean - expected) / se;
    const bool ok = std::abs(z) < 3.0;
    pass = pass && ok;
    std::cout << "indicator t=" << t << " mean_P=" << num(mean)
              << " expected=" << num(expected) << " z=" << num(z)
              << (ok ? " pass" : " FAIL") << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birth-death sequential Monte Carlo experiments"};
  app.require_subcommand(1);

  double sim_lambda = 1.0, sim_mu = 0.5, sim_age = 5.0;
  std::uint64_t sim_seed = 1;
  std::string complete_out = "complete.nwk", pruned_out = "pruned.nwk";
  CLI::App* sim = app.add_subcommand("simulate", "draw a tree from CRBD");
  sim->add_option("--lambda", sim_lambda);
  sim->add_option("--mu", sim_mu);
  sim->add_option("--age", sim_age)->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed);
  sim->add_option("--complete-out", complete_out);
  sim->add_option("--pruned-out", pruned_out);

  InferOptions infer_opt;
  std::string runs_out, summary_out;
  bool kalman_check = false;
  CLI::App* infer = app.add_subcommand("infer", "run an inference batch");
  add_infer_flags(*infer, infer_opt, true);
  infer->add_option("--runs-out", runs_out);
  infer->add_option("--summary-out", summary_out);
  infer->add_flag("--kalman-check", kalman_check);

  InferOptions post_opt;
  std::string mixture_out, quantiles_out;
  CLI::App* post = app.add_subcommand("posterior", "rate posterior mixtures");
  add_infer_flags(*post, post_opt, true);
  post->add_option("--mixture-out", mixture_out);
  post->add_option("--quantiles-out", quantiles_out);

  InferOptions toy_opt;
  toy_opt.particles = 64;
  toy_opt.runs = 2000;
  std::string toy_model = "lgss";
  CLI::App* toy = app.add_subcommand("toycheck", "engine self-checks");
  add_infer_flags(*toy, toy_opt, false);
  toy->add_option("--toy-model", toy_model)
      ->check(CLI::IsMember({"lgss", "indicator"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_lambda, sim_mu, sim_age, sim_seed, complete_out,
                          pruned_out);
    if (infer->parsed())
      return cmd_infer(infer_opt, runs_out, summary_out, kalman_check);
    if (post->parsed())
      return cmd_posterior(post_opt, mixture_out, quantiles_out);
    return cmd_toycheck(toy_opt, toy_model);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
