// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>
#include <string>
#include <vector>

#include "mdd/eval.hpp"
#include "mdd/suite.hpp"
#include "mdd/verify.hpp"

using namespace mdd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds; 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome from(const PropertyResult& r) {
  std::string d = fmt("%zu cases, %zu violations, worst %s %.3e", r.cases, r.violations, r.metric.c_str(), r.worst);
  if (!r.passed) d += "; first: " + r.first_failure;
  return {r.passed, d};
}

Outcome both(const PropertyResult& a, const PropertyResult& b) {
  const auto x = from(a), y = from(b);
  return {x.pass && y.pass, a.name + " [" + x.detail + "] " + b.name + " [" + y.detail + "]"};
}

VerifyConfig acceptance_config() {
  VerifyConfig cfg;
  cfg.lemma1_joints = 100;
  cfg.lemma5_joints = 50;
  cfg.identity_triples = 20;
  cfg.ar_perms = 10;
  cfg.trajectory_samples = 10000;
  cfg.trajectory_lengths = {4, 8, 16};
  cfg.epsilons = {0.05, 0.2};
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

// Criteria 3, 4 and 8 under the current fault setting; true if all pass.
bool semantic_criteria_pass(const VerifyConfig& cfg, std::string& failed) {
  const auto joint = check_joint_entropy_identity(cfg);
  const auto marginal = check_marginal_entropy_identity(cfg);
  const auto routes = check_two_route_kl(cfg);
  const auto battery = run_trajectory_battery(cfg);
  failed.clear();
  if (!joint.passed || !marginal.passed) failed += "C3 ";
  if (!routes.passed) failed += "C4 ";
  if (!battery.batch_semantics.passed) failed += "C8 ";
  return failed.empty();
}

Outcome mc_consistency() {
  struct Config {
    std::string name;
    ExplicitJoint dist;
    StrategySpec strategy;
  };
  const std::vector<Config> configs{
      {"dirichlet_L4_V2/entropy_sum(0.5)", make_random_dirichlet(4, 2, 0.5, 101), StrategySpec::entropy_sum(0.5)},
      {"markov_0.9_L5/max_entropy(0.4,2)", symmetric_markov(5, 0.9), StrategySpec::max_entropy(0.4, 2)},
      {"markov_0.8_L6/entropy_sum(0.6)", symmetric_markov(6, 0.8), StrategySpec::entropy_sum(0.6)},
      {"dirichlet_L3_V3/max_entropy(0.9,2)", make_random_dirichlet(3, 3, 0.7, 202), StrategySpec::max_entropy(0.9, 2)},
      {"dirichlet_L5_V2/max_entropy(0.6,3)", make_random_dirichlet(5, 2, 0.5, 303), StrategySpec::max_entropy(0.6, 3)},
  };
  int agree = 0;
  std::string detail;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const Oracle oracle(configs[i].dist);
    EvalOptions exact;
    exact.threads = std::max(1u, std::thread::hardware_concurrency());
    EvalOptions mc = exact;
    mc.mode = EvalMode::MonteCarlo;
    mc.n_samples = 10000;
    mc.seed = 1000 + i;
    const auto e = evaluate_strategy(oracle, configs[i].strategy, exact);
    const auto m = evaluate_strategy(oracle, configs[i].strategy, mc);
    // Round-off slack only matters when a standard error is exactly zero.
    const double kl_z = std::abs(m.kl.value - e.kl.value) / std::max(m.kl.std_error, 1e-300);
    const double t_z = std::abs(m.iterations.value - e.iterations.value) / std::max(m.iterations.std_error, 1e-300);
    const bool kl_ok = std::abs(m.kl.value - e.kl.value) <= 3 * m.kl.std_error + 1e-12;
    const bool t_ok = std::abs(m.iterations.value - e.iterations.value) <= 3 * m.iterations.std_error + 1e-12;
    agree += kl_ok && t_ok;
    detail += fmt("\n      %-40s kl %.5f vs %.5f (z=%.2f) e_iters %.4f vs %.4f (z=%.2f) %s", configs[i].name.c_str(),
                  m.kl.value, e.kl.value, kl_z, m.iterations.value, e.iterations.value, t_z, kl_ok && t_ok ? "ok" : "outside");
  }
  return {agree >= 4, fmt("%d/5 configurations within 3 stderr", agree) + detail};
}

Outcome adaptivity() {
  const int L = 12;
  const double eps = 0.25;
  const Oracle oracle(make_near_deterministic(std::vector<TokenId>(L, 0), 0.01));
  EvalOptions opts;
  opts.mode = EvalMode::MonteCarlo;
  opts.n_samples = 10000;
  opts.seed = 12;
  opts.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto r = certify_theorem1(oracle, eps, opts);
  const bool kl_ok = r.kl.value <= eps + 3 * r.kl.std_error;
  const bool t_ok = r.iterations.value < L;
  return {kl_ok && t_ok,
          fmt("H=%.6f eta=%.6f per-token entropy=%.6f; KL=%.3e (stderr %.1e) %s eps; E[T]=%.4f (stderr %.1e) %s L=%d",
              r.data_entropy, r.strategy.eta, binary_entropy(0.01), r.kl.value, r.kl.std_error, kl_ok ? "<=" : ">",
              r.iterations.value, r.iterations.std_error, t_ok ? "<" : "not <", L)};
}

Outcome mutation(const VerifyConfig& base) {
  VerifyConfig cfg = base;
  std::string failed;
  std::string detail;
  bool ok = semantic_criteria_pass(cfg, failed);
  if (!ok) return {false, "criteria 3/4/8 fail without any fault: " + failed};
  bool caught_all = true;
  for (auto [fault, name] : {std::pair{Fault::NonStrictThreshold, "non-strict threshold"},
                             std::pair{Fault::UnfrozenContext, "unfrozen context"}}) {
    set_fault_for_testing(fault);
    const bool still_pass = semantic_criteria_pass(cfg, failed);
    set_fault_for_testing(Fault::None);
    caught_all = caught_all && !still_pass;
    detail += std::string(name) + " -> " + (still_pass ? "undetected" : "fails " + failed) + "; ";
  }
  return {caught_all, detail};
}

}  // namespace

int main() {
  const VerifyConfig cfg = acceptance_config();
  TrajectoryBattery battery;
  bool battery_ready = false;
  auto get_battery = [&]() -> const TrajectoryBattery& {
    if (!battery_ready) {
      battery = run_trajectory_battery(cfg);
      battery_ready = true;
    }
    return battery;
  };

  const std::vector<Criterion> criteria{
      {1, "tail-MI identity and leave-one-out bound", 10.0,
       [&] { return both(check_lemma1_tail_identity(cfg), check_lemma1_leave_one_out_bound(cfg)); }},
      {2, "pointwise MI chain rule", 30.0, [&] { return from(check_pointwise_mi_chain_rule(cfg)); }},
      {3, "entropy identities (joint and marginal forms)", 0.0,
       [&] { return both(check_joint_entropy_identity(cfg), check_marginal_entropy_identity(cfg)); }},
      {4, "two-route KL agreement", 0.0, [&] { return from(check_two_route_kl(cfg)); }},
      {5, "AR zero error and T = L", 0.0, [&] { return from(check_ar_zero_error(cfg)); }},
      {6, "one-shot KL equals tail-MI sum", 0.0, [&] { return from(check_one_shot_identity(cfg)); }},
      {7, "envelope crossings <= floor(log2 L) + 1", 0.0,
       [&] {
         const auto& b = get_battery();
         auto o = from(b.envelope_bound);
         o.pass = o.pass && b.trajectories >= 10000;
         o.detail = fmt("%zu trajectories; ", b.trajectories) + o.detail;
         return o;
       }},
      {8, "batch semantics", 0.0, [&] { return from(get_battery().batch_semantics); }},
      {9, "theorem 1 certification grid", 300.0, [&] { return from(check_theorem1_grid(cfg)); }},
      {10, "theorem 2 certification grid", 0.0, [&] { return from(check_theorem2_grid(cfg)); }},
      {11, "Monte Carlo vs exact consistency", 0.0, mc_consistency},
      {12, "adaptivity on near-deterministic L=12", 120.0, adaptivity},
      {13, "mutation sensitivity", 0.0, [&] { return mutation(cfg); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += fmt(" (exceeded %.0f s limit)", c.time_limit);
    }
    failures += !o.pass;
    std::printf("[%s] C%-2d %-46s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
