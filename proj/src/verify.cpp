#include "mdd/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mdd/error.hpp"
#include "mdd/eval.hpp"
#include "mdd/info.hpp"
#include "mdd/parallel.hpp"

namespace mdd {

namespace {

constexpr double kIdentityTol = 1e-10;

class Tracker {
 public:
  Tracker(std::string name, PropertyCategory category, std::string metric)
      : start_(std::chrono::steady_clock::now()) {
    result_.name = std::move(name);
    result_.category = category;
    result_.metric = std::move(metric);
    if (result_.metric == "slack") result_.worst = std::numeric_limits<double>::infinity();
  }

  /// |residual| must not exceed `tol`.
  void residual(double value, double tol, const std::string& where) {
    ++result_.cases;
    result_.worst = std::max(result_.worst, std::abs(value));
    if (!(std::abs(value) <= tol)) fail(where + " residual=" + fmt(value));
  }

  /// value <= bound, recorded as slack.
  void bound(double value, double bound, const std::string& where) {
    ++result_.cases;
    result_.worst = std::min(result_.worst, bound - value);
    if (!(value <= bound)) fail(where + " value=" + fmt(value) + " bound=" + fmt(bound));
  }

  /// Pass/fail condition counted as a violation.
  void require(bool ok, const std::string& where) {
    ++result_.cases;
    if (!ok) fail(where);
  }

  PropertyResult finish() {
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (result_.metric == "slack" && result_.cases == 0) result_.worst = 0.0;
    return result_;
  }

 private:
  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  }

  void fail(const std::string& what) {
    ++result_.violations;
    result_.passed = false;
    if (result_.first_failure.empty()) result_.first_failure = what;
  }

  PropertyResult result_;
  std::chrono::steady_clock::time_point start_;
};

/// Random joint over `arities` from a symmetric Dirichlet, optionally with a
/// random subset of outcomes zeroed to exercise support edges.
std::vector<double> random_joint(std::span<const int> arities, Rng& rng, bool sparse) {
  std::size_t n = 1;
  for (int a : arities) n *= static_cast<std::size_t>(a);
  std::gamma_distribution<double> gamma(0.7, 1.0);
  std::bernoulli_distribution drop(0.3);
  std::vector<double> w(n);
  double total = 0.0;
  while (total <= 0.0) {
    total = 0.0;
    for (double& x : w) {
      x = (sparse && drop(rng)) ? 0.0 : gamma(rng);
      total += x;
    }
  }
  for (double& x : w) x /= total;
  return w;
}

ExplicitJoint random_table(int length, int vocab, Rng& rng, bool sparse) {
  const std::vector<int> arities(static_cast<std::size_t>(length), vocab);
  return build_explicit(length, vocab, random_joint(arities, rng, sparse));
}

std::string label(const NamedDist& d, const StrategySpec& s) {
  std::ostringstream os;
  os << d.name << "/" << s.name();
  if (s.kind == StrategyKind::EntropySum || s.kind == StrategyKind::MaxEntropy) os << "(eta=" << s.eta;
  if (s.kind == StrategyKind::MaxEntropy) os << ",s_max=" << s.s_max;
  if (s.kind == StrategyKind::EntropySum || s.kind == StrategyKind::MaxEntropy) os << ")";
  return os.str();
}

int floor_log2(int n) { return std::bit_width(static_cast<unsigned>(n)) - 1; }

}  // namespace

std::vector<IdentityTriple> identity_triples(std::uint64_t seed, int count) {
  Rng rng = make_stream(seed, 0x1d);
  std::vector<IdentityTriple> out;
  const std::vector<StrategySpec> strategies_for_any = {
      StrategySpec::entropy_sum(0.05), StrategySpec::entropy_sum(0.3), StrategySpec::entropy_sum(0.7),
      StrategySpec::entropy_sum(1.5),  StrategySpec::max_entropy(0.3, 2), StrategySpec::max_entropy(0.8, 3),
  };
  for (int c = 0; c < count; ++c) {
    NamedDist d{"", point_mass(1)};
    switch (c % 6) {
      case 0: d = {"dirichlet_L4", random_table(4, 2, rng, false)}; break;
      case 1: d = {"dirichlet_sparse_L5", random_table(5, 2, rng, true)}; break;
      case 2: d = {"markov_0.9_L5", symmetric_markov(5, 0.9)}; break;
      case 3: d = {"correlated_blocks_L6", correlated_blocks(6)}; break;
      case 4: d = {"dirichlet_L6", random_table(6, 2, rng, false)}; break;
      default: d = {"copy_chain_L4", symmetric_markov(4, 1.0)}; break;
    }
    const int L = d.dist.length();
    StrategySpec s;
    switch (c % 8) {
      case 6: s = StrategySpec::balanced(L, 2); break;
      case 7: s = StrategySpec::one_shot(L); break;
      default: s = strategies_for_any[static_cast<std::size_t>(c % 8) % strategies_for_any.size()]; break;
    }
    Permutation perm = uniform_random_permutation(L, rng);
    out.push_back({std::move(d), std::move(s), std::move(perm)});
  }
  return out;
}

PropertyResult check_lemma1_tail_identity(const VerifyConfig& cfg) {
  Tracker t("lemma1_tail_identity", PropertyCategory::Identity, "residual");
  Rng rng = make_stream(cfg.seed, 0x11);
  std::uniform_int_distribution<int> arity(2, 3);
  for (int j = 0; j < cfg.lemma1_joints; ++j) {
    const int d = 2 + j % 3;
    std::vector<int> arities(static_cast<std::size_t>(d));
    for (int& a : arities) a = arity(rng);
    const auto joint = random_joint(arities, rng, j % 4 == 3);
    const auto terms = mi_tail_decomposition(joint, arities);
    const double sum = std::accumulate(terms.begin(), terms.end(), 0.0);
    t.residual(kl_joint_vs_product(joint, arities) - sum, kIdentityTol, "joint " + std::to_string(j));
  }
  return t.finish();
}

PropertyResult check_lemma1_leave_one_out_bound(const VerifyConfig& cfg) {
  Tracker t("lemma1_leave_one_out_bound", PropertyCategory::Identity, "slack");
  Rng rng = make_stream(cfg.seed, 0x11);  // same joints as the tail identity
  std::uniform_int_distribution<int> arity(2, 3);
  for (int j = 0; j < cfg.lemma1_joints; ++j) {
    const int d = 2 + j % 3;
    std::vector<int> arities(static_cast<std::size_t>(d));
    for (int& a : arities) a = arity(rng);
    const auto joint = random_joint(arities, rng, j % 4 == 3);
    const double kl_value = kl_joint_vs_product(joint, arities);
    for (int excluded = 0; excluded < d; ++excluded) {
      const auto terms = mi_leave_one_out(joint, arities, excluded);
      const double sum = std::accumulate(terms.begin(), terms.end(), 0.0);
      t.bound(kl_value, sum + kIdentityTol, "joint " + std::to_string(j) + " excluded " + std::to_string(excluded));
    }
  }
  return t.finish();
}

PropertyResult check_pointwise_mi_chain_rule(const VerifyConfig& cfg) {
  Tracker t("pointwise_mi_chain_rule", PropertyCategory::Identity, "residual");
  Rng rng = make_stream(cfg.seed, 0x15);
  for (int j = 0; j < cfg.lemma5_joints; ++j) {
    const int vocab = 2 + j % 2;
    const Oracle oracle(random_table(4, vocab, rng, j % 3 == 2));
    std::vector<int> roles{0, 1, 2, 3};
    std::shuffle(roles.begin(), roles.end(), rng);
    const int x[] = {roles[0]};
    const int y1[] = {roles[1]};
    const int y2[] = {roles[2]};
    const int y12[] = {roles[1], roles[2]};
    const int z = roles[3];

    std::vector<PartialAssignment> contexts{PartialAssignment(4)};
    for (TokenId v = 0; v < vocab; ++v) {
      PartialAssignment c(4);
      c.set(z, v);
      contexts.push_back(c);
    }
    for (const auto& ctx : contexts) {
      if (oracle.context_mass(ctx) <= 0.0) continue;
      const double lhs = pointwise_mi(oracle, x, y12, ctx);
      double rhs = pointwise_mi(oracle, x, y1, ctx);
      const auto p_y1 = oracle.conditional_marginal(y1[0], ctx);
      for (TokenId v = 0; v < vocab; ++v) {
        if (p_y1[static_cast<std::size_t>(v)] <= 0.0) continue;
        PartialAssignment extended = ctx;
        extended.set(y1[0], v);
        rhs += p_y1[static_cast<std::size_t>(v)] * pointwise_mi(oracle, x, y2, extended);
      }
      t.residual(lhs - rhs, kIdentityTol, "joint " + std::to_string(j) + " |Z|=" + std::to_string(ctx.count()));
    }
  }
  return t.finish();
}

PropertyResult check_mi_entropy_cap(const VerifyConfig& cfg) {
  Tracker t("mi_le_min_entropy", PropertyCategory::Identity, "slack");
  Rng rng = make_stream(cfg.seed, 0x16);
  for (int j = 0; j < cfg.lemma5_joints; ++j) {
    const Oracle oracle(random_table(3, 2 + j % 2, rng, j % 2 == 1));
    const int a[] = {0};
    const int b[] = {1, 2};
    const PartialAssignment ctx(3);
    const double mi = pointwise_mi(oracle, a, b, ctx);
    const double cap = std::min(pointwise_entropy(oracle, a, ctx), pointwise_entropy(oracle, b, ctx));
    t.bound(mi, cap + 1e-12, "joint " + std::to_string(j));
  }
  return t.finish();
}

PropertyResult check_kl_nonnegative(const VerifyConfig& cfg) {
  Tracker t("kl_nonnegative_before_clamp", PropertyCategory::Identity, "slack");
  Rng rng = make_stream(cfg.seed, 0x17);
  const int arities[] = {3, 3};
  for (int j = 0; j < cfg.lemma1_joints; ++j) {
    const auto p = random_joint(arities, rng, j % 2 == 1);
    auto q = random_joint(arities, rng, false);
    t.bound(-kl_raw(p, q), 1e-12, "pair " + std::to_string(j));
    t.bound(-kl_raw(p, p), 1e-12, "self " + std::to_string(j));
  }
  return t.finish();
}

PropertyResult check_oracle_chain_rule(const VerifyConfig& cfg) {
  Tracker t("oracle_chain_rule", PropertyCategory::Identity, "residual");
  Rng rng = make_stream(cfg.seed, 0x18);
  for (const auto& nd : builtin_suite(cfg.seed)) {
    const Oracle oracle(nd.dist);
    const int L = oracle.length();
    for (int r = 0; r < 3; ++r) {
      const Permutation perm = uniform_random_permutation(L, rng);
      const auto probs = nd.dist.probs();
      for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        if (probs[idx] <= 0.0) continue;
        const auto x = nd.dist.sequence_at(idx);
        PartialAssignment ctx(L);
        double product = 1.0;
        for (int k = 0; k < L; ++k) {
          const int pos = perm[k];
          product *= oracle.conditional_marginal(pos, ctx)[static_cast<std::size_t>(x[static_cast<std::size_t>(pos)])];
          ctx.set(pos, x[static_cast<std::size_t>(pos)]);
        }
        t.residual((product - probs[idx]) / probs[idx], kIdentityTol, nd.name + " idx " + std::to_string(idx));
      }
    }
  }
  return t.finish();
}

PropertyResult check_joint_entropy_identity(const VerifyConfig& cfg) {
  Tracker t("entropy_identity_joint", PropertyCategory::Identity, "residual");
  for (const auto& tr : identity_triples(cfg.seed, cfg.identity_triples)) {
    const Oracle oracle(tr.dist.dist);
    const auto r = verify_entropy_identity(oracle, tr.strategy, tr.perm);
    t.residual(r.lhs - r.rhs, kIdentityTol, label(tr.dist, tr.strategy));
  }
  return t.finish();
}

PropertyResult check_marginal_entropy_identity(const VerifyConfig& cfg) {
  Tracker t("entropy_identity_marginal", PropertyCategory::Identity, "residual");
  for (const auto& tr : identity_triples(cfg.seed, cfg.identity_triples)) {
    const Oracle oracle(tr.dist.dist);
    const auto r = verify_marginal_entropy_identity(oracle, tr.strategy, tr.perm);
    t.residual(r.lhs - r.rhs, kIdentityTol, label(tr.dist, tr.strategy));
  }
  return t.finish();
}

PropertyResult check_two_route_kl(const VerifyConfig& cfg) {
  Tracker t("two_route_kl_agreement", PropertyCategory::Identity, "residual");
  for (const auto& tr : identity_triples(cfg.seed, cfg.identity_triples)) {
    const Oracle oracle(tr.dist.dist);
    const auto ev = evaluate_permutation(oracle, tr.strategy, tr.perm);
    t.residual(ev.kl_density - ev.kl_decomposition, kIdentityTol, label(tr.dist, tr.strategy));
  }
  return t.finish();
}

PropertyResult check_ar_zero_error(const VerifyConfig& cfg) {
  Tracker t("ar_zero_error", PropertyCategory::Identity, "residual");
  Rng rng = make_stream(cfg.seed, 0x1a);
  const auto ar = StrategySpec::ar();
  for (const auto& nd : builtin_suite(cfg.seed)) {
    const Oracle oracle(nd.dist);
    const int L = oracle.length();
    for (int r = 0; r < cfg.ar_perms; ++r) {
      const Permutation perm = uniform_random_permutation(L, rng);
      t.residual(exact_kl_given_perm(oracle, ar, perm), 1e-12, nd.name);
      const auto sample = sample_trajectory(oracle, ar, perm, rng);
      t.require(sample.trajectory.iterations() == L, nd.name + ": AR trajectory with T != L");
    }
  }
  return t.finish();
}

PropertyResult check_one_shot_identity(const VerifyConfig& cfg) {
  Tracker t("one_shot_identity", PropertyCategory::Identity, "residual");
  Rng rng = make_stream(cfg.seed, 0x1b);
  for (const auto& nd : builtin_suite(cfg.seed)) {
    const Oracle oracle(nd.dist);
    const int L = oracle.length();
    if (L < 2) continue;
    const std::vector<int> arities(static_cast<std::size_t>(L), oracle.vocab());
    for (int r = 0; r < cfg.ar_perms; ++r) {
      const Permutation perm = uniform_random_permutation(L, rng);
      const auto permuted = marginalize(nd.dist.probs(), arities, perm.order());
      const auto terms = mi_tail_decomposition(permuted, arities);
      const double tail = std::accumulate(terms.begin(), terms.end(), 0.0);
      const double one_shot = exact_kl_given_perm(oracle, StrategySpec::one_shot(L), perm);
      t.residual(one_shot - tail, kIdentityTol, nd.name);
    }
  }
  return t.finish();
}

TrajectoryBattery run_trajectory_battery(const VerifyConfig& cfg) {
  Tracker envelope("envelope_crossing_bound", PropertyCategory::Structural, "slack");
  Tracker semantics("batch_semantics", PropertyCategory::Structural, "violations");
  Tracker partition("trajectory_partition", PropertyCategory::Structural, "violations");
  Tracker coherence("replay_record_coherence", PropertyCategory::Structural, "violations");
  TrajectoryBattery out;

  struct Cell {
    std::string dist_name;
    std::shared_ptr<const Oracle> oracle;
    StrategySpec strategy;
  };
  std::vector<Cell> cells;
  Rng setup = make_stream(cfg.seed, 0x1c);
  const double ln2 = std::log(2.0);
  for (int L : cfg.trajectory_lengths) {
    std::vector<NamedDist> dists;
    dists.push_back({"markov_0.9", symmetric_markov(L, 0.9)});
    dists.push_back({"copy_chain", symmetric_markov(L, 1.0)});
    if (L % 2 == 0) dists.push_back({"correlated_blocks", correlated_blocks(L)});
    std::vector<TokenId> templ(static_cast<std::size_t>(L));
    for (auto& b : templ) b = static_cast<TokenId>(setup() & 1u);
    dists.push_back({"near_deterministic_0.05", make_near_deterministic(templ, 0.05)});
    if (L <= 8) dists.push_back({"dirichlet", random_table(L, 2, setup, L == 8)});

    std::vector<StrategySpec> strategies{
        StrategySpec::entropy_sum(0.0),      StrategySpec::entropy_sum(0.05),   StrategySpec::entropy_sum(0.3),
        StrategySpec::entropy_sum(ln2),      StrategySpec::entropy_sum(1.0),    StrategySpec::entropy_sum(3.0),
        StrategySpec::max_entropy(0.0, L),   StrategySpec::max_entropy(0.1, 3), StrategySpec::max_entropy(0.5, 2),
        StrategySpec::max_entropy(ln2, 8),   StrategySpec::max_entropy(1.0, L), StrategySpec::ar(),
        StrategySpec::balanced(L, L / 2),    StrategySpec::one_shot(L),
    };
    for (auto& d : dists) {
      auto oracle = std::make_shared<const Oracle>(d.dist);
      for (const auto& s : strategies) cells.push_back({d.name + "_L" + std::to_string(L), oracle, s});
    }
  }

  struct Outcome {
    std::vector<std::pair<bool, std::string>> semantic;
    std::vector<std::pair<bool, std::string>> structure;
    bool coherent = true;
    int crossings = 0;
    int bound = 0;
    std::string where;
  };

  const auto n = static_cast<std::size_t>(cfg.trajectory_samples);
  const auto outcomes = parallel_map(n, cfg.threads, [&](std::size_t s) {
    const Cell& cell = cells[s % cells.size()];
    const Oracle& oracle = *cell.oracle;
    const int L = oracle.length();
    const auto& strategy = cell.strategy;
    Rng rng = make_stream(cfg.seed ^ 0x5eed, s);
    const Permutation perm = uniform_random_permutation(L, rng);
    const auto run = sample_trajectory(oracle, strategy, perm, rng);
    const auto& traj = run.trajectory;

    Outcome o;
    o.where = label(NamedDist{cell.dist_name, point_mass(1)}, strategy) + " sample " + std::to_string(s);
    const auto flag = [&](auto& list, bool ok, const char* what) {
      if (!ok) list.emplace_back(false, o.where + ": " + what);
    };

    // Partition and envelope structure.
    std::vector<int> seen(static_cast<std::size_t>(L), 0);
    int k = 0;
    bool order_ok = true;
    for (const auto& b : traj.batches) {
      flag(o.structure, !b.positions.empty(), "empty batch");
      for (int pos : b.positions) {
        ++seen[static_cast<std::size_t>(pos)];
        order_ok = order_ok && pos == perm[k++];
      }
    }
    flag(o.structure, std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }), "batches do not partition [0, L)");
    flag(o.structure, order_ok, "batches do not follow the permutation");
    flag(o.structure, traj.iterations() <= L, "T > L");
    const auto env = size_envelopes(traj.batch_sizes());
    flag(o.structure, env.envelopes == traj.envelopes && env.crossings == traj.crossings, "envelopes mismatch");
    o.crossings = traj.crossings;
    o.bound = floor_log2(L) + 1;

    // Batch semantics against entropies recomputed under the frozen context.
    PartialAssignment context(L);
    const double lnV = std::log(static_cast<double>(oracle.vocab()));
    for (int t = 0; t < traj.iterations(); ++t) {
      const auto& b = traj.batches[static_cast<std::size_t>(t)];
      const bool final_batch = t + 1 == traj.iterations();
      const auto table = oracle.marginal_table(context);
      double sum = 0.0;
      for (std::size_t i = 0; i < b.positions.size(); ++i) {
        const double h = table->mass > 0.0 ? entropy(table->row(b.positions[i])) : lnV;
        flag(o.semantic, std::abs(h - b.entropies[i]) <= 1e-12, "recorded entropy differs from the pre-iteration context");
        sum += b.entropies[i];
      }
      flag(o.semantic, std::abs(sum - b.entropy_sum) <= 1e-12, "entropy_sum mismatch");
      const double last = b.entropies.back();
      const double all_but_last = sum - last;
      switch (strategy.kind) {
        case StrategyKind::EntropySum:
          flag(o.semantic, all_but_last <= strategy.eta + 1e-12, "entropy sum before the last token exceeds eta");
          flag(o.semantic, final_batch || b.entropy_sum > strategy.eta, "batch closed before the sum exceeded eta");
          break;
        case StrategyKind::MaxEntropy: {
          flag(o.semantic, b.size() <= strategy.s_max, "batch larger than s_max");
          for (std::size_t i = 0; i + 1 < b.entropies.size(); ++i) {
            flag(o.semantic, b.entropies[i] <= strategy.eta, "over-threshold token is not last");
          }
          flag(o.semantic, final_batch || last > strategy.eta || b.size() == strategy.s_max,
               "batch closed without an over-threshold token or reaching s_max");
          break;
        }
        case StrategyKind::AR:
          flag(o.semantic, b.size() == 1, "AR batch is not a singleton");
          break;
        case StrategyKind::UniformSchedule:
          flag(o.semantic, b.size() == strategy.schedule[static_cast<std::size_t>(t)], "batch size off schedule");
          break;
      }
      for (int pos : b.positions) context.set(pos, run.tokens[static_cast<std::size_t>(pos)]);
    }

    o.coherent = replay_trajectory(oracle, strategy, perm, run.tokens, OffSupport::Uniform) == traj;
    return o;
  });

  for (const auto& o : outcomes) {
    envelope.bound(o.crossings, o.bound, o.where);
    semantics.require(o.semantic.empty(), o.semantic.empty() ? o.where : o.semantic.front().second);
    partition.require(o.structure.empty(), o.structure.empty() ? o.where : o.structure.front().second);
    coherence.require(o.coherent, o.where + ": replay differs from the recorded trajectory");
  }
  out.envelope_bound = envelope.finish();
  out.batch_semantics = semantics.finish();
  out.partition = partition.finish();
  out.replay_coherence = coherence.finish();
  out.trajectories = n;
  return out;
}

namespace {

PropertyResult theorem_grid_check(const VerifyConfig& cfg, const char* name, bool second) {
  Tracker t(name, PropertyCategory::Theorem, "slack");
  EvalOptions options;
  options.threads = cfg.threads;
  options.seed = cfg.seed;
  for (const auto& nd : theorem_grid()) {
    const Oracle oracle(nd.dist);
    for (double eps : cfg.epsilons) {
      const auto report = second ? certify_theorem2(oracle, eps, options) : certify_theorem1(oracle, eps, options);
      for (const auto& c : report.checks) {
        t.bound(c.value, c.bound, nd.name + " eps=" + std::to_string(eps) + " " + c.name);
      }
    }
  }
  return t.finish();
}

}  // namespace

PropertyResult check_theorem1_grid(const VerifyConfig& cfg) { return theorem_grid_check(cfg, "theorem1_certification", false); }

PropertyResult check_theorem2_grid(const VerifyConfig& cfg) { return theorem_grid_check(cfg, "theorem2_certification", true); }

PropertyResult check_strategy_bounds(const VerifyConfig& cfg) {
  Tracker t("strategy_bounds_any_parameters", PropertyCategory::Theorem, "slack");
  EvalOptions options;
  options.threads = cfg.threads;
  const std::vector<StrategySpec> strategies{
      StrategySpec::entropy_sum(0.05), StrategySpec::entropy_sum(0.3), StrategySpec::entropy_sum(1.0),
      StrategySpec::max_entropy(0.3, 2), StrategySpec::max_entropy(0.8, 3),
  };
  for (const auto& nd : builtin_suite(cfg.seed)) {
    const Oracle oracle(nd.dist);
    for (const auto& s : strategies) {
      const auto report = evaluate_strategy(oracle, s, options);
      for (const auto& c : report.checks) t.bound(c.value, c.bound, label(nd, s) + " " + c.name);
    }
  }
  return t.finish();
}

std::vector<PropertyResult> run_suite(Suite suite, const VerifyConfig& cfg) {
  std::vector<PropertyResult> results;
  if (suite != Suite::Theorems) {
    results.push_back(check_lemma1_tail_identity(cfg));
    results.push_back(check_lemma1_leave_one_out_bound(cfg));
    results.push_back(check_pointwise_mi_chain_rule(cfg));
    results.push_back(check_mi_entropy_cap(cfg));
    results.push_back(check_kl_nonnegative(cfg));
    results.push_back(check_oracle_chain_rule(cfg));
    results.push_back(check_joint_entropy_identity(cfg));
    results.push_back(check_marginal_entropy_identity(cfg));
    results.push_back(check_two_route_kl(cfg));
    results.push_back(check_ar_zero_error(cfg));
    results.push_back(check_one_shot_identity(cfg));
  }
  if (suite == Suite::All) {
    auto battery = run_trajectory_battery(cfg);
    results.push_back(std::move(battery.envelope_bound));
    results.push_back(std::move(battery.batch_semantics));
    results.push_back(std::move(battery.partition));
    results.push_back(std::move(battery.replay_coherence));
  }
  if (suite != Suite::Lemmas) {
    results.push_back(check_theorem1_grid(cfg));
    results.push_back(check_theorem2_grid(cfg));
    results.push_back(check_strategy_bounds(cfg));
  }
  return results;
}

}  // namespace mdd
