#include "mdd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mdd/error.hpp"
#include "mdd/parallel.hpp"

namespace mdd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log2_length_plus_one(int length) { return std::log2(static_cast<double>(length)) + 1.0; }

std::string describe(std::span<const TokenId> x, const Trajectory& traj) {
  std::ostringstream os;
  os << "x=(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ") batches=";
  for (const auto& b : traj.batches) {
    os << "{";
    for (std::size_t i = 0; i < b.positions.size(); ++i) os << (i ? "," : "") << b.positions[i];
    os << "}";
  }
  return os.str();
}

Estimate mean_and_error(std::span<const double> values) {
  Estimate e;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.value = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.value) * (v - e.value);
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

/// Sum over batches of log p(x^i | x^{W_{t-1}}) for i in D_t.
double batch_logprob(const Oracle& oracle, const Trajectory& traj, std::span<const TokenId> x) {
  PartialAssignment context(oracle.length());
  double logq = 0.0;
  for (const auto& batch : traj.batches) {
    for (int pos : batch.positions) {
      const double q = oracle.conditional_marginal(pos, context)[static_cast<std::size_t>(x[static_cast<std::size_t>(pos)])];
      if (q <= 0.0) {
        throw Error(ErrorCode::SupportViolation, "zero sampling probability along " + describe(x, traj));
      }
      logq += std::log(q);
    }
    for (int pos : batch.positions) context.set(pos, x[static_cast<std::size_t>(pos)]);
  }
  return logq;
}

/// Calls fn(batch_targets_sorted, context) for every iteration of `traj`.
template <typename Fn>
void for_each_batch_context(const Oracle& oracle, const Trajectory& traj, std::span<const TokenId> x, Fn&& fn) {
  PartialAssignment context(oracle.length());
  for (const auto& batch : traj.batches) {
    std::vector<int> targets = batch.positions;
    std::sort(targets.begin(), targets.end());
    fn(std::span<const int>(targets), context);
    for (int pos : batch.positions) context.set(pos, x[static_cast<std::size_t>(pos)]);
  }
}

Nats batch_decomposition(const Oracle& oracle, const Trajectory& traj, std::span<const TokenId> x) {
  Nats total = 0.0;
  for_each_batch_context(oracle, traj, x, [&](std::span<const int> targets, const PartialAssignment& context) {
    if (targets.size() < 2) return;
    const auto joint = oracle.conditional_joint(targets, context);
    const std::vector<int> arities(targets.size(), oracle.vocab());
    total += kl_joint_vs_product(joint.probs, arities);
  });
  return total;
}

/// H/eta, with 0/0 read as 0 (no threshold-ended iterations when H = 0).
double entropy_over_eta(Nats H, double eta) {
  if (eta > 0.0) return H / eta;
  return H > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

void add_check(EvalReport& report, std::string name, double value, double std_error, double bound) {
  // Monte Carlo values are compared at three standard errors; exact values
  // with no tolerance.
  const double slack = report.mode == EvalMode::MonteCarlo ? 3.0 * std_error : 0.0;
  report.checks.push_back({std::move(name), value, bound, value <= bound + slack});
}

}  // namespace

TokenSequence draw_sequence(const ExplicitJoint& dist, Rng& rng) {
  const auto probs = dist.probs();
  return dist.sequence_at(static_cast<std::size_t>(draw_categorical(probs, rng)));
}

namespace {

/// Inverse-CDF sampler over the table, for repeated draws.
class DataSampler {
 public:
  explicit DataSampler(const ExplicitJoint& dist) : dist_(dist), cdf_(dist.size()) {
    double acc = 0.0;
    const auto probs = dist.probs();
    for (std::size_t i = 0; i < probs.size(); ++i) cdf_[i] = (acc += probs[i]);
  }

  TokenSequence operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    while (dist_.probs()[idx] == 0.0 && idx > 0) --idx;  // ties at a flat CDF step
    return dist_.sequence_at(idx);
  }

 private:
  const ExplicitJoint& dist_;
  std::vector<double> cdf_;
};

}  // namespace

PermutationEvaluation evaluate_permutation(const Oracle& oracle, const StrategySpec& strategy,
                                           const Permutation& perm) {
  const auto& dist = oracle.dist();
  const auto probs = dist.probs();
  PermutationEvaluation ev;
  double weighted_t = 0.0;
  int min_t = oracle.length();
  int max_t = 1;
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    const TokenSequence x = dist.sequence_at(idx);
    const Trajectory traj = replay_trajectory(oracle, strategy, perm, x, OffSupport::Uniform);
    const int T = traj.iterations();

    double q = 1.0;
    for (const auto& b : traj.batches) {
      for (double tp : b.token_probs) q *= tp;
    }
    if (q > 0.0) {
      ev.sampled_mass += q;
      weighted_t += q * T;
      min_t = std::min(min_t, T);
      max_t = std::max(max_t, T);
    }

    const double p = probs[idx];
    if (p <= 0.0) continue;
    ev.kl_density += p * (std::log(p) - batch_logprob(oracle, traj, x));
    ev.kl_decomposition += p * batch_decomposition(oracle, traj, x);
    ev.data_weighted_iterations += p * T;
    double joint_h = 0.0;
    for_each_batch_context(oracle, traj, x, [&](std::span<const int> targets, const PartialAssignment& context) {
      joint_h += pointwise_entropy(oracle, targets, context);
    });
    ev.batch_joint_entropy += p * joint_h;
    double marginal_h = 0.0;
    for (const auto& b : traj.batches) marginal_h += b.entropy_sum;
    ev.batch_marginal_entropy += p * marginal_h;
  }
  // E[T] is a convex combination of the observed counts; clamp round-off.
  ev.expected_iterations = std::clamp(weighted_t / ev.sampled_mass, static_cast<double>(min_t),
                                      static_cast<double>(max_t));
  ev.kl_density = std::max(0.0, ev.kl_density);
  return ev;
}

double sampled_logprob(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                       std::span<const TokenId> x) {
  return batch_logprob(oracle, replay_trajectory(oracle, strategy, perm, x), x);
}

Nats exact_kl_given_perm(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm) {
  const auto& dist = oracle.dist();
  const auto probs = dist.probs();
  double total = 0.0;
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    const double p = probs[idx];
    if (p <= 0.0) continue;
    const TokenSequence x = dist.sequence_at(idx);
    total += p * (std::log(p) - sampled_logprob(oracle, strategy, perm, x));
  }
  return std::max(0.0, total);
}

Nats decomposition_kl_along(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                            std::span<const TokenId> x) {
  return batch_decomposition(oracle, replay_trajectory(oracle, strategy, perm, x), x);
}

Nats decomposition_kl_given_perm(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm) {
  const auto& dist = oracle.dist();
  const auto probs = dist.probs();
  double total = 0.0;
  for (std::size_t idx = 0; idx < probs.size(); ++idx) {
    if (probs[idx] <= 0.0) continue;
    total += probs[idx] * decomposition_kl_along(oracle, strategy, perm, dist.sequence_at(idx));
  }
  return total;
}

Estimate kl_decomposition_estimator(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                                    std::span<const TokenSequence> samples) {
  std::vector<double> terms;
  terms.reserve(samples.size());
  for (const auto& x : samples) terms.push_back(decomposition_kl_along(oracle, strategy, perm, x));
  return mean_and_error(terms);
}

PermutationAverage average_over_permutations(const Oracle& oracle, const StrategySpec& strategy, const PermMode& mode,
                                             std::uint64_t perm_cap, unsigned threads) {
  const int L = oracle.length();
  strategy.validate(L);
  std::vector<PermutationEvaluation> evals;
  if (mode.kind == PermMode::Kind::Enumerate) {
    const auto n = permutation_count(L, perm_cap);
    evals = parallel_map(static_cast<std::size_t>(n), threads, [&](std::size_t rank) {
      return evaluate_permutation(oracle, strategy, permutation_from_rank(L, rank));
    });
  } else {
    if (mode.samples == 0) throw Error(ErrorCode::InvalidArgument, "permutation sample count must be positive");
    evals = parallel_map(mode.samples, threads, [&](std::size_t s) {
      Rng rng = make_stream(mode.seed, s);
      return evaluate_permutation(oracle, strategy, uniform_random_permutation(L, rng));
    });
  }
  const auto collect = [&](auto field) {
    std::vector<double> v;
    v.reserve(evals.size());
    for (const auto& e : evals) v.push_back(e.*field);
    Estimate est = mean_and_error(v);
    if (mode.kind == PermMode::Kind::Enumerate) est.std_error = 0.0;
    return est;
  };
  PermutationAverage avg;
  avg.kl = collect(&PermutationEvaluation::kl_density);
  avg.kl_decomposition = collect(&PermutationEvaluation::kl_decomposition);
  avg.iterations = collect(&PermutationEvaluation::expected_iterations);
  avg.data_weighted_iterations = collect(&PermutationEvaluation::data_weighted_iterations);
  avg.perms = evals.size();
  return avg;
}

Estimate exact_kl_expected(const Oracle& oracle, const StrategySpec& strategy, const PermMode& mode,
                           std::uint64_t perm_cap, unsigned threads) {
  return average_over_permutations(oracle, strategy, mode, perm_cap, threads).kl;
}

Estimate expected_iterations(const Oracle& oracle, const StrategySpec& strategy, const PermMode& mode,
                             std::uint64_t perm_cap, unsigned threads) {
  return average_over_permutations(oracle, strategy, mode, perm_cap, threads).iterations;
}

IdentityResidual verify_entropy_identity(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm) {
  const auto ev = evaluate_permutation(oracle, strategy, perm);
  return {oracle.dist().entropy(), ev.batch_joint_entropy};
}

IdentityResidual verify_marginal_entropy_identity(const Oracle& oracle, const StrategySpec& strategy,
                                                  const Permutation& perm) {
  const auto ev = evaluate_permutation(oracle, strategy, perm);
  return {oracle.dist().entropy(), ev.batch_marginal_entropy - ev.kl_density};
}

bool EvalReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

EvalReport evaluate_strategy(const Oracle& oracle, const StrategySpec& strategy, const EvalOptions& options) {
  const int L = oracle.length();
  strategy.validate(L);
  EvalReport report;
  report.label = "strategy";
  report.strategy = strategy;
  report.length = L;
  report.vocab = oracle.vocab();
  report.data_entropy = oracle.dist().entropy();
  report.mode = options.mode;
  report.seed = options.seed;
  report.theorem_kl_bound = kNaN;
  report.theorem_iter_bound = kNaN;
  report.internal_kl_bound = kNaN;
  report.iter_bound = kNaN;

  if (options.mode == EvalMode::Exact) {
    PermMode mode = PermMode::enumerate();
    try {
      permutation_count(L, options.caps.max_permutations);
    } catch (const Error&) {
      mode = PermMode::sample(options.n_perms, options.seed);
    }
    const auto avg = average_over_permutations(oracle, strategy, mode, options.caps.max_permutations, options.threads);
    report.kl = avg.kl;
    report.iterations = avg.iterations;
    report.perms_evaluated = avg.perms;
  } else {
    if (options.n_samples < 2) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 2");
    const DataSampler sampler(oracle.dist());
    struct Draw {
      double kl = 0.0;
      double iterations = 0.0;
    };
    const auto draws = parallel_map(options.n_samples, options.threads, [&](std::size_t s) {
      Rng rng = make_stream(options.seed, s);
      const Permutation perm = uniform_random_permutation(L, rng);
      const TokenSequence x = sampler(rng);
      Draw d;
      d.kl = decomposition_kl_along(oracle, strategy, perm, x);
      d.iterations = sample_trajectory(oracle, strategy, perm, rng).trajectory.iterations();
      return d;
    });
    std::vector<double> kls, iters;
    for (const auto& d : draws) {
      kls.push_back(d.kl);
      iters.push_back(d.iterations);
    }
    report.kl = mean_and_error(kls);
    report.iterations = mean_and_error(iters);
    report.perms_evaluated = options.n_samples;
    report.samples_drawn = options.n_samples;
  }

  const double lg = log2_length_plus_one(L);
  const double H = report.data_entropy;
  switch (strategy.kind) {
    case StrategyKind::EntropySum:
      report.internal_kl_bound = 4.0 * strategy.eta * lg;
      report.iter_bound = entropy_over_eta(H, strategy.eta) + 4.0 * lg + 1.0;
      add_check(report, "kl<=4*eta*(log2L+1)", report.kl.value, report.kl.std_error, report.internal_kl_bound);
      add_check(report, "e_iters<=H/eta+4*(log2L+1)+1", report.iterations.value, report.iterations.std_error,
                report.iter_bound);
      break;
    case StrategyKind::MaxEntropy:
      report.internal_kl_bound = strategy.s_max * strategy.eta;
      // Cap-ended iterations number at most L/s_max; each threshold-ended one
      // carries more than eta of batch entropy, which sums to H in expectation.
      report.iter_bound = static_cast<double>(L) / strategy.s_max + entropy_over_eta(H, strategy.eta) + 1.0;
      add_check(report, "kl<=s_max*eta", report.kl.value, report.kl.std_error, report.internal_kl_bound);
      add_check(report, "e_iters<=L/s_max+H/eta+1", report.iterations.value, report.iterations.std_error,
                report.iter_bound);
      break;
    case StrategyKind::AR:
      report.iter_bound = L;
      break;
    case StrategyKind::UniformSchedule:
      report.iter_bound = static_cast<double>(strategy.schedule.size());
      break;
  }
  return report;
}

double theorem1_eta(int length, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  return epsilon / (4.0 * log2_length_plus_one(length));
}

Theorem2Parameters theorem2_parameters(int length, Nats data_entropy, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(data_entropy > 0.0)) throw Error(ErrorCode::DegenerateEntropy, "H(X_0) = 0");
  Theorem2Parameters params;
  params.eta = std::sqrt(epsilon * data_entropy / length);
  params.s_max = std::max(1, static_cast<int>(std::floor(std::sqrt(epsilon * length / data_entropy))));
  return params;
}

EvalReport certify_theorem1(const Oracle& oracle, double epsilon, const EvalOptions& options) {
  const int L = oracle.length();
  EvalReport report = evaluate_strategy(oracle, StrategySpec::entropy_sum(theorem1_eta(L, epsilon)), options);
  report.label = "theorem1";
  report.epsilon = epsilon;
  report.theorem_kl_bound = epsilon;
  report.theorem_iter_bound = 4.0 * (report.data_entropy / epsilon + 1.0) * log2_length_plus_one(L) + 1.0;
  add_check(report, "kl<=epsilon", report.kl.value, report.kl.std_error, report.theorem_kl_bound);
  add_check(report, "e_iters<=4*(H/epsilon+1)*(log2L+1)+1", report.iterations.value, report.iterations.std_error,
            report.theorem_iter_bound);
  return report;
}

EvalReport certify_theorem2(const Oracle& oracle, double epsilon, const EvalOptions& options) {
  const int L = oracle.length();
  const Nats H = oracle.dist().entropy();
  Theorem2Parameters params;
  bool degenerate = false;
  try {
    params = theorem2_parameters(L, H, epsilon);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateEntropy) throw;
    // Deterministic limit: every token has zero entropy, one batch of L.
    params = {0.0, L};
    degenerate = true;
  }
  EvalReport report = evaluate_strategy(oracle, StrategySpec::max_entropy(params.eta, params.s_max), options);
  report.label = "theorem2";
  report.epsilon = epsilon;
  report.degenerate_entropy = degenerate;
  report.theorem_kl_bound = epsilon;
  report.theorem_iter_bound = 2.0 * std::sqrt(H * L / epsilon) + 1.0;
  add_check(report, "kl<=epsilon", report.kl.value, report.kl.std_error, report.theorem_kl_bound);
  add_check(report, "e_iters<=2*sqrt(H*L/epsilon)+1", report.iterations.value, report.iterations.std_error,
            report.theorem_iter_bound);
  add_check(report, "e_iters<=2L/s_max+1", report.iterations.value, report.iterations.std_error,
            2.0 * L / params.s_max + 1.0);
  return report;
}

void require_pass(const EvalReport& report) {
  if (report.pass()) return;
  std::ostringstream os;
  os << report.label << " (" << report.strategy.name() << ", L=" << report.length << "):";
  for (const auto& c : report.checks) {
    if (!c.pass) os << " " << c.name << " value=" << c.value << " bound=" << c.bound << ";";
  }
  throw Error(ErrorCode::BoundViolated, os.str());
}

EvalReport check_theorem1(const Oracle& oracle, double epsilon, const EvalOptions& options) {
  EvalReport report = certify_theorem1(oracle, epsilon, options);
  require_pass(report);
  return report;
}

EvalReport check_theorem2(const Oracle& oracle, double epsilon, const EvalOptions& options) {
  EvalReport report = certify_theorem2(oracle, epsilon, options);
  require_pass(report);
  return report;
}

}  // namespace mdd
