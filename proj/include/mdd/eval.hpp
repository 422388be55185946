#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdd/decode.hpp"
#include "mdd/info.hpp"
#include "mdd/oracle.hpp"

namespace mdd {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for exact values
};

/// Per-permutation quantities computed exactly by enumerating sequences.
struct PermutationEvaluation {
  Nats kl_density = 0.0;        // sum_x p(x) [log p(x) - log p_Y(x)]
  Nats kl_decomposition = 0.0;  // sum_x p(x) sum_t KL(joint batch || product of marginals)
  double expected_iterations = 0.0;       // weighted by the sampled law
  double data_weighted_iterations = 0.0;  // weighted by p_data
  double sampled_mass = 0.0;              // sum_x p_Y(x); 1 up to round-off
  Nats batch_joint_entropy = 0.0;         // E_data sum_t H(X^{D_t} | ...)
  Nats batch_marginal_entropy = 0.0;      // E_data sum_t sum_i H(X^i | ...)
};

PermutationEvaluation evaluate_permutation(const Oracle& oracle, const StrategySpec& strategy,
                                           const Permutation& perm);

/// log p_{Y_T | perm}(x) from the per-batch product of conditional marginals.
double sampled_logprob(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                       std::span<const TokenId> x);

Nats exact_kl_given_perm(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm);

/// Same quantity by summing the per-iteration joint-vs-product divergences.
Nats decomposition_kl_given_perm(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm);

/// Per-iteration decomposition summed along the replayed trajectory of one x.
Nats decomposition_kl_along(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                            std::span<const TokenId> x);

/// Monte Carlo mean of decomposition_kl_along over samples x ~ p_data.
Estimate kl_decomposition_estimator(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                                    std::span<const TokenSequence> samples);

/// Draws one sequence from the data distribution.
TokenSequence draw_sequence(const ExplicitJoint& dist, Rng& rng);

struct PermMode {
  enum class Kind { Enumerate, Sample };
  Kind kind = Kind::Enumerate;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  static PermMode enumerate() { return {}; }
  static PermMode sample(std::size_t n, std::uint64_t seed) { return {Kind::Sample, n, seed}; }
};

/// Averages evaluate_permutation over all L! permutations (Enumerate) or n
/// uniform ones (Sample). Reduction order is fixed by permutation index.
struct PermutationAverage {
  Estimate kl;
  Estimate kl_decomposition;
  Estimate iterations;
  Estimate data_weighted_iterations;
  std::size_t perms = 0;
};

PermutationAverage average_over_permutations(const Oracle& oracle, const StrategySpec& strategy, const PermMode& mode,
                                             std::uint64_t perm_cap = 5040, unsigned threads = 1);

Estimate exact_kl_expected(const Oracle& oracle, const StrategySpec& strategy, const PermMode& mode,
                           std::uint64_t perm_cap = 5040, unsigned threads = 1);

Estimate expected_iterations(const Oracle& oracle, const StrategySpec& strategy, const PermMode& mode,
                             std::uint64_t perm_cap = 5040, unsigned threads = 1);

struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return lhs > rhs ? lhs - rhs : rhs - lhs; }
};

/// H(X_0) against the expected sum of batch joint entropies.
IdentityResidual verify_entropy_identity(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm);

/// H(X_0) against the expected sum of recorded per-token entropies minus KL.
IdentityResidual verify_marginal_entropy_identity(const Oracle& oracle, const StrategySpec& strategy,
                                                  const Permutation& perm);

enum class EvalMode { Exact, MonteCarlo };

struct EvalOptions {
  EvalMode mode = EvalMode::Exact;
  std::size_t n_perms = 1000;     // exact mode when L! exceeds the cap
  std::size_t n_samples = 10000;  // Monte Carlo mode
  std::uint64_t seed = 0;
  Caps caps;
  unsigned threads = 1;
};

struct BoundCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct EvalReport {
  std::string label;  // "strategy", "theorem1" or "theorem2"
  StrategySpec strategy;
  int length = 0;
  int vocab = 0;
  Nats data_entropy = 0.0;
  std::optional<double> epsilon;
  Estimate kl;
  Estimate iterations;
  double theorem_kl_bound = 0.0;   // NaN when not applicable
  double theorem_iter_bound = 0.0;
  double internal_kl_bound = 0.0;  // 4 eta (log2 L + 1) or S_max eta
  double iter_bound = 0.0;         // strategy-level iteration bound
  bool degenerate_entropy = false;
  std::vector<BoundCheck> checks;
  EvalMode mode = EvalMode::Exact;
  std::size_t perms_evaluated = 0;
  std::size_t samples_drawn = 0;
  std::uint64_t seed = 0;

  bool pass() const;
};

/// Measures KL and E[T] for one strategy and checks every bound that applies
/// to it at its own parameters.
EvalReport evaluate_strategy(const Oracle& oracle, const StrategySpec& strategy, const EvalOptions& options);

double theorem1_eta(int length, double epsilon);

struct Theorem2Parameters {
  double eta = 0.0;
  int s_max = 1;
};
/// Throws DegenerateEntropy when H(X_0) = 0.
Theorem2Parameters theorem2_parameters(int length, Nats data_entropy, double epsilon);

/// Entropy-sum decoding at the threshold rule for `epsilon`, with the KL,
/// internal-envelope and iteration bounds checked. Never throws on failure;
/// see check_theorem1.
EvalReport certify_theorem1(const Oracle& oracle, double epsilon, const EvalOptions& options);
EvalReport certify_theorem2(const Oracle& oracle, double epsilon, const EvalOptions& options);

/// As certify_*, but throws BoundViolated listing the failing checks.
EvalReport check_theorem1(const Oracle& oracle, double epsilon, const EvalOptions& options = {});
EvalReport check_theorem2(const Oracle& oracle, double epsilon, const EvalOptions& options = {});

void require_pass(const EvalReport& report);

}  // namespace mdd
