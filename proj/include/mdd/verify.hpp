#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdd/decode.hpp"
#include "mdd/suite.hpp"

namespace mdd {

enum class PropertyCategory { Identity, Structural, Theorem };

/// Outcome of one property group. `worst` is the largest residual for
/// identities and the smallest slack (bound - value) for inequalities.
struct PropertyResult {
  std::string name;
  PropertyCategory category = PropertyCategory::Identity;
  bool passed = true;
  std::size_t cases = 0;
  std::size_t violations = 0;
  std::string metric = "residual";
  double worst = 0.0;
  std::string first_failure;
  double seconds = 0.0;
};

struct VerifyConfig {
  std::uint64_t seed = 20251019;
  int lemma1_joints = 100;
  int lemma5_joints = 50;
  int identity_triples = 20;
  int trajectory_samples = 10000;
  int ar_perms = 10;
  std::vector<int> trajectory_lengths{4, 8, 16};
  std::vector<double> epsilons{0.05, 0.2};
  unsigned threads = 1;
};

/// One (distribution, strategy, permutation) case for the exact identities.
struct IdentityTriple {
  NamedDist dist;
  StrategySpec strategy;
  Permutation perm;
};

std::vector<IdentityTriple> identity_triples(std::uint64_t seed, int count);

PropertyResult check_lemma1_tail_identity(const VerifyConfig& cfg);
PropertyResult check_lemma1_leave_one_out_bound(const VerifyConfig& cfg);
PropertyResult check_pointwise_mi_chain_rule(const VerifyConfig& cfg);
PropertyResult check_mi_entropy_cap(const VerifyConfig& cfg);
PropertyResult check_kl_nonnegative(const VerifyConfig& cfg);
PropertyResult check_oracle_chain_rule(const VerifyConfig& cfg);
PropertyResult check_joint_entropy_identity(const VerifyConfig& cfg);
PropertyResult check_marginal_entropy_identity(const VerifyConfig& cfg);
PropertyResult check_two_route_kl(const VerifyConfig& cfg);
PropertyResult check_ar_zero_error(const VerifyConfig& cfg);
PropertyResult check_one_shot_identity(const VerifyConfig& cfg);

struct TrajectoryBattery {
  PropertyResult envelope_bound;
  PropertyResult batch_semantics;
  PropertyResult partition;
  PropertyResult replay_coherence;
  std::size_t trajectories = 0;
};

/// Samples cfg.trajectory_samples trajectories across strategies and
/// distributions at each configured length and checks every one.
TrajectoryBattery run_trajectory_battery(const VerifyConfig& cfg);

PropertyResult check_theorem1_grid(const VerifyConfig& cfg);
PropertyResult check_theorem2_grid(const VerifyConfig& cfg);
PropertyResult check_strategy_bounds(const VerifyConfig& cfg);

enum class Suite { Lemmas, Theorems, All };

std::vector<PropertyResult> run_suite(Suite suite, const VerifyConfig& cfg);

}  // namespace mdd
