#pragma once

#include <span>
#include <string>
#include <vector>

#include "mdd/dist.hpp"
#include "mdd/oracle.hpp"
#include "mdd/rng.hpp"

namespace mdd {

enum class StrategyKind { AR, UniformSchedule, EntropySum, MaxEntropy };

/// Decoding strategy and its parameters. `eta` is in nats and applies to the
/// entropy-based kinds; `s_max` to MaxEntropy; `schedule` to UniformSchedule.
struct StrategySpec {
  StrategyKind kind = StrategyKind::AR;
  double eta = 0.0;
  int s_max = 1;
  std::vector<int> schedule;

  static StrategySpec ar() { return {}; }
  static StrategySpec entropy_sum(double eta) { return {StrategyKind::EntropySum, eta, 1, {}}; }
  static StrategySpec max_entropy(double eta, int s_max) { return {StrategyKind::MaxEntropy, eta, s_max, {}}; }
  static StrategySpec uniform(std::vector<int> schedule) {
    return {StrategyKind::UniformSchedule, 0.0, 1, std::move(schedule)};
  }
  /// All L tokens in a single iteration.
  static StrategySpec one_shot(int length) { return uniform({length}); }
  /// T iterations with sizes ceil(L/T) and floor(L/T) interleaved.
  static StrategySpec balanced(int length, int iterations);

  /// Throws InvalidArgument naming the offending field.
  void validate(int length) const;
  std::string name() const;

  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

/// Unmasking order: order()[k] is the position revealed (k+1)-th.
class Permutation {
 public:
  explicit Permutation(std::vector<int> order);
  static Permutation identity(int length);

  int size() const noexcept { return static_cast<int>(order_.size()); }
  int operator[](int k) const { return order_[static_cast<std::size_t>(k)]; }
  std::span<const int> order() const noexcept { return order_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> order_;
};

/// One iteration's newly unmasked positions in scan order, with the pointwise
/// entropy of each conditional marginal under the pre-iteration context and
/// the predictive probability of the token that was emitted.
struct Batch {
  std::vector<int> positions;
  std::vector<double> entropies;
  std::vector<double> token_probs;
  double entropy_sum = 0.0;

  int size() const noexcept { return static_cast<int>(positions.size()); }
  friend bool operator==(const Batch&, const Batch&) = default;
};

struct Trajectory {
  std::vector<Batch> batches;
  std::vector<int> envelopes;
  int crossings = 0;

  int iterations() const noexcept { return static_cast<int>(batches.size()); }
  std::vector<int> batch_sizes() const;
  /// W_0 = {} through W_T, each ascending.
  std::vector<std::vector<int>> cumulative_sets() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct SizeEnvelopes {
  std::vector<int> envelopes;
  int crossings = 0;
};

/// Dyadic envelopes: first is 0; carried while the previous batch stays below
/// it, otherwise twice the previous batch size. Crossings count t with
/// size_t >= envelope_t.
SizeEnvelopes size_envelopes(std::span<const int> batch_sizes);

/// What the predictor returns for a context of probability zero. Exact
/// evaluation on the data support never needs it; the sampler can reach such
/// contexts because tokens within a batch are drawn independently.
enum class OffSupport { Throw, Uniform };

struct DecodeResult {
  TokenSequence tokens;
  Trajectory trajectory;
};

DecodeResult sample_trajectory(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm, Rng& rng);

/// The trajectory the sampler records when it emits exactly `x` along `perm`.
Trajectory replay_trajectory(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                             std::span<const TokenId> x, OffSupport policy = OffSupport::Throw);

/// Fisher-Yates over [0, L).
Permutation uniform_random_permutation(int length, Rng& rng);

/// Lexicographic rank -> permutation of [0, L).
Permutation permutation_from_rank(int length, std::uint64_t rank);

/// L!, or throws CapExceeded above `cap`.
std::uint64_t permutation_count(int length, std::uint64_t cap);

/// Draws an outcome index from a probability row (never a zero-mass outcome).
TokenId draw_categorical(std::span<const double> probs, Rng& rng);

/// Mutation hooks for the verification suites. Not for production use.
enum class Fault { None, NonStrictThreshold, UnfrozenContext };
void set_fault_for_testing(Fault fault);
Fault active_fault();

}  // namespace mdd
