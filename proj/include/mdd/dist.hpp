#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mdd {

using TokenId = std::int32_t;

/// A full assignment of one token id per position.
using TokenSequence = std::vector<TokenId>;

/// Probability vector over K outcomes. Joint outcomes over several target
/// positions use mixed-radix indexing with the lowest position as the most
/// significant digit.
struct CategoricalDist {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t k) const { return probs[k]; }
  double total() const noexcept;
};

/// Default enumeration caps; overridable from the CLI.
struct Caps {
  std::size_t max_sequences = 1'000'000;
  std::size_t max_permutations = 5040;
};

/// Tokens revealed at a subset of positions. Stored densely (one slot per
/// position) so equality and hashing are canonical in position order.
class PartialAssignment {
 public:
  static constexpr TokenId kMasked = -1;

  PartialAssignment() = default;
  explicit PartialAssignment(int length) : values_(static_cast<std::size_t>(length), kMasked) {}

  /// Reveals `positions` with the tokens `x` holds there.
  static PartialAssignment from_sequence(std::span<const TokenId> x, std::span<const int> positions);

  int length() const noexcept { return static_cast<int>(values_.size()); }
  int count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  bool contains(int pos) const { return values_.at(static_cast<std::size_t>(pos)) != kMasked; }
  TokenId at(int pos) const { return values_.at(static_cast<std::size_t>(pos)); }
  void set(int pos, TokenId token);
  void erase(int pos);

  std::vector<int> positions() const;
  std::span<const TokenId> values() const noexcept { return values_; }

  friend bool operator==(const PartialAssignment&, const PartialAssignment&) = default;

 private:
  std::vector<TokenId> values_;
  int count_ = 0;
};

/// Exact probability table over all V^L sequences, indexed mixed-radix with
/// position 0 as the most significant digit. Immutable after construction.
class ExplicitJoint {
 public:
  int length() const noexcept { return length_; }
  int vocab() const noexcept { return vocab_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }

  /// V^(L-1-pos): index weight of position `pos`.
  std::size_t stride(int pos) const { return strides_.at(static_cast<std::size_t>(pos)); }

  std::size_t index_of(std::span<const TokenId> x) const;
  TokenSequence sequence_at(std::size_t index) const;
  double prob(std::span<const TokenId> x) const { return probs_[index_of(x)]; }

  /// H(X_0) in nats.
  double entropy() const;

  friend ExplicitJoint build_explicit(int length, int vocab, std::vector<double> weights, const Caps& caps);

 private:
  ExplicitJoint(int length, int vocab, std::vector<double> probs);

  int length_ = 0;
  int vocab_ = 0;
  std::vector<double> probs_;
  std::vector<std::size_t> strides_;
};

/// V^L, or throws CapExceeded when it exceeds `cap` (overflow-safe).
std::size_t table_size(int length, int vocab, std::size_t cap);

ExplicitJoint build_explicit(int length, int vocab, std::vector<double> weights, const Caps& caps = {});

ExplicitJoint make_product(std::span<const CategoricalDist> marginals, const Caps& caps = {});

/// `transition` is V x V row-major, rows summing to 1.
ExplicitJoint make_markov_chain(const CategoricalDist& init, std::span<const double> transition, int length,
                                const Caps& caps = {});

/// Binary tokens flipped independently away from `templ` with probability `flip_prob`.
ExplicitJoint make_near_deterministic(std::span<const TokenId> templ, double flip_prob, const Caps& caps = {});

ExplicitJoint make_random_dirichlet(int length, int vocab, double concentration, std::uint64_t seed,
                                    const Caps& caps = {});

/// Binary entropy in nats.
double binary_entropy(double p);

}  // namespace mdd
