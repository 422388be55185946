#include "mdd/dist.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mdd/error.hpp"
#include "mdd/rng.hpp"

namespace mdd {

namespace {

constexpr double kSumTolerance = 1e-12;

void require_distribution(const CategoricalDist& d, std::size_t outcomes, const char* what) {
  if (d.size() != outcomes) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " has " + std::to_string(d.size()) + " outcomes, expected " +
                    std::to_string(outcomes));
  }
  for (double p : d.probs) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has a negative entry");
  }
  if (std::abs(d.total() - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotStochastic, std::string(what) + " does not sum to 1");
  }
}

}  // namespace

double CategoricalDist::total() const noexcept { return std::accumulate(probs.begin(), probs.end(), 0.0); }

PartialAssignment PartialAssignment::from_sequence(std::span<const TokenId> x, std::span<const int> positions) {
  PartialAssignment a(static_cast<int>(x.size()));
  for (int pos : positions) a.set(pos, x[static_cast<std::size_t>(pos)]);
  return a;
}

void PartialAssignment::set(int pos, TokenId token) {
  if (token < 0) throw Error(ErrorCode::InvalidArgument, "negative token id");
  auto& slot = values_.at(static_cast<std::size_t>(pos));
  if (slot == kMasked) ++count_;
  slot = token;
}

void PartialAssignment::erase(int pos) {
  auto& slot = values_.at(static_cast<std::size_t>(pos));
  if (slot != kMasked) --count_;
  slot = kMasked;
}

std::vector<int> PartialAssignment::positions() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (int i = 0; i < length(); ++i) {
    if (values_[static_cast<std::size_t>(i)] != kMasked) out.push_back(i);
  }
  return out;
}

std::size_t table_size(int length, int vocab, std::size_t cap) {
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "sequence length must be positive");
  if (vocab < 2) throw Error(ErrorCode::InvalidArgument, "vocabulary size must be at least 2");
  std::size_t n = 1;
  for (int i = 0; i < length; ++i) {
    if (n > cap / static_cast<std::size_t>(vocab)) {
      throw Error(ErrorCode::CapExceeded, "V^L exceeds the enumeration cap of " + std::to_string(cap));
    }
    n *= static_cast<std::size_t>(vocab);
  }
  return n;
}

ExplicitJoint::ExplicitJoint(int length, int vocab, std::vector<double> probs)
    : length_(length), vocab_(vocab), probs_(std::move(probs)), strides_(static_cast<std::size_t>(length)) {
  std::size_t s = 1;
  for (int pos = length - 1; pos >= 0; --pos) {
    strides_[static_cast<std::size_t>(pos)] = s;
    s *= static_cast<std::size_t>(vocab);
  }
}

std::size_t ExplicitJoint::index_of(std::span<const TokenId> x) const {
  if (static_cast<int>(x.size()) != length_) {
    throw Error(ErrorCode::DimensionMismatch, "sequence length does not match the distribution");
  }
  std::size_t index = 0;
  for (int pos = 0; pos < length_; ++pos) {
    const TokenId tok = x[static_cast<std::size_t>(pos)];
    if (tok < 0 || tok >= vocab_) throw Error(ErrorCode::InvalidArgument, "token id out of range");
    index += static_cast<std::size_t>(tok) * strides_[static_cast<std::size_t>(pos)];
  }
  return index;
}

TokenSequence ExplicitJoint::sequence_at(std::size_t index) const {
  TokenSequence x(static_cast<std::size_t>(length_));
  for (int pos = length_ - 1; pos >= 0; --pos) {
    x[static_cast<std::size_t>(pos)] = static_cast<TokenId>(index % static_cast<std::size_t>(vocab_));
    index /= static_cast<std::size_t>(vocab_);
  }
  return x;
}

double ExplicitJoint::entropy() const {
  double h = 0.0;
  for (double p : probs_) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

ExplicitJoint build_explicit(int length, int vocab, std::vector<double> weights, const Caps& caps) {
  const std::size_t n = table_size(length, vocab, caps.max_sequences);
  if (weights.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(n) + " weights, got " + std::to_string(weights.size()));
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::ZeroMass, "all weights are zero");
  for (double& w : weights) w /= total;
  // Renormalizing by the summed quotients keeps |sum - 1| at round-off level.
  const double check = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(check - 1.0) > kSumTolerance) {
    for (double& w : weights) w /= check;
  }
  return ExplicitJoint(length, vocab, std::move(weights));
}

ExplicitJoint make_product(std::span<const CategoricalDist> marginals, const Caps& caps) {
  if (marginals.empty()) throw Error(ErrorCode::DimensionMismatch, "need at least one marginal");
  const auto vocab = marginals.front().size();
  for (const auto& m : marginals) require_distribution(m, vocab, "marginal");
  const int length = static_cast<int>(marginals.size());
  const std::size_t n = table_size(length, static_cast<int>(vocab), caps.max_sequences);

  std::vector<double> w(n, 1.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int pos = length - 1; pos >= 0; --pos) {
      w[idx] *= marginals[static_cast<std::size_t>(pos)][rest % vocab];
      rest /= vocab;
    }
  }
  return build_explicit(length, static_cast<int>(vocab), std::move(w), caps);
}

ExplicitJoint make_markov_chain(const CategoricalDist& init, std::span<const double> transition, int length,
                                const Caps& caps) {
  const std::size_t vocab = init.size();
  require_distribution(init, vocab, "initial distribution");
  if (transition.size() != vocab * vocab) {
    throw Error(ErrorCode::DimensionMismatch, "transition must be V x V");
  }
  for (std::size_t a = 0; a < vocab; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < vocab; ++b) {
      const double t = transition[a * vocab + b];
      if (!(t >= 0.0)) throw Error(ErrorCode::NotStochastic, "transition has a negative entry");
      row += t;
    }
    if (std::abs(row - 1.0) > 1e-9) {
      throw Error(ErrorCode::NotStochastic, "transition row " + std::to_string(a) + " does not sum to 1");
    }
  }
  const std::size_t n = table_size(length, static_cast<int>(vocab), caps.max_sequences);
  std::vector<double> w(n);
  std::vector<std::size_t> digits(static_cast<std::size_t>(length));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int pos = length - 1; pos >= 0; --pos) {
      digits[static_cast<std::size_t>(pos)] = rest % vocab;
      rest /= vocab;
    }
    double p = init[digits[0]];
    for (std::size_t pos = 1; pos < digits.size(); ++pos) p *= transition[digits[pos - 1] * vocab + digits[pos]];
    w[idx] = p;
  }
  return build_explicit(length, static_cast<int>(vocab), std::move(w), caps);
}

ExplicitJoint make_near_deterministic(std::span<const TokenId> templ, double flip_prob, const Caps& caps) {
  if (!(flip_prob >= 0.0 && flip_prob < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "flip_prob must lie in [0, 0.5)");
  }
  std::vector<CategoricalDist> marginals;
  marginals.reserve(templ.size());
  for (TokenId t : templ) {
    if (t != 0 && t != 1) throw Error(ErrorCode::InvalidArgument, "template must be binary");
    CategoricalDist m{{flip_prob, flip_prob}};
    m.probs[static_cast<std::size_t>(t)] = 1.0 - flip_prob;
    marginals.push_back(std::move(m));
  }
  return make_product(marginals, caps);
}

ExplicitJoint make_random_dirichlet(int length, int vocab, double concentration, std::uint64_t seed,
                                    const Caps& caps) {
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw Error(ErrorCode::InvalidArgument, "concentration must be positive and finite");
  }
  const std::size_t n = table_size(length, vocab, caps.max_sequences);
  Rng rng = make_stream(seed);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  // Small concentrations can underflow every draw; redraw in that case.
  do {
    total = 0.0;
    for (double& x : w) {
      x = gamma(rng);
      total += x;
    }
  } while (total <= 0.0);
  return build_explicit(length, vocab, std::move(w), caps);
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
  return h;
}

}  // namespace mdd
