#include "mdd/decode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "mdd/error.hpp"
#include "mdd/info.hpp"

namespace mdd {

namespace {

std::atomic<Fault> g_fault{Fault::None};

/// Shared engine for sampling and replay so both apply identical stopping
/// rules. `emit(pos, row)` supplies the token revealed at `pos`.
template <typename Emit>
Trajectory decode(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm, OffSupport policy,
                  Emit&& emit) {
  const int L = oracle.length();
  const int V = oracle.vocab();
  strategy.validate(L);
  if (perm.size() != L) throw Error(ErrorCode::DimensionMismatch, "permutation length does not match L");

  const Fault fault = active_fault();
  const bool strict = fault != Fault::NonStrictThreshold;
  const bool frozen = fault != Fault::UnfrozenContext;
  const auto exceeds = [&](double value) { return strict ? value > strategy.eta : value >= strategy.eta; };
  const std::vector<double> uniform_row(static_cast<std::size_t>(V), 1.0 / V);

  PartialAssignment revealed(L);  // Y_{t-1}
  PartialAssignment live(L);      // only read under the unfrozen-context fault
  std::shared_ptr<const MarginalTable> table;
  const auto predictive_row = [&](int pos, const PartialAssignment& context) -> std::span<const double> {
    table = oracle.marginal_table(context);
    if (table->mass > 0.0) return table->row(pos);
    if (policy == OffSupport::Throw) throw Error(ErrorCode::ZeroContext, "context has probability zero");
    return uniform_row;
  };

  Trajectory traj;
  int k = 0;
  while (k < L) {
    const int t = traj.iterations();
    Batch batch;
    std::vector<std::pair<int, TokenId>> pending;
    double sum = 0.0;
    while (true) {
      const int pos = perm[k++];
      const auto row = predictive_row(pos, frozen ? revealed : live);
      const double h = entropy(row);
      const TokenId tok = emit(pos, row);
      batch.positions.push_back(pos);
      batch.entropies.push_back(h);
      batch.token_probs.push_back(row[static_cast<std::size_t>(tok)]);
      sum += h;
      pending.emplace_back(pos, tok);
      if (!frozen) live.set(pos, tok);

      bool stop = k == L;
      switch (strategy.kind) {
        case StrategyKind::AR:
          stop = true;
          break;
        case StrategyKind::UniformSchedule:
          stop = stop || batch.size() == strategy.schedule[static_cast<std::size_t>(t)];
          break;
        case StrategyKind::EntropySum:
          stop = stop || exceeds(sum);
          break;
        case StrategyKind::MaxEntropy:
          stop = stop || exceeds(h) || batch.size() == strategy.s_max;
          break;
      }
      if (stop) break;
    }
    batch.entropy_sum = sum;
    for (auto [pos, tok] : pending) {
      revealed.set(pos, tok);
      live.set(pos, tok);
    }
    traj.batches.push_back(std::move(batch));
  }
  auto env = size_envelopes(traj.batch_sizes());
  traj.envelopes = std::move(env.envelopes);
  traj.crossings = env.crossings;
  return traj;
}

}  // namespace

StrategySpec StrategySpec::balanced(int length, int iterations) {
  if (iterations < 1 || iterations > length) {
    throw Error(ErrorCode::InvalidArgument, "balanced schedule needs 1 <= T <= L");
  }
  // Bresenham-style spread of the L mod T larger steps across the schedule.
  std::vector<int> sizes;
  int emitted = 0;
  for (int t = 1; t <= iterations; ++t) {
    const int target = static_cast<int>((static_cast<long long>(length) * t + iterations - 1) / iterations);
    sizes.push_back(target - emitted);
    emitted = target;
  }
  return uniform(std::move(sizes));
}

void StrategySpec::validate(int length) const {
  switch (kind) {
    case StrategyKind::AR:
      return;
    case StrategyKind::UniformSchedule: {
      if (schedule.empty()) throw Error(ErrorCode::InvalidArgument, "schedule: must not be empty");
      long long total = 0;
      for (int s : schedule) {
        if (s < 1) throw Error(ErrorCode::InvalidArgument, "schedule: step sizes must be positive");
        total += s;
      }
      if (total != length) {
        throw Error(ErrorCode::InvalidArgument,
                    "schedule: steps sum to " + std::to_string(total) + " but L = " + std::to_string(length));
      }
      return;
    }
    case StrategyKind::MaxEntropy:
      if (s_max < 1) throw Error(ErrorCode::InvalidArgument, "s_max: must be at least 1");
      [[fallthrough]];
    case StrategyKind::EntropySum:
      if (!(eta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eta: must be >= 0");
      return;
  }
}

std::string StrategySpec::name() const {
  switch (kind) {
    case StrategyKind::AR: return "ar";
    case StrategyKind::UniformSchedule: return "uniform";
    case StrategyKind::EntropySum: return "entropy_sum";
    case StrategyKind::MaxEntropy: return "max_entropy";
  }
  return "unknown";
}

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  std::vector<char> seen(order_.size(), 0);
  for (int pos : order_) {
    if (pos < 0 || pos >= size() || seen[static_cast<std::size_t>(pos)]) {
      throw Error(ErrorCode::InvalidArgument, "order is not a permutation of [0, L)");
    }
    seen[static_cast<std::size_t>(pos)] = 1;
  }
}

Permutation Permutation::identity(int length) {
  std::vector<int> order(static_cast<std::size_t>(length));
  std::iota(order.begin(), order.end(), 0);
  return Permutation(std::move(order));
}

std::vector<int> Trajectory::batch_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(batches.size());
  for (const auto& b : batches) sizes.push_back(b.size());
  return sizes;
}

std::vector<std::vector<int>> Trajectory::cumulative_sets() const {
  std::vector<std::vector<int>> sets{{}};
  for (const auto& b : batches) {
    auto next = sets.back();
    next.insert(next.end(), b.positions.begin(), b.positions.end());
    std::sort(next.begin(), next.end());
    sets.push_back(std::move(next));
  }
  return sets;
}

SizeEnvelopes size_envelopes(std::span<const int> batch_sizes) {
  SizeEnvelopes out;
  int envelope = 0;
  for (std::size_t t = 0; t < batch_sizes.size(); ++t) {
    if (t > 0) {
      const int prev = batch_sizes[t - 1];
      if (prev >= envelope) envelope = 2 * prev;
    }
    out.envelopes.push_back(envelope);
    if (batch_sizes[t] >= envelope) ++out.crossings;
  }
  return out;
}

DecodeResult sample_trajectory(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm, Rng& rng) {
  DecodeResult result;
  result.tokens.assign(static_cast<std::size_t>(oracle.length()), 0);
  result.trajectory = decode(oracle, strategy, perm, OffSupport::Uniform, [&](int pos, std::span<const double> row) {
    const TokenId tok = draw_categorical(row, rng);
    result.tokens[static_cast<std::size_t>(pos)] = tok;
    return tok;
  });
  return result;
}

Trajectory replay_trajectory(const Oracle& oracle, const StrategySpec& strategy, const Permutation& perm,
                             std::span<const TokenId> x, OffSupport policy) {
  if (static_cast<int>(x.size()) != oracle.length()) {
    throw Error(ErrorCode::DimensionMismatch, "sequence length does not match L");
  }
  for (TokenId tok : x) {
    if (tok < 0 || tok >= oracle.vocab()) throw Error(ErrorCode::InvalidArgument, "token id out of range");
  }
  return decode(oracle, strategy, perm, policy,
                [&](int pos, std::span<const double>) { return x[static_cast<std::size_t>(pos)]; });
}

Permutation uniform_random_permutation(int length, Rng& rng) {
  if (length < 1) throw Error(ErrorCode::InvalidArgument, "L must be positive");
  std::vector<int> order(static_cast<std::size_t>(length));
  std::iota(order.begin(), order.end(), 0);
  for (int i = length - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  return Permutation(std::move(order));
}

std::uint64_t permutation_count(int length, std::uint64_t cap) {
  std::uint64_t n = 1;
  for (int i = 2; i <= length; ++i) {
    n *= static_cast<std::uint64_t>(i);
    if (n > cap) {
      throw Error(ErrorCode::CapExceeded, "L! exceeds the permutation cap of " + std::to_string(cap));
    }
  }
  return n;
}

Permutation permutation_from_rank(int length, std::uint64_t rank) {
  std::vector<int> pool(static_cast<std::size_t>(length));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::uint64_t> factorial(static_cast<std::size_t>(length) + 1, 1);
  for (int i = 1; i <= length; ++i) factorial[static_cast<std::size_t>(i)] = factorial[static_cast<std::size_t>(i - 1)] * static_cast<std::uint64_t>(i);
  if (rank >= factorial[static_cast<std::size_t>(length)]) throw Error(ErrorCode::InvalidArgument, "rank out of range");
  std::vector<int> order;
  for (int i = length; i >= 1; --i) {
    const auto f = factorial[static_cast<std::size_t>(i - 1)];
    const auto digit = static_cast<std::size_t>(rank / f);
    rank %= f;
    order.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return Permutation(std::move(order));
}

TokenId draw_categorical(std::span<const double> probs, Rng& rng) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = k;
    acc += probs[k];
    if (u < acc) return static_cast<TokenId>(k);
  }
  return static_cast<TokenId>(last_positive);
}

void set_fault_for_testing(Fault fault) { g_fault.store(fault); }

Fault active_fault() { return g_fault.load(); }

}  // namespace mdd
