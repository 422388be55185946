#include "mdd/oracle.hpp"

#include <algorithm>
#include <cstring>

#include "mdd/error.hpp"

namespace mdd {

namespace {

std::string context_key(const PartialAssignment& context) {
  const auto values = context.values();
  std::string key(values.size() * sizeof(TokenId), '\0');
  std::memcpy(key.data(), values.data(), key.size());
  return key;
}

/// Calls visit(index, free_digits) for every table entry consistent with
/// `context`, odometer-style over the masked positions.
template <typename Visit>
void for_each_completion(const ExplicitJoint& dist, const PartialAssignment& context, std::span<const int> free,
                         Visit&& visit) {
  std::size_t index = 0;
  for (int pos = 0; pos < dist.length(); ++pos) {
    if (context.contains(pos)) index += static_cast<std::size_t>(context.at(pos)) * dist.stride(pos);
  }
  const auto vocab = static_cast<std::size_t>(dist.vocab());
  std::vector<TokenId> digits(free.size(), 0);
  while (true) {
    visit(index, std::span<const TokenId>(digits));
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(free.size()) - 1;
    for (; j >= 0; --j) {
      const std::size_t stride = dist.stride(free[static_cast<std::size_t>(j)]);
      auto& d = digits[static_cast<std::size_t>(j)];
      ++d;
      index += stride;
      if (static_cast<std::size_t>(d) < vocab) break;
      index -= vocab * stride;
      d = 0;
    }
    if (j < 0) break;
  }
}

}  // namespace

Oracle::Oracle(ExplicitJoint dist, std::size_t cache_entries)
    : dist_(std::make_shared<const ExplicitJoint>(std::move(dist))),
      marginals_(cache_entries),
      joints_(cache_entries) {}

void Oracle::check_context(const PartialAssignment& context) const {
  if (context.length() != length()) {
    throw Error(ErrorCode::DimensionMismatch, "context length does not match the distribution");
  }
  for (TokenId t : context.values()) {
    if (t >= vocab()) throw Error(ErrorCode::InvalidArgument, "context token out of range");
  }
}

double Oracle::context_mass(const PartialAssignment& context) const { return marginal_table(context)->mass; }

std::shared_ptr<const MarginalTable> Oracle::marginal_table(const PartialAssignment& context) const {
  check_context(context);
  std::string key = context_key(context);
  if (auto hit = marginals_.find(key)) return hit;

  const int L = length();
  const int V = vocab();
  std::vector<int> free;
  for (int pos = 0; pos < L; ++pos) {
    if (!context.contains(pos)) free.push_back(pos);
  }
  auto table = std::make_shared<MarginalTable>();
  table->vocab = V;
  std::vector<double> acc(static_cast<std::size_t>(L * V), 0.0);
  const auto probs = dist_->probs();
  double mass = 0.0;
  for_each_completion(*dist_, context, free, [&](std::size_t index, std::span<const TokenId> digits) {
    const double p = probs[index];
    if (p == 0.0) return;
    mass += p;
    for (std::size_t j = 0; j < free.size(); ++j) {
      acc[static_cast<std::size_t>(free[j] * V + digits[j])] += p;
    }
  });
  table->mass = mass;
  if (mass > 0.0) {
    for (int pos = 0; pos < L; ++pos) {
      if (context.contains(pos)) acc[static_cast<std::size_t>(pos * V + context.at(pos))] = mass;
    }
    for (double& a : acc) a /= mass;
    table->probs = std::move(acc);
  }
  return marginals_.insert(std::move(key), std::move(table));
}

CategoricalDist Oracle::conditional_marginal(int pos, const PartialAssignment& context) const {
  if (pos < 0 || pos >= length()) throw Error(ErrorCode::InvalidArgument, "position out of range");
  if (context.contains(pos)) throw Error(ErrorCode::InvalidArgument, "target position is already unmasked");
  const auto table = marginal_table(context);
  if (table->mass <= 0.0) throw Error(ErrorCode::ZeroContext, "context has probability zero");
  const auto row = table->row(pos);
  return CategoricalDist{{row.begin(), row.end()}};
}

CategoricalDist Oracle::conditional_joint(std::span<const int> targets, const PartialAssignment& context) const {
  check_context(context);
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "target set is empty");
  const int L = length();
  std::uint64_t target_mask = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const int pos = targets[k];
    if (pos < 0 || pos >= L) throw Error(ErrorCode::InvalidArgument, "target position out of range");
    if (k > 0 && targets[k - 1] >= pos) throw Error(ErrorCode::InvalidArgument, "targets must be ascending");
    if (context.contains(pos)) throw Error(ErrorCode::InvalidArgument, "target overlaps the context");
    target_mask |= std::uint64_t{1} << pos;
  }

  std::string key = context_key(context);
  key.append(reinterpret_cast<const char*>(&target_mask), sizeof(target_mask));
  if (auto hit = joints_.find(key)) return *hit;

  std::vector<int> free;
  for (int pos = 0; pos < L; ++pos) {
    if (!context.contains(pos)) free.push_back(pos);
  }
  // Location of each target inside the free-digit vector.
  std::vector<std::size_t> slot;
  for (int t : targets) slot.push_back(static_cast<std::size_t>(std::find(free.begin(), free.end(), t) - free.begin()));

  const auto V = static_cast<std::size_t>(vocab());
  std::size_t outcomes = 1;
  for (std::size_t k = 0; k < targets.size(); ++k) outcomes *= V;
  std::vector<double> acc(outcomes, 0.0);
  const auto probs = dist_->probs();
  double mass = 0.0;
  for_each_completion(*dist_, context, free, [&](std::size_t index, std::span<const TokenId> digits) {
    const double p = probs[index];
    if (p == 0.0) return;
    mass += p;
    std::size_t outcome = 0;
    for (std::size_t s : slot) outcome = outcome * V + static_cast<std::size_t>(digits[s]);
    acc[outcome] += p;
  });
  if (mass <= 0.0) throw Error(ErrorCode::ZeroContext, "context has probability zero");
  for (double& a : acc) a /= mass;
  auto result = joints_.insert(std::move(key), std::make_shared<const CategoricalDist>(CategoricalDist{std::move(acc)}));
  return *result;
}

}  // namespace mdd
