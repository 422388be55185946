#include "mdd/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mdd/error.hpp"

namespace mdd {

namespace {

std::size_t outcome_count(std::span<const int> arities) {
  std::size_t n = 1;
  for (int a : arities) {
    if (a < 1) throw Error(ErrorCode::InvalidArgument, "coordinate arity must be positive");
    n *= static_cast<std::size_t>(a);
  }
  return n;
}

void check_joint(std::span<const double> joint, std::span<const int> arities) {
  if (arities.empty()) throw Error(ErrorCode::DimensionMismatch, "joint needs at least one coordinate");
  if (outcome_count(arities) != joint.size()) {
    throw Error(ErrorCode::DimensionMismatch, "arities do not multiply to the outcome count");
  }
}

std::vector<int> all_except(int d, std::span<const int> excluded) {
  std::vector<int> out;
  for (int c = 0; c < d; ++c) {
    if (std::find(excluded.begin(), excluded.end(), c) == excluded.end()) out.push_back(c);
  }
  return out;
}

}  // namespace

Nats entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double kl_raw(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "KL arguments differ in outcome count");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) {
      throw Error(ErrorCode::SupportViolation, "p has mass at outcome " + std::to_string(k) + " where q has none");
    }
    sum += p[k] * std::log(p[k] / q[k]);
  }
  return sum;
}

Nats kl(std::span<const double> p, std::span<const double> q) { return std::max(0.0, kl_raw(p, q)); }

std::vector<double> marginalize(std::span<const double> joint, std::span<const int> arities,
                                std::span<const int> keep) {
  check_joint(joint, arities);
  const int d = static_cast<int>(arities.size());
  std::vector<std::size_t> strides(static_cast<std::size_t>(d));
  std::size_t s = 1;
  for (int c = d - 1; c >= 0; --c) {
    strides[static_cast<std::size_t>(c)] = s;
    s *= static_cast<std::size_t>(arities[static_cast<std::size_t>(c)]);
  }
  std::size_t out_size = 1;
  for (int c : keep) {
    if (c < 0 || c >= d) throw Error(ErrorCode::InvalidArgument, "coordinate out of range");
    out_size *= static_cast<std::size_t>(arities[static_cast<std::size_t>(c)]);
  }
  std::vector<double> out(out_size, 0.0);
  for (std::size_t idx = 0; idx < joint.size(); ++idx) {
    if (joint[idx] == 0.0) continue;
    std::size_t o = 0;
    for (int c : keep) {
      const auto a = static_cast<std::size_t>(arities[static_cast<std::size_t>(c)]);
      o = o * a + (idx / strides[static_cast<std::size_t>(c)]) % a;
    }
    out[o] += joint[idx];
  }
  return out;
}

Nats mutual_information(std::span<const double> joint, std::span<const int> arities, std::span<const int> a,
                        std::span<const int> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<int> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  const auto p_ab = marginalize(joint, arities, ab);
  const auto p_a = marginalize(joint, arities, a);
  const auto p_b = marginalize(joint, arities, b);
  std::vector<double> product(p_ab.size());
  for (std::size_t i = 0; i < p_a.size(); ++i) {
    for (std::size_t j = 0; j < p_b.size(); ++j) product[i * p_b.size() + j] = p_a[i] * p_b[j];
  }
  return kl(p_ab, product);
}

Nats kl_joint_vs_product(std::span<const double> joint, std::span<const int> arities) {
  check_joint(joint, arities);
  const int d = static_cast<int>(arities.size());
  std::vector<std::vector<double>> margins;
  for (int c = 0; c < d; ++c) {
    const int keep[] = {c};
    margins.push_back(marginalize(joint, arities, keep));
  }
  std::vector<double> product(joint.size());
  for (std::size_t idx = 0; idx < joint.size(); ++idx) {
    std::size_t rest = idx;
    double p = 1.0;
    for (int c = d - 1; c >= 0; --c) {
      const auto a = static_cast<std::size_t>(arities[static_cast<std::size_t>(c)]);
      p *= margins[static_cast<std::size_t>(c)][rest % a];
      rest /= a;
    }
    product[idx] = p;
  }
  return kl(joint, product);
}

std::vector<Nats> mi_tail_decomposition(std::span<const double> joint, std::span<const int> arities) {
  check_joint(joint, arities);
  const int d = static_cast<int>(arities.size());
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "need at least two coordinates");
  std::vector<Nats> terms;
  for (int i = 0; i + 1 < d; ++i) {
    const int head[] = {i};
    std::vector<int> tail(static_cast<std::size_t>(d - i - 1));
    std::iota(tail.begin(), tail.end(), i + 1);
    terms.push_back(mutual_information(joint, arities, head, tail));
  }
  return terms;
}

std::vector<Nats> mi_leave_one_out(std::span<const double> joint, std::span<const int> arities, int excluded) {
  check_joint(joint, arities);
  const int d = static_cast<int>(arities.size());
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "need at least two coordinates");
  if (excluded < 0 || excluded >= d) throw Error(ErrorCode::InvalidArgument, "excluded coordinate out of range");
  std::vector<Nats> terms;
  for (int i = 0; i < d; ++i) {
    if (i == excluded) continue;
    const int self[] = {i};
    terms.push_back(mutual_information(joint, arities, self, all_except(d, self)));
  }
  return terms;
}

Nats pointwise_entropy(const Oracle& oracle, std::span<const int> targets, const PartialAssignment& context) {
  return entropy(oracle.conditional_joint(targets, context));
}

Nats pointwise_mi(const Oracle& oracle, std::span<const int> a, std::span<const int> b,
                  const PartialAssignment& context) {
  std::vector<int> targets(a.begin(), a.end());
  targets.insert(targets.end(), b.begin(), b.end());
  std::sort(targets.begin(), targets.end());
  if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) {
    throw Error(ErrorCode::InvalidArgument, "position sets overlap");
  }
  const auto joint = oracle.conditional_joint(targets, context);
  const std::vector<int> arities(targets.size(), oracle.vocab());
  auto coords = [&](std::span<const int> set) {
    std::vector<int> out;
    for (int pos : set) out.push_back(static_cast<int>(std::lower_bound(targets.begin(), targets.end(), pos) - targets.begin()));
    return out;
  };
  return mutual_information(joint.probs, arities, coords(a), coords(b));
}

}  // namespace mdd
