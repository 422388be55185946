#pragma once

#include <span>
#include <vector>

#include "mdd/dist.hpp"
#include "mdd/oracle.hpp"

namespace mdd {

/// Natural-log information units.
using Nats = double;

Nats entropy(std::span<const double> p);
inline Nats entropy(const CategoricalDist& p) { return entropy(std::span<const double>(p.probs)); }

/// KL(p || q) before clamping; may be slightly negative from round-off.
/// Throws SupportViolation when p puts mass where q has none.
double kl_raw(std::span<const double> p, std::span<const double> q);

/// KL(p || q) clamped at zero.
Nats kl(std::span<const double> p, std::span<const double> q);
inline Nats kl(const CategoricalDist& p, const CategoricalDist& q) { return kl(p.probs, q.probs); }

/// Marginal of a multi-coordinate joint over `keep` (in the given order,
/// first coordinate most significant).
std::vector<double> marginalize(std::span<const double> joint, std::span<const int> arities,
                                std::span<const int> keep);

/// I(Z^A; Z^B) for disjoint coordinate sets of a joint table.
Nats mutual_information(std::span<const double> joint, std::span<const int> arities, std::span<const int> a,
                        std::span<const int> b);

/// KL between a joint and the product of its own coordinate marginals.
Nats kl_joint_vs_product(std::span<const double> joint, std::span<const int> arities);

/// Terms I(Z^i; Z^{>i}) for i = 0..d-2. They sum to kl_joint_vs_product.
std::vector<Nats> mi_tail_decomposition(std::span<const double> joint, std::span<const int> arities);

/// Terms I(Z^i; Z^{-i}) for every i != excluded, in coordinate order. Their
/// sum upper-bounds kl_joint_vs_product.
std::vector<Nats> mi_leave_one_out(std::span<const double> joint, std::span<const int> arities, int excluded);

/// Pointwise conditional entropy of the positions `targets` given a realized context.
Nats pointwise_entropy(const Oracle& oracle, std::span<const int> targets, const PartialAssignment& context);

/// Pointwise conditional mutual information between position sets given a
/// realized context, from exact oracle queries.
Nats pointwise_mi(const Oracle& oracle, std::span<const int> a, std::span<const int> b,
                  const PartialAssignment& context);

}  // namespace mdd
