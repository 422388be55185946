#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdd/dist.hpp"

namespace mdd {

struct NamedDist {
  std::string name;
  ExplicitJoint dist;
};

/// Two fair bits that are always equal.
ExplicitJoint correlated_pair();

/// L/2 independent fair blocks, each two perfectly correlated bits.
ExplicitJoint correlated_blocks(int length);

/// Binary chain with init (0.5, 0.5) that keeps its state with probability `stay`.
ExplicitJoint symmetric_markov(int length, double stay);

/// All mass on the all-zeros sequence.
ExplicitJoint point_mass(int length, int vocab = 2);

ExplicitJoint fair_bits(int length);

/// Desk-scale distributions shared by the verification suites.
std::vector<NamedDist> builtin_suite(std::uint64_t seed);

/// The four distributions the theorem certifications run on.
std::vector<NamedDist> theorem_grid();

}  // namespace mdd
