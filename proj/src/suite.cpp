#include "mdd/suite.hpp"

#include "mdd/error.hpp"

namespace mdd {

ExplicitJoint correlated_pair() { return build_explicit(2, 2, {1.0, 0.0, 0.0, 1.0}); }

ExplicitJoint correlated_blocks(int length) {
  if (length < 2 || length % 2 != 0) throw Error(ErrorCode::InvalidArgument, "blocks need an even length");
  const std::size_t n = table_size(length, 2, Caps{}.max_sequences);
  std::vector<double> w(n, 0.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    bool ok = true;
    for (int b = 0; b < length / 2; ++b) {
      const auto hi = (idx >> (length - 1 - 2 * b)) & 1u;
      const auto lo = (idx >> (length - 2 - 2 * b)) & 1u;
      ok = ok && hi == lo;
    }
    if (ok) w[idx] = 1.0;
  }
  return build_explicit(length, 2, std::move(w));
}

ExplicitJoint symmetric_markov(int length, double stay) {
  const double flip = 1.0 - stay;
  const std::vector<double> transition{stay, flip, flip, stay};
  return make_markov_chain(CategoricalDist{{0.5, 0.5}}, transition, length);
}

ExplicitJoint point_mass(int length, int vocab) {
  std::vector<double> w(table_size(length, vocab, Caps{}.max_sequences), 0.0);
  w[0] = 1.0;
  return build_explicit(length, vocab, std::move(w));
}

ExplicitJoint fair_bits(int length) {
  const std::vector<CategoricalDist> marginals(static_cast<std::size_t>(length), CategoricalDist{{0.5, 0.5}});
  return make_product(marginals);
}

std::vector<NamedDist> builtin_suite(std::uint64_t seed) {
  std::vector<NamedDist> suite;
  suite.push_back({"fair_bits_L4", fair_bits(4)});
  suite.push_back({"correlated_pair", correlated_pair()});
  suite.push_back({"correlated_blocks_L4", correlated_blocks(4)});
  suite.push_back({"copy_chain_L3", symmetric_markov(3, 1.0)});
  suite.push_back({"markov_0.9_L5", symmetric_markov(5, 0.9)});
  suite.push_back({"near_deterministic_L5_0.05", make_near_deterministic(std::vector<TokenId>{1, 0, 1, 1, 0}, 0.05)});
  suite.push_back({"point_mass_L3", point_mass(3)});
  suite.push_back({"dirichlet_L4_V2", make_random_dirichlet(4, 2, 0.5, seed)});
  suite.push_back({"dirichlet_L3_V3", make_random_dirichlet(3, 3, 1.0, seed + 1)});
  {
    const std::vector<double> transition{0.7, 0.2, 0.1, 0.1, 0.8, 0.1, 0.3, 0.3, 0.4};
    suite.push_back({"markov_V3_L4", make_markov_chain(CategoricalDist{{0.2, 0.5, 0.3}}, transition, 4)});
  }
  return suite;
}

std::vector<NamedDist> theorem_grid() {
  std::vector<NamedDist> grid;
  grid.push_back({"fair_bits_L4", fair_bits(4)});
  grid.push_back({"correlated_blocks_L4", correlated_blocks(4)});
  grid.push_back({"markov_0.9_L6", symmetric_markov(6, 0.9)});
  grid.push_back({"near_deterministic_L6_0.05", make_near_deterministic(std::vector<TokenId>{0, 1, 1, 0, 1, 0}, 0.05)});
  return grid;
}

}  // namespace mdd
