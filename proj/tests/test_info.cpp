#include <cmath>
#include <numeric>

#include "brute.hpp"
#include "doctest.h"
#include "mdd/error.hpp"
#include "mdd/info.hpp"
#include "mdd/suite.hpp"

using namespace mdd;

namespace {

const double ln2 = std::log(2.0);

// I(A;B) straight from the definition over the 8-entry table.
double endpoint_mi_bruteforce(const ExplicitJoint& d) {
  double p0[2] = {0, 0}, p2[2] = {0, 0}, p02[2][2] = {{0, 0}, {0, 0}};
  for (const auto& x : brute::all_sequences(3, 2)) {
    const double p = brute::prob(d, x);
    p0[x[0]] += p;
    p2[x[2]] += p;
    p02[x[0]][x[2]] += p;
  }
  double mi = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (p02[a][b] > 0) mi += p02[a][b] * std::log(p02[a][b] / (p0[a] * p2[b]));
    }
  }
  return mi;
}

}  // namespace

TEST_CASE("entropy") {
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(std::abs(entropy(std::vector<double>{0.9, 0.1}) - 0.3250829733914482) <= 1e-15);
}

TEST_CASE("kl") {
  const std::vector<double> half{0.5, 0.5};
  CHECK(kl(half, half) == 0.0);
  CHECK(kl(std::vector<double>{1, 0}, half) == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(std::abs(kl(std::vector<double>{0.75, 0.25}, half) - 0.13081203594113697) <= 1e-15);
  CHECK(std::abs(kl(std::vector<double>{0.75, 0.25}, half) - (0.75 * std::log(1.5) + 0.25 * std::log(0.5))) <= 1e-15);
  try {
    kl(half, std::vector<double>{1, 0});
    FAIL("expected SupportViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportViolation);
  }
}

TEST_CASE("joint-vs-product divergence and its decompositions") {
  const int two[] = {2, 2};
  const int three[] = {2, 2, 2};
  const std::vector<double> independent{0.06, 0.14, 0.24, 0.56};
  CHECK(kl_joint_vs_product(independent, two) <= 1e-15);
  CHECK(mi_tail_decomposition(independent, two)[0] <= 1e-15);
  CHECK(mi_leave_one_out(independent, two, 0)[0] <= 1e-15);

  const std::vector<double> pair{0.5, 0, 0, 0.5};
  CHECK(kl_joint_vs_product(pair, two) == doctest::Approx(ln2).epsilon(1e-14));
  CHECK(mi_tail_decomposition(pair, two)[0] == doctest::Approx(ln2).epsilon(1e-14));
  const auto loo = mi_leave_one_out(pair, two, 1);
  REQUIRE(loo.size() == 1);
  CHECK(loo[0] == doctest::Approx(kl_joint_vs_product(pair, two)).epsilon(1e-14));

  const std::vector<double> triple{0.5, 0, 0, 0, 0, 0, 0, 0.5};
  CHECK(kl_joint_vs_product(triple, three) == doctest::Approx(2 * ln2).epsilon(1e-14));
  const auto tail = mi_tail_decomposition(triple, three);
  REQUIRE(tail.size() == 2);
  CHECK(tail[0] == doctest::Approx(ln2).epsilon(1e-14));
  CHECK(tail[1] == doctest::Approx(ln2).epsilon(1e-14));
}

TEST_CASE("leave-one-out sum bounds the divergence on random joints") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = make_random_dirichlet(3, 2, 0.6, seed);
    const int ar[] = {2, 2, 2};
    const double total = kl_joint_vs_product(d.probs(), ar);
    const auto tail = mi_tail_decomposition(d.probs(), ar);
    CHECK(std::abs(std::accumulate(tail.begin(), tail.end(), 0.0) - total) <= 1e-10);
    for (int j = 0; j < 3; ++j) {
      const auto loo = mi_leave_one_out(d.probs(), ar, j);
      CHECK(std::accumulate(loo.begin(), loo.end(), 0.0) + 1e-10 >= total);
    }
  }
}

TEST_CASE("marginalize reorders coordinates") {
  const int ar[] = {2, 3};
  const std::vector<double> joint{0.1, 0.2, 0.3, 0.05, 0.15, 0.2};
  const int swap[] = {1, 0};
  const auto t = marginalize(joint, ar, swap);
  CHECK(t == std::vector<double>{0.1, 0.05, 0.2, 0.15, 0.3, 0.2});
  const int first[] = {0};
  const auto m = marginalize(joint, ar, first);
  CHECK(m[0] == doctest::Approx(0.6));
}

TEST_CASE("pointwise mutual information") {
  const Oracle fair(fair_bits(3));
  const int a[] = {0};
  const int b[] = {2};
  CHECK(std::abs(pointwise_mi(fair, a, b, PartialAssignment(3))) <= 1e-15);

  const Oracle pair(correlated_pair());
  const int p0[] = {0};
  const int p1[] = {1};
  CHECK(pointwise_mi(pair, p0, p1, PartialAssignment(2)) == doctest::Approx(ln2).epsilon(1e-14));

  // Endpoints of a sticky chain: the flip between them happens with
  // probability 2(0.9)(0.1) = 0.18, so I = ln 2 - h(0.18).
  const auto d = symmetric_markov(3, 0.9);
  const Oracle chain(d);
  const double mi = pointwise_mi(chain, a, b, PartialAssignment(3));
  CHECK(std::abs(mi - endpoint_mi_bruteforce(d)) <= 1e-14);
  CHECK(std::abs(mi - (ln2 - binary_entropy(0.18))) <= 1e-14);
  CHECK(std::abs(mi - 0.2217536937498512) <= 1e-14);

  const Oracle copy(symmetric_markov(3, 1.0));
  PartialAssignment off(3);
  off.set(0, 0);
  off.set(1, 1);
  const int last[] = {2};
  try {
    pointwise_entropy(copy, last, off);
    FAIL("expected ZeroContext");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroContext);
  }
}

TEST_CASE("pointwise entropy of a joint target set") {
  const auto d = make_random_dirichlet(3, 2, 1.0, 11);
  const Oracle o(d);
  const int all[] = {0, 1, 2};
  CHECK(std::abs(pointwise_entropy(o, all, PartialAssignment(3)) - brute::joint_entropy(d)) <= 1e-14);
}
