#include <cmath>
#include <map>

#include "brute.hpp"
#include "doctest.h"
#include "mdd/decode.hpp"
#include "mdd/error.hpp"
#include "mdd/suite.hpp"

using namespace mdd;

namespace {

const double ln2 = std::log(2.0);

// Restores the fault hook even when a check fails mid-case.
struct FaultScope {
  explicit FaultScope(Fault f) { set_fault_for_testing(f); }
  ~FaultScope() { set_fault_for_testing(Fault::None); }
};

std::vector<std::vector<int>> positions_of(const Trajectory& t) {
  std::vector<std::vector<int>> out;
  for (const auto& b : t.batches) out.push_back(b.positions);
  return out;
}

}  // namespace

TEST_CASE("strategy validation names the field") {
  CHECK_NOTHROW(StrategySpec::ar().validate(3));
  CHECK_THROWS_WITH_AS(StrategySpec::uniform({2, 1}).validate(4), doctest::Contains("schedule"), Error);
  CHECK_THROWS_WITH_AS(StrategySpec::uniform({2, 0, 2}).validate(4), doctest::Contains("schedule"), Error);
  CHECK_THROWS_WITH_AS(StrategySpec::max_entropy(0.1, 0).validate(4), doctest::Contains("s_max"), Error);
  CHECK_THROWS_WITH_AS(StrategySpec::entropy_sum(-0.1).validate(4), doctest::Contains("eta"), Error);
  CHECK(StrategySpec::balanced(7, 3).schedule == std::vector<int>{3, 2, 2});
  CHECK(StrategySpec::one_shot(5).schedule == std::vector<int>{5});
}

TEST_CASE("permutation validation") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
  CHECK_THROWS_AS(Permutation({0, 3}), Error);
  CHECK(Permutation::identity(3) == Permutation({0, 1, 2}));
  CHECK(permutation_from_rank(3, 0) == Permutation({0, 1, 2}));
  CHECK(permutation_from_rank(3, 5) == Permutation({2, 1, 0}));
  CHECK(permutation_count(7, 5040) == 5040);
  CHECK_THROWS_AS(permutation_count(8, 5040), Error);
}

TEST_CASE("entropy-sum decoding on the correlated pair") {
  const Oracle pair(correlated_pair());
  const auto id = Permutation::identity(2);
  Rng rng = make_stream(1);

  SUBCASE("eta below ln 2 reveals one token per step") {
    const auto r = sample_trajectory(pair, StrategySpec::entropy_sum(0.5), id, rng);
    CHECK(positions_of(r.trajectory) == std::vector<std::vector<int>>{{0}, {1}});
    CHECK(r.trajectory.batches[0].entropies[0] == doctest::Approx(ln2));
    CHECK(r.trajectory.batches[1].entropies[0] == 0.0);
    CHECK(r.tokens[0] == r.tokens[1]);
  }
  SUBCASE("frozen context: the second token is scored unconditionally") {
    const auto r = sample_trajectory(pair, StrategySpec::entropy_sum(1.0), id, rng);
    CHECK(r.trajectory.iterations() == 1);
    REQUIRE(r.trajectory.batches[0].entropies.size() == 2);
    CHECK(r.trajectory.batches[0].entropies[1] == doctest::Approx(ln2));
    CHECK(r.trajectory.batches[0].entropy_sum == doctest::Approx(2 * ln2));
  }
  SUBCASE("max-entropy under threshold runs to the end") {
    const auto r = sample_trajectory(pair, StrategySpec::max_entropy(0.8, 2), id, rng);
    CHECK(r.trajectory.iterations() == 1);
  }
}

TEST_CASE("replay") {
  const Oracle pair(correlated_pair());
  const auto id = Permutation::identity(2);
  const TokenSequence x{1, 1};
  const auto t = replay_trajectory(pair, StrategySpec::entropy_sum(1.0), id, x);
  REQUIRE(t.iterations() == 1);
  CHECK(t.batches[0].positions == std::vector<int>{0, 1});
  CHECK(t.batches[0].entropies[0] == doctest::Approx(ln2));
  CHECK(t.batches[0].entropies[1] == doctest::Approx(ln2));

  const Oracle chain(symmetric_markov(4, 0.9));
  const Permutation perm({2, 0, 3, 1});
  const auto ar = replay_trajectory(chain, StrategySpec::ar(), perm, TokenSequence{0, 1, 1, 0});
  CHECK(positions_of(ar) == std::vector<std::vector<int>>{{2}, {0}, {3}, {1}});

  const Oracle copy(symmetric_markov(3, 1.0));
  CHECK_THROWS_AS(replay_trajectory(copy, StrategySpec::ar(), Permutation::identity(3), TokenSequence{0, 1, 0}), Error);
}

TEST_CASE("replay batches match a naive transcription of the rules") {
  const auto d = make_random_dirichlet(5, 2, 0.6, 42);
  const Oracle o(d);
  Rng rng = make_stream(9);
  const std::vector<StrategySpec> strategies{StrategySpec::entropy_sum(0.2), StrategySpec::entropy_sum(0.9),
                                             StrategySpec::max_entropy(0.4, 2), StrategySpec::max_entropy(0.6, 5),
                                             StrategySpec::uniform({1, 3, 1}), StrategySpec::ar()};
  for (const auto& s : strategies) {
    for (int r = 0; r < 20; ++r) {
      const auto perm = uniform_random_permutation(5, rng);
      const std::vector<int> order(perm.order().begin(), perm.order().end());
      const auto x = d.sequence_at(static_cast<std::size_t>(rng() % d.size()));
      const brute::Seq bx(x.begin(), x.end());
      CHECK(positions_of(replay_trajectory(o, s, perm, x)) == brute::decode_along(d, s, order, bx).batches);
    }
  }
}

TEST_CASE("sampled trajectories replay identically") {
  const Oracle o(symmetric_markov(6, 0.8));
  Rng rng = make_stream(5);
  for (int r = 0; r < 200; ++r) {
    const auto perm = uniform_random_permutation(6, rng);
    const auto s = r % 2 ? StrategySpec::entropy_sum(0.4) : StrategySpec::max_entropy(0.3, 3);
    const auto run = sample_trajectory(o, s, perm, rng);
    CHECK(replay_trajectory(o, s, perm, run.tokens, OffSupport::Uniform) == run.trajectory);
  }
}

TEST_CASE("size envelopes") {
  const int a[] = {1, 2, 4, 1};
  const auto ea = size_envelopes(a);
  CHECK(ea.envelopes == std::vector<int>{0, 2, 4, 8});
  CHECK(ea.crossings == 3);
  const int b[] = {1, 1, 1, 1};
  const auto eb = size_envelopes(b);
  CHECK(eb.envelopes == std::vector<int>{0, 2, 2, 2});
  CHECK(eb.crossings == 1);
  const int c[] = {6};
  const auto ec = size_envelopes(c);
  CHECK(ec.envelopes == std::vector<int>{0});
  CHECK(ec.crossings == 1);
}

TEST_CASE("uniform random permutations") {
  Rng a = make_stream(3), b = make_stream(3);
  CHECK(uniform_random_permutation(1, a) == Permutation::identity(1));
  CHECK(uniform_random_permutation(9, a) == uniform_random_permutation(9, b));

  Rng rng = make_stream(77);
  const int n = 100000;
  int identity = 0;
  for (int i = 0; i < n; ++i) identity += uniform_random_permutation(2, rng)[0] == 0;
  const double sigma = std::sqrt(0.25 / n);
  CHECK(std::abs(static_cast<double>(identity) / n - 0.5) <= 3 * sigma);

  std::map<std::vector<int>, int> counts;
  for (int i = 0; i < 60000; ++i) {
    const auto p = uniform_random_permutation(3, rng);
    counts[{p.order().begin(), p.order().end()}]++;
  }
  CHECK(counts.size() == 6);
  for (const auto& [order, c] : counts) CHECK(std::abs(c / 60000.0 - 1.0 / 6) <= 4 * std::sqrt((1.0 / 6) * (5.0 / 6) / 60000));
}

TEST_CASE("draw_categorical never returns a zero-probability outcome") {
  Rng rng = make_stream(2);
  const std::vector<double> p{0.0, 0.3, 0.0, 0.7, 0.0};
  for (int i = 0; i < 10000; ++i) {
    const auto k = draw_categorical(p, rng);
    CHECK((k == 1 || k == 3));
  }
}

TEST_CASE("fault hooks change the recorded trajectory") {
  const Oracle copy(symmetric_markov(4, 1.0));
  const auto id = Permutation::identity(4);
  const TokenSequence x{1, 1, 1, 1};
  const StrategySpec at_ln2 = StrategySpec::entropy_sum(std::log(2.0));
  using Batches = std::vector<std::vector<int>>;
  CHECK(positions_of(replay_trajectory(copy, at_ln2, id, x)) == Batches{{0, 1}, {2, 3}});
  {
    FaultScope f(Fault::NonStrictThreshold);
    CHECK(positions_of(replay_trajectory(copy, at_ln2, id, x)) == Batches{{0}, {1, 2, 3}});
  }
  CHECK(positions_of(replay_trajectory(copy, StrategySpec::entropy_sum(0.0), id, x)) == Batches{{0}, {1, 2, 3}});

  const Oracle pair(correlated_pair());
  {
    FaultScope f(Fault::UnfrozenContext);
    const auto t = replay_trajectory(pair, StrategySpec::entropy_sum(1.0), Permutation::identity(2), TokenSequence{0, 0});
    CHECK(t.batches[0].entropies.back() == 0.0);
  }
  CHECK(active_fault() == Fault::None);
}
