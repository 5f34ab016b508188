/*
 *   Copyright 2026 The guesswork-lab Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */


#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <doctest.h>

#include "gwlab/allocation.hpp"
#include "gwlab/attack.hpp"
#include "gwlab/errors.hpp"
#include "gwlab/infotheory.hpp"
#include "gwlab/rates.hpp"

using namespace gwlab;

TEST_CASE("strategy names round trip") {
  for (StrategyKind k : {StrategyKind::ascending, StrategyKind::seeded_permutation,
                         StrategyKind::probability_descending})
    CHECK(parse_strategy_kind(strategy_kind_name(k)) == k);
  CHECK_THROWS_AS(parse_strategy_kind("random"), ConfigError);
  CHECK(strategy_name(GuessStrategy::permutation(7)) == "seeded-permutation:7");
  CHECK(race_arm_name(RaceArm::password) == "password");
}

TEST_CASE("permutation order is a permutation") {
  for (unsigned n : {1u, 3u, 10u}) {
    PermutationOrder o(n, 1234 + n);
    std::vector<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < (1ULL << n); ++k) seen.push_back(o.next());
    std::sort(seen.begin(), seen.end());
    for (std::uint64_t k = 0; k < (1ULL << n); ++k) CHECK(seen[k] == k);
  }
  // Wide space: a prefix never repeats.
  PermutationOrder o(64, 5);
  std::set<std::uint64_t> prefix;
  for (int k = 0; k < 100000; ++k) CHECK(prefix.insert(o.next()).second);
}

TEST_CASE("permutation order: first element is uniform") {
  const unsigned n = 3;
  std::vector<int> counts(8, 0);
  const int N = 80000;
  for (int s = 0; s < N; ++s) {
    PermutationOrder o(n, derive_seed(77, s));
    ++counts[o.next()];
  }
  double chi = 0.0, e = N / 8.0;
  for (int c : counts) chi += (c - e) * (c - e) / e;
  CHECK(chi < 24.32);  // 7 dof at 1e-3
}

TEST_CASE("permutation reset reproduces the sequence") {
  PermutationOrder a(20, 9);
  std::vector<std::uint64_t> first;
  for (int k = 0; k < 5000; ++k) first.push_back(a.next());
  a.reset(9);
  for (int k = 0; k < 5000; ++k) CHECK(a.next() == first[k]);
}

TEST_CASE("weight-layer order is probability descending") {
  for (double theta : {0.1, 0.5, 0.8}) {
    const unsigned n = 8;
    WeightLayerOrder o(n, theta);
    std::vector<std::uint64_t> seq;
    for (int k = 0; k < 256; ++k) seq.push_back(o.next());
    std::vector<std::uint64_t> sorted = seq;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint64_t k = 0; k < 256; ++k) CHECK(sorted[k] == k);
    for (std::size_t k = 1; k < seq.size(); ++k) {
      double a = log2_sequence_probability(n, std::popcount(seq[k - 1]), theta);
      double b = log2_sequence_probability(n, std::popcount(seq[k]), theta);
      CHECK(a >= b - 1e-12);
    }
  }
}

TEST_CASE("online attack basics") {
  TableHash constant(3, 6, std::vector<std::uint32_t>(64, 5));
  for (auto strat : {GuessStrategy::ascending(), GuessStrategy::permutation(3),
                     GuessStrategy::probability_descending(0.2)}) {
    AttackResult r = online_attack(constant, BinLabel(5, 3), strat);
    CHECK(r.success);
    CHECK(r.guesses == 1);
  }
  std::vector<std::uint32_t> e(64, 0);
  e[7] = 6;
  TableHash single(3, 6, e);
  AttackResult r = online_attack(single, BinLabel(6, 3), GuessStrategy::ascending());
  CHECK(r.success);
  CHECK(r.guesses == 8);
  r = online_attack(single, BinLabel(6, 3), GuessStrategy::ascending(), 7);
  CHECK_FALSE(r.success);
  CHECK(r.guesses == 0);
  r = online_attack(single, BinLabel(1, 3), GuessStrategy::ascending());
  CHECK_FALSE(r.success);
  CHECK_THROWS_AS(online_attack(single, BinLabel(1, 3), GuessStrategy::ascending(), 65),
                  DomainError);
  CHECK_THROWS_AS(online_attack(single, BinLabel(1, 4), GuessStrategy::ascending()),
                  DomainError);
}

TEST_CASE("keyed and table backends agree") {
  const unsigned m = 5, n = 12;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    KeyedHashModel k(m, n, 0.3, seed);
    TableHash t = sample_table_hash(m, n, 0.3, seed);
    for (std::uint64_t b = 0; b < 32; b += 5) {
      for (auto strat : {GuessStrategy::ascending(), GuessStrategy::permutation(seed)}) {
        AttackResult a = online_attack(k, BinLabel(b, m), strat);
        AttackResult c = online_attack(t, BinLabel(b, m), strat);
        CHECK(a.guesses == c.guesses);
        CHECK(a.success == c.success);
      }
    }
    std::vector<std::uint64_t> raw = {31, 30, 29};
    BinSet set(m, raw);
    CHECK(offline_attack_any(k, set, GuessStrategy::ascending()).guesses ==
          offline_attack_any(t, set, GuessStrategy::ascending()).guesses);
  }
}

TEST_CASE("offline attack reductions") {
  KeyedHashModel h(4, 12, 0.3, 8);
  std::vector<std::uint64_t> all(16);
  std::iota(all.begin(), all.end(), 0);
  AttackResult r = offline_attack_any(h, BinSet(4, all), GuessStrategy::ascending());
  CHECK(r.guesses == 1);
  for (std::uint64_t b = 0; b < 16; ++b) {
    std::vector<std::uint64_t> one = {b};
    CHECK(offline_attack_any(h, BinSet(4, one), GuessStrategy::permutation(b)).guesses ==
          online_attack(h, BinLabel(b, 4), GuessStrategy::permutation(b)).guesses);
  }
}

TEST_CASE("permutation average") {
  CHECK(permutation_average_exact(3, 1) == 2.0);
  CHECK(permutation_average_exact(5, 5) == 1.0);
  CHECK(permutation_average_exact(7, 3) == 2.0);
  CHECK(permutation_average_exact(7, 0) == 0.0);
  // Enumerate all placements of 3 successes among 7 positions.
  double sum = 0;
  int cnt = 0;
  for (unsigned mask = 0; mask < 128; ++mask)
    if (std::popcount(mask) == 3) {
      sum += std::countr_zero(mask) + 1;
      ++cnt;
    }
  CHECK(sum / cnt == doctest::Approx(2.0));
  CHECK_THROWS_AS(permutation_average_exact(3, 4), DomainError);
}

TEST_CASE("broken-hash moments") {
  EffectiveDistribution u{4, std::vector<double>(16, 1.0 / 16)};
  CHECK(broken_hash_moment(u, 1.0) == doctest::Approx(17.0 / 2.0));
  EffectiveDistribution point{3, std::vector<double>(8, 0.0)};
  point.fractions[6] = 1.0;
  for (double rho : {0.5, 1.0, 3.0}) CHECK(broken_hash_moment(point, rho) == 1.0);
  // Exact Bernoulli(1/4) law, 40-digit reference sums.
  CHECK(broken_hash_moment(bernoulli_distribution(8, 0.25), 1.0) ==
        doctest::Approx(39.017822265625).epsilon(1e-13));
  CHECK(broken_hash_moment(bernoulli_distribution(10, 0.25), 1.0) ==
        doctest::Approx(126.31676483154296875).epsilon(1e-13));
  CHECK(broken_hash_moment(bernoulli_distribution(10, 0.25), 2.0) ==
        doctest::Approx(43824.53070068359375).epsilon(1e-13));
  // The finite-m rate approaches the limit from below as m grows.
  double limit = renyi_entropy_bernoulli(0.25, 1.0), prev = 0.0;
  for (unsigned m = 6; m <= 16; m += 2) {
    double rate = std::log2(broken_hash_moment(bernoulli_distribution(m, 0.25), 1.0)) / m;
    CHECK(rate > prev);
    CHECK(rate < limit);
    prev = rate;
  }
  CHECK(std::log2(126.31676483154296875) / 10 == doctest::Approx(0.69809023).epsilon(1e-8));
}

TEST_CASE("biased-password race") {
  KeyedHashModel h(8, 16, 0.3, 5);
  // Password 0 is the most likely string for theta < 1/2 and comes first.
  AttackResult r = biased_password_race(h, BinLabel(0xff, 8), 0.1, 0);
  CHECK(r.guesses == 1);
  CHECK(r.arm == RaceArm::password);
  KeyedHashModel c(2, 10, 0.3, 1);
  for (std::uint64_t pw = 0; pw < 1024; ++pw) {
    if (pw == 0) continue;
    c.add_override(pw, BinLabel(3, 2));
  }
  c.add_override(0, BinLabel(3, 2));
  r = biased_password_race(c, BinLabel(3, 2), 0.3, 999);
  CHECK(r.guesses == 1);
  CHECK(r.arm == RaceArm::hash);
  CHECK_THROWS_AS(biased_password_race(h, BinLabel(1, 8), 0.3, 1u << 16), RangeError);
}

TEST_CASE("biased-password arms shift toward the password as theta falls") {
  const unsigned m = 8, n = 24;
  std::vector<double> frac;
  for (double theta : {0.05, 0.15, 0.3, 0.5}) {
    int pw_wins = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
      KeyedHashModel h(m, n, 0.3, derive_seed(11, t));
      AttackResult r = biased_password_attack(h, BinLabel(0xff, m), theta,
                                              derive_seed(12, t));
      pw_wins += r.arm == RaceArm::password;
    }
    frac.push_back(static_cast<double>(pw_wins) / trials);
  }
  for (std::size_t i = 1; i < frac.size(); ++i) CHECK(frac[i - 1] >= frac[i]);
  CHECK(frac.front() > 0.9);
  CHECK(frac.back() < 0.05);
}

TEST_CASE("averaging across users") {
  AllocationPlan plan = allocate_bins(4, 0.3, 1);
  TableHash constant(4, 6, std::vector<std::uint32_t>(64, 15));
  std::vector<BinLabel> bins = plan.bins();
  EstimateWithCI e = average_guesswork_across_users(constant, bins, 100, 1);
  CHECK(e.mean == 1.0);
  CHECK(e.half_width_95 == 0.0);

  AveragingSetup setup;
  setup.n = 16;
  setup.p = 0.3;
  setup.key_seed = 3;
  EstimateWithCI a = average_guesswork_across_users(plan, Averaging::key, setup, 3000, 4);
  double expect = expected_guesses_per_bin(4, 16, 1.0, 0.3);
  CHECK(std::fabs(a.mean - expect) < 4 * a.std_error() + 1.0);
  EstimateWithCI b =
      average_guesswork_across_users(plan, Averaging::strategy, setup, 200, 4);
  CHECK(b.trials == 200);
}

TEST_CASE("any-bin attack never needs more guesses than a member bin") {
  const unsigned m = 6, n = 18;
  std::vector<BinLabel> bins = least_likely_bins(m, 0.3, 5);
  BinSet set(m, bins);
  for (std::uint64_t t = 0; t < 300; ++t) {
    KeyedHashModel h(m, n, 0.3, derive_seed(21, t));
    GuessStrategy strat = GuessStrategy::permutation(derive_seed(22, t));
    AttackResult any = offline_attack_any(h, set, strat);
    REQUIRE(any.success);
    for (const BinLabel& b : bins) {
      AttackResult one = online_attack(h, b, strat);
      if (one.success) CHECK(any.guesses <= one.guesses);
    }
  }
}

TEST_CASE("offline rate at m=8 against the least likely bins") {
  const unsigned m = 8, n = 24;
  std::vector<BinLabel> bins = least_likely_bins(m, 0.3, users_for_s(0.9, m));
  REQUIRE(bins.size() == 6);
  BinSet set(m, bins);
  MomentAccumulator acc;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    KeyedHashModel h(m, n, 0.3, derive_seed(31, t));
    AttackResult r = offline_attack_any(h, set, GuessStrategy::ascending());
    acc.add(static_cast<double>(r.guesses), !r.success);
  }
  double rate = std::log2(acc.estimate().mean) / m;
  CHECK(std::fabs(rate - kl_divergence(0.9, 0.3)) <= 0.15);
}
