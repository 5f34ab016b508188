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

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwlab/allocation.hpp"
#include "gwlab/estimate.hpp"
#include "gwlab/hashmodel.hpp"
#include "gwlab/random.hpp"

namespace gwlab {

// Budget sentinel meaning "all 2^n passwords".
inline constexpr std::uint64_t kExhaustive = ~0ULL;

enum class StrategyKind { ascending, seeded_permutation, probability_descending };

struct GuessStrategy {
  StrategyKind kind = StrategyKind::ascending;
  std::uint64_t seed = 0;
  std::optional<double> theta;

  static GuessStrategy ascending() { return {}; }
  static GuessStrategy permutation(std::uint64_t seed) {
    return {StrategyKind::seeded_permutation, seed, std::nullopt};
  }
  static GuessStrategy probability_descending(double theta) {
    return {StrategyKind::probability_descending, 0, theta};
  }
};

std::string strategy_name(const GuessStrategy& s);
std::string strategy_kind_name(StrategyKind k);
StrategyKind parse_strategy_kind(const std::string& name);

enum class RaceArm { none, hash, password };
std::string race_arm_name(RaceArm arm);

// Zero-on-failure: an unsuccessful attack reports guesses == 0.
struct AttackResult {
  std::uint64_t guesses = 0;
  bool success = false;
  RaceArm arm = RaceArm::none;
};

// Guess orders: each next() yields a fresh password index.

class AscendingOrder {
 public:
  std::uint64_t next() noexcept { return i_++; }

 private:
  std::uint64_t i_ = 0;
};

// Uniform random permutation of [0, 2^n), drawn lazily by Fisher-Yates with
// the displaced entries held in an open-addressing map. The prefix produced
// is exactly that of a full shuffle with the same draws.
class PermutationOrder {
 public:
  PermutationOrder(unsigned n, std::uint64_t seed);
  void reset(std::uint64_t seed);
  std::uint64_t next();

 private:
  std::uint64_t lookup(std::uint64_t key) const noexcept;
  void store(std::uint64_t key, std::uint64_t value);
  void grow();

  unsigned n_;
  SplitMix64 rng_;
  std::uint64_t k_ = 0;
  std::uint32_t stamp_ = 1;
  std::size_t used_ = 0;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> values_;
  std::vector<std::uint32_t> stamps_;
};

// Passwords by descending i.i.d. Bernoulli(theta) probability: weight
// layers (number of ones) ascending for theta < 1/2, descending for
// theta > 1/2, ascending index within a layer. theta == 1/2 is ascending.
class WeightLayerOrder {
 public:
  WeightLayerOrder(unsigned n, double theta);
  std::uint64_t next() noexcept;

 private:
  void start_layer() noexcept;

  unsigned n_;
  int step_;
  int weight_;
  std::uint64_t x_ = 0;
  std::uint64_t last_ = 0;
  bool fresh_ = true;
};

template <class F>
decltype(auto) with_order(const GuessStrategy& s, unsigned n, F&& f) {
  switch (s.kind) {
    case StrategyKind::seeded_permutation: {
      PermutationOrder o(n, s.seed);
      return f(o);
    }
    case StrategyKind::probability_descending: {
      WeightLayerOrder o(n, s.theta.value_or(0.5));
      return f(o);
    }
    case StrategyKind::ascending:
    default: {
      AscendingOrder o;
      return f(o);
    }
  }
}

template <class H>
concept HashFunction = requires(const H& h, std::uint64_t pw, std::uint64_t b,
                                const BinSet& set) {
  { h.m() } -> std::convertible_to<unsigned>;
  { h.n() } -> std::convertible_to<unsigned>;
  { h.segment(pw) } -> std::convertible_to<std::uint64_t>;
  { h.matches(pw, b) } -> std::convertible_to<bool>;
  { h.matches_any(pw, set) } -> std::convertible_to<bool>;
  { h.first_match(&pw, std::size_t{1}, b) } -> std::convertible_to<std::size_t>;
  { h.first_match_any(&pw, std::size_t{1}, set) } -> std::convertible_to<std::size_t>;
  { H::kBlock } -> std::convertible_to<std::size_t>;
};

// Resolves kExhaustive and rejects budgets above 2^n.
std::uint64_t resolve_budget(unsigned n, std::uint64_t budget);

// Guesses are drawn from the order in blocks and evaluated together; the
// reported count is the 1-based position of the first success.
template <HashFunction H, class Order>
AttackResult attack_bin(const H& h, std::uint64_t bin, Order& order,
                        std::uint64_t budget) {
  std::uint64_t block[H::kBlock];
  for (std::uint64_t done = 0; done < budget;) {
    std::size_t count = static_cast<std::size_t>(
        std::min<std::uint64_t>(H::kBlock, budget - done));
    for (std::size_t k = 0; k < count; ++k) block[k] = order.next();
    std::size_t hit = h.first_match(block, count, bin);
    if (hit < count) return {done + hit + 1, true, RaceArm::hash};
    done += count;
  }
  return {};
}

template <HashFunction H, class Order>
AttackResult attack_any(const H& h, const BinSet& bins, Order& order,
                        std::uint64_t budget) {
  std::uint64_t block[H::kBlock];
  for (std::uint64_t done = 0; done < budget;) {
    std::size_t count = static_cast<std::size_t>(
        std::min<std::uint64_t>(H::kBlock, budget - done));
    for (std::size_t k = 0; k < count; ++k) block[k] = order.next();
    std::size_t hit = h.first_match_any(block, count, bins);
    if (hit < count) return {done + hit + 1, true, RaceArm::hash};
    done += count;
  }
  return {};
}

// First guess that equals the true password or hashes to `bin`.
template <HashFunction H, class Order>
AttackResult attack_race(const H& h, std::uint64_t bin, std::uint64_t password,
                         Order& order, std::uint64_t budget) {
  std::uint64_t block[H::kBlock];
  for (std::uint64_t done = 0; done < budget;) {
    std::size_t count = static_cast<std::size_t>(
        std::min<std::uint64_t>(H::kBlock, budget - done));
    std::size_t stop = count;
    for (std::size_t k = 0; k < count; ++k) {
      block[k] = order.next();
      if (block[k] == password) {
        stop = k;
        break;
      }
    }
    std::size_t hit = h.first_match(block, stop, bin);
    if (hit < stop) return {done + hit + 1, true, RaceArm::hash};
    if (stop < count) return {done + stop + 1, true, RaceArm::password};
    done += count;
  }
  return {};
}

AttackResult online_attack(const KeyedHashModel& h, BinLabel b,
                           const GuessStrategy& strat,
                           std::uint64_t budget = kExhaustive);
AttackResult online_attack(const TableHash& h, BinLabel b,
                           const GuessStrategy& strat,
                           std::uint64_t budget = kExhaustive);
AttackResult offline_attack_any(const KeyedHashModel& h, const BinSet& bins,
                                const GuessStrategy& strat,
                                std::uint64_t budget = kExhaustive);
AttackResult offline_attack_any(const TableHash& h, const BinSet& bins,
                                const GuessStrategy& strat,
                                std::uint64_t budget = kExhaustive);

// E over uniform permutations of the first success index with L of N
// passwords successful: (N+1)/(L+1); 0 when L == 0.
double permutation_average_exact(std::uint64_t N, std::uint64_t L);

// sum_i i^rho P(b_(i)) with bins by descending probability.
double broken_hash_moment(const EffectiveDistribution& dist, double rho);

// The user's password is drawn i.i.d. Bernoulli(theta) from pw_seed; the
// attacker guesses by descending password probability and wins at the
// first guess that is the password or hashes to b.
AttackResult biased_password_attack(const KeyedHashModel& h, BinLabel b,
                                    double theta, std::uint64_t pw_seed,
                                    std::uint64_t budget = kExhaustive);
// Same race against a known password (e.g. one planted by the backdoor).
AttackResult biased_password_race(const KeyedHashModel& h, BinLabel b,
                                  double theta, std::uint64_t password,
                                  std::uint64_t budget = kExhaustive);

enum class Averaging { strategy, key };

struct AveragingSetup {
  unsigned n = 0;
  double p = 0.5;
  std::uint64_t key_seed = 0;  // the fixed key when averaging strategies
  bool backdoor = true;
  GuessStrategy strategy;      // the fixed strategy when averaging keys
  std::uint64_t budget = kExhaustive;
};

// Mean guesses over a uniformly chosen user per trial. Strategy mode keeps
// one key and draws a fresh permutation per trial; key mode draws a fresh
// key (and backdoor) per trial and keeps the strategy.
EstimateWithCI average_guesswork_across_users(const AllocationPlan& plan,
                                              Averaging mode,
                                              const AveragingSetup& setup,
                                              std::uint64_t trials,
                                              std::uint64_t seed);
// Strategy-averaged guesswork against a fixed table.
EstimateWithCI average_guesswork_across_users(
    const TableHash& h, std::span<const BinLabel> user_bins,
    std::uint64_t trials, std::uint64_t seed);

}  // namespace gwlab
