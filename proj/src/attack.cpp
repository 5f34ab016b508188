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

#include "gwlab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "gwlab/errors.hpp"

namespace gwlab {

std::string strategy_kind_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::seeded_permutation:
      return "seeded-permutation";
    case StrategyKind::probability_descending:
      return "probability-descending";
    case StrategyKind::ascending:
    default:
      return "ascending";
  }
}

StrategyKind parse_strategy_kind(const std::string& name) {
  if (name == "ascending" || name == "ascending-index")
    return StrategyKind::ascending;
  if (name == "seeded-permutation" || name == "permutation")
    return StrategyKind::seeded_permutation;
  if (name == "probability-descending") return StrategyKind::probability_descending;
  throw ConfigError("strategy", "unknown strategy '" + name + "'");
}

std::string strategy_name(const GuessStrategy& s) {
  switch (s.kind) {
    case StrategyKind::seeded_permutation:
      return "seeded-permutation:" + std::to_string(s.seed);
    case StrategyKind::probability_descending: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "probability-descending:%.17g",
                    s.theta.value_or(0.5));
      return buf;
    }
    case StrategyKind::ascending:
    default:
      return "ascending";
  }
}

std::string race_arm_name(RaceArm arm) {
  switch (arm) {
    case RaceArm::hash:
      return "hash";
    case RaceArm::password:
      return "password";
    case RaceArm::none:
    default:
      return "none";
  }
}

PermutationOrder::PermutationOrder(unsigned n, std::uint64_t seed)
    : n_(n), rng_(seed) {
  if (n == 0 || n > kMaxPasswordWidth) throw DomainError("n out of range");
  keys_.resize(1024);
  values_.resize(1024);
  stamps_.assign(1024, 0);
}

void PermutationOrder::reset(std::uint64_t seed) {
  rng_ = SplitMix64(seed);
  k_ = 0;
  used_ = 0;
  if (++stamp_ == 0) {
    std::fill(stamps_.begin(), stamps_.end(), 0);
    stamp_ = 1;
  }
}

std::uint64_t PermutationOrder::lookup(std::uint64_t key) const noexcept {
  std::size_t mask = keys_.size() - 1;
  for (std::size_t i = mix64(key) & mask;; i = (i + 1) & mask) {
    if (stamps_[i] != stamp_) return key;
    if (keys_[i] == key) return values_[i];
  }
}

void PermutationOrder::store(std::uint64_t key, std::uint64_t value) {
  if (2 * (used_ + 1) > keys_.size()) grow();
  std::size_t mask = keys_.size() - 1;
  for (std::size_t i = mix64(key) & mask;; i = (i + 1) & mask) {
    if (stamps_[i] != stamp_) {
      stamps_[i] = stamp_;
      keys_[i] = key;
      values_[i] = value;
      ++used_;
      return;
    }
    if (keys_[i] == key) {
      values_[i] = value;
      return;
    }
  }
}

void PermutationOrder::grow() {
  std::vector<std::uint64_t> old_keys = std::move(keys_);
  std::vector<std::uint64_t> old_values = std::move(values_);
  std::vector<std::uint32_t> old_stamps = std::move(stamps_);
  std::uint32_t live = stamp_;
  keys_.assign(old_keys.size() * 2, 0);
  values_.assign(old_keys.size() * 2, 0);
  stamps_.assign(old_keys.size() * 2, 0);
  stamp_ = 1;
  used_ = 0;
  for (std::size_t i = 0; i < old_keys.size(); ++i)
    if (old_stamps[i] == live) store(old_keys[i], old_values[i]);
}

std::uint64_t PermutationOrder::next() {
  // Swap position k with a uniform position j in [k, 2^n) and emit the value
  // landing at k. Position k is never read again, so only j is written.
  std::uint64_t remaining = n_ >= 64 ? 0 - k_ : (std::uint64_t{1} << n_) - k_;
  std::uint64_t j = remaining == 0 ? rng_() : k_ + rng_.below(remaining);
  std::uint64_t at_j = lookup(j);
  if (j != k_) store(j, lookup(k_));
  ++k_;
  return at_j;
}

WeightLayerOrder::WeightLayerOrder(unsigned n, double theta) : n_(n) {
  if (n == 0 || n > kMaxPasswordWidth) throw DomainError("n out of range");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw DomainError("theta must lie in [0,1]");
  if (theta == 0.5) {
    step_ = 0;
    weight_ = 0;
  } else if (theta < 0.5) {
    step_ = 1;
    weight_ = 0;
  } else {
    step_ = -1;
    weight_ = static_cast<int>(n);
  }
  start_layer();
}

void WeightLayerOrder::start_layer() noexcept {
  auto k = static_cast<unsigned>(weight_);
  x_ = low_mask(k);
  last_ = k == 0 ? 0 : x_ << (n_ - k);
  fresh_ = true;
}

std::uint64_t WeightLayerOrder::next() noexcept {
  if (step_ == 0) return x_++;
  if (fresh_) {
    fresh_ = false;
    return x_;
  }
  if (x_ == last_) {
    weight_ += step_;
    if (weight_ < 0 || weight_ > static_cast<int>(n_)) {
      weight_ = step_ > 0 ? 0 : static_cast<int>(n_);
    }
    start_layer();
    fresh_ = false;
    return x_;
  }
  x_ = next_same_popcount(x_);
  return x_;
}

std::uint64_t resolve_budget(unsigned n, std::uint64_t budget) {
  std::uint64_t all = n >= 64 ? ~0ULL : std::uint64_t{1} << n;
  if (budget == kExhaustive) return all;
  if (budget > all)
    throw DomainError("budget " + std::to_string(budget) + " exceeds 2^" +
                      std::to_string(n));
  return budget;
}

namespace {

template <class H>
AttackResult online_impl(const H& h, BinLabel b, const GuessStrategy& strat,
                         std::uint64_t budget) {
  if (b.m != h.m()) throw DomainError("target bin width differs from m");
  budget = resolve_budget(h.n(), budget);
  return with_order(strat, h.n(), [&](auto& order) {
    return attack_bin(h, b.bits, order, budget);
  });
}

template <class H>
AttackResult offline_impl(const H& h, const BinSet& bins,
                          const GuessStrategy& strat, std::uint64_t budget) {
  if (bins.empty()) throw DomainError("target bin set is empty");
  if (bins.m() != h.m()) throw DomainError("bin set width differs from m");
  budget = resolve_budget(h.n(), budget);
  return with_order(strat, h.n(), [&](auto& order) {
    return attack_any(h, bins, order, budget);
  });
}

}  // namespace

AttackResult online_attack(const KeyedHashModel& h, BinLabel b,
                           const GuessStrategy& strat, std::uint64_t budget) {
  return online_impl(h, b, strat, budget);
}

AttackResult online_attack(const TableHash& h, BinLabel b,
                           const GuessStrategy& strat, std::uint64_t budget) {
  return online_impl(h, b, strat, budget);
}

AttackResult offline_attack_any(const KeyedHashModel& h, const BinSet& bins,
                                const GuessStrategy& strat,
                                std::uint64_t budget) {
  return offline_impl(h, bins, strat, budget);
}

AttackResult offline_attack_any(const TableHash& h, const BinSet& bins,
                                const GuessStrategy& strat,
                                std::uint64_t budget) {
  return offline_impl(h, bins, strat, budget);
}

double permutation_average_exact(std::uint64_t N, std::uint64_t L) {
  if (N == 0) throw DomainError("N must be positive");
  if (L > N) throw DomainError("L must not exceed N");
  if (L == 0) return 0.0;
  return (static_cast<double>(N) + 1.0) / (static_cast<double>(L) + 1.0);
}

double broken_hash_moment(const EffectiveDistribution& dist, double rho) {
  if (!(rho >= 0.0)) throw DomainError("rho must be non-negative");
  std::vector<std::uint64_t> order(dist.fractions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) {
                     return dist.fractions[a] > dist.fractions[b];
                   });
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    double x = std::pow(static_cast<double>(i + 1), rho) * dist.fractions[order[i]];
    double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

AttackResult biased_password_race(const KeyedHashModel& h, BinLabel b,
                                  double theta, std::uint64_t password,
                                  std::uint64_t budget) {
  if (b.m != h.m()) throw DomainError("target bin width differs from m");
  if (password > h.max_password())
    throw RangeError("password index outside [0, 2^n)");
  budget = resolve_budget(h.n(), budget);
  WeightLayerOrder order(h.n(), theta);
  return attack_race(h, b.bits, password, order, budget);
}

AttackResult biased_password_attack(const KeyedHashModel& h, BinLabel b,
                                    double theta, std::uint64_t pw_seed,
                                    std::uint64_t budget) {
  std::uint64_t pw = draw_biased_passwords(h.n(), theta, 1, pw_seed)[0];
  return biased_password_race(h, b, theta, pw, budget);
}

EstimateWithCI average_guesswork_across_users(const AllocationPlan& plan,
                                              Averaging mode,
                                              const AveragingSetup& setup,
                                              std::uint64_t trials,
                                              std::uint64_t seed) {
  if (plan.users.empty()) throw DomainError("empty allocation plan");
  if (trials == 0) throw DomainError("trials must be positive");
  MomentAccumulator acc;
  SplitMix64 users(derive_seed(seed, 1));
  auto bins_of = [&](KeyedHashModel& model, std::uint64_t pw_seed) {
    if (!setup.backdoor) return plan.bins();
    return backdoor_install(model, plan, pw_seed).final_bins();
  };
  if (mode == Averaging::strategy) {
    KeyedHashModel model(plan.m, setup.n, setup.p, setup.key_seed);
    std::vector<BinLabel> bins = bins_of(model, derive_seed(seed, 2));
    for (std::uint64_t t = 0; t < trials; ++t) {
      const BinLabel& b = bins[users.below(bins.size())];
      AttackResult r = online_attack(
          model, b, GuessStrategy::permutation(derive_seed(seed, 100 + t)),
          setup.budget);
      acc.add(static_cast<double>(r.guesses), !r.success);
    }
  } else {
    for (std::uint64_t t = 0; t < trials; ++t) {
      std::uint64_t trial_seed = derive_seed(seed, 100 + t);
      KeyedHashModel model(plan.m, setup.n, setup.p, derive_seed(trial_seed, 1));
      std::vector<BinLabel> bins = bins_of(model, derive_seed(trial_seed, 2));
      const BinLabel& b = bins[users.below(bins.size())];
      AttackResult r = online_attack(model, b, setup.strategy, setup.budget);
      acc.add(static_cast<double>(r.guesses), !r.success);
    }
  }
  return acc.estimate();
}

EstimateWithCI average_guesswork_across_users(
    const TableHash& h, std::span<const BinLabel> user_bins,
    std::uint64_t trials, std::uint64_t seed) {
  if (user_bins.empty()) throw DomainError("no users");
  if (trials == 0) throw DomainError("trials must be positive");
  MomentAccumulator acc;
  SplitMix64 users(derive_seed(seed, 1));
  for (std::uint64_t t = 0; t < trials; ++t) {
    const BinLabel& b = user_bins[users.below(user_bins.size())];
    AttackResult r = online_attack(
        h, b, GuessStrategy::permutation(derive_seed(seed, 100 + t)));
    acc.add(static_cast<double>(r.guesses), !r.success);
  }
  return acc.estimate();
}

}  // namespace gwlab
