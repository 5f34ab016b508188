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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwlab/attack.hpp"
#include "gwlab/estimate.hpp"
#include "gwlab/hashmodel.hpp"
#include "gwlab/rates.hpp"

namespace gwlab {

inline constexpr std::uint64_t kDefaultSeed = 0x5eedf00d2024ULL;

enum class Mode {
  allocated_online,
  allocated_offline,
  unallocated_online,
  unallocated_offline,
  broken_hash,
  biased_password,
  no_allocation_keyed,
};

std::string mode_name(Mode mode);
Mode parse_mode(const std::string& name);
bool is_allocated(Mode mode);
bool is_offline(Mode mode);

// fast: per-trial budget min(2^n, 64 / P(target)), where P(target) is the
// natural probability of hitting the target bin (or bin set) with one
// guess; the truncated tail beyond it weighs e^{-64}. exhaustive: 2^n.
enum class BudgetPolicy { fast, exhaustive };

struct ExperimentConfig {
  ScenarioParams scenario;  // scenario.n == 0 selects the default rule
  Mode mode = Mode::allocated_online;
  std::uint64_t trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::vector<unsigned> m_sweep;
  StrategyKind strategy = StrategyKind::ascending;
  Averaging averaging = Averaging::key;
  BudgetPolicy budget = BudgetPolicy::fast;
  double rho = 1.0;         // broken-hash moment order
  bool exact = true;        // broken-hash: exact Bernoulli law, no sampling
  bool natural = false;     // allocated modes without the backdoor
  std::optional<std::uint64_t> users;  // overrides the user-count rule
  bool table = false;       // explicit TableHash backend instead of keyed
  std::shared_ptr<const TableHash> fixture;  // fixed table for every trial
  unsigned workers = 0;     // 0: GWLAB_WORKERS, else hardware threads
};

// Throws ConfigError naming the field.
void validate(const ExperimentConfig& cfg, bool sweep = false);

// Default password width: ceil(1.25 m (log2(1/p) + H(s))) for allocated
// and biased modes, ceil(1.25 m log2(1/p)) for the others, at least m+1.
unsigned default_password_width(Mode mode, double s, double p, unsigned m);
std::uint64_t user_count(const ExperimentConfig& cfg, unsigned m);
unsigned resolve_workers(unsigned requested);

struct TrialRecord {
  std::uint64_t trial_seed = 0;
  unsigned m = 0;              // bin width of the experiment
  std::uint64_t user = 0;      // 1-based; 0 when not applicable
  std::uint64_t bin = 0;       // target bin (single-bin attacks)
  std::uint64_t set_size = 1;  // number of target bins
  std::uint64_t guesses = 0;
  bool success = false;
  RaceArm arm = RaceArm::none;
  double value = 0.0;          // sample fed to the estimator
};

struct ExperimentResult {
  EstimateWithCI estimate;
  Mode mode{};
  unsigned m = 0;
  unsigned n = 0;
  std::uint64_t users = 0;
  double realized_min_type = 0.0;  // allocated and biased modes
  RateReport theory;
  std::uint64_t password_arm_wins = 0;
  std::uint64_t hash_arm_wins = 0;
  std::string strategy;

  // (1/m) log2 mean
  double rate() const;
};

using TrialSink = std::function<void(const TrialRecord&, const std::string&)>;

// Trials are recorded per index and reduced in index order, so results do
// not depend on the worker count. `sink` receives records in trial order
// together with the strategy name.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const TrialSink& sink = {});

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct SweepPoint {
  unsigned m = 0;
  unsigned n = 0;
  std::uint64_t users = 0;
  double log2_mean = 0.0;
  double ci_log2 = 0.0;  // half width of the 95% interval on log2 scale
  double realized_min_type = 0.0;
  double theory_rate = 0.0;
  std::optional<double> theory_lower;
  std::optional<double> theory_upper;
  EstimateWithCI estimate;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double fitted_rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theory_mean = 0.0;  // mean of per-point theory rates
};

SweepResult sweep_rate(const ExperimentConfig& cfg, const TrialSink& sink = {});

struct ConcentrationRow {
  double l = 0.0;
  std::uint64_t threshold = 0;  // floor(2^{ml}) guesses
  double empirical = 0.0;       // P(G <= threshold)
  double half_width_95 = 0.0;
  double sigma = 0.0;
  double bound = 0.0;
  double geometric = 0.0;       // exact 1 - (1 - P)^threshold
  std::optional<double> epsilon1;  // 1 - l/(H+D) when in (0,1)
  std::optional<double> exponent_bound;
  bool within_bound = false;      // empirical <= bound + 3 sigma
  bool matches_geometric = false; // |empirical - geometric| <= 3 sigma
};

struct ConcentrationReport {
  unsigned m = 0;
  unsigned n = 0;
  double p = 0.0;
  BinLabel target;
  double mean_exponent = 0.0;  // H(q)+D(q||p)
  std::uint64_t trials = 0;
  std::vector<ConcentrationRow> rows;

  bool all_within_bound() const;
  bool all_match_geometric() const;
};

// Target is the least likely allocated bin; guesses run against the natural
// keyed hash (no backdoor) so the law of G is the truncated geometric.
ConcentrationReport concentration_report(const ExperimentConfig& cfg,
                                         std::span<const double> l_values);

struct MostLikelyPoint {
  unsigned m = 0;
  unsigned n = 0;
  std::uint64_t users = 0;
  unsigned modal_weight = 0;
  double modal_type = 0.0;
  double nearest_type = 0.0;
  double modal_profile_log2_probability = 0.0;
  double modal_share = 0.0;          // unconditioned users in modal shell
  std::uint64_t modal_profile_hits = 0;  // unconditioned trials in profile
  std::uint64_t profile_trials = 0;
  EstimateWithCI offline;
  EstimateWithCI online;
};

struct MostLikelyReport {
  double s = 0.0;
  double p = 0.0;
  std::vector<MostLikelyPoint> points;
  LineFit offline_fit;
  LineFit online_fit;
  double offline_theory = 0.0;  // H(p) - H(1-s)
  double online_theory = 0.0;   // H(p)
  bool modal_matches_nearest = false;
};

// Shell k maximizing the probability that all M users land in distinct
// bins of weight k.
unsigned modal_shell(unsigned m, double p, std::uint64_t users,
                     double* log2_probability = nullptr);

// Users (count floor(2^{H(1-s)m})) hash their own uniform passwords. The
// profile is classified from unconditioned draws; guesswork is measured
// under the conditional law given the modal profile, sampled directly.
MostLikelyReport most_likely_panel(const ExperimentConfig& cfg);

struct KeysizeRow {
  double alpha = 1.0;
  double p0 = 0.5;
  double alpha_roundtrip = 1.0;   // 1 + D(1/2||p0)
  // Key sizes as factor * 2^{exponent}, both in units of m bits.
  double uniform_factor = 1.0;    // alpha
  double biased_factor = 1.0;     // 1
  double exponent = 1.0;          // alpha
  double ratio = 1.0;             // uniform_factor / biased_factor
  double storage_ratio = 1.0;     // H(1/2) + D(1/2||p0)
  double entropy_coded_factor = 1.0;  // H(p0) times the biased key size
};

std::vector<KeysizeRow> keysize_panel(std::span<const double> alphas);

}  // namespace gwlab
