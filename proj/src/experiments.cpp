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

#include "gwlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "gwlab/allocation.hpp"
#include "gwlab/errors.hpp"
#include "gwlab/infotheory.hpp"

namespace gwlab {
namespace {

// Seed streams derived from a trial seed.
enum Stream : std::uint64_t {
  kKeyStream = 1,
  kPasswordStream = 2,
  kUserStream = 3,
  kPermutationStream = 4,
  kBinStream = 5,
  kFixedStream = 0xf1eed,
};

const char* const kModeNames[] = {
    "allocated-online",   "allocated-offline", "unallocated-online",
    "unallocated-offline", "broken-hash",      "biased-password",
    "no-allocation-keyed"};

std::uint64_t all_passwords(unsigned n) {
  return n >= 64 ? ~0ULL : std::uint64_t{1} << n;
}

template <class Fn>
std::vector<TrialRecord> run_trials(std::uint64_t trials, unsigned workers,
                                    Fn&& fn) {
  std::vector<TrialRecord> out(trials);
  if (workers > trials) workers = static_cast<unsigned>(trials);
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) out[t] = fn(t);
    return out;
  }
  constexpr std::uint64_t kChunk = 16;
  std::atomic<std::uint64_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          std::uint64_t start = next.fetch_add(kChunk);
          if (start >= trials) break;
          std::uint64_t stop = std::min(trials, start + kChunk);
          for (std::uint64_t t = start; t < stop; ++t) out[t] = fn(t);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(trials);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double log2_bin_probability(unsigned m, double p, std::uint64_t bin) {
  return log2_sequence_probability(m, static_cast<unsigned>(std::popcount(bin)),
                                   p);
}

double log2_set_probability(unsigned m, double p, const BinSet& set) {
  double total = 0.0;
  for (std::uint64_t b : set.bins())
    total += std::exp2(log2_bin_probability(m, p, b));
  return std::log2(total);
}

std::uint64_t fast_budget(BudgetPolicy policy, unsigned n, double log2_p) {
  std::uint64_t all = all_passwords(n);
  if (policy == BudgetPolicy::exhaustive) return all;
  double want = std::exp2(6.0 - log2_p);
  if (!(want < std::ldexp(1.0, static_cast<int>(std::min(n, 63u)))))
    return all;
  return std::min<std::uint64_t>(all, static_cast<std::uint64_t>(std::ceil(want)));
}

template <class H>
struct Instance {
  H hash;
  std::vector<BinLabel> bins;
  std::vector<std::uint64_t> passwords;
};

struct Context {
  const ExperimentConfig& cfg;
  unsigned m = 0;
  unsigned n = 0;
  std::uint64_t users = 0;
  std::optional<AllocationPlan> plan;
  std::optional<Instance<KeyedHashModel>> fixed_keyed;
  std::optional<Instance<TableHash>> fixed_table;

  explicit Context(const ExperimentConfig& c) : cfg(c) {}

  bool table_backend() const { return cfg.table || cfg.fixture != nullptr; }

  std::uint64_t fixed_seed(std::uint64_t stream) const {
    return derive_seed(derive_seed(cfg.seed, kFixedStream), stream);
  }

  GuessStrategy strategy_for(std::uint64_t trial_seed) const {
    if (cfg.averaging == Averaging::strategy)
      return GuessStrategy::permutation(
          derive_seed(trial_seed, kPermutationStream));
    switch (cfg.strategy) {
      case StrategyKind::seeded_permutation:
        return GuessStrategy::permutation(fixed_seed(kPermutationStream));
      case StrategyKind::probability_descending:
        return GuessStrategy::probability_descending(
            cfg.scenario.theta.value_or(0.5));
      case StrategyKind::ascending:
      default:
        return GuessStrategy::ascending();
    }
  }
};

void plant(KeyedHashModel& h, const AllocationPlan& plan,
           std::span<const std::uint64_t> pws, std::vector<BinLabel>& bins) {
  bins = backdoor_install_passwords(h, plan, pws).final_bins();
}

void plant(TableHash& h, const AllocationPlan& plan,
           std::span<const std::uint64_t> pws, std::vector<BinLabel>& bins) {
  bins = backdoor_install_table_passwords(h, plan, pws).final_bins();
}

template <class H>
Instance<H> build_instance(const Context& c, H hash, std::uint64_t pw_seed) {
  Instance<H> inst{std::move(hash), {}, {}};
  const Mode mode = c.cfg.mode;
  if (mode == Mode::biased_password) {
    inst.passwords = draw_biased_passwords(c.n, *c.cfg.scenario.theta,
                                           c.users, pw_seed);
    plant(inst.hash, *c.plan, inst.passwords, inst.bins);
  } else if (is_allocated(mode)) {
    if (c.cfg.natural) {
      inst.bins = c.plan->bins();
    } else {
      inst.passwords = draw_passwords(c.n, c.users, pw_seed);
      plant(inst.hash, *c.plan, inst.passwords, inst.bins);
    }
  } else {
    inst.passwords = draw_passwords(c.n, c.users, pw_seed);
    inst.bins.reserve(c.users);
    for (std::uint64_t pw : inst.passwords)
      inst.bins.emplace_back(inst.hash.segment(pw), c.m);
  }
  return inst;
}

template <class H>
TrialRecord attack_instance(const Context& c, const Instance<H>& inst,
                            std::uint64_t trial_seed) {
  TrialRecord rec;
  rec.trial_seed = trial_seed;
  const ExperimentConfig& cfg = c.cfg;
  const double p = cfg.scenario.p;
  GuessStrategy strat = c.strategy_for(trial_seed);
  SplitMix64 pick(derive_seed(trial_seed, kUserStream));
  AttackResult r;
  if (is_offline(cfg.mode)) {
    BinSet set(c.m, std::span<const BinLabel>(inst.bins));
    rec.set_size = set.size();
    if (set.size() == 1) rec.bin = set.bins().front();
    std::uint64_t budget =
        fast_budget(cfg.budget, c.n, log2_set_probability(c.m, p, set));
    r = with_order(strat, c.n, [&](auto& order) {
      return attack_any(inst.hash, set, order, budget);
    });
  } else {
    std::uint64_t u = pick.below(inst.bins.size());
    rec.user = u + 1;
    rec.bin = inst.bins[u].bits;
    std::uint64_t budget =
        fast_budget(cfg.budget, c.n, log2_bin_probability(c.m, p, rec.bin));
    if (cfg.mode == Mode::biased_password) {
      WeightLayerOrder order(c.n, *cfg.scenario.theta);
      r = attack_race(inst.hash, rec.bin, inst.passwords[u], order, budget);
    } else {
      r = with_order(strat, c.n, [&](auto& order) {
        return attack_bin(inst.hash, rec.bin, order, budget);
      });
    }
  }
  rec.guesses = r.guesses;
  rec.success = r.success;
  rec.arm = r.arm;
  rec.value = static_cast<double>(r.guesses);
  return rec;
}

TrialRecord run_trial(const Context& c, std::uint64_t t) {
  const ExperimentConfig& cfg = c.cfg;
  std::uint64_t trial_seed = derive_seed(cfg.seed, t);
  if (c.fixed_keyed) return attack_instance(c, *c.fixed_keyed, trial_seed);
  if (c.fixed_table) return attack_instance(c, *c.fixed_table, trial_seed);
  std::uint64_t key_seed = derive_seed(trial_seed, kKeyStream);
  std::uint64_t pw_seed = derive_seed(trial_seed, kPasswordStream);
  if (c.table_backend()) {
    TableHash h = sample_table_hash(c.m, c.n, cfg.scenario.p, key_seed);
    return attack_instance(c, build_instance(c, std::move(h), pw_seed),
                           trial_seed);
  }
  KeyedHashModel h(c.m, c.n, cfg.scenario.p, key_seed);
  return attack_instance(c, build_instance(c, std::move(h), pw_seed),
                         trial_seed);
}

RateReport theory_for(const ExperimentConfig& cfg, unsigned m, unsigned n,
                      double realized) {
  const double p = cfg.scenario.p;
  const double s = cfg.scenario.s;
  switch (cfg.mode) {
    case Mode::allocated_online: {
      RateReport r = online_rate_allocated(std::max(0.5, realized), p);
      r.scenario = "online-allocated@realized-type";
      return r;
    }
    case Mode::allocated_offline: {
      RateReport r = offline_rate_allocated(std::max(0.5, realized), p);
      r.scenario = "offline-allocated@realized-type";
      return r;
    }
    case Mode::unallocated_online:
      return online_rate_bounds_unallocated(s, p);
    case Mode::unallocated_offline:
      return offline_rate_bounds_unallocated(s, p);
    case Mode::broken_hash:
      return moment_rate_broken_hash(p, cfg.rho);
    case Mode::biased_password: {
      ScenarioParams sc = cfg.scenario;
      sc.m = m;
      sc.n = n;
      return biased_password_rate(sc, realized);
    }
    case Mode::no_allocation_keyed:
    default: {
      RateReport r;
      r.scenario = "no-allocation";
      r.rate = 1.0;
      return r;
    }
  }
}

ExperimentResult run_broken_hash(const ExperimentConfig& cfg, unsigned m,
                                 unsigned n, const TrialSink& sink) {
  ExperimentResult res;
  res.mode = cfg.mode;
  res.m = m;
  res.n = n;
  res.users = 1;
  res.strategy = "probability-descending-bins";
  res.theory = theory_for(cfg, m, n, 0.0);
  if (cfg.exact) {
    EffectiveDistribution d = bernoulli_distribution(m, cfg.scenario.p);
    res.estimate.mean = broken_hash_moment(d, cfg.rho);
    res.estimate.trials = 1;
    return res;
  }
  if (n > kTableCap || m > kTableCap)
    throw ResourceError("sampled broken-hash tables are limited to n, m <= " +
                        std::to_string(kTableCap));
  std::vector<TrialRecord> recs =
      run_trials(cfg.trials, resolve_workers(cfg.workers), [&](std::uint64_t t) {
        TrialRecord rec;
        rec.trial_seed = derive_seed(cfg.seed, t);
        TableHash h = sample_table_hash(
            m, n, cfg.scenario.p, derive_seed(rec.trial_seed, kKeyStream));
        rec.value = broken_hash_moment(effective_distribution(h), cfg.rho);
        rec.success = true;
        return rec;
      });
  MomentAccumulator acc;
  for (TrialRecord& r : recs) {
    r.m = m;
    acc.add(r.value);
    if (sink) sink(r, res.strategy);
  }
  res.estimate = acc.estimate();
  return res;
}

}  // namespace

std::string mode_name(Mode mode) {
  return kModeNames[static_cast<int>(mode)];
}

Mode parse_mode(const std::string& name) {
  for (int i = 0; i < 7; ++i)
    if (name == kModeNames[i]) return static_cast<Mode>(i);
  throw ConfigError("mode", "unknown mode '" + name + "'");
}

bool is_allocated(Mode mode) {
  return mode == Mode::allocated_online || mode == Mode::allocated_offline;
}

bool is_offline(Mode mode) {
  return mode == Mode::allocated_offline || mode == Mode::unallocated_offline;
}

unsigned default_password_width(Mode mode, double s, double p, unsigned m) {
  double per_bit = std::log2(1.0 / p);
  if (is_allocated(mode) || mode == Mode::biased_password)
    per_bit += binary_entropy(s);
  auto n = static_cast<unsigned>(std::ceil(1.25 * m * per_bit - 1e-9));
  return std::clamp(n, m + 1, kMaxPasswordWidth);
}

std::uint64_t user_count(const ExperimentConfig& cfg, unsigned m) {
  if (cfg.users) return *cfg.users;
  if (cfg.mode == Mode::no_allocation_keyed || cfg.mode == Mode::broken_hash)
    return 1;
  return users_for_s(cfg.scenario.s, m);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GWLAB_WORKERS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 4096)
      return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void validate(const ExperimentConfig& cfg, bool sweep) {
  const ScenarioParams& sc = cfg.scenario;
  if (!(sc.s >= 0.5 && sc.s <= 1.0))
    throw ConfigError("s", "must lie in [0.5, 1]");
  if (!(sc.p > 0.0 && sc.p <= 0.5))
    throw ConfigError("p", "must lie in (0, 0.5]");
  if (cfg.trials < 100)
    throw ConfigError("trials", "at least 100 trials are required");
  if (!(cfg.rho >= 0.0)) throw ConfigError("rho", "must be non-negative");
  if (sc.theta && !(*sc.theta > 0.0 && *sc.theta < 1.0))
    throw ConfigError("theta", "must lie in (0, 1)");
  if (cfg.mode == Mode::biased_password && !sc.theta)
    throw ConfigError("theta", "required for mode biased-password");
  if (cfg.strategy == StrategyKind::probability_descending && !sc.theta)
    throw ConfigError("theta", "required for strategy probability-descending");
  std::vector<unsigned> ms = sweep ? cfg.m_sweep : std::vector<unsigned>{sc.m};
  if (sweep) {
    if (ms.size() < 3)
      throw ConfigError("m", "a sweep needs at least 3 values of m");
    for (std::size_t i = 1; i < ms.size(); ++i)
      if (ms[i] <= ms[i - 1])
        throw ConfigError("m", "sweep values must be strictly increasing");
  }
  for (unsigned m : ms) {
    if (m == 0 || m > kMaxBinWidth)
      throw ConfigError("m", "must lie in [1, " + std::to_string(kMaxBinWidth) + "]");
    if (sc.n != 0 && (sc.n <= m || sc.n > kMaxPasswordWidth))
      throw ConfigError("n", "must satisfy m < n <= 64");
    if (cfg.users && (*cfg.users == 0 || (m < 64 && *cfg.users > (1ULL << m))))
      throw ConfigError("users", "must lie in [1, 2^m]");
  }
}

double ExperimentResult::rate() const {
  return std::log2(estimate.mean) / m;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const TrialSink& sink) {
  validate(cfg);
  Context c(cfg);
  c.m = cfg.scenario.m;
  c.users = user_count(cfg, c.m);
  if (cfg.mode == Mode::broken_hash) {
    unsigned n = cfg.scenario.n != 0 ? cfg.scenario.n
                                     : std::min(kTableCap, c.m + 8);
    return run_broken_hash(cfg, c.m, n, sink);
  }
  if (is_allocated(cfg.mode) || cfg.mode == Mode::biased_password)
    c.plan = allocate_bins(c.m, cfg.scenario.p, c.users);
  c.n = cfg.scenario.n;
  if (c.n == 0) {
    double s = c.plan ? c.plan->s_effective : cfg.scenario.s;
    c.n = default_password_width(cfg.mode, s, cfg.scenario.p, c.m);
  }
  if (cfg.fixture) {
    if (cfg.fixture->m() != c.m || cfg.fixture->n() != c.n)
      throw ConfigError("fixture", "table dimensions differ from m, n");
  } else if (cfg.table && (c.n > kTableCap || c.m > kTableCap)) {
    throw ResourceError("explicit tables are limited to n, m <= " +
                        std::to_string(kTableCap) + "; drop --table");
  }

  if (cfg.averaging == Averaging::strategy || cfg.fixture) {
    std::uint64_t key_seed = c.fixed_seed(kKeyStream);
    std::uint64_t pw_seed = c.fixed_seed(kPasswordStream);
    if (cfg.fixture)
      c.fixed_table = build_instance(c, TableHash(*cfg.fixture), pw_seed);
    else if (cfg.table)
      c.fixed_table = build_instance(
          c, sample_table_hash(c.m, c.n, cfg.scenario.p, key_seed), pw_seed);
    else
      c.fixed_keyed = build_instance(
          c, KeyedHashModel(c.m, c.n, cfg.scenario.p, key_seed), pw_seed);
  }

  std::vector<TrialRecord> recs =
      run_trials(cfg.trials, resolve_workers(cfg.workers),
                 [&](std::uint64_t t) { return run_trial(c, t); });

  ExperimentResult res;
  res.mode = cfg.mode;
  res.m = c.m;
  res.n = c.n;
  res.users = c.users;
  if (cfg.mode == Mode::biased_password)
    res.strategy = strategy_name(
        GuessStrategy::probability_descending(*cfg.scenario.theta));
  else if (cfg.averaging == Averaging::strategy)
    res.strategy = "seeded-permutation:per-trial";
  else
    res.strategy = strategy_name(c.strategy_for(0));
  MomentAccumulator acc;
  for (TrialRecord& r : recs) {
    r.m = c.m;
    acc.add(r.value, !r.success);
    if (r.arm == RaceArm::password) ++res.password_arm_wins;
    if (r.arm == RaceArm::hash) ++res.hash_arm_wins;
    if (sink) {
      std::string name = cfg.mode == Mode::biased_password
                             ? res.strategy
                             : strategy_name(c.strategy_for(r.trial_seed));
      sink(r, name);
    }
  }
  res.estimate = acc.estimate();
  res.realized_min_type = c.plan ? c.plan->realized_min_type() : cfg.scenario.s;
  res.theory = theory_for(cfg, c.m, c.n, res.realized_min_type);
  return res;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("a line fit needs at least two paired points");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("line fit needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

SweepResult sweep_rate(const ExperimentConfig& cfg, const TrialSink& sink) {
  validate(cfg, true);
  SweepResult out;
  std::vector<double> xs, ys;
  for (unsigned m : cfg.m_sweep) {
    ExperimentConfig point = cfg;
    point.scenario.m = m;
    point.seed = derive_seed(cfg.seed, m);
    ExperimentResult r = run_experiment(point, sink);
    if (!(r.estimate.mean > 0.0))
      throw DomainError("sweep point m=" + std::to_string(m) +
                        " has zero mean guesswork; raise n or the budget");
    SweepPoint sp;
    sp.m = m;
    sp.n = r.n;
    sp.users = r.users;
    sp.log2_mean = std::log2(r.estimate.mean);
    sp.ci_log2 = r.estimate.half_width_95 / (r.estimate.mean * std::log(2.0));
    sp.realized_min_type = r.realized_min_type;
    sp.theory_rate = r.theory.rate;
    sp.theory_lower = r.theory.lower;
    sp.theory_upper = r.theory.upper;
    sp.estimate = r.estimate;
    out.points.push_back(sp);
    xs.push_back(m);
    ys.push_back(sp.log2_mean);
    out.theory_mean += sp.theory_rate;
  }
  LineFit f = fit_line(xs, ys);
  out.fitted_rate = f.slope;
  out.intercept = f.intercept;
  out.r_squared = f.r_squared;
  out.theory_mean /= static_cast<double>(out.points.size());
  return out;
}

bool ConcentrationReport::all_within_bound() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ConcentrationRow& r) { return r.within_bound; });
}

bool ConcentrationReport::all_match_geometric() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConcentrationRow& r) {
    return r.matches_geometric;
  });
}

ConcentrationReport concentration_report(const ExperimentConfig& cfg,
                                         std::span<const double> l_values) {
  validate(cfg);
  if (!is_allocated(cfg.mode))
    throw ConfigError("mode", "concentration needs an allocated mode");
  if (l_values.empty()) throw ConfigError("l", "at least one l is required");
  const unsigned m = cfg.scenario.m;
  const double p = cfg.scenario.p;
  AllocationPlan plan = allocate_bins(m, p, cfg.users.value_or(1));
  ConcentrationReport rep;
  rep.m = m;
  rep.p = p;
  rep.target = plan.users.front().bin;
  rep.n = cfg.scenario.n != 0
              ? cfg.scenario.n
              : default_password_width(cfg.mode, plan.s_effective, p, m);
  rep.trials = cfg.trials;
  const double q = rep.target.type_fraction();
  rep.mean_exponent = cross_entropy_identity(q, p);
  const double log2_p = log2_sequence_probability(m, rep.target.popcount(), p);

  std::uint64_t budget = 0;
  for (double l : l_values) {
    if (!(l * m <= rep.n))
      throw ConfigError("l", "every l must satisfy l <= n/m");
    double t = std::floor(std::exp2(l * m));
    budget = std::max<std::uint64_t>(budget, static_cast<std::uint64_t>(t));
  }
  budget = std::min(budget, all_passwords(rep.n));
  GuessStrategy strat = GuessStrategy::ascending();
  std::vector<TrialRecord> recs = run_trials(
      cfg.trials, resolve_workers(cfg.workers), [&](std::uint64_t t) {
        TrialRecord rec;
        rec.trial_seed = derive_seed(cfg.seed, t);
        KeyedHashModel h(m, rep.n, p, derive_seed(rec.trial_seed, kKeyStream));
        AttackResult r = with_order(strat, rep.n, [&](auto& order) {
          return attack_bin(h, rep.target.bits, order, budget);
        });
        rec.bin = rep.target.bits;
        rec.guesses = r.guesses;
        rec.success = r.success;
        return rec;
      });

  const double N = static_cast<double>(cfg.trials);
  for (double l : l_values) {
    ConcentrationRow row;
    row.l = l;
    row.threshold = static_cast<std::uint64_t>(
        std::min(std::floor(std::exp2(l * m)), static_cast<double>(budget)));
    std::uint64_t hits = 0;
    for (const TrialRecord& r : recs)
      if (r.success && r.guesses <= row.threshold) ++hits;
    row.empirical = static_cast<double>(hits) / N;
    row.sigma = std::sqrt(row.empirical * (1.0 - row.empirical) / N);
    row.half_width_95 = 1.96 * row.sigma;
    row.bound = concentration_bound(m, q, p, l);
    row.geometric = -std::expm1(static_cast<double>(row.threshold) *
                                std::log1p(-std::exp2(log2_p)));
    double eps = 1.0 - l / rep.mean_exponent;
    if (eps > 0.0 && eps < 1.0) {
      row.epsilon1 = eps;
      row.exponent_bound = concentration_exponent_allocated(eps, p);
    }
    row.within_bound = row.empirical <= row.bound + 3.0 * row.sigma;
    double geo_sigma = std::sqrt(row.geometric * (1.0 - row.geometric) / N);
    row.matches_geometric =
        std::fabs(row.empirical - row.geometric) <= 3.0 * geo_sigma + 1e-12;
    rep.rows.push_back(row);
  }
  return rep;
}

unsigned modal_shell(unsigned m, double p, std::uint64_t users,
                     double* log2_probability) {
  if (users == 0) throw DomainError("users must be positive");
  double best = -std::numeric_limits<double>::infinity();
  unsigned best_k = 0;
  const double M = static_cast<double>(users);
  for (unsigned k = 0; k <= m; ++k) {
    double ln_size = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                     std::lgamma(m - k + 1.0);
    double size = std::round(std::exp(ln_size));
    if (size < M) continue;
    double ln_p = log2_sequence_probability(m, k, p) * std::log(2.0);
    double v = M * (ln_size + ln_p);
    for (std::uint64_t j = 1; j < users; ++j)
      v += std::log1p(-static_cast<double>(j) / size);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  if (!std::isfinite(best))
    throw DomainError("no weight shell holds " + std::to_string(users) +
                      " distinct bins");
  if (log2_probability) *log2_probability = best / std::log(2.0);
  return best_k;
}

namespace {

std::uint64_t random_weight_label(SplitMix64& rng, unsigned m, unsigned k) {
  unsigned pos[64];
  for (unsigned i = 0; i < m; ++i) pos[i] = i;
  std::uint64_t label = 0;
  for (unsigned i = 0; i < k; ++i) {
    unsigned j = i + static_cast<unsigned>(rng.below(m - i));
    std::swap(pos[i], pos[j]);
    label |= std::uint64_t{1} << pos[i];
  }
  return label;
}

template <class T>
std::vector<T> distinct_draws(std::uint64_t count,
                              const std::function<T()>& draw) {
  std::vector<T> out;
  out.reserve(count);
  std::vector<T> sorted;
  while (out.size() < count) {
    T v = draw();
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it != sorted.end() && *it == v) continue;
    sorted.insert(it, v);
    out.push_back(v);
  }
  return out;
}

}  // namespace

MostLikelyReport most_likely_panel(const ExperimentConfig& cfg) {
  ExperimentConfig probe = cfg;
  if (probe.m_sweep.empty()) probe.m_sweep = {cfg.scenario.m};
  validate(probe, probe.m_sweep.size() >= 3);
  if (cfg.mode != Mode::unallocated_online &&
      cfg.mode != Mode::unallocated_offline)
    throw ConfigError("mode", "the most-likely panel needs an unallocated mode");
  const double s = cfg.scenario.s;
  const double p = cfg.scenario.p;
  MostLikelyReport rep;
  rep.s = s;
  rep.p = p;
  rep.offline_theory = most_likely_rate_offline(s, p).rate;
  rep.online_theory = most_likely_rate_online(p).rate;
  rep.modal_matches_nearest = true;
  const unsigned workers = resolve_workers(cfg.workers);
  std::vector<double> xs, off_y, on_y;
  for (unsigned m : probe.m_sweep) {
    MostLikelyPoint pt;
    pt.m = m;
    pt.users = cfg.users.value_or(users_most_likely(s, m));
    pt.n = cfg.scenario.n != 0
               ? cfg.scenario.n
               : default_password_width(Mode::unallocated_offline, s, p, m);
    pt.modal_weight = modal_shell(m, p, pt.users, &pt.modal_profile_log2_probability);
    pt.modal_type = static_cast<double>(pt.modal_weight) / m;
    pt.nearest_type = std::round(p * m) / m;
    if (std::fabs(pt.modal_type - pt.nearest_type) > 1e-12)
      rep.modal_matches_nearest = false;
    const std::uint64_t base = derive_seed(cfg.seed, m);
    const unsigned k = pt.modal_weight;
    const std::uint64_t M = pt.users;

    // Unconditioned profiles: where do M uniform passwords land?
    pt.profile_trials = cfg.trials;
    std::vector<TrialRecord> prof = run_trials(
        cfg.trials, workers, [&](std::uint64_t t) {
          TrialRecord rec;
          rec.trial_seed = derive_seed(derive_seed(base, 1), t);
          KeyedHashModel h(m, pt.n, p, derive_seed(rec.trial_seed, kKeyStream));
          std::vector<std::uint64_t> pws = draw_passwords(
              pt.n, M, derive_seed(rec.trial_seed, kPasswordStream));
          std::vector<std::uint64_t> bins;
          std::uint64_t in_shell = 0;
          for (std::uint64_t pw : pws) {
            std::uint64_t b = h.natural_segment(pw);
            bins.push_back(b);
            if (static_cast<unsigned>(std::popcount(b)) == k) ++in_shell;
          }
          std::sort(bins.begin(), bins.end());
          bool distinct =
              std::adjacent_find(bins.begin(), bins.end()) == bins.end();
          rec.value = static_cast<double>(in_shell) / static_cast<double>(M);
          rec.success = distinct && in_shell == M;
          return rec;
        });
    double share = 0.0;
    for (const TrialRecord& r : prof) {
      share += r.value;
      if (r.success) ++pt.modal_profile_hits;
    }
    pt.modal_share = share / static_cast<double>(cfg.trials);

    // Conditional law given the modal profile: M distinct bins uniform in
    // shell k, planted at M distinct uniform passwords.
    const double log2_pk = log2_sequence_probability(m, k, p);
    const double log2_set = log2_pk + std::log2(static_cast<double>(M));
    const std::uint64_t on_budget = fast_budget(cfg.budget, pt.n, log2_pk);
    const std::uint64_t off_budget = fast_budget(cfg.budget, pt.n, log2_set);
    std::vector<TrialRecord> cond = run_trials(
        cfg.trials, workers, [&](std::uint64_t t) {
          std::uint64_t ts = derive_seed(derive_seed(base, 2), t);
          KeyedHashModel h(m, pt.n, p, derive_seed(ts, kKeyStream));
          SplitMix64 bin_rng(derive_seed(ts, kBinStream));
          SplitMix64 pw_rng(derive_seed(ts, kPasswordStream));
          std::vector<std::uint64_t> bins = distinct_draws<std::uint64_t>(
              M, [&] { return random_weight_label(bin_rng, m, k); });
          std::vector<std::uint64_t> pws = distinct_draws<std::uint64_t>(
              M, [&] { return pw_rng.bits(pt.n); });
          for (std::uint64_t i = 0; i < M; ++i)
            h.add_override(pws[i], BinLabel(bins[i], m));
          BinSet set(m, std::span<const std::uint64_t>(bins));
          AscendingOrder off_order;
          AttackResult off = attack_any(h, set, off_order, off_budget);
          SplitMix64 pick(derive_seed(ts, kUserStream));
          std::uint64_t u = pick.below(M);
          AscendingOrder on_order;
          AttackResult on = attack_bin(h, bins[u], on_order, on_budget);
          TrialRecord rec;
          rec.trial_seed = ts;
          rec.user = u + 1;
          rec.bin = bins[u];
          rec.set_size = M;
          rec.guesses = on.guesses;
          rec.success = on.success;
          rec.value = static_cast<double>(off.guesses);  // 0 on failure
          return rec;
        });
    MomentAccumulator off_acc, on_acc;
    for (const TrialRecord& r : cond) {
      off_acc.add(r.value, r.value == 0.0);
      on_acc.add(static_cast<double>(r.guesses), !r.success);
    }
    pt.offline = off_acc.estimate();
    pt.online = on_acc.estimate();
    xs.push_back(m);
    off_y.push_back(std::log2(pt.offline.mean));
    on_y.push_back(std::log2(pt.online.mean));
    rep.points.push_back(pt);
  }
  if (xs.size() >= 2) {
    rep.offline_fit = fit_line(xs, off_y);
    rep.online_fit = fit_line(xs, on_y);
  }
  return rep;
}

std::vector<KeysizeRow> keysize_panel(std::span<const double> alphas) {
  std::vector<KeysizeRow> rows;
  for (double alpha : alphas) {
    if (!(alpha >= 1.0)) throw ConfigError("alpha", "every alpha must be >= 1");
    KeysizeRow r;
    r.alpha = alpha;
    r.p0 = solve_bias_for_alpha(alpha);
    r.alpha_roundtrip = 1.0 + kl_divergence(0.5, r.p0);
    r.exponent = alpha;
    r.uniform_factor = alpha;
    r.biased_factor = 1.0;
    r.ratio = r.uniform_factor / r.biased_factor;
    r.storage_ratio = key_size_ratio(0.5, r.p0);
    r.entropy_coded_factor = binary_entropy(r.p0);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace gwlab
