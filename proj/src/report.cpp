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

#include "gwlab/report.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace gwlab {
namespace {

using nlohmann::json;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_text(const std::optional<double>& v) {
  return v ? fmt("%.4f", *v) : std::string("-");
}

std::string csv_opt(const std::optional<double>& v) {
  return v ? fmt("%.17g", *v) : std::string();
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

json to_json(const RateReport& r) {
  json j = {{"scenario", r.scenario},
            {"rate", std::isnan(r.rate) ? json(nullptr) : json(r.rate)},
            {"lower", opt(r.lower)},
            {"upper", opt(r.upper)},
            {"units", "bits_per_m"}};
  j["region"] = r.region ? json(*r.region) : json(nullptr);
  return j;
}

json to_json(const EstimateWithCI& e) {
  return {{"mean", e.mean},
          {"half_width_95", e.half_width_95},
          {"trials", e.trials},
          {"failures", e.failures},
          {"units", "guesses"}};
}

json to_json(const ExperimentResult& r) {
  json j = {{"mode", mode_name(r.mode)},
            {"m", r.m},
            {"n", r.n},
            {"users", r.users},
            {"strategy", r.strategy},
            {"estimate", to_json(r.estimate)},
            {"rate", {{"value", r.estimate.mean > 0 ? json(r.rate()) : json(nullptr)},
                      {"units", "bits_per_m"}}},
            {"realized_min_type", r.realized_min_type},
            {"theory", to_json(r.theory)}};
  if (r.mode == Mode::biased_password)
    j["arms"] = {{"password", r.password_arm_wins}, {"hash", r.hash_arm_wins}};
  return j;
}

json to_json(const SweepResult& r) {
  json pts = json::array();
  for (const SweepPoint& p : r.points)
    pts.push_back({{"m", p.m},
                   {"n", p.n},
                   {"users", p.users},
                   {"estimate", to_json(p.estimate)},
                   {"log2_mean", p.log2_mean},
                   {"ci_log2", p.ci_log2},
                   {"realized_min_type", p.realized_min_type},
                   {"theory_rate", p.theory_rate},
                   {"theory_lower", opt(p.theory_lower)},
                   {"theory_upper", opt(p.theory_upper)},
                   {"units", {{"log2_mean", "log2_guesses"},
                              {"theory_rate", "bits_per_m"}}}});
  return {{"points", pts},
          {"fitted_rate", r.fitted_rate},
          {"intercept", r.intercept},
          {"r_squared", r.r_squared},
          {"theory_mean", r.theory_mean},
          {"units", {{"fitted_rate", "bits_per_m"},
                     {"theory_mean", "bits_per_m"},
                     {"intercept", "log2_guesses"}}}};
}

json to_json(const ConcentrationReport& r) {
  json rows = json::array();
  for (const ConcentrationRow& row : r.rows)
    rows.push_back({{"l", row.l},
                    {"threshold", row.threshold},
                    {"empirical", row.empirical},
                    {"half_width_95", row.half_width_95},
                    {"sigma", row.sigma},
                    {"bound", row.bound},
                    {"geometric", row.geometric},
                    {"epsilon1", opt(row.epsilon1)},
                    {"exponent_bound", opt(row.exponent_bound)},
                    {"within_bound", row.within_bound},
                    {"matches_geometric", row.matches_geometric},
                    {"units", {{"l", "bits_per_m"},
                               {"threshold", "guesses"},
                               {"exponent_bound", "bits_per_m"},
                               {"empirical", "probability"}}}});
  return {{"m", r.m},
          {"n", r.n},
          {"p", r.p},
          {"target", r.target.to_string()},
          {"mean_exponent", r.mean_exponent},
          {"trials", r.trials},
          {"rows", rows},
          {"all_within_bound", r.all_within_bound()},
          {"all_match_geometric", r.all_match_geometric()},
          {"units", {{"mean_exponent", "bits_per_m"}}}};
}

json to_json(const MostLikelyReport& r) {
  json pts = json::array();
  for (const MostLikelyPoint& p : r.points)
    pts.push_back({{"m", p.m},
                   {"n", p.n},
                   {"users", p.users},
                   {"modal_weight", p.modal_weight},
                   {"modal_type", p.modal_type},
                   {"nearest_type", p.nearest_type},
                   {"modal_profile_log2_probability",
                    p.modal_profile_log2_probability},
                   {"modal_share", p.modal_share},
                   {"modal_profile_hits", p.modal_profile_hits},
                   {"profile_trials", p.profile_trials},
                   {"offline", to_json(p.offline)},
                   {"online", to_json(p.online)}});
  return {{"s", r.s},
          {"p", r.p},
          {"points", pts},
          {"offline_slope", r.offline_fit.slope},
          {"online_slope", r.online_fit.slope},
          {"offline_theory", r.offline_theory},
          {"online_theory", r.online_theory},
          {"modal_matches_nearest", r.modal_matches_nearest},
          {"units", {{"offline_slope", "bits_per_m"},
                     {"online_slope", "bits_per_m"},
                     {"offline_theory", "bits_per_m"},
                     {"online_theory", "bits_per_m"}}}};
}

json to_json(std::span<const KeysizeRow> rows) {
  json out = json::array();
  for (const KeysizeRow& r : rows)
    out.push_back({{"alpha", r.alpha},
                   {"p0", r.p0},
                   {"alpha_roundtrip", r.alpha_roundtrip},
                   {"uniform_key", {{"factor", r.uniform_factor},
                                    {"exponent", r.exponent},
                                    {"units", "m_bits_times_2^(exponent*m)"}}},
                   {"biased_key", {{"factor", r.biased_factor},
                                   {"exponent", r.exponent},
                                   {"units", "m_bits_times_2^(exponent*m)"}}},
                   {"ratio", r.ratio},
                   {"storage_ratio", r.storage_ratio},
                   {"entropy_coded_factor", r.entropy_coded_factor},
                   {"units", {{"ratio", "dimensionless"},
                              {"storage_ratio", "bits_per_m"},
                              {"entropy_coded_factor", "bits_per_key_bit"}}}});
  return out;
}

json to_json(std::span<const Table1Cell> cells) {
  json out = json::array();
  for (const Table1Cell& c : cells)
    out.push_back({{"p", c.p},
                   {"one_minus_s", c.one_minus_s},
                   {"column", c.column},
                   {"computed", c.computed},
                   {"published", c.published},
                   {"published_decimals", c.decimals},
                   {"delta", c.delta()},
                   {"raw_delta", c.raw_delta()},
                   {"tolerance", c.tolerance},
                   {"ok", c.ok()},
                   {"units", "bits_per_m"}});
  return out;
}

json to_json(const ExperimentConfig& cfg) {
  json j = {{"mode", mode_name(cfg.mode)},
            {"s", cfg.scenario.s},
            {"p", cfg.scenario.p},
            {"m", cfg.scenario.m},
            {"n", cfg.scenario.n},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"strategy", strategy_kind_name(cfg.strategy)},
            {"averaging", cfg.averaging == Averaging::key ? "key" : "strategy"},
            {"budget", cfg.budget == BudgetPolicy::fast ? "fast" : "exhaustive"},
            {"rho", cfg.rho},
            {"exact", cfg.exact},
            {"natural", cfg.natural},
            {"table", cfg.table}};
  j["theta"] = opt(cfg.scenario.theta);
  j["users"] = cfg.users ? json(*cfg.users) : json(nullptr);
  j["m_sweep"] = cfg.m_sweep;
  return j;
}

std::string render_text(std::span<const RateReport> rates) {
  std::string out = fmt("%-28s %10s %10s %10s  %s\n", "scenario", "rate",
                        "lower", "upper", "region");
  for (const RateReport& r : rates)
    out += fmt("%-28s %10s %10s %10s  %s\n", r.scenario.c_str(),
               std::isnan(r.rate) ? "-" : fmt("%.4f", r.rate).c_str(),
               opt_text(r.lower).c_str(), opt_text(r.upper).c_str(),
               r.region ? r.region->c_str() : "-");
  out += "(rates in bits per m)\n";
  return out;
}

std::string render_text(const ExperimentResult& r) {
  std::string out;
  out += fmt("mode %s  m=%u n=%u users=%llu strategy=%s\n",
             mode_name(r.mode).c_str(), r.m, r.n,
             static_cast<unsigned long long>(r.users), r.strategy.c_str());
  out += fmt("mean guesses   %.6g +/- %.3g (95%%), trials %llu, failures %llu\n",
             r.estimate.mean, r.estimate.half_width_95,
             static_cast<unsigned long long>(r.estimate.trials),
             static_cast<unsigned long long>(r.estimate.failures));
  if (r.estimate.mean > 0)
    out += fmt("rate           %.4f bits per m (log2(mean)/m)\n", r.rate());
  out += fmt("theory         %s = %s\n", r.theory.scenario.c_str(),
             std::isnan(r.theory.rate) ? "undefined"
                                       : fmt("%.4f", r.theory.rate).c_str());
  if (r.theory.lower)
    out += fmt("theory bounds  [%.4f, %.4f]\n", *r.theory.lower, *r.theory.upper);
  if (r.mode == Mode::biased_password)
    out += fmt("race arms      password %llu, hash %llu\n",
               static_cast<unsigned long long>(r.password_arm_wins),
               static_cast<unsigned long long>(r.hash_arm_wins));
  return out;
}

std::string render_text(const SweepResult& r) {
  std::string out = fmt("%4s %4s %8s %12s %10s %10s %10s\n", "m", "n", "users",
                        "mean", "log2_mean", "ci_log2", "theory");
  for (const SweepPoint& p : r.points)
    out += fmt("%4u %4u %8llu %12.6g %10.4f %10.4f %10.4f\n", p.m, p.n,
               static_cast<unsigned long long>(p.users), p.estimate.mean,
               p.log2_mean, p.ci_log2, p.theory_rate);
  out += fmt("fitted rate %.4f bits per m (intercept %.3f, r^2 %.4f); "
             "mean theory %.4f\n",
             r.fitted_rate, r.intercept, r.r_squared, r.theory_mean);
  return out;
}

std::string render_text(const ConcentrationReport& r) {
  std::string out =
      fmt("target %s  m=%u n=%u p=%.4g  H+D=%.4f  trials=%llu\n",
          r.target.to_string().c_str(), r.m, r.n, r.p, r.mean_exponent,
          static_cast<unsigned long long>(r.trials));
  out += fmt("%8s %12s %10s %10s %10s %10s %6s %6s\n", "l", "threshold",
             "empirical", "+/-95%", "bound", "geometric", "bound", "geo");
  for (const ConcentrationRow& row : r.rows)
    out += fmt("%8.4f %12llu %10.6f %10.6f %10.6f %10.6f %6s %6s\n", row.l,
               static_cast<unsigned long long>(row.threshold), row.empirical,
               row.half_width_95, row.bound, row.geometric,
               yes_no(row.within_bound), yes_no(row.matches_geometric));
  return out;
}

std::string render_text(const MostLikelyReport& r) {
  std::string out =
      fmt("%4s %4s %6s %6s %8s %10s %12s %12s\n", "m", "n", "users", "modal",
          "nearest", "share", "offline", "online");
  for (const MostLikelyPoint& p : r.points)
    out += fmt("%4u %4u %6llu %6.4f %8.4f %10.4f %12.6g %12.6g\n", p.m, p.n,
               static_cast<unsigned long long>(p.users), p.modal_type,
               p.nearest_type, p.modal_share, p.offline.mean, p.online.mean);
  out += fmt("offline slope %.4f (theory %.4f); online slope %.4f (theory "
             "%.4f); modal type is nearest: %s\n",
             r.offline_fit.slope, r.offline_theory, r.online_fit.slope,
             r.online_theory, yes_no(r.modal_matches_nearest));
  return out;
}

std::string render_text(std::span<const KeysizeRow> rows) {
  std::string out = fmt("%8s %12s %12s %10s %10s %12s\n", "alpha", "p0",
                        "1+D(1/2||p0)", "ratio", "storage", "H(p0)");
  for (const KeysizeRow& r : rows)
    out += fmt("%8.4f %12.8f %12.8f %10.6f %10.6f %12.8f\n", r.alpha, r.p0,
               r.alpha_roundtrip, r.ratio, r.storage_ratio,
               r.entropy_coded_factor);
  out += "uniform key alpha*m*2^(alpha*m) bits, biased key m*2^(alpha*m) bits\n";
  return out;
}

std::string render_text(std::span<const Table1Cell> cells) {
  std::string out = fmt("%6s %6s %-12s %10s %10s %10s %8s %4s\n", "p", "1-s",
                        "column", "computed", "published", "delta", "tol", "ok");
  for (const Table1Cell& c : cells)
    out += fmt("%6.4g %6.4g %-12s %10.4f %10.*f %10.6f %8.1e %4s\n", c.p,
               c.one_minus_s, c.column.c_str(), c.computed, c.decimals,
               c.published, c.delta(), c.tolerance, yes_no(c.ok()));
  return out;
}

std::string render_csv(const SweepResult& r) {
  std::string out = "m,log2_mean,ci\n";
  for (const SweepPoint& p : r.points)
    out += fmt("%u,%.17g,%.17g\n", p.m, p.log2_mean, p.ci_log2);
  return out;
}

std::string render_csv(std::span<const RateReport> rates) {
  std::string out = "scenario,rate,lower,upper,region\n";
  for (const RateReport& r : rates)
    out += r.scenario + "," + (std::isnan(r.rate) ? "" : fmt("%.17g", r.rate)) +
           "," + csv_opt(r.lower) + "," + csv_opt(r.upper) + "," +
           (r.region ? *r.region : "") + "\n";
  return out;
}

std::string render_csv(const ExperimentResult& r) {
  return "mode,m,n,users,mean,half_width_95,trials,failures,rate,theory\n" +
         fmt("%s,%u,%u,%llu,%.17g,%.17g,%llu,%llu,%.17g,%.17g\n",
             mode_name(r.mode).c_str(), r.m, r.n,
             static_cast<unsigned long long>(r.users), r.estimate.mean,
             r.estimate.half_width_95,
             static_cast<unsigned long long>(r.estimate.trials),
             static_cast<unsigned long long>(r.estimate.failures),
             r.estimate.mean > 0 ? r.rate() : 0.0, r.theory.rate);
}

std::string render_csv(const ConcentrationReport& r) {
  std::string out =
      "l,threshold,empirical,half_width_95,bound,geometric,within_bound,"
      "matches_geometric\n";
  for (const ConcentrationRow& row : r.rows)
    out += fmt("%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%d,%d\n", row.l,
               static_cast<unsigned long long>(row.threshold), row.empirical,
               row.half_width_95, row.bound, row.geometric, row.within_bound,
               row.matches_geometric);
  return out;
}

std::string render_csv(const MostLikelyReport& r) {
  std::string out =
      "m,n,users,modal_type,nearest_type,modal_share,offline_log2_mean,"
      "online_log2_mean\n";
  for (const MostLikelyPoint& p : r.points)
    out += fmt("%u,%u,%llu,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.m, p.n,
               static_cast<unsigned long long>(p.users), p.modal_type,
               p.nearest_type, p.modal_share, std::log2(p.offline.mean),
               std::log2(p.online.mean));
  return out;
}

std::string render_csv(std::span<const KeysizeRow> rows) {
  std::string out = "alpha,p0,alpha_roundtrip,ratio,storage_ratio,entropy_coded_factor\n";
  for (const KeysizeRow& r : rows)
    out += fmt("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.alpha, r.p0,
               r.alpha_roundtrip, r.ratio, r.storage_ratio,
               r.entropy_coded_factor);
  return out;
}

std::string render_csv(std::span<const Table1Cell> cells) {
  std::string out = "p,one_minus_s,column,computed,published,delta,tolerance,ok\n";
  for (const Table1Cell& c : cells)
    out += fmt("%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%d\n", c.p,
               c.one_minus_s, c.column.c_str(), c.computed, c.published,
               c.delta(), c.tolerance, c.ok());
  return out;
}

std::string trial_log_header() {
  return "trial_seed,user,bin,strategy,guesses,success,arm\n";
}

std::string trial_log_line(const TrialRecord& r, const std::string& strategy) {
  std::string bin = r.set_size > 1
                        ? "set:" + std::to_string(r.set_size)
                        : BinLabel(r.bin, r.m).to_string();
  return fmt("%llu,%llu,%s,%s,%llu,%d,%s\n",
             static_cast<unsigned long long>(r.trial_seed),
             static_cast<unsigned long long>(r.user), bin.c_str(),
             strategy.c_str(), static_cast<unsigned long long>(r.guesses),
             r.success ? 1 : 0, race_arm_name(r.arm).c_str());
}

}  // namespace gwlab
