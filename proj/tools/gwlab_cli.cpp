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

// gwlab: rates, simulations, sweeps, concentration checks and key-size
// panels. Exit codes: 0 ok, 2 invalid input, 3 failed --assert, 4 resource
// cap exceeded.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwlab/errors.hpp"
#include "gwlab/experiments.hpp"
#include "gwlab/infotheory.hpp"
#include "gwlab/rates.hpp"
#include "gwlab/report.hpp"
#include "gwlab/serialize.hpp"

namespace {

using nlohmann::json;
using namespace gwlab;

constexpr int kExitValidation = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitResource = 4;

struct Flags {
  double s = 0.9;
  double p = 0.3;
  std::string m = "8";
  unsigned n = 0;
  double theta = 0.0;
  std::uint64_t trials = 10000;
  std::string seed = "default";
  std::string mode = "allocated-online";
  std::string strategy = "ascending";
  std::string averaging = "key";
  std::string budget = "fast";
  double rho = 1.0;
  bool sampled = false;
  bool natural = false;
  std::uint64_t users = 0;
  bool table = false;
  bool keyed = false;
  unsigned workers = 0;
  std::string format = "text";
  std::vector<std::string> asserts;
  std::string trial_log;
  std::string panel = "rate";
  std::string l = "0.2,0.4,0.6,0.8,1.0,1.2";
  std::string alpha = "1,1.25,1.5,2,3";
};

struct Assertion {
  std::string quantity;
  double target = 0.0;
  double tolerance = 0.0;
  std::string text;
};

// "rate≈1±0.15" or the ASCII form "rate~1+-0.15".
Assertion parse_assertion(const std::string& text) {
  static const std::regex re(
      R"(^\s*([A-Za-z_]+)\s*(?:\xE2\x89\x88|~)\s*([-+0-9.eE]+)\s*(?:\xC2\xB1|\+-|\+/-)\s*([0-9.eE+-]+)\s*$)");
  std::smatch mt;
  if (!std::regex_match(text, mt, re))
    throw ConfigError("assert", "expected QUANTITY~VALUE+-TOL, got '" + text + "'");
  Assertion a;
  a.quantity = mt[1];
  a.target = std::stod(mt[2]);
  a.tolerance = std::stod(mt[3]);
  a.text = text;
  if (!(a.tolerance >= 0.0)) throw ConfigError("assert", "tolerance must be >= 0");
  return a;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* field) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item, &used));
      } else {
        long long v = std::stoll(item, &used);
        if (v < 0) throw std::invalid_argument("negative");
        out.push_back(static_cast<T>(v));
      }
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
        ++used;
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ConfigError(field, "cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "default") return kDefaultSeed;
  if (text == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("seed", "expected an integer, 'default' or 'random'");
  }
}

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<unsigned>& v) {
  std::string out;
  for (unsigned x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

ExperimentConfig build_config(const Flags& f, bool sweep, bool theta_given,
                              bool users_given) {
  ExperimentConfig cfg;
  cfg.scenario.s = f.s;
  cfg.scenario.p = f.p;
  cfg.mode = parse_mode(f.mode);
  cfg.trials = f.trials;
  cfg.seed = resolve_seed(f.seed);
  cfg.strategy = parse_strategy_kind(f.strategy);
  if (f.averaging == "key") cfg.averaging = Averaging::key;
  else if (f.averaging == "strategy") cfg.averaging = Averaging::strategy;
  else throw ConfigError("averaging", "expected 'key' or 'strategy'");
  if (f.budget == "fast") cfg.budget = BudgetPolicy::fast;
  else if (f.budget == "exhaustive") cfg.budget = BudgetPolicy::exhaustive;
  else throw ConfigError("budget", "expected 'fast' or 'exhaustive'");
  cfg.rho = f.rho;
  cfg.exact = !f.sampled;
  cfg.natural = f.natural;
  if (users_given) cfg.users = f.users;
  cfg.table = f.table && !f.keyed;
  cfg.workers = f.workers;
  if (theta_given) cfg.scenario.theta = f.theta;
  std::vector<unsigned> ms = parse_list<unsigned>(f.m, "m");
  if (sweep) {
    cfg.m_sweep = ms;
    cfg.scenario.m = ms.front();
  } else {
    if (ms.size() != 1) throw ConfigError("m", "a single value is expected; use sweep for a list");
    cfg.scenario.m = ms.front();
    cfg.scenario.n = f.n ? f.n
                         : default_password_width(cfg.mode, f.s, f.p, ms.front());
  }
  if (sweep && f.n) cfg.scenario.n = f.n;
  return cfg;
}

std::string replay_command(const std::string& sub, const ExperimentConfig& cfg,
                           const Flags& f, bool sweep) {
  std::string c = "gwlab " + sub + " --mode " + mode_name(cfg.mode) +
                  " --s " + num(cfg.scenario.s) + " --p " + num(cfg.scenario.p) +
                  " --m " + (sweep ? join(cfg.m_sweep) : std::to_string(cfg.scenario.m));
  if (cfg.scenario.n) c += " --n " + std::to_string(cfg.scenario.n);
  if (cfg.scenario.theta) c += " --theta " + num(*cfg.scenario.theta);
  c += " --trials " + std::to_string(cfg.trials) + " --seed " + std::to_string(cfg.seed) +
       " --strategy " + strategy_kind_name(cfg.strategy) + " --averaging " +
       (cfg.averaging == Averaging::key ? "key" : "strategy") + " --budget " +
       (cfg.budget == BudgetPolicy::fast ? "fast" : "exhaustive");
  if (cfg.mode == Mode::broken_hash) {
    c += " --rho " + num(cfg.rho);
    if (!cfg.exact) c += " --sampled";
  }
  if (cfg.natural) c += " --natural";
  if (cfg.users) c += " --users " + std::to_string(*cfg.users);
  if (cfg.table) c += " --table";
  if (sub == "sweep" && f.panel != "rate") c += " --panel " + f.panel;
  if (sub == "concentration") c += " --l " + f.l;
  c += " --format " + f.format;
  return c;
}

struct Measured {
  std::vector<std::pair<std::string, double>> values;
};

int check_assertions(const std::vector<std::string>& texts, const Measured& got,
                     json* out) {
  int status = 0;
  json arr = json::array();
  for (const std::string& t : texts) {
    Assertion a = parse_assertion(t);
    const double* v = nullptr;
    for (const auto& kv : got.values)
      if (kv.first == a.quantity) v = &kv.second;
    if (!v) {
      std::string names;
      for (const auto& kv : got.values) names += (names.empty() ? "" : ", ") + kv.first;
      throw ConfigError("assert", "unknown quantity '" + a.quantity + "'; available: " + names);
    }
    bool ok = std::fabs(*v - a.target) <= a.tolerance;
    arr.push_back({{"assert", a.text}, {"value", *v}, {"ok", ok}});
    std::fprintf(stderr, "assert %s: %s = %.6g %s\n", ok ? "ok" : "FAILED",
                 a.quantity.c_str(), *v, ok ? "" : "(out of tolerance)");
    if (!ok) status = kExitAssertion;
  }
  if (out && !texts.empty()) (*out)["assertions"] = arr;
  return status;
}

// Emits a result in the requested format. JSON wraps it with the schema tag,
// resolved config and replay command; text and csv echo those separately.
void emit(const Flags& f, const std::string& command, const json& config,
          const std::string& replay, const json& result, const std::string& text,
          const std::string& csv, const json& extra = json::object()) {
  if (f.format == "json") {
    json out = {{"schema", kSchema}, {"command", command}, {"config", config},
                {"replay", replay}, {"result", result}};
    for (auto it = extra.begin(); it != extra.end(); ++it) out[it.key()] = it.value();
    std::cout << out.dump(2) << "\n";
  } else if (f.format == "csv") {
    if (!replay.empty()) std::cerr << "# replay: " << replay << "\n";
    std::cout << csv;
  } else {
    if (!replay.empty()) std::cout << "# replay: " << replay << "\n";
    std::cout << text;
  }
}

void check_format(const Flags& f) {
  if (f.format != "json" && f.format != "csv" && f.format != "text")
    throw ConfigError("format", "expected json, csv or text");
}

void add_scenario(CLI::App* app, Flags& f, bool list_m) {
  app->add_option("--s", f.s, "User-count exponent s in [1/2,1]; 2^{H(s)m-1} users")
      ->capture_default_str();
  app->add_option("--p", f.p, "Per-bit bias p in (0,1/2] of the key distribution")
      ->capture_default_str();
  app->add_option("--m", f.m,
                  list_m ? "Bin widths, comma-separated (x-axis of the fitted rate)"
                         : "Bin width m in bits")
      ->capture_default_str();
  app->add_option("--n", f.n, "Password width n in bits (0: default 1.25x entropy rule)")
      ->capture_default_str();
  app->add_option("--theta", f.theta, "Password bias theta in (0,1) (biased-password mode)");
}

void add_experiment(CLI::App* app, Flags& f) {
  app->add_option("--mode", f.mode,
                  "allocated-online | allocated-offline | unallocated-online | "
                  "unallocated-offline | broken-hash | biased-password | "
                  "no-allocation-keyed")
      ->capture_default_str();
  app->add_option("--trials", f.trials, "Monte Carlo trials (>= 100) per point")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed: integer, 'default' or 'random'")
      ->capture_default_str();
  app->add_option("--strategy", f.strategy,
                  "Guess order: ascending | seeded-permutation | probability-descending")
      ->capture_default_str();
  app->add_option("--averaging", f.averaging,
                  "Average over keys ('key') or guessing strategies ('strategy')")
      ->capture_default_str();
  app->add_option("--budget", f.budget,
                  "Per-trial guess budget: fast (64/P(target)) or exhaustive (2^n)")
      ->capture_default_str();
  app->add_option("--rho", f.rho, "Moment order rho of E(G^rho) (broken-hash mode)")
      ->capture_default_str();
  app->add_flag("--sampled", f.sampled,
                "Broken-hash mode: sample tables instead of the exact Bernoulli law");
  app->add_flag("--natural", f.natural, "Allocated modes without the backdoor mapping");
  app->add_option("--users", f.users, "User count override in [1, 2^m]");
  app->add_flag("--table", f.table, "Explicit lookup-table hash (n, m <= 24)");
  app->add_flag("--keyed", f.keyed, "Keyed segment hash (default; no size cap)");
  app->add_option("--workers", f.workers,
                  "Worker threads (0: GWLAB_WORKERS or all cores); results do not depend on it")
      ->capture_default_str();
  app->add_option("--assert", f.asserts,
                  "Check QUANTITY~VALUE+-TOL (also QUANTITY≈VALUE±TOL); exit 3 on failure");
  app->add_option("--trial-log", f.trial_log, "Write one CSV line per trial to FILE");
}

void add_format(CLI::App* app, Flags& f) {
  app->add_option("--format", f.format, "Output format: json | csv | text")
      ->capture_default_str();
}

class TrialLog {
 public:
  explicit TrialLog(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw ConfigError("trial-log", "cannot open '" + path + "'");
    out_ << trial_log_header();
  }
  TrialSink sink() {
    if (!out_.is_open()) return {};
    return [this](const TrialRecord& r, const std::string& strategy) {
      out_ << trial_log_line(r, strategy);
    };
  }

 private:
  std::ofstream out_;
};

int run_rates(const Flags& f, bool theta_given) {
  check_format(f);
  ScenarioParams sc;
  sc.s = f.s;
  sc.p = f.p;
  validate_s(sc.s);
  validate_bias(sc.p);
  std::vector<unsigned> ms = parse_list<unsigned>(f.m, "m");
  sc.m = ms.front();
  sc.n = f.n;
  if (theta_given) sc.theta = f.theta;
  std::vector<RateReport> rates = all_rates(sc);
  json arr = json::array();
  for (const RateReport& r : rates) arr.push_back(to_json(r));
  json config = {{"s", sc.s}, {"p", sc.p}, {"m", sc.m}, {"n", sc.n}};
  config["theta"] = sc.theta ? json(*sc.theta) : json(nullptr);
  std::string replay = "gwlab rates --s " + num(sc.s) + " --p " + num(sc.p) +
                       " --m " + std::to_string(sc.m) + " --n " + std::to_string(sc.n) +
                       (sc.theta ? " --theta " + num(*sc.theta) : "") + " --format " + f.format;
  emit(f, "rates", config, replay, arr, render_text(rates), render_csv(rates));
  return 0;
}

int run_table1(const Flags& f) {
  check_format(f);
  std::vector<Table1Cell> cells = table1();
  emit(f, "table1", json::object(), "gwlab table1 --format " + f.format, to_json(cells),
       render_text(cells), render_csv(cells));
  return 0;
}

int run_keysize(const Flags& f) {
  check_format(f);
  std::vector<double> alphas = parse_list<double>(f.alpha, "alpha");
  std::vector<KeysizeRow> rows = keysize_panel(alphas);
  json config = {{"alpha", alphas}};
  emit(f, "keysize", config, "gwlab keysize --alpha " + f.alpha + " --format " + f.format,
       to_json(rows), render_text(rows), render_csv(rows));
  return 0;
}

int run_simulate(const Flags& f, bool theta_given, bool users_given) {
  check_format(f);
  ExperimentConfig cfg = build_config(f, false, theta_given, users_given);
  validate(cfg, false);
  for (const std::string& a : f.asserts) parse_assertion(a);
  TrialLog log(f.trial_log);
  ExperimentResult r = run_experiment(cfg, log.sink());
  Measured got{{{"rate", r.rate()}, {"mean", r.estimate.mean}}};
  if (!std::isnan(r.theory.rate)) got.values.push_back({"theory", r.theory.rate});
  json extra = json::object();
  int status = check_assertions(f.asserts, got, &extra);
  emit(f, "simulate", to_json(cfg), replay_command("simulate", cfg, f, false), to_json(r),
       render_text(r), render_csv(r), extra);
  return status;
}

int run_sweep(const Flags& f, bool theta_given, bool users_given) {
  check_format(f);
  ExperimentConfig cfg = build_config(f, true, theta_given, users_given);
  validate(cfg, true);
  for (const std::string& a : f.asserts) parse_assertion(a);
  json extra = json::object();
  int status = 0;
  if (f.panel == "most-likely") {
    MostLikelyReport r = most_likely_panel(cfg);
    Measured got{{{"offline_rate", r.offline_fit.slope},
                  {"online_rate", r.online_fit.slope},
                  {"offline_theory", r.offline_theory},
                  {"online_theory", r.online_theory}}};
    status = check_assertions(f.asserts, got, &extra);
    emit(f, "sweep", to_json(cfg), replay_command("sweep", cfg, f, true), to_json(r),
         render_text(r), render_csv(r), extra);
    return status;
  }
  if (f.panel != "rate") throw ConfigError("panel", "expected 'rate' or 'most-likely'");
  TrialLog log(f.trial_log);
  SweepResult r = sweep_rate(cfg, log.sink());
  Measured got{{{"rate", r.fitted_rate}, {"slope", r.fitted_rate},
                {"theory", r.theory_mean}}};
  status = check_assertions(f.asserts, got, &extra);
  emit(f, "sweep", to_json(cfg), replay_command("sweep", cfg, f, true), to_json(r),
       render_text(r), render_csv(r), extra);
  return status;
}

int run_concentration(const Flags& f, bool theta_given, bool users_given) {
  check_format(f);
  ExperimentConfig cfg = build_config(f, false, theta_given, users_given);
  validate(cfg, false);
  std::vector<double> ls = parse_list<double>(f.l, "l");
  ConcentrationReport r = concentration_report(cfg, ls);
  json config = to_json(cfg);
  config["l"] = ls;
  emit(f, "concentration", config, replay_command("concentration", cfg, f, false),
       to_json(r), render_text(r), render_csv(r));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwlab: guesswork of keyed, biased hash functions"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* rates = app.add_subcommand(
      "rates", "Closed-form guesswork rates (bits per m) with region labels");
  add_scenario(rates, f, false);
  add_format(rates, f);

  CLI::App* table = app.add_subcommand(
      "table1", "Recomputed most-likely rate table against the published values");
  add_format(table, f);

  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte Carlo mean guesswork E(G) at one m; rate = (1/m) log2 E(G)");
  add_scenario(sim, f, false);
  add_experiment(sim, f);
  add_format(sim, f);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Fitted slope of log2 E(G) against m, compared with the closed-form rate");
  add_scenario(sweep, f, true);
  add_experiment(sweep, f);
  sweep->add_option("--panel", f.panel,
                    "rate | most-likely (users conditioned on the modal type profile)")
      ->capture_default_str();
  add_format(sweep, f);

  CLI::App* conc = app.add_subcommand(
      "concentration", "Empirical P(G <= 2^{ml}) against its upper bound and the geometric law");
  add_scenario(conc, f, false);
  add_experiment(conc, f);
  conc->add_option("--l", f.l, "Exponents l of the thresholds 2^{ml}, comma-separated")
      ->capture_default_str();
  add_format(conc, f);

  CLI::App* keys = app.add_subcommand(
      "keysize", "Biased key length for a target alpha; key-size ratio against uniform keys");
  keys->add_option("--alpha", f.alpha, "Target alphas >= 1, comma-separated")
      ->capture_default_str();
  add_format(keys, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    auto given = [](CLI::App* sub, const char* name) {
      CLI::Option* o = sub->get_option_no_throw(name);
      return o && o->count() > 0;
    };
    if (*rates) return run_rates(f, given(rates, "--theta"));
    if (*table) return run_table1(f);
    if (*keys) return run_keysize(f);
    if (*sim) return run_simulate(f, given(sim, "--theta"), given(sim, "--users"));
    if (*sweep) return run_sweep(f, given(sweep, "--theta"), given(sweep, "--users"));
    if (*conc) return run_concentration(f, given(conc, "--theta"), given(conc, "--users"));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: --%s\n", e.what());
    return kExitValidation;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitResource;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const RangeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
