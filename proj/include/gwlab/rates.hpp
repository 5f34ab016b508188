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
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gwlab {

// s: user-count exponent in [1/2,1]; p: mapping bias in (0,1/2];
// m: bin width; n: password width; theta: optional password bias.
struct ScenarioParams {
  double s = 0.9;
  double p = 0.3;
  unsigned m = 8;
  unsigned n = 0;
  std::optional<double> theta;
};

// Rates are in bits per m, i.e. (1/m) log2 E(G). When lower/upper are set,
// `rate` carries the upper bound.
struct RateReport {
  std::string scenario;
  double rate = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<std::string> region;
};

void validate_s(double s);
void validate_bias(double p);

// Users in the allocated setting: max(1, floor(2^{H(s)m - 1})).
std::uint64_t users_for_s(double s, unsigned m);
// Users in the most-likely setting, u = 1 - s: max(1, floor(2^{H(u)m})).
std::uint64_t users_most_likely(double s, unsigned m);

RateReport online_rate_allocated(double s, double p);
RateReport offline_rate_allocated(double s, double p);
RateReport offline_rate_bounds_unallocated(double s, double p);
RateReport online_rate_bounds_unallocated(double s, double p);
RateReport most_likely_rate_offline(double s, double p);
RateReport most_likely_rate_online(double p);

struct TypeExponents {
  double doubly_exp_exponent;  // 2H(1-s) - H(q)
  double singly_exp_rate;      // D(q||p) * 2^{H(1-s) m}
};
TypeExponents most_likely_type_probability_exponents(unsigned m, double s,
                                                     double q, double p);

// Critical password type sqrt(t)/(sqrt(t)+sqrt(1-t)).
double critical_password_type(double theta);
RateReport biased_password_rate(const ScenarioParams& scenario, double q_b);

RateReport moment_rate_broken_hash(double p, double rho);
double key_size_ratio(double s, double p);

// Exact E(G(b)) of the truncated geometric over 2^n guesses with success
// probability 2^{-m(H(q)+D(q||p))}; failures count as zero guesses.
double expected_guesses_per_bin(unsigned m, unsigned n, double q_b, double p);
double expected_guesses_truncated(double log2_success, unsigned n);

// Upper bound on P(G(b) < 2^{ml}).
double concentration_bound(unsigned m, double q_b, double p, double l);

struct ArgmaxType {
  double q_star;
  double value;
};
// argmax over q in [s,1] of 2H(q) + D(q||p).
ArgmaxType guesswork_argmax_type(double s, double p);

double concentration_exponent_allocated(double epsilon1, double p);

// All rates that apply to (s, p), in a fixed order.
std::vector<RateReport> all_rates(const ScenarioParams& scenario);

struct Table1Cell {
  double p;
  double one_minus_s;
  std::string column;  // "H(p)-H(1-s)", "D(1-s||p)" or "D(s||p)"
  double computed;
  double published;
  int decimals;  // digits printed in the published value
  double tolerance;
  double raw_delta() const;
  // Difference after rounding `computed` to the published precision.
  double delta() const;
  bool ok() const;
};
std::vector<Table1Cell> table1();

}  // namespace gwlab
