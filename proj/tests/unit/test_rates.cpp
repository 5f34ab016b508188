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


#include <cmath>

#include <doctest.h>

#include "gwlab/errors.hpp"
#include "gwlab/infotheory.hpp"
#include "gwlab/rates.hpp"

using namespace gwlab;
using doctest::Approx;

TEST_CASE("published rate table: closed forms at 4 decimals") {
  CHECK(std::fabs(kl_divergence(0.1, 0.21) - 0.0622) < 5e-5);
  CHECK(std::fabs(kl_divergence(0.9, 0.21) - 1.5914) < 5e-5);
  CHECK(std::fabs(kl_divergence(1.0, 0.45) - 1.15) < 5e-3);
  CHECK(std::fabs(kl_divergence(0.0, 0.45) - 0.8625) < 5e-5);
  CHECK(std::fabs(kl_divergence(0.2, 0.5) - 0.2781) < 5e-5);
  CHECK(std::fabs(binary_entropy(0.21) - binary_entropy(0.1) - 0.2725) < 5e-5);
  CHECK(std::fabs(binary_entropy(0.2) - 0.7219) < 5e-5);
}

TEST_CASE("table cells") {
  std::vector<Table1Cell> cells = table1();
  REQUIRE(cells.size() == 12);
  int loose = 0;
  for (const Table1Cell& c : cells) {
    CHECK(c.ok());
    if (c.tolerance > 5e-4) {
      ++loose;
      CHECK(c.p == 0.45);
      CHECK(c.column == "H(p)-H(1-s)");
      // The discrepancy is reported, not hidden.
      CHECK(c.computed == Approx(0.99277).epsilon(1e-4));
      CHECK(c.raw_delta() > 1e-3);
    }
  }
  CHECK(loose == 1);
  const Table1Cell& last = cells.back();
  CHECK(last.p == 0.21);
  CHECK(last.column == "D(s||p)");
  CHECK(last.raw_delta() < 5e-5);
  for (int i = 0; i < 3; ++i) CHECK(cells[i].computed == Approx(1.0));
}

TEST_CASE("user counts") {
  CHECK(users_for_s(0.9, 8) == 6);
  CHECK(users_for_s(0.9, 10) == 12);
  CHECK(users_for_s(0.9, 12) == 24);
  CHECK(users_for_s(0.9, 14) == 47);
  CHECK(users_for_s(1.0, 10) == 1);
  CHECK(users_most_likely(0.9, 8) == 13);
  CHECK(users_most_likely(0.9, 14) == 94);
  CHECK_THROWS_AS(users_for_s(0.4, 8), DomainError);
}

TEST_CASE("online allocated rate") {
  RateReport r = online_rate_allocated(1.0, 0.45);
  CHECK(r.rate == Approx(1.1520).epsilon(1e-4));
  CHECK(*r.region == "s>=1-p");
  for (double s : {0.5, 0.7, 0.9, 1.0})
    CHECK(online_rate_allocated(s, 0.5).rate == Approx(1.0));
  r = online_rate_allocated(0.5, 0.3);
  CHECK(r.rate == Approx(1.2516).epsilon(1e-4));
  CHECK(*r.region == "s<1-p");
  CHECK(*online_rate_allocated(0.7, 0.3).region == "boundary");
  CHECK(online_rate_allocated(0.9, 0.3).rate ==
        Approx(1.6147263520325614).epsilon(1e-12));
  // Continuous across the knee s = 1-p.
  CHECK(online_rate_allocated(0.7 - 1e-9, 0.3).rate ==
        Approx(online_rate_allocated(0.7 + 1e-9, 0.3).rate).epsilon(1e-7));
  CHECK_THROWS_AS(online_rate_allocated(0.9, 0.6), DomainError);
}

TEST_CASE("offline rates and unallocated bounds") {
  CHECK(offline_rate_allocated(0.9, 0.21).rate == Approx(1.5914).epsilon(1e-4));
  CHECK(offline_rate_allocated(0.5, 0.5).rate == 0.0);
  RateReport b = offline_rate_bounds_unallocated(1.0, 0.45);
  CHECK(*b.lower == Approx(0.8625).epsilon(1e-4));
  CHECK(*b.upper == Approx(1.152).epsilon(1e-3));
  CHECK(b.rate == *b.upper);
  b = offline_rate_bounds_unallocated(0.8, 0.5);
  CHECK(*b.lower == Approx(0.2781).epsilon(1e-4));
  CHECK(*b.upper == Approx(0.2781).epsilon(1e-4));
  b = offline_rate_bounds_unallocated(0.6, 0.2);
  CHECK(*b.lower == 0.0);
  CHECK(*b.upper == Approx(kl_divergence(0.6, 0.2)));
  CHECK(*b.region == "1-s>p");

  RateReport o = online_rate_bounds_unallocated(1.0, 0.45);
  CHECK(*o.lower == Approx(0.8625).epsilon(1e-4));
  CHECK(*o.upper == Approx(1.152).epsilon(1e-3));
  o = online_rate_bounds_unallocated(0.9, 0.21);
  CHECK(std::fabs(*o.lower - 0.5312) < 1e-4);
  CHECK(std::fabs(*o.upper - 2.0604) < 1e-4);
  for (double s : {0.5, 0.8, 1.0}) {
    o = online_rate_bounds_unallocated(s, 0.5);
    CHECK(*o.lower == Approx(1.0));
    CHECK(*o.upper == Approx(1.0));
  }
}

TEST_CASE("bounds are ordered over a grid") {
  for (double s = 0.5; s <= 1.0; s += 0.05)
    for (double p = 0.05; p <= 0.5; p += 0.05) {
      RateReport a = offline_rate_bounds_unallocated(s, p);
      RateReport b = online_rate_bounds_unallocated(s, p);
      CHECK(*a.lower <= *a.upper + 1e-12);
      CHECK(*b.lower <= *b.upper + 1e-12);
      CHECK(most_likely_rate_offline(s, p).rate <= *a.upper + 1e-12);
    }
}

TEST_CASE("most-likely rates") {
  CHECK(std::fabs(most_likely_rate_offline(0.9, 0.21).rate - 0.2725) < 5e-5);
  CHECK(most_likely_rate_offline(0.6, 0.3).rate == 0.0);
  CHECK(most_likely_rate_offline(1.0, 0.45).rate == Approx(binary_entropy(0.45)));
  CHECK(most_likely_rate_online(0.5).rate == 1.0);
  CHECK(std::fabs(most_likely_rate_online(0.21).rate - 0.7415) < 5e-5);
  CHECK(std::fabs(most_likely_rate_online(0.3).rate - 0.8813) < 5e-5);

  TypeExponents e = most_likely_type_probability_exponents(20, 0.9, 0.15, 0.21);
  CHECK(std::fabs(e.doubly_exp_exponent - 0.3282) < 1e-4);
  CHECK(e.singly_exp_rate ==
        Approx(kl_divergence(0.15, 0.21) * std::exp2(binary_entropy(0.1) * 20)));
  e = most_likely_type_probability_exponents(10, 0.9, 0.2, 0.2);
  CHECK(e.singly_exp_rate == 0.0);
}

TEST_CASE("biased-password regions") {
  CHECK(critical_password_type(0.25) == Approx(0.3660254).epsilon(1e-6));
  CHECK(critical_password_type(0.5) == 0.5);
  ScenarioParams sc;
  sc.p = 0.3;
  sc.m = 8;
  sc.n = 24;
  sc.theta = 0.5;
  RateReport r = biased_password_rate(sc, 1.0);
  CHECK(*r.region == "hash-dominated");
  CHECK(r.rate == Approx(cross_entropy_identity(1.0, 0.3)));
  sc.theta = 1e-4;
  r = biased_password_rate(sc, 1.0);
  CHECK(*r.region == "password-dominated");
  CHECK(r.rate == Approx(3.0 * renyi_entropy_bernoulli(1e-4, 1.0)));
  sc.theta = 0.15;
  sc.n = 16;
  r = biased_password_rate(sc, 1.0);
  CHECK(*r.region == "indeterminate");
  CHECK(std::isnan(r.rate));
}

TEST_CASE("broken-hash moment rate and key-size ratio") {
  CHECK(moment_rate_broken_hash(0.5, 1.0).rate == Approx(1.0));
  CHECK(moment_rate_broken_hash(0.25, 1.0).rate == Approx(0.8999686).epsilon(1e-6));
  CHECK(moment_rate_broken_hash(0.3, 2.0).rate ==
        Approx(2.0 * 1.5 * std::log2(std::cbrt(0.3) + std::cbrt(0.7))).epsilon(1e-12));
  CHECK(moment_rate_broken_hash(0.25, 2.0).rate == Approx(1.8646319).epsilon(1e-6));
  CHECK(key_size_ratio(0.5, 0.5) == Approx(1.0));
  CHECK(key_size_ratio(0.5, solve_bias_for_alpha(2.0)) == Approx(2.0).epsilon(1e-12));
  for (double a : {1.0, 1.25, 1.5, 2.0, 3.0})
    CHECK(std::fabs(key_size_ratio(0.5, solve_bias_for_alpha(a)) - a) < 1e-9);
}

TEST_CASE("truncated expectation against direct summation") {
  // Closed form sum_{k<=N} k P (1-P)^{k-1}, 40-digit reference values.
  CHECK(expected_guesses_truncated(-5.0, 10) == Approx(31.999999999991975).epsilon(1e-12));
  CHECK(expected_guesses_truncated(-12.0, 10) == Approx(108.66169624892593).epsilon(1e-12));
  CHECK(expected_guesses_truncated(-20.0, 10) == Approx(0.50016287967256658).epsilon(1e-10));
  CHECK(expected_guesses_per_bin(6, 24, 1.0, 0.3) ==
        Approx(1371.7421124828532).epsilon(1e-12));
  CHECK(expected_guesses_per_bin(1, 2, 1.0, 0.5) == Approx(1.625));
  CHECK(expected_guesses_truncated(-1.0, 1) == Approx(1.0));
  double e = expected_guesses_per_bin(8, 32, 1.0, 0.25);
  CHECK(std::fabs(e / 65536.0 - 1.0) < 1e-6);
  // Brute-force summation for a range of probabilities and widths.
  for (unsigned n : {3u, 8u, 12u}) {
    for (double lp : {-0.5, -2.0, -7.5, -15.0}) {
      double P = std::exp2(lp), q = 1.0, sum = 0.0;
      for (std::uint64_t k = 1; k <= (1ULL << n); ++k) {
        sum += static_cast<double>(k) * P * q;
        q *= 1.0 - P;
      }
      CHECK(expected_guesses_truncated(lp, n) == Approx(sum).epsilon(1e-9));
    }
  }
}

TEST_CASE("concentration bound") {
  double hd = cross_entropy_identity(1.0, 0.3);
  CHECK(concentration_bound(10, 1.0, 0.3, hd) == Approx(1.0 - std::exp(-2.0)));
  CHECK(concentration_bound(10, 1.0, 0.3, hd - 1.0) ==
        Approx(1.951e-3).epsilon(1e-3));
  CHECK(concentration_bound(10, 1.0, 0.3, -50.0) < 1e-100);
  double prev = 0.0;
  for (double l = 0.0; l <= 2.0; l += 0.1) {
    double b = concentration_bound(10, 1.0, 0.3, l);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("argmax type and allocated concentration exponent") {
  ArgmaxType a = guesswork_argmax_type(0.5, 0.5);
  CHECK(a.q_star == 0.5);
  CHECK(a.value == Approx(2.0));
  a = guesswork_argmax_type(0.5, 0.3);
  CHECK(a.q_star == Approx(0.7));
  CHECK(a.value == Approx(2.2516).epsilon(1e-4));
  CHECK(guesswork_argmax_type(0.8, 0.3).q_star == 0.8);
  // Grid search agrees with the closed form.
  double best = -1.0, qb = 0.0;
  for (double q = 0.5; q <= 1.0; q += 1e-4) {
    double v = 2.0 * binary_entropy(q) + kl_divergence(q, 0.3);
    if (v > best) best = v, qb = q;
  }
  CHECK(qb == Approx(0.7).epsilon(1e-3));
  CHECK(concentration_exponent_allocated(0.5, 0.25) == Approx(1.0));
  CHECK(concentration_exponent_allocated(0.3, 0.5) == Approx(0.3));
  CHECK_THROWS_AS(concentration_exponent_allocated(0.0, 0.3), DomainError);
}

TEST_CASE("all rates at the uniform point") {
  ScenarioParams sc;
  sc.s = 0.5;
  sc.p = 0.5;
  for (const RateReport& r : all_rates(sc)) {
    bool one_or_zero = std::fabs(r.rate - 1.0) < 1e-12 || std::fabs(r.rate) < 1e-12;
    CHECK_MESSAGE(one_or_zero, r.scenario);
  }
}
