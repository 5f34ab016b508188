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

#include "gwlab/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gwlab/errors.hpp"

namespace gwlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError(std::string(name) + " must lie in [0,1], got " +
                      std::to_string(x));
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// q*log2(q/p) with the conventions 0*log(0/p) = 0 and q*log(q/0) = inf.
double div_term(double q, double p) {
  if (q == 0.0) return 0.0;
  if (p == 0.0) return kInf;
  return q * std::log2(q / p);
}

}  // namespace

double binary_entropy(double q) {
  check_unit(q, "q");
  double a = xlog2x(q);
  double b = xlog2x(1.0 - q);
  // Fixed summation order keeps H(q) and H(1-q) bit-identical.
  double h = a < b ? -(a + b) : -(b + a);
  return std::clamp(h, 0.0, 1.0);
}

double kl_divergence(double q, double p) {
  check_unit(q, "q");
  check_unit(p, "p");
  double d = div_term(q, p) + div_term(1.0 - q, 1.0 - p);
  if (std::isinf(d)) return kInf;
  return d > 0.0 ? d : 0.0;
}

double cross_entropy_identity(double q, double p) {
  return binary_entropy(q) + kl_divergence(q, p);
}

double renyi_entropy_bernoulli(double p, double rho) {
  check_unit(p, "p");
  if (p == 0.0 || p == 1.0) throw DomainError("p must lie in (0,1)");
  if (!(rho >= 0.0)) throw DomainError("rho must be non-negative");
  if (rho < 1e-9) return binary_entropy(p);
  // p^a + (1-p)^a - 1 with a = 1 - delta, written so that it stays accurate
  // as rho -> 0.
  double delta = rho / (1.0 + rho);
  double excess = p * std::expm1(-delta * std::log(p)) +
                  (1.0 - p) * std::expm1(-delta * std::log1p(-p));
  return std::log1p(excess) / std::log(2.0) / delta;
}

unsigned type_weight(unsigned m, double q) {
  check_unit(q, "q");
  if (m == 0) throw DomainError("m must be positive");
  double k = std::round(q * m);
  if (std::fabs(k / m - q) > 1e-9)
    throw DomainError("q=" + std::to_string(q) +
                      " is not a realizable type for m=" + std::to_string(m));
  return static_cast<unsigned>(k);
}

double log2_sequence_probability(unsigned m, unsigned k, double p) {
  check_unit(p, "p");
  if (k > m) throw DomainError("weight exceeds length");
  double ones = k == 0 ? 0.0 : k * std::log2(p);
  double zeros = k == m ? 0.0 : (m - k) * std::log2(1.0 - p);
  return ones + zeros;
}

double type_class_log2_probability(unsigned m, double q, double p) {
  return log2_sequence_probability(m, type_weight(m, q), p);
}

double type_class_probability(unsigned m, double q, double p) {
  return std::exp2(type_class_log2_probability(m, q, p));
}

TypeClassBounds type_class_size_bounds(unsigned m, double q) {
  type_weight(m, q);
  double upper = std::exp2(m * binary_entropy(q));
  double denom = static_cast<double>(m + 1) * static_cast<double>(m + 1);
  return {upper / denom, upper};
}

double log2_binomial(unsigned m, unsigned k) {
  if (k > m) throw DomainError("k exceeds m in binomial");
  return (std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
          std::lgamma(m - k + 1.0)) /
         std::log(2.0);
}

double solve_bias_for_alpha(double alpha) {
  if (!(alpha >= 1.0)) throw DomainError("alpha must be >= 1");
  double c = std::exp2(-2.0 * alpha);
  // Smaller root of p^2 - p + c = 0 in the cancellation-free form.
  return 2.0 * c / (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * c)));
}

}  // namespace gwlab
