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

namespace gwlab {

// All entropies and divergences are in bits, with 0*log(0) taken as 0.

double binary_entropy(double q);

// D(q||p). Returns +infinity when p is 0 or 1 and q puts mass where p has
// none; throws DomainError for arguments outside [0,1].
double kl_divergence(double q, double p);

// H(q) + D(q||p) = q*log2(1/p) + (1-q)*log2(1/(1-p)).
double cross_entropy_identity(double q, double p);

// Renyi entropy of order 1/(1+rho) of Bernoulli(p). rho == 0 yields H(p).
double renyi_entropy_bernoulli(double p, double rho);

// Number of ones k = q*m for a realizable type; throws DomainError otherwise.
unsigned type_weight(unsigned m, double q);

// Probability of one particular length-m sequence of type q under i.i.d.
// Bernoulli(p): 2^{-m(H(q)+D(q||p))}.
double type_class_probability(unsigned m, double q, double p);
double type_class_log2_probability(unsigned m, double q, double p);

// Same quantity indexed by the number of ones.
double log2_sequence_probability(unsigned m, unsigned k, double p);

struct TypeClassBounds {
  double lower;
  double upper;
};

// (2^{mH(q)}/(m+1)^2, 2^{mH(q)}), which brackets C(m, qm).
TypeClassBounds type_class_size_bounds(unsigned m, double q);

double log2_binomial(unsigned m, unsigned k);

// p0 in (0, 1/2] with 1 + D(1/2||p0) = alpha, i.e. p0(1-p0) = 2^{-2 alpha}.
double solve_bias_for_alpha(double alpha);

}  // namespace gwlab
