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

#include "gwlab/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gwlab/errors.hpp"
#include "gwlab/infotheory.hpp"
#include "gwlab/random.hpp"
#include "gwlab/rates.hpp"

namespace gwlab {
namespace {

double floor_users(double s, unsigned m) {
  return std::floor(std::exp2(binary_entropy(s) * m - 1.0));
}

void check_plan(unsigned m, const AllocationPlan& plan,
                std::span<const std::uint64_t> passwords) {
  if (plan.m != m) throw DomainError("plan bin width differs from model m");
  if (passwords.size() != plan.users.size())
    throw DomainError("one password per user is required");
}

// Shared first-writer-wins pass; `write` plants one mapping.
template <class Write>
BackdoorOutcome install(const AllocationPlan& plan,
                        std::span<const std::uint64_t> passwords,
                        Write&& write) {
  BackdoorOutcome out;
  std::unordered_map<std::uint64_t, BinLabel> claimed;
  claimed.reserve(plan.users.size() * 2);
  out.users.reserve(plan.users.size());
  for (std::size_t u = 0; u < plan.users.size(); ++u) {
    const UserBin& ub = plan.users[u];
    std::uint64_t pw = passwords[u];
    auto [it, fresh] = claimed.emplace(pw, ub.bin);
    if (fresh) {
      write(pw, ub.bin);
      out.planted.push_back({pw, ub.bin});
    } else {
      ++out.collision_count;
      out.reassigned.push_back({ub.user, it->second});
    }
    out.users.push_back({ub.user, pw, ub.bin, it->second});
  }
  return out;
}

}  // namespace

double AllocationPlan::realized_min_type() const {
  if (users.empty()) throw DomainError("empty allocation plan");
  unsigned k = m;
  for (const UserBin& u : users) k = std::min(k, u.bin.popcount());
  return static_cast<double>(k) / m;
}

std::vector<BinLabel> AllocationPlan::bins() const {
  std::vector<BinLabel> out;
  out.reserve(users.size());
  for (const UserBin& u : users) out.push_back(u.bin);
  return out;
}

std::vector<BinLabel> BackdoorOutcome::final_bins() const {
  std::vector<BinLabel> out;
  out.reserve(users.size());
  for (const UserRecord& u : users) out.push_back(u.final_bin);
  return out;
}

double s_for_user_count(unsigned m, std::uint64_t M) {
  if (M == 0) throw DomainError("user count must be positive");
  double target = static_cast<double>(M);
  if (floor_users(0.5, m) <= target) return 0.5;
  double lo = 0.5, hi = 1.0;  // floor_users(lo) >= M > floor_users(hi)
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (floor_users(mid, m) >= target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

AllocationPlan allocate_bins(unsigned m, double p, std::uint64_t M) {
  validate_bias(p);
  if (m == 0 || m > kMaxBinWidth) throw DomainError("m out of range");
  if (M == 0 || M > (std::uint64_t{1} << m))
    throw DomainError("user count must lie in [1, 2^m]");
  AllocationPlan plan;
  plan.m = m;
  plan.p = p;
  std::vector<BinLabel> bins = least_likely_bins(m, p, M);
  plan.users.reserve(M);
  for (std::uint64_t i = 0; i < M; ++i) plan.users.push_back({i + 1, bins[i]});
  plan.s_effective = s_for_user_count(m, M);
  return plan;
}

std::vector<std::uint64_t> draw_passwords(unsigned n, std::uint64_t count,
                                          std::uint64_t seed) {
  if (n == 0 || n > kMaxPasswordWidth) throw DomainError("n out of range");
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> out(count);
  for (auto& pw : out) pw = rng.bits(n);
  return out;
}

std::vector<std::uint64_t> draw_biased_passwords(unsigned n, double theta,
                                                 std::uint64_t count,
                                                 std::uint64_t seed) {
  if (n == 0 || n > kMaxPasswordWidth) throw DomainError("n out of range");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw DomainError("theta must lie in [0,1]");
  SplitMix64 rng(seed);
  auto threshold = static_cast<std::uint64_t>(std::llround(std::ldexp(theta, 53)));
  std::vector<std::uint64_t> out(count);
  for (auto& pw : out) {
    pw = 0;
    for (unsigned j = 0; j < n; ++j)
      pw |= static_cast<std::uint64_t>((rng() >> 11) < threshold) << j;
  }
  return out;
}

BackdoorOutcome backdoor_install_passwords(
    KeyedHashModel& model, const AllocationPlan& plan,
    std::span<const std::uint64_t> passwords) {
  check_plan(model.m(), plan, passwords);
  for (std::uint64_t pw : passwords)
    if (pw > model.max_password())
      throw RangeError("password index outside [0, 2^n)");
  return install(plan, passwords, [&](std::uint64_t pw, BinLabel b) {
    model.add_override(pw, b);
  });
}

BackdoorOutcome backdoor_install(KeyedHashModel& model,
                                 const AllocationPlan& plan,
                                 std::uint64_t password_seed) {
  std::vector<std::uint64_t> pws =
      draw_passwords(model.n(), plan.users.size(), password_seed);
  return backdoor_install_passwords(model, plan, pws);
}

BackdoorOutcome backdoor_install_table_passwords(
    TableHash& h, const AllocationPlan& plan,
    std::span<const std::uint64_t> passwords) {
  check_plan(h.m(), plan, passwords);
  return install(plan, passwords,
                 [&](std::uint64_t pw, BinLabel b) { h.set_entry(pw, b); });
}

BackdoorOutcome backdoor_install_table(TableHash& h, const AllocationPlan& plan,
                                       std::uint64_t password_seed) {
  std::vector<std::uint64_t> pws =
      draw_passwords(h.n(), plan.users.size(), password_seed);
  return backdoor_install_table_passwords(h, plan, pws);
}

}  // namespace gwlab
