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
#include <span>
#include <vector>

#include "gwlab/hashmodel.hpp"

namespace gwlab {

struct UserBin {
  std::uint64_t user = 0;  // 1-based, least likely bin first
  BinLabel bin;
};

struct AllocationPlan {
  unsigned m = 0;
  double p = 0.5;
  std::vector<UserBin> users;
  double s_effective = 0.5;

  // Smallest type fraction among the assigned bins.
  double realized_min_type() const;
  std::vector<BinLabel> bins() const;
};

struct PlantedMapping {
  std::uint64_t password = 0;
  BinLabel bin;
};

struct Reassignment {
  std::uint64_t user = 0;
  BinLabel bin;
};

struct UserRecord {
  std::uint64_t user = 0;
  std::uint64_t password = 0;
  BinLabel assigned;
  BinLabel final_bin;
};

struct BackdoorOutcome {
  std::vector<PlantedMapping> planted;
  std::vector<Reassignment> reassigned;
  std::uint64_t collision_count = 0;
  std::vector<UserRecord> users;  // plan order

  std::vector<BinLabel> final_bins() const;
};

// s in [1/2,1] with floor(2^{H(s)m-1}) = M up to the granularity of the
// floor; 1/2 when M >= 2^{m-1}.
double s_for_user_count(unsigned m, std::uint64_t M);

AllocationPlan allocate_bins(unsigned m, double p, std::uint64_t M);

// Uniform n-bit passwords from an independent stream.
std::vector<std::uint64_t> draw_passwords(unsigned n, std::uint64_t count,
                                          std::uint64_t seed);
// Passwords with i.i.d. Bernoulli(theta) bits.
std::vector<std::uint64_t> draw_biased_passwords(unsigned n, double theta,
                                                 std::uint64_t count,
                                                 std::uint64_t seed);

// First writer wins: a password already claimed by an earlier (less likely)
// user keeps its mapping and the later user moves to that bin.
BackdoorOutcome backdoor_install(KeyedHashModel& model,
                                 const AllocationPlan& plan,
                                 std::uint64_t password_seed);
BackdoorOutcome backdoor_install_passwords(
    KeyedHashModel& model, const AllocationPlan& plan,
    std::span<const std::uint64_t> passwords);
BackdoorOutcome backdoor_install_table(TableHash& h, const AllocationPlan& plan,
                                       std::uint64_t password_seed);
BackdoorOutcome backdoor_install_table_passwords(
    TableHash& h, const AllocationPlan& plan,
    std::span<const std::uint64_t> passwords);

}  // namespace gwlab
