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
#include <string>
#include <vector>

#include <json.hpp>

#include "gwlab/allocation.hpp"
#include "gwlab/hashmodel.hpp"

namespace gwlab {

inline constexpr const char* kSchema = "guesswork-lab/1";

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// m-bit entries packed LSB first into a byte stream.
std::vector<std::uint8_t> pack_entries(std::span<const std::uint32_t> entries,
                                       unsigned m);
std::vector<std::uint32_t> unpack_entries(std::span<const std::uint8_t> bytes,
                                          unsigned m, std::uint64_t count);

nlohmann::json to_json(const KeyedHashModel& h);
nlohmann::json to_json(const TableHash& h);
KeyedHashModel keyed_model_from_json(const nlohmann::json& j);
TableHash table_hash_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AllocationPlan& plan);
nlohmann::json to_json(const BackdoorOutcome& out);
AllocationPlan allocation_plan_from_json(const nlohmann::json& j);

}  // namespace gwlab
