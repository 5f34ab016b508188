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

#include "gwlab/serialize.hpp"

#include <array>

#include "gwlab/errors.hpp"

namespace gwlab {
namespace {

using nlohmann::json;

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

void check_header(const json& j, const char* kind) {
  if (!j.is_object()) throw DomainError("expected a JSON object");
  if (j.value("schema", "") != kSchema)
    throw DomainError(std::string("unsupported schema, expected ") + kSchema);
  if (j.value("kind", "") != kind)
    throw DomainError(std::string("expected kind ") + kind);
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (std::size_t rest = bytes.size() - i) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::array<int, 256> value;
  value.fill(-1);
  for (int i = 0; i < 64; ++i) value[static_cast<unsigned char>(kAlphabet[i])] = i;
  if (text.size() % 4 != 0) throw DomainError("base64 length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      char c = text[i + k];
      int d;
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
        d = 0;
      } else {
        d = value[static_cast<unsigned char>(c)];
        if (d < 0 || pad) throw DomainError("invalid base64 input");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::vector<std::uint8_t> pack_entries(std::span<const std::uint32_t> entries,
                                       unsigned m) {
  std::vector<std::uint8_t> out((entries.size() * m + 7) / 8, 0);
  std::uint64_t bit = 0;
  for (std::uint32_t e : entries)
    for (unsigned j = 0; j < m; ++j, ++bit)
      if ((e >> j) & 1) out[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
  return out;
}

std::vector<std::uint32_t> unpack_entries(std::span<const std::uint8_t> bytes,
                                          unsigned m, std::uint64_t count) {
  if (bytes.size() != (count * m + 7) / 8)
    throw DomainError("packed table has the wrong length");
  std::vector<std::uint32_t> out(count, 0);
  std::uint64_t bit = 0;
  for (auto& e : out)
    for (unsigned j = 0; j < m; ++j, ++bit)
      e |= static_cast<std::uint32_t>((bytes[bit >> 3] >> (bit & 7)) & 1) << j;
  return out;
}

json to_json(const KeyedHashModel& h) {
  json overrides = json::array();
  for (const auto& [pw, bin] : h.overrides()) overrides.push_back({pw, bin});
  return {{"schema", kSchema}, {"kind", "keyed-hash"}, {"m", h.m()},
          {"n", h.n()},        {"p", h.p()},           {"seed", h.seed()},
          {"overrides", overrides}};
}

json to_json(const TableHash& h) {
  json j = {{"schema", kSchema},
            {"kind", "table-hash"},
            {"m", h.m()},
            {"n", h.n()},
            {"table_base64", base64_encode(pack_entries(h.entries(), h.m()))}};
  j["p"] = h.sampled_p ? json(*h.sampled_p) : json(nullptr);
  j["seed"] = h.sampled_seed ? json(*h.sampled_seed) : json(nullptr);
  return j;
}

KeyedHashModel keyed_model_from_json(const json& j) {
  check_header(j, "keyed-hash");
  KeyedHashModel h(j.at("m").get<unsigned>(), j.at("n").get<unsigned>(),
                   j.at("p").get<double>(), j.at("seed").get<std::uint64_t>());
  for (const json& o : j.at("overrides"))
    h.add_override(o.at(0).get<std::uint64_t>(),
                   BinLabel(o.at(1).get<std::uint64_t>(), h.m()));
  return h;
}

TableHash table_hash_from_json(const json& j) {
  check_header(j, "table-hash");
  unsigned m = j.at("m").get<unsigned>();
  unsigned n = j.at("n").get<unsigned>();
  if (n > kTableCap || m > kTableCap || n == 0 || m == 0)
    throw ResourceError("table dimensions exceed the explicit-table cap");
  std::vector<std::uint8_t> bytes =
      base64_decode(j.at("table_base64").get<std::string>());
  TableHash h(m, n, unpack_entries(bytes, m, std::uint64_t{1} << n));
  if (j.contains("p") && !j["p"].is_null()) h.sampled_p = j["p"].get<double>();
  if (j.contains("seed") && !j["seed"].is_null())
    h.sampled_seed = j["seed"].get<std::uint64_t>();
  return h;
}

json to_json(const AllocationPlan& plan) {
  json users = json::array();
  for (const UserBin& u : plan.users)
    users.push_back({{"user", u.user}, {"bin", u.bin.to_string()}});
  return {{"schema", kSchema}, {"kind", "allocation-plan"},
          {"m", plan.m},       {"p", plan.p},
          {"s_effective", plan.s_effective}, {"users", users}};
}

AllocationPlan allocation_plan_from_json(const json& j) {
  check_header(j, "allocation-plan");
  AllocationPlan plan;
  plan.m = j.at("m").get<unsigned>();
  plan.p = j.at("p").get<double>();
  plan.s_effective = j.at("s_effective").get<double>();
  for (const json& u : j.at("users")) {
    BinLabel b = BinLabel::from_string(u.at("bin").get<std::string>());
    if (b.m != plan.m) throw DomainError("bin width differs from plan m");
    plan.users.push_back({u.at("user").get<std::uint64_t>(), b});
  }
  return plan;
}

json to_json(const BackdoorOutcome& out) {
  json planted = json::array();
  for (const PlantedMapping& pm : out.planted)
    planted.push_back({{"password", pm.password}, {"bin", pm.bin.to_string()}});
  json reassigned = json::array();
  for (const Reassignment& r : out.reassigned)
    reassigned.push_back({{"user", r.user}, {"bin", r.bin.to_string()}});
  json users = json::array();
  for (const UserRecord& u : out.users)
    users.push_back({{"user", u.user},
                     {"password", u.password},
                     {"assigned_bin", u.assigned.to_string()},
                     {"final_bin", u.final_bin.to_string()}});
  return {{"schema", kSchema},
          {"kind", "backdoor-outcome"},
          {"collision_count", out.collision_count},
          {"planted", planted},
          {"reassigned", reassigned},
          {"users", users}};
}

}  // namespace gwlab
