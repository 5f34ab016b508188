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

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gwlab/random.hpp"

namespace gwlab {

inline constexpr unsigned kMaxBinWidth = 63;
inline constexpr unsigned kMaxPasswordWidth = 64;
// Explicit tables and full bin enumerations stop here (16 MiB of entries).
inline constexpr unsigned kTableCap = 24;

// Bit j of `bits` is key bit j of the segment (LSB first). to_string()
// prints the most significant bit first, so 0b110 with m=3 reads "110".
struct BinLabel {
  std::uint64_t bits = 0;
  unsigned m = 0;

  BinLabel() = default;
  BinLabel(std::uint64_t bits, unsigned m);

  unsigned popcount() const noexcept { return std::popcount(bits); }
  double type_fraction() const noexcept {
    return static_cast<double>(popcount()) / m;
  }
  std::string to_string() const;
  static BinLabel from_string(const std::string& s);

  friend bool operator==(const BinLabel&, const BinLabel&) = default;
};

inline std::uint64_t low_mask(unsigned bits) noexcept {
  return bits >= 64 ? ~0ULL : (1ULL << bits) - 1;
}

// Set of bins with per-depth prefix bitsets, so a segment generated bit by
// bit can be rejected as soon as its prefix leaves the set.
class BinSet {
 public:
  BinSet() = default;
  BinSet(unsigned m, std::span<const std::uint64_t> bins);
  BinSet(unsigned m, std::span<const BinLabel> bins);

  unsigned m() const noexcept { return m_; }
  std::size_t size() const noexcept { return bins_.size(); }
  bool empty() const noexcept { return bins_.empty(); }
  bool has_prefix_index() const noexcept { return !levels_.empty(); }
  const std::vector<std::uint64_t>& bins() const noexcept { return bins_; }

  // `prefix` holds the low `depth` bits, 1 <= depth <= m.
  bool prefix_possible(unsigned depth, std::uint64_t prefix) const noexcept {
    const std::vector<std::uint64_t>& level = levels_[depth];
    return (level[prefix >> 6] >> (prefix & 63)) & 1;
  }
  bool contains(std::uint64_t bin) const noexcept;

 private:
  unsigned m_ = 0;
  std::vector<std::uint64_t> bins_;  // sorted, unique
  std::vector<std::vector<std::uint64_t>> levels_;
};

// Segmented keyed hash: password i maps to the i-th m-bit key segment. The
// key is never stored; segment i is regenerated on demand from (seed, i).
// Each 64-bit draw yields two Bernoulli(p) bits, one per 32-bit half
// compared against round(p 2^32); key bits 2k and 2k+1 come from draw k.
// Backdoor overrides replace individual segments.
class KeyedHashModel {
 public:
  KeyedHashModel(unsigned m, unsigned n, double p, std::uint64_t seed);

  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  double p() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }
  // 2^n - 1; the largest valid password index.
  std::uint64_t max_password() const noexcept { return low_mask(n_); }

  // Range-checked evaluation including overrides.
  BinLabel eval(std::uint64_t pw) const;

  // Key segment without overrides. Unchecked.
  std::uint64_t natural_segment(std::uint64_t pw) const noexcept {
    std::uint64_t z = first_draw(pw);
    std::uint64_t label = 0;
    for (unsigned j = 0;;) {
      label |= pair(z) << j;
      j += 2;
      if (j >= m_) return label & low_mask(m_);
      z = next_draw(z);
    }
  }

  std::uint64_t segment(std::uint64_t pw) const noexcept {
    if (maybe_overridden(pw)) {
      auto it = overrides_.find(pw);
      if (it != overrides_.end()) return it->second;
    }
    return natural_segment(pw);
  }

  // h(pw) == bin, stopping at the first mismatching pair of bits.
  bool matches(std::uint64_t pw, std::uint64_t bin) const noexcept {
    if (maybe_overridden(pw)) {
      auto it = overrides_.find(pw);
      if (it != overrides_.end()) return it->second == bin;
    }
    std::uint64_t z = first_draw(pw);
    for (unsigned j = 0;;) {
      if ((pair(z) ^ (bin >> j)) & level_mask(j)) return false;
      j += 2;
      if (j >= m_) return true;
      z = next_draw(z);
    }
  }

  // h(pw) in set, pruning on prefixes when the set carries a prefix index.
  bool matches_any(std::uint64_t pw, const BinSet& set) const noexcept {
    if (maybe_overridden(pw)) {
      auto it = overrides_.find(pw);
      if (it != overrides_.end()) return set.contains(it->second);
    }
    if (!set.has_prefix_index()) return set.contains(natural_segment(pw));
    std::uint64_t z = first_draw(pw);
    std::uint64_t label = 0;
    for (unsigned j = 0;;) {
      label |= (pair(z) & level_mask(j)) << j;
      j += 2;
      unsigned depth = j < m_ ? j : m_;
      if (!set.prefix_possible(depth, label)) return false;
      if (j >= m_) return true;
      z = next_draw(z);
    }
  }

  // Position of the first password in pws[0, count) hashing to `bin`, or
  // `count`. Each level is evaluated for the whole block before the next
  // so the independent mixes overlap; survivors stay in order.
  std::size_t first_match(const std::uint64_t* pws, std::size_t count,
                          std::uint64_t bin) const noexcept {
    if (any_maybe_overridden(pws, count)) {
      for (std::size_t k = 0; k < count; ++k)
        if (matches(pws[k], bin)) return k;
      return count;
    }
    std::uint64_t z[kBlock];
    std::uint32_t idx[kBlock];
    std::uint64_t want = bin & level_mask(0);
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < count; ++k) {
      z[k] = first_draw(pws[k]);
      mask |= static_cast<std::uint64_t>((pair(z[k]) & level_mask(0)) == want) << k;
    }
    if (mask == 0) return count;
    if (m_ <= 2) return std::countr_zero(mask);
    std::size_t live = 0;
    for (; mask; mask &= mask - 1) {
      unsigned k = std::countr_zero(mask);
      idx[live] = k;
      z[live++] = next_draw(z[k]);
    }
    for (unsigned j = 2;;) {
      const std::uint64_t lm = level_mask(j);
      want = (bin >> j) & lm;
      std::size_t w = 0;
      for (std::size_t k = 0; k < live; ++k) {
        std::uint64_t keep = (pair(z[k]) & lm) == want;
        z[w] = z[k];
        idx[w] = idx[k];
        w += keep;
      }
      live = w;
      if (live == 0) return count;
      j += 2;
      if (j >= m_) return idx[0];
      for (std::size_t k = 0; k < live; ++k) z[k] = next_draw(z[k]);
    }
  }

  // Same for membership in `set` (prefix pruning when available).
  std::size_t first_match_any(const std::uint64_t* pws, std::size_t count,
                              const BinSet& set) const noexcept {
    if (!set.has_prefix_index() || any_maybe_overridden(pws, count)) {
      for (std::size_t k = 0; k < count; ++k)
        if (matches_any(pws[k], set)) return k;
      return count;
    }
    std::uint64_t z[kBlock];
    std::uint64_t label[kBlock];
    std::uint32_t idx[kBlock];
    for (std::size_t k = 0; k < count; ++k) {
      z[k] = first_draw(pws[k]);
      label[k] = 0;
      idx[k] = static_cast<std::uint32_t>(k);
    }
    std::size_t live = count;
    for (unsigned j = 0;;) {
      const std::uint64_t lm = level_mask(j);
      const unsigned depth = j + 2 < m_ ? j + 2 : m_;
      std::size_t w = 0;
      for (std::size_t k = 0; k < live; ++k) {
        std::uint64_t l = label[k] | (pair(z[k]) & lm) << j;
        z[w] = z[k];
        label[w] = l;
        idx[w] = idx[k];
        w += set.prefix_possible(depth, l);
      }
      live = w;
      if (live == 0) return count;
      j += 2;
      if (j >= m_) return idx[0];
      for (std::size_t k = 0; k < live; ++k) z[k] = next_draw(z[k]);
    }
  }

  static constexpr std::size_t kBlock = 64;

  // Plants pw -> bin. A password index can be overridden only once.
  void add_override(std::uint64_t pw, BinLabel bin);
  std::optional<std::uint64_t> override_at(std::uint64_t pw) const;
  std::size_t override_count() const noexcept { return overrides_.size(); }
  // (password, bin) pairs sorted by password.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> overrides() const;
  void clear_overrides();

 private:
  static constexpr unsigned kFilterBits = 16;

  std::uint64_t first_draw(std::uint64_t pw) const noexcept {
    return mix64(stream_ + (pw + 1) * kGolden);
  }
  static std::uint64_t next_draw(std::uint64_t z) noexcept {
    return mix64(z + kGolden);
  }
  // Bits (2k, 2k+1) of the segment from draw k: high half, then low half.
  std::uint64_t pair(std::uint64_t z) const noexcept {
    return static_cast<std::uint64_t>((z >> 32) < threshold_) |
           static_cast<std::uint64_t>((z & 0xffffffffULL) < threshold_) << 1;
  }
  // Valid bits of the pair starting at segment bit j.
  std::uint64_t level_mask(unsigned j) const noexcept {
    return j + 1 < m_ ? 3 : 1;
  }
  static std::uint64_t filter_slot(std::uint64_t pw) noexcept {
    return (pw ^ (pw >> 16) ^ (pw >> 32) ^ (pw >> 48)) & low_mask(kFilterBits);
  }
  bool any_maybe_overridden(const std::uint64_t* pws,
                            std::size_t count) const noexcept {
    if (overrides_.empty()) return false;
    std::uint64_t hit = 0;
    for (std::size_t k = 0; k < count; ++k) {
      std::uint64_t s = filter_slot(pws[k]);
      hit |= filter_[s >> 6] >> (s & 63);
    }
    return hit & 1;
  }
  bool maybe_overridden(std::uint64_t pw) const noexcept {
    if (overrides_.empty()) return false;
    std::uint64_t s = filter_slot(pw);
    return (filter_[s >> 6] >> (s & 63)) & 1;
  }

  unsigned m_;
  unsigned n_;
  double p_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t threshold_;
  std::unordered_map<std::uint64_t, std::uint64_t> overrides_;
  std::vector<std::uint64_t> filter_;
};

// Explicit hash table with 2^n entries of m bits (n, m <= kTableCap).
class TableHash {
 public:
  TableHash(unsigned m, unsigned n, std::vector<std::uint32_t> entries);

  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return n_; }
  std::uint64_t max_password() const noexcept { return low_mask(n_); }
  const std::vector<std::uint32_t>& entries() const noexcept {
    return entries_;
  }

  // Provenance of sampled tables, carried for serialization.
  std::optional<double> sampled_p;
  std::optional<std::uint64_t> sampled_seed;

  BinLabel eval(std::uint64_t pw) const;
  std::uint64_t segment(std::uint64_t pw) const noexcept {
    return entries_[pw];
  }
  bool matches(std::uint64_t pw, std::uint64_t bin) const noexcept {
    return entries_[pw] == bin;
  }
  bool matches_any(std::uint64_t pw, const BinSet& set) const noexcept {
    return set.contains(entries_[pw]);
  }
  std::size_t first_match(const std::uint64_t* pws, std::size_t count,
                          std::uint64_t bin) const noexcept {
    for (std::size_t k = 0; k < count; ++k)
      if (entries_[pws[k]] == bin) return k;
    return count;
  }
  std::size_t first_match_any(const std::uint64_t* pws, std::size_t count,
                              const BinSet& set) const noexcept {
    for (std::size_t k = 0; k < count; ++k)
      if (set.contains(entries_[pws[k]])) return k;
    return count;
  }
  static constexpr std::size_t kBlock = 64;
  void set_entry(std::uint64_t pw, BinLabel bin);

 private:
  unsigned m_;
  unsigned n_;
  std::vector<std::uint32_t> entries_;
};

struct EffectiveDistribution {
  unsigned m = 0;
  std::vector<double> fractions;
};

// Materializes the keyed model's natural segments as a table.
TableHash sample_table_hash(unsigned m, unsigned n, double p,
                            std::uint64_t seed);
EffectiveDistribution effective_distribution(const TableHash& h);
// Exact i.i.d. Bernoulli(p) law over the 2^m bins (m <= kTableCap).
EffectiveDistribution bernoulli_distribution(unsigned m, double p);
std::uint64_t preimage_count(const TableHash& h, BinLabel b);
std::vector<std::uint64_t> preimage_counts(const TableHash& h);

// All 2^m bins, least likely first: popcount descending, ascending numeric
// within a popcount. m <= kTableCap.
std::vector<BinLabel> rank_bins_by_likelihood(unsigned m, double p);
// The first `count` bins of the same order, generated lazily for any m.
std::vector<BinLabel> least_likely_bins(unsigned m, double p,
                                        std::uint64_t count);

// Next integer above x with the same popcount (x != 0).
constexpr std::uint64_t next_same_popcount(std::uint64_t x) noexcept {
  std::uint64_t c = x & (0 - x);
  std::uint64_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

}  // namespace gwlab
