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

#include "gwlab/hashmodel.hpp"

#include <algorithm>
#include <cmath>

#include "gwlab/errors.hpp"
#include "gwlab/infotheory.hpp"
#include "gwlab/rates.hpp"

namespace gwlab {
namespace {

void check_width(unsigned m) {
  if (m == 0 || m > kMaxBinWidth)
    throw DomainError("bin width m must lie in [1," +
                      std::to_string(kMaxBinWidth) + "]");
}

void check_bin(std::uint64_t bits, unsigned m) {
  if (bits & ~low_mask(m))
    throw RangeError("bin value does not fit in " + std::to_string(m) +
                     " bits");
}

void check_password(std::uint64_t pw, unsigned n) {
  if (pw & ~low_mask(n))
    throw RangeError("password index " + std::to_string(pw) +
                     " is outside [0, 2^" + std::to_string(n) + ")");
}

}  // namespace

BinLabel::BinLabel(std::uint64_t b, unsigned width) : bits(b), m(width) {
  check_width(width);
  check_bin(b, width);
}

std::string BinLabel::to_string() const {
  std::string s(m, '0');
  for (unsigned j = 0; j < m; ++j)
    if ((bits >> j) & 1) s[m - 1 - j] = '1';
  return s;
}

BinLabel BinLabel::from_string(const std::string& s) {
  if (s.empty() || s.size() > kMaxBinWidth)
    throw DomainError("bin string must have 1.." +
                      std::to_string(kMaxBinWidth) + " characters");
  std::uint64_t bits = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw DomainError("bin string must be binary");
    bits = (bits << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return BinLabel(bits, static_cast<unsigned>(s.size()));
}

BinSet::BinSet(unsigned m, std::span<const std::uint64_t> bins) : m_(m) {
  check_width(m);
  bins_.assign(bins.begin(), bins.end());
  for (std::uint64_t b : bins_) check_bin(b, m);
  std::sort(bins_.begin(), bins_.end());
  bins_.erase(std::unique(bins_.begin(), bins_.end()), bins_.end());
  if (m > kTableCap) return;
  levels_.resize(m + 1);
  for (unsigned d = 1; d <= m; ++d) {
    levels_[d].assign(((std::uint64_t{1} << d) + 63) / 64, 0);
    for (std::uint64_t b : bins_) {
      std::uint64_t prefix = b & low_mask(d);
      levels_[d][prefix >> 6] |= std::uint64_t{1} << (prefix & 63);
    }
  }
}

namespace {
std::vector<std::uint64_t> raw_bits(std::span<const BinLabel> bins,
                                    unsigned m) {
  std::vector<std::uint64_t> out;
  out.reserve(bins.size());
  for (const BinLabel& b : bins) {
    if (b.m != m) throw DomainError("bin width mismatch in set");
    out.push_back(b.bits);
  }
  return out;
}
}  // namespace

BinSet::BinSet(unsigned m, std::span<const BinLabel> bins)
    : BinSet(m, raw_bits(bins, m)) {}

bool BinSet::contains(std::uint64_t bin) const noexcept {
  if (!levels_.empty()) return bin <= low_mask(m_) && prefix_possible(m_, bin);
  return std::binary_search(bins_.begin(), bins_.end(), bin);
}

KeyedHashModel::KeyedHashModel(unsigned m, unsigned n, double p,
                               std::uint64_t seed)
    : m_(m), n_(n), p_(p), seed_(seed) {
  check_width(m);
  if (n == 0 || n > kMaxPasswordWidth)
    throw DomainError("password width n must lie in [1,64]");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1)");
  stream_ = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  threshold_ = static_cast<std::uint64_t>(std::llround(std::ldexp(p, 32)));
  filter_.assign((std::uint64_t{1} << kFilterBits) / 64, 0);
}

BinLabel KeyedHashModel::eval(std::uint64_t pw) const {
  check_password(pw, n_);
  return BinLabel(segment(pw), m_);
}

void KeyedHashModel::add_override(std::uint64_t pw, BinLabel bin) {
  check_password(pw, n_);
  if (bin.m != m_) throw DomainError("override bin width differs from m");
  check_bin(bin.bits, m_);
  if (!overrides_.emplace(pw, bin.bits).second)
    throw DomainError("password index " + std::to_string(pw) +
                      " is already overridden");
  std::uint64_t s = filter_slot(pw);
  filter_[s >> 6] |= std::uint64_t{1} << (s & 63);
}

std::optional<std::uint64_t> KeyedHashModel::override_at(
    std::uint64_t pw) const {
  auto it = overrides_.find(pw);
  if (it == overrides_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>>
KeyedHashModel::overrides() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(overrides_.begin(),
                                                           overrides_.end());
  std::sort(out.begin(), out.end());
  return out;
}

void KeyedHashModel::clear_overrides() {
  overrides_.clear();
  std::fill(filter_.begin(), filter_.end(), 0);
}

TableHash::TableHash(unsigned m, unsigned n, std::vector<std::uint32_t> entries)
    : m_(m), n_(n), entries_(std::move(entries)) {
  check_width(m);
  if (n == 0) throw DomainError("password width n must be positive");
  if (n > kTableCap || m > kTableCap)
    throw ResourceError("explicit tables are limited to n, m <= " +
                        std::to_string(kTableCap) +
                        "; use the keyed model instead");
  if (entries_.size() != (std::uint64_t{1} << n))
    throw DomainError("table must have exactly 2^n entries");
  for (std::uint32_t e : entries_) check_bin(e, m);
}

BinLabel TableHash::eval(std::uint64_t pw) const {
  check_password(pw, n_);
  return BinLabel(entries_[pw], m_);
}

void TableHash::set_entry(std::uint64_t pw, BinLabel bin) {
  check_password(pw, n_);
  if (bin.m != m_) throw DomainError("entry bin width differs from m");
  entries_[pw] = static_cast<std::uint32_t>(bin.bits);
}

TableHash sample_table_hash(unsigned m, unsigned n, double p,
                            std::uint64_t seed) {
  if (n > kTableCap || m > kTableCap)
    throw ResourceError("explicit tables are limited to n, m <= " +
                        std::to_string(kTableCap));
  KeyedHashModel key(m, n, p, seed);
  std::vector<std::uint32_t> entries(std::uint64_t{1} << n);
  for (std::uint64_t i = 0; i < entries.size(); ++i)
    entries[i] = static_cast<std::uint32_t>(key.natural_segment(i));
  TableHash h(m, n, std::move(entries));
  h.sampled_p = p;
  h.sampled_seed = seed;
  return h;
}

std::vector<std::uint64_t> preimage_counts(const TableHash& h) {
  std::vector<std::uint64_t> counts(std::uint64_t{1} << h.m(), 0);
  for (std::uint32_t e : h.entries()) ++counts[e];
  return counts;
}

EffectiveDistribution effective_distribution(const TableHash& h) {
  std::vector<std::uint64_t> counts = preimage_counts(h);
  EffectiveDistribution d{h.m(), std::vector<double>(counts.size())};
  double total = std::ldexp(1.0, static_cast<int>(h.n()));
  for (std::size_t b = 0; b < counts.size(); ++b)
    d.fractions[b] = static_cast<double>(counts[b]) / total;
  return d;
}

EffectiveDistribution bernoulli_distribution(unsigned m, double p) {
  check_width(m);
  if (m > kTableCap)
    throw ResourceError("exact distributions are limited to m <= " +
                        std::to_string(kTableCap));
  std::vector<double> by_weight(m + 1);
  for (unsigned k = 0; k <= m; ++k)
    by_weight[k] = std::exp2(log2_sequence_probability(m, k, p));
  EffectiveDistribution d{m, std::vector<double>(std::uint64_t{1} << m)};
  for (std::uint64_t b = 0; b < d.fractions.size(); ++b)
    d.fractions[b] = by_weight[std::popcount(b)];
  return d;
}

std::uint64_t preimage_count(const TableHash& h, BinLabel b) {
  if (b.m != h.m()) throw DomainError("bin width differs from table m");
  return static_cast<std::uint64_t>(
      std::count(h.entries().begin(), h.entries().end(),
                 static_cast<std::uint32_t>(b.bits)));
}

std::vector<BinLabel> least_likely_bins(unsigned m, double p,
                                        std::uint64_t count) {
  check_width(m);
  validate_bias(p);
  if (count > low_mask(m) + 1 || (m < 64 && count > (std::uint64_t{1} << m)))
    throw DomainError("more bins requested than exist");
  std::vector<BinLabel> out;
  out.reserve(count);
  for (int k = static_cast<int>(m); k >= 0 && out.size() < count; --k) {
    if (k == 0) {
      out.emplace_back(0, m);
      break;
    }
    std::uint64_t x = low_mask(static_cast<unsigned>(k));
    std::uint64_t last = x << (m - static_cast<unsigned>(k));
    while (out.size() < count) {
      out.emplace_back(x, m);
      if (x == last) break;
      x = next_same_popcount(x);
    }
  }
  return out;
}

std::vector<BinLabel> rank_bins_by_likelihood(unsigned m, double p) {
  check_width(m);
  if (m > kTableCap)
    throw ResourceError("full bin ranking is limited to m <= " +
                        std::to_string(kTableCap) +
                        "; use least_likely_bins");
  return least_likely_bins(m, p, std::uint64_t{1} << m);
}

}  // namespace gwlab
