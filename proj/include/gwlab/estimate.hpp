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

#include <cmath>
#include <cstdint>

namespace gwlab {

struct EstimateWithCI {
  double mean = 0.0;
  double half_width_95 = 0.0;  // 1.96 * sample sd / sqrt(trials)
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;

  double std_error() const noexcept { return half_width_95 / 1.96; }
};

// Running moments in a fixed accumulation order. Compensated (Neumaier)
// sums keep the result independent of magnitude ordering effects; callers
// that need determinism across worker counts feed samples in trial order.
class MomentAccumulator {
 public:
  void add(double x, bool failure = false) noexcept {
    add_compensated(sum_, comp_, x);
    add_compensated(sq_, sq_comp_, x * x);
    ++count_;
    if (failure) ++failures_;
  }

  std::uint64_t count() const noexcept { return count_; }

  EstimateWithCI estimate() const noexcept {
    EstimateWithCI e;
    e.trials = count_;
    e.failures = failures_;
    if (count_ == 0) return e;
    double n = static_cast<double>(count_);
    e.mean = (sum_ + comp_) / n;
    if (count_ > 1) {
      double var = ((sq_ + sq_comp_) - n * e.mean * e.mean) / (n - 1.0);
      e.half_width_95 = var > 0.0 ? 1.96 * std::sqrt(var / n) : 0.0;
    }
    return e;
  }

 private:
  static void add_compensated(double& sum, double& comp, double x) noexcept {
    double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double sum_ = 0.0, comp_ = 0.0;
  double sq_ = 0.0, sq_comp_ = 0.0;
  std::uint64_t count_ = 0;
  std::uint64_t failures_ = 0;
};

}  // namespace gwlab
