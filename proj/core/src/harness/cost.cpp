// Copyright 2026 The s3mirror Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s3mirror/harness/cost.hpp"

#include <cstdio>

namespace s3mirror::harness {

std::string Money::str() const {
  char buf[48];
  const std::int64_t a = cents < 0 ? -cents : cents;
  std::snprintf(buf, sizeof buf, "%s$%lld.%02lld", cents < 0 ? "-" : "",
                static_cast<long long>(a / 100), static_cast<long long>(a % 100));
  return buf;
}

namespace {

// round_half_up(num / den) for non-negative operands.
std::int64_t div_round(unsigned __int128 num, unsigned __int128 den) {
  return static_cast<std::int64_t>((num + den / 2) / den);
}

}  // namespace

Money compute_cost(std::uint64_t quantity, const PricingModel& model) {
  constexpr unsigned __int128 kMicrosPerCent = 10'000;
  return std::visit(
      [&](const auto& m) -> Money {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PerGbPricing>) {
          const unsigned __int128 den = m.bytes_per_gb;
          const unsigned __int128 num = static_cast<unsigned __int128>(quantity) * m.micros_per_gb +
                                        static_cast<unsigned __int128>(m.task_fee_micros) * den;
          return Money{div_round(num, den * kMicrosPerCent)};
        } else {
          const unsigned __int128 num = static_cast<unsigned __int128>(quantity) * m.micros_per_million_ms;
          return Money{div_round(num, 1'000'000 * kMicrosPerCent)};
        }
      },
      model);
}

}  // namespace s3mirror::harness
