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

#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace s3mirror::harness {

/// Whole cents. Amounts are computed exactly and rounded half-up once.
struct Money {
  std::int64_t cents = 0;
  std::string str() const;
  double dollars() const { return static_cast<double>(cents) / 100.0; }
  friend bool operator==(const Money&, const Money&) = default;
};

/// Prices are in micro-dollars (1e-6 $) so that quoted rates stay exact.
struct PerGbPricing {
  std::int64_t micros_per_gb = 15'000;
  std::int64_t task_fee_micros = 550'000;
  /// Bytes per billed GB. 2^30 by default; use 1e9 for decimal billing.
  std::uint64_t bytes_per_gb = 1ull << 30;
};

struct PerCpuMsPricing {
  std::int64_t micros_per_million_ms = 50'000;
};

using PricingModel = std::variant<PerGbPricing, PerCpuMsPricing>;

/// `quantity` is bytes for PerGbPricing and CPU milliseconds for PerCpuMsPricing.
Money compute_cost(std::uint64_t quantity, const PricingModel& model);

}  // namespace s3mirror::harness
