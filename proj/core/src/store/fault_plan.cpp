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

#include "s3mirror/store/fault_plan.hpp"

namespace s3mirror::store {

void to_json(nlohmann::json& j, const FaultPlan& p) {
  j = nlohmann::json{{"intermittent_error_rate", p.intermittent_error_rate},
                     {"intermittent_fail_counts", p.intermittent_fail_counts},
                     {"denied_keys", p.denied_keys},
                     {"latency_min_us", p.latency_min.count()},
                     {"latency_max_us", p.latency_max.count()},
                     {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, FaultPlan& p) {
  p = FaultPlan{};
  p.intermittent_error_rate = j.value("intermittent_error_rate", 0.0);
  if (j.contains("intermittent_fail_counts"))
    j.at("intermittent_fail_counts").get_to(p.intermittent_fail_counts);
  if (j.contains("denied_keys")) j.at("denied_keys").get_to(p.denied_keys);
  // "latency_ms" is a shorthand for a fixed latency.
  if (j.contains("latency_ms")) {
    p.latency_min = p.latency_max =
        std::chrono::microseconds(static_cast<std::int64_t>(j.at("latency_ms").get<double>() * 1000));
  }
  if (j.contains("latency_min_us")) p.latency_min = std::chrono::microseconds(j.at("latency_min_us").get<std::int64_t>());
  if (j.contains("latency_max_us")) p.latency_max = std::chrono::microseconds(j.at("latency_max_us").get<std::int64_t>());
  if (p.latency_max < p.latency_min) p.latency_max = p.latency_min;
  p.seed = j.value("seed", std::uint64_t{0});
}

}  // namespace s3mirror::store
