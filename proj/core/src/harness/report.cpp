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

#include "s3mirror/harness/report.hpp"

#include <cstdio>

namespace s3mirror::harness {

BenchReport report_benchmark(std::uint64_t bytes_total, double duration_s,
                             std::vector<transfer::FileTask> per_file,
                             std::int64_t max_inflight_observed) {
  BenchReport r;
  r.files = per_file.size();
  r.bytes_total = bytes_total;
  r.duration = duration_s;
  r.rate = duration_s > 0 ? static_cast<double>(bytes_total) / duration_s : 0.0;
  r.per_file = std::move(per_file);
  r.max_inflight_observed = max_inflight_observed;
  return r;
}

BenchReport report_benchmark(const transfer::TransferStatusSnapshot& snapshot,
                             std::int64_t max_inflight_observed) {
  return report_benchmark(snapshot.bytes_done, snapshot.elapsed, snapshot.tasks, max_inflight_observed);
}

double transfer_seconds(double bytes, double bytes_per_second) {
  return bytes_per_second > 0 ? bytes / bytes_per_second : 0.0;
}

std::string BenchReport::table() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "files          %zu\n"
                "bytes          %llu (%.3f GiB, %.3f GB)\n"
                "duration       %.3f s\n"
                "rate           %.3f GiB/s (%.3f GB/s)\n"
                "max in-flight  %lld\n",
                files, static_cast<unsigned long long>(bytes_total),
                static_cast<double>(bytes_total) / kGiB, static_cast<double>(bytes_total) / kGB,
                duration, rate_gib_s(), rate_gb_s(), static_cast<long long>(max_inflight_observed));
  return buf;
}

void to_json(nlohmann::json& j, const BenchReport& r) {
  j = {{"files", r.files},
       {"bytes_total", r.bytes_total},
       {"bytes_total_gib", static_cast<double>(r.bytes_total) / kGiB},
       {"bytes_total_gb", static_cast<double>(r.bytes_total) / kGB},
       {"duration", r.duration},
       {"rate", r.rate},
       {"rate_gib_s", r.rate_gib_s()},
       {"rate_gb_s", r.rate_gb_s()},
       {"max_inflight_observed", r.max_inflight_observed},
       {"per_file", r.per_file}};
}

}  // namespace s3mirror::harness
