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

#include <chrono>
#include <cstdint>

namespace s3mirror {

using Millis = std::chrono::milliseconds;

/// Wall-clock milliseconds since the Unix epoch; the unit stored in every
/// durable timestamp.
inline std::int64_t now_ms() {
  return std::chrono::duration_cast<Millis>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

inline double ms_to_seconds(std::int64_t ms) { return static_cast<double>(ms) / 1000.0; }

}  // namespace s3mirror
