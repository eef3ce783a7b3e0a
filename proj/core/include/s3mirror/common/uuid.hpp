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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace s3mirror {

/// 128-bit identifier rendered in canonical hyphenated form.
class Uuid {
 public:
  Uuid() = default;

  /// Version 4 (random).
  static Uuid random();

  /// Name-based identifier derived from a parent id and a sequence number.
  /// The same inputs always yield the same id.
  static Uuid derive(const Uuid& parent, std::uint64_t seq);

  static std::optional<Uuid> parse(std::string_view text);

  std::string str() const;
  bool is_nil() const;

  const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }

  friend auto operator<=>(const Uuid&, const Uuid&) = default;

 private:
  std::array<std::uint8_t, 16> bytes_{};
};

}  // namespace s3mirror

template <>
struct std::hash<s3mirror::Uuid> {
  std::size_t operator()(const s3mirror::Uuid& id) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto b : id.bytes()) h = (h ^ b) * 1099511628211ull;
    return h;
  }
};
