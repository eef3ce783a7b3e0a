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

#include "s3mirror/store/content.hpp"

#include "s3mirror/common/digest.hpp"

namespace s3mirror::store {

namespace {

inline std::uint64_t word_at(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

}  // namespace

void generate_content(std::uint64_t seed, std::uint64_t offset, std::span<std::uint8_t> out) {
  std::size_t i = 0;
  std::uint64_t pos = offset;
  while (i < out.size()) {
    const std::uint64_t word = word_at(seed, pos / 8);
    for (unsigned b = static_cast<unsigned>(pos % 8); b < 8 && i < out.size(); ++b, ++i, ++pos) {
      out[i] = static_cast<std::uint8_t>(word >> (8 * b));
    }
  }
}

std::string generate_content(std::uint64_t seed, std::uint64_t size) {
  std::string s(size, '\0');
  generate_content(seed, 0,
                   std::span<std::uint8_t>(reinterpret_cast<std::uint8_t*>(s.data()), s.size()));
  return s;
}

}  // namespace s3mirror::store
