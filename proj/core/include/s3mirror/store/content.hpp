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
#include <span>
#include <string>

namespace s3mirror::store {

/// Fills `out` with bytes [offset, offset + out.size()) of the deterministic
/// stream identified by `seed`. Byte i of the stream depends only on (seed, i).
void generate_content(std::uint64_t seed, std::uint64_t offset, std::span<std::uint8_t> out);

std::string generate_content(std::uint64_t seed, std::uint64_t size);

}  // namespace s3mirror::store
