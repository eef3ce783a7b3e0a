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
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "s3mirror/store/object_store.hpp"

namespace s3mirror::harness {

struct DatasetSpec {
  std::size_t file_count = 64;
  /// Sizes are drawn uniformly from [min_size, max_size]; equal bounds give a fixed size.
  std::uint64_t min_size = 8 * store::kMiB;
  std::uint64_t max_size = 32 * store::kMiB;
  std::uint64_t seed = 1;
  std::string key_prefix = "data/";

  static DatasetSpec fixed(std::size_t count, std::uint64_t size, std::uint64_t seed = 1);
  void validate() const;
};

void to_json(nlohmann::json& j, const DatasetSpec& s);
void from_json(const nlohmann::json& j, DatasetSpec& s);

struct DatasetEntry {
  std::string key;
  std::uint64_t size = 0;
  std::uint64_t content_seed = 0;
};

/// Deterministic layout; no store access.
std::vector<DatasetEntry> plan_dataset(const DatasetSpec& spec);

/// Writes every planned object into `bucket` (which must exist) and returns the manifest.
std::vector<DatasetEntry> generate_dataset(store::ObjectStore& store, const DatasetSpec& spec,
                                           const std::string& bucket);

std::vector<std::string> keys_of(const std::vector<DatasetEntry>& manifest);

}  // namespace s3mirror::harness
