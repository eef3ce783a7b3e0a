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

#include "s3mirror/harness/dataset.hpp"

#include <cstdio>
#include <stdexcept>

#include "s3mirror/common/digest.hpp"

namespace s3mirror::harness {

DatasetSpec DatasetSpec::fixed(std::size_t count, std::uint64_t size, std::uint64_t seed) {
  DatasetSpec s;
  s.file_count = count;
  s.min_size = s.max_size = size;
  s.seed = seed;
  return s;
}

void DatasetSpec::validate() const {
  if (min_size > max_size) throw std::invalid_argument("dataset min_size exceeds max_size");
}

void to_json(nlohmann::json& j, const DatasetSpec& s) {
  j = {{"file_count", s.file_count},
       {"min_size", s.min_size},
       {"max_size", s.max_size},
       {"seed", s.seed},
       {"key_prefix", s.key_prefix}};
}

void from_json(const nlohmann::json& j, DatasetSpec& s) {
  s.file_count = j.value("file_count", s.file_count);
  if (j.contains("size")) s.min_size = s.max_size = j.at("size").get<std::uint64_t>();
  s.min_size = j.value("min_size", s.min_size);
  s.max_size = j.value("max_size", s.max_size);
  s.seed = j.value("seed", s.seed);
  s.key_prefix = j.value("key_prefix", s.key_prefix);
}

std::vector<DatasetEntry> plan_dataset(const DatasetSpec& spec) {
  spec.validate();
  std::vector<DatasetEntry> out;
  out.reserve(spec.file_count);
  const std::uint64_t span = spec.max_size - spec.min_size;
  for (std::size_t i = 0; i < spec.file_count; ++i) {
    const std::uint64_t h = splitmix64(spec.seed * 0x100000001b3ull + i);
    char name[32];
    std::snprintf(name, sizeof name, "file-%05zu.bin", i);
    DatasetEntry e;
    e.key = spec.key_prefix + name;
    e.size = span == 0 ? spec.min_size : spec.min_size + h % (span + 1);
    e.content_seed = splitmix64(h);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<DatasetEntry> generate_dataset(store::ObjectStore& store, const DatasetSpec& spec,
                                           const std::string& bucket) {
  auto manifest = plan_dataset(spec);
  for (const auto& e : manifest) store.put_generated({bucket, e.key}, e.size, e.content_seed);
  return manifest;
}

std::vector<std::string> keys_of(const std::vector<DatasetEntry>& manifest) {
  std::vector<std::string> keys;
  keys.reserve(manifest.size());
  for (const auto& e : manifest) keys.push_back(e.key);
  return keys;
}

}  // namespace s3mirror::harness
