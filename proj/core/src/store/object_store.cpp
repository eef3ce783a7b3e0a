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

#include "s3mirror/store/object_store.hpp"

#include "s3mirror/store/content.hpp"

namespace s3mirror::store {

void ObjectStore::put_generated(const ObjectRef& ref, std::uint64_t size, std::uint64_t seed) {
  put_object(ref, generate_content(seed, size));
}

}  // namespace s3mirror::store
