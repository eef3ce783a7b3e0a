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

#include <condition_variable>
#include <mutex>
#include <optional>
#include <stdexcept>

namespace s3mirror::transfer {

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Counting semaphore over this worker's share of in-flight write requests.
class Throttle {
 public:
  class Permit {
   public:
    Permit() = default;
    Permit(Permit&& other) noexcept : owner_(other.owner_) { other.owner_ = nullptr; }
    Permit& operator=(Permit&& other) noexcept;
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit();

    bool held() const { return owner_ != nullptr; }

   private:
    friend class Throttle;
    explicit Permit(Throttle* owner) : owner_(owner) {}
    Throttle* owner_ = nullptr;
  };

  explicit Throttle(int permits);
  Throttle(const Throttle&) = delete;
  Throttle& operator=(const Throttle&) = delete;

  /// Blocks until a permit is free.
  Permit acquire();
  std::optional<Permit> try_acquire();
  /// Returns a permit early. Releasing a permit that is not held throws
  /// ContractViolation.
  void release(Permit& permit);

  int capacity() const { return capacity_; }
  int outstanding() const;
  int max_outstanding() const;

 private:
  void give_back();

  const int capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int outstanding_ = 0;
  int max_outstanding_ = 0;
};

}  // namespace s3mirror::transfer
