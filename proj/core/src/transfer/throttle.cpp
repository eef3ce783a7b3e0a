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

#include "s3mirror/transfer/throttle.hpp"

#include <algorithm>

namespace s3mirror::transfer {

Throttle::Permit& Throttle::Permit::operator=(Permit&& other) noexcept {
  if (this != &other) {
    if (owner_) owner_->give_back();
    owner_ = other.owner_;
    other.owner_ = nullptr;
  }
  return *this;
}

Throttle::Permit::~Permit() {
  if (owner_) owner_->give_back();
}

Throttle::Throttle(int permits) : capacity_(permits) {
  if (permits <= 0) throw std::invalid_argument("throttle needs at least one permit");
}

Throttle::Permit Throttle::acquire() {
  std::unique_lock lk(mu_);
  cv_.wait(lk, [this] { return outstanding_ < capacity_; });
  ++outstanding_;
  max_outstanding_ = std::max(max_outstanding_, outstanding_);
  return Permit(this);
}

std::optional<Throttle::Permit> Throttle::try_acquire() {
  std::lock_guard lk(mu_);
  if (outstanding_ >= capacity_) return std::nullopt;
  ++outstanding_;
  max_outstanding_ = std::max(max_outstanding_, outstanding_);
  return Permit(this);
}

void Throttle::release(Permit& permit) {
  if (permit.owner_ != this) throw ContractViolation("release of a permit that is not held");
  permit.owner_ = nullptr;
  give_back();
}

void Throttle::give_back() {
  {
    std::lock_guard lk(mu_);
    --outstanding_;
  }
  cv_.notify_one();
}

int Throttle::outstanding() const {
  std::lock_guard lk(mu_);
  return outstanding_;
}

int Throttle::max_outstanding() const {
  std::lock_guard lk(mu_);
  return max_outstanding_;
}

}  // namespace s3mirror::transfer
