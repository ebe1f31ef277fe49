// Copyright 2026 The pufota Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy of
// the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations under
// the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "pufota/bits.hpp"

namespace pufota {

// 128-bit identifier of a PPUF instance (and of the device carrying it).
using InstanceId = std::array<std::uint8_t, 16>;

inline std::string to_hex(const InstanceId& id) { return to_hex(ByteView(id)); }

// The contiguous set {s0, ..., s0 + n - 1} from which protocol elements are
// drawn. n travels in 20 bits on the wire.
struct SetDescriptor {
  static constexpr std::uint64_t kMaxCount = (std::uint64_t{1} << 20) - 1;

  std::uint64_t s0 = 0;
  std::uint64_t n = 1;

  bool contains(std::uint64_t x) const { return x >= s0 && x - s0 < n; }
  void validate() const;
  bool operator==(const SetDescriptor&) const = default;
};

}  // namespace pufota
