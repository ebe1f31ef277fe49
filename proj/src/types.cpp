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

#include "pufota/types.hpp"

#include "pufota/error.hpp"

namespace pufota {

void SetDescriptor::validate() const {
  if (n == 0) throw ContractError("element set is empty");
  if (n > kMaxCount) throw ContractError("element set larger than 2^20 - 1");
  if (s0 > UINT64_MAX - (n - 1)) throw ContractError("element set overflows 64 bits");
}

}  // namespace pufota
