// Copyright 2026 The AFETM Authors
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

#ifndef AFETM_FAULT_HPP_
#define AFETM_FAULT_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "afetm/common.hpp"

namespace afetm {

enum class FaultKind {
  kIpPlusN,
  kCrash,
  kDeadlock,
  kInputCorruption,
  kOutputCorruption,
};

inline constexpr std::array<FaultKind, 5> kAllFaultKinds = {
    FaultKind::kIpPlusN, FaultKind::kCrash, FaultKind::kDeadlock,
    FaultKind::kInputCorruption, FaultKind::kOutputCorruption};

enum class FaultSite { kEntry, kReturn };

std::string_view to_string(FaultKind k);
FaultKind fault_kind_from_string(std::string_view s);
std::string_view to_string(FaultSite s);
FaultSite fault_site_from_string(std::string_view s);

// A permanent function-level fault: every activation of `target` exhibits
// it.
struct FaultSpec {
  FaultKind kind = FaultKind::kCrash;
  FunctionId target;
  FaultSite site = FaultSite::kEntry;
  std::optional<int> param_index;  // input corruption only
  std::optional<int> return_index;  // output corruption only
  std::optional<int> bit_index;    // interface corruptions; default bit 0
  int skip = 1;                    // IP+N: call instructions skipped

  // Classification label "<function>:<kind>".
  std::string label() const;
  // Unique key including site and indices.
  std::string key() const;

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

inline constexpr std::string_view kNormalLabel = "normal";

// Function component of a label, or nullopt for the normal label.
std::optional<FunctionId> label_function(std::string_view label);

}  // namespace afetm

#endif  // AFETM_FAULT_HPP_
