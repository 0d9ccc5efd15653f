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

#include "afetm/fault.hpp"

namespace afetm {

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::kIpPlusN:
      return "ip_plus_n";
    case FaultKind::kCrash:
      return "crash";
    case FaultKind::kDeadlock:
      return "deadlock";
    case FaultKind::kInputCorruption:
      return "input_corruption";
    case FaultKind::kOutputCorruption:
      return "output_corruption";
  }
  return "crash";
}

FaultKind fault_kind_from_string(std::string_view s) {
  for (FaultKind k : kAllFaultKinds) {
    if (to_string(k) == s) return k;
  }
  if (s == "IP+N") return FaultKind::kIpPlusN;
  throw ParseError("unknown fault kind '" + std::string(s) + "'");
}

std::string_view to_string(FaultSite s) {
  return s == FaultSite::kEntry ? "entry" : "return";
}

FaultSite fault_site_from_string(std::string_view s) {
  if (s == "entry") return FaultSite::kEntry;
  if (s == "return") return FaultSite::kReturn;
  throw ParseError("unknown fault site '" + std::string(s) + "'");
}

std::string FaultSpec::label() const {
  return target + ":" + std::string(to_string(kind));
}

std::string FaultSpec::key() const {
  std::string k = label() + "@" + std::string(to_string(site));
  if (param_index) k += "/p" + std::to_string(*param_index);
  if (return_index) k += "/r" + std::to_string(*return_index);
  if (bit_index) k += "/b" + std::to_string(*bit_index);
  if (kind == FaultKind::kIpPlusN) k += "/n" + std::to_string(skip);
  return k;
}

std::optional<FunctionId> label_function(std::string_view label) {
  if (label == kNormalLabel) return std::nullopt;
  const auto colon = label.rfind(':');
  if (colon == std::string_view::npos) return FunctionId(label);
  return FunctionId(label.substr(0, colon));
}

}  // namespace afetm
