// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The slp-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slp {

enum class Errc {
  InvalidArgument,
  UnsupportedOrder,
  DimensionMismatch,
  ZeroSymbol,
  DegenerateBasis,
  SingularDecomposition,
  MetricMismatch,
  OutOfRange,
  SingularChannel,
  ZeroDirection,
  NotConverged,
  InfeasibleTargets,
  SolverFailure,
  Config,
};

std::string_view to_string(Errc code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UnsupportedOrder: return "UnsupportedOrder";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroSymbol: return "ZeroSymbol";
    case Errc::DegenerateBasis: return "DegenerateBasis";
    case Errc::SingularDecomposition: return "SingularDecomposition";
    case Errc::MetricMismatch: return "MetricMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::SingularChannel: return "SingularChannel";
    case Errc::ZeroDirection: return "ZeroDirection";
    case Errc::NotConverged: return "NotConverged";
    case Errc::InfeasibleTargets: return "InfeasibleTargets";
    case Errc::SolverFailure: return "SolverFailure";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace slp
