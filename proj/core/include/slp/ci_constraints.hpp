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

#include <span>
#include <vector>

#include "slp/ci_geometry.hpp"
#include "slp/constellation.hpp"
#include "slp/types.hpp"

namespace slp {

/// One family of linear CI constraints on the real-stacked transmit vector
/// z = [Re x; Im x]:  row_i . z  (>= or =)  level_i * t_{user_i}.
struct LinearBlock {
  RMat rows;
  RVec level;
  std::vector<int> user;

  Eigen::Index size() const { return rows.rows(); }
  /// Right-hand side for per-user thresholds t.
  RVec rhs(const RVec& t) const;
};

struct CiConstraints {
  LinearBlock ge;
  LinearBlock eq;
};

/// Builds the CI conditions of `metric` for channel h, symbol indices
/// `symbols` and constellation c.
CiConstraints build_ci_constraints(const CMat& h, std::span<const int> symbols,
                                   const Constellation& c, CiMetric metric);

}  // namespace slp
