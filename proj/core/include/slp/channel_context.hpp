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

#include "slp/types.hpp"

namespace slp {

/// A channel realization with its pseudo-inverse precomputed, shared by all
/// symbol slots of one coherence block.
class ChannelContext {
 public:
  ChannelContext(const CMat& h);

  const CMat& h() const { return h_; }
  /// Nt x K right pseudo-inverse H^H (H H^H)^+, SVD-based.
  const CMat& pinv() const { return pinv_; }
  const RVec& singular_values() const { return sv_; }
  double condition() const { return cond_; }

  Eigen::Index users() const { return h_.rows(); }
  Eigen::Index antennas() const { return h_.cols(); }
  bool overloaded() const { return h_.rows() > h_.cols(); }

  /// Throws SingularChannel when the condition number exceeds 1e12.
  void require_invertible() const;

 private:
  CMat h_;
  CMat pinv_;
  RVec sv_;
  double cond_ = 1.0;
};

}  // namespace slp
