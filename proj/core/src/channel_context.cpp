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

#include "slp/channel_context.hpp"

#include <limits>

#include <Eigen/SVD>

#include "slp/errors.hpp"

namespace slp {

namespace {
constexpr double kTruncation = 1e-12;
constexpr double kMaxCondition = 1e12;
}  // namespace

ChannelContext::ChannelContext(const CMat& h) : h_(h) {
  if (h.rows() < 1 || h.cols() < 1) throw Error(Errc::InvalidArgument, "empty channel matrix");
  if (!h.allFinite()) throw Error(Errc::InvalidArgument, "channel has non-finite entries");
  Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  sv_ = svd.singularValues();
  const double smax = sv_(0);
  const double smin = sv_(sv_.size() - 1);
  cond_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

  RVec inv = RVec::Zero(sv_.size());
  for (Eigen::Index i = 0; i < sv_.size(); ++i) {
    if (sv_(i) > kTruncation * smax) inv(i) = 1.0 / sv_(i);
  }
  pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

void ChannelContext::require_invertible() const {
  if (!(cond_ <= kMaxCondition)) {
    throw Error(Errc::SingularChannel, "channel condition number exceeds 1e12");
  }
}

}  // namespace slp
