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

#include "slp/ci_constraints.hpp"

#include <cmath>

#include "slp/errors.hpp"

namespace slp {

namespace {

struct RowBuilder {
  std::vector<RVec> rows;
  std::vector<double> level;
  std::vector<int> user;

  void add(const RVec& r, double l, int k) {
    rows.push_back(r);
    level.push_back(l);
    user.push_back(k);
  }

  LinearBlock finish(Eigen::Index n) const {
    LinearBlock b;
    b.rows.resize(static_cast<Eigen::Index>(rows.size()), n);
    b.level.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      b.rows.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      b.level(static_cast<Eigen::Index>(i)) = level[i];
    }
    b.user = user;
    return b;
  }
};

// Re and Im of g^T x as rows acting on [Re x; Im x].
void complex_rows(const CVec& g, RVec& re, RVec& im) {
  const auto n = g.size();
  re.resize(2 * n);
  im.resize(2 * n);
  re.head(n) = g.real();
  re.tail(n) = -g.imag();
  im.head(n) = g.imag();
  im.tail(n) = g.real();
}

}  // namespace

RVec LinearBlock::rhs(const RVec& t) const {
  RVec out(size());
  for (Eigen::Index i = 0; i < size(); ++i) out(i) = level(i) * t(user[static_cast<std::size_t>(i)]);
  return out;
}

CiConstraints build_ci_constraints(const CMat& h, std::span<const int> symbols,
                                   const Constellation& c, CiMetric metric) {
  check_metric(c, metric);
  if (static_cast<Eigen::Index>(symbols.size()) != h.rows()) {
    throw Error(Errc::DimensionMismatch, "one symbol per user required");
  }
  const auto n = 2 * h.cols();
  const bool bpsk = c.kind() == ModKind::PSK && c.order() == 2;
  const auto classes = classify_components(c);
  RowBuilder ge;
  RowBuilder eq;
  RVec re;
  RVec im;

  for (int k = 0; k < static_cast<int>(symbols.size()); ++k) {
    const int m = symbols[static_cast<std::size_t>(k)];
    const cplx s = c.point(m);
    const auto& cls = classes.at(static_cast<std::size_t>(m));

    if (metric == CiMetric::SymbolScaling && !bpsk) {
      complex_rows(h.row(k).transpose(), re, im);
      const auto [sa, sb] = decompose_symbol(s, c);
      Eigen::Matrix2d basis;
      basis << sa.real(), sb.real(), sa.imag(), sb.imag();
      const Eigen::Matrix2d inv = basis.inverse();
      const RVec alpha_a = inv(0, 0) * re + inv(0, 1) * im;
      const RVec alpha_b = inv(1, 0) * re + inv(1, 1) * im;
      (cls.real_axis == Component::Outer ? ge : eq).add(alpha_a, 1.0, k);
      (cls.imag_axis == Component::Outer ? ge : eq).add(alpha_b, 1.0, k);
      continue;
    }

    // lambda_k = (h_k / s_k)^T x
    complex_rows(h.row(k).transpose() / s, re, im);
    const bool inner_apsk = c.kind() == ModKind::APSK && cls.point == Component::Inner;
    if (metric == CiMetric::StrictRotation || inner_apsk) {
      (inner_apsk ? eq : ge).add(re, 1.0, k);
      eq.add(im, 0.0, k);
    } else if (bpsk) {
      // BPSK: the sector is a half plane; symbol scaling also pins Im to zero
      ge.add(re, 1.0, k);
      if (metric == CiMetric::SymbolScaling) eq.add(im, 0.0, k);
    } else {
      const double th = c.theta_th();
      const double sn = std::sin(th);
      const double cs = std::cos(th);
      ge.add(sn * re - cs * im, sn, k);
      ge.add(sn * re + cs * im, sn, k);
    }
  }
  return {ge.finish(n), eq.finish(n)};
}

}  // namespace slp
