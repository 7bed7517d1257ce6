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

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "slp/constellation.hpp"
#include "slp/types.hpp"

namespace slp {

enum class CiMetric { StrictRotation, NonStrictRotation, SymbolScaling };

/// Power minimisation: per-user SINR targets (linear) and noise variance.
struct PowerMin {
  std::vector<double> gamma;
  double sigma2 = 1.0;
};

/// Margin balancing under a per-slot power budget.
struct Balancing {
  double p0 = 1.0;
};

struct NoRobustness {};
/// Noise-robust sector: the targets Gamma_k are read as Gamma_k * sigma shifts.
struct NoiseRobust {};
/// Target symbol error probability p in (0, 0.5).
struct SepTarget {
  double p = 0.01;
};

using Robustness = std::variant<NoRobustness, NoiseRobust, SepTarget>;

struct CiSpec {
  CiMetric metric = CiMetric::NonStrictRotation;
  std::variant<PowerMin, Balancing> mode = PowerMin{};
  Robustness robustness = NoRobustness{};

  void validate() const;
};

/// Interference scalars of one symbol slot. Exactly one of the two vectors
/// is populated: `lambda` for phase-rotation metrics (h_k^T x = lambda_k s_k),
/// `alpha` for symbol scaling (h_k^T x = alpha_a s_a + alpha_b s_b).
struct UserScalars {
  std::vector<cplx> lambda;
  std::vector<std::array<double, 2>> alpha;

  bool symbol_scaling() const { return !alpha.empty(); }
  std::size_t users() const { return symbol_scaling() ? alpha.size() : lambda.size(); }
};

struct SymbolBasis {
  cplx a;
  cplx b;
};

/// lambda_k = (h_k^T x) / s_k.
CVec lambda_of(const CMat& h, const CVec& x, const CVec& s);

/// Splits a constellation point along its two detection-boundary directions.
/// QAM and BPSK use (Re s, j Im s); M-PSK with M > 2 uses the sector edges
/// s e^{+-j pi/M} / (2 cos(pi/M)).
SymbolBasis decompose_symbol(cplx s, const Constellation& c);

/// Real solution of alpha_a s_a + alpha_b s_b = h_k^T x for every user.
UserScalars alphas_of(const CMat& h, const CVec& x, const CVec& s, const Constellation& c);

/// Same as alphas_of, for one user and an already-computed received sample.
std::array<double, 2> alphas_for(cplx received, cplx s, const Constellation& c);

struct CiMargins {
  RVec margin;
  /// StrictRotation only: |Im lambda_k| <= 1e-9. Always true otherwise.
  std::vector<bool> aligned;

  bool holds(double tol = 1e-9) const;
  double min() const { return margin.size() ? margin.minCoeff() : 0.0; }
};

/// Signed per-user CI margins at level t (>= 0 iff the condition holds).
/// `symbols` are constellation indices; needed to classify outer/inner
/// components for QAM and APSK.
CiMargins ci_margin(const UserScalars& scalars, const Constellation& c,
                    std::span<const int> symbols, CiMetric metric, double t);

/// Checks that `metric` is defined for the constellation kind; throws
/// MetricMismatch otherwise.
void check_metric(const Constellation& c, CiMetric metric);

/// Gamma * sigma / sin(pi/M).
double noise_robust_t(double gamma, double sigma, int m);

/// erfinv(1 - 2p) * sigma / sin(pi/M).
double sep_t(double p, double sigma, int m);

/// Inverse error function on (-1, 1).
double erfinv(double y);

}  // namespace slp
