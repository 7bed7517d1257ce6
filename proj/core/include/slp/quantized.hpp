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

#include <optional>
#include <vector>

#include "slp/channel_context.hpp"
#include "slp/constellation.hpp"
#include "slp/opt_kernels.hpp"
#include "slp/precoders.hpp"
#include "slp/types.hpp"

namespace slp {

/// Per-axis DAC output levels.
class QuantAlphabet {
 public:
  /// 2^B uniform symmetric levels +-(2i-1)/(2^B-1) * a, a = sqrt(P0 / (2 Nt)).
  static QuantAlphabet uniform(int bits, double p0, int nt);
  /// Arbitrary symmetric level set (for nested-alphabet experiments).
  static QuantAlphabet from_levels(std::vector<double> levels);

  int bits() const { return bits_; }
  const std::vector<double>& levels() const { return levels_; }
  double bound() const { return levels_.back(); }

  /// Nearest level; ties go to the larger level.
  double quantize(double v) const;
  bool contains(double v) const;

 private:
  int bits_ = 1;
  std::vector<double> levels_;
};

struct OneBitResult {
  CVec x;
  double t = 0.0;        // smallest non-strict margin level after quantization
  double t_relax = 0.0;  // LP relaxation optimum
  /// Every relaxed coordinate already sat on +-a, so quantization was lossless.
  bool sign_consistent = false;
  SolveReport report;
};

/// 1-bit CI precoding by LP relaxation (box |z_i| <= a) and sign quantization.
OneBitResult onebit_lp(const ChannelContext& ch, const SymbolSlot& slot, const Constellation& c,
                       double p0);

/// Largest t with every user inside the non-strict sector at level t.
double nonstrict_level(const CMat& h, const CVec& x, const CVec& s, const Constellation& c);

struct CcdResult {
  CVec x;
  double beta = 0.0;
  double objective = 0.0;
  /// Objective after initialization and after every accepted update.
  std::vector<double> trace;
  int sweeps = 0;
};

/// ||s - beta H x||^2 + K beta^2 sigma2.
double ccd_objective(const CMat& h, const CVec& s, const CVec& x, double beta, double sigma2);

/// B-bit MSE precoding by cyclic coordinate descent over the real axes.
CcdResult bbit_ccd(const ChannelContext& ch, const CVec& s, double sigma2,
                   const QuantAlphabet& alphabet, const std::optional<CVec>& init = std::nullopt);

struct CePoint {
  RVec thetas;
  double gain = 0.0;

  CVec signal() const;
};

struct CepResult {
  CePoint point;
  double objective = 0.0;
  std::vector<double> trace;
  int sweeps = 0;
};

/// sum_k |h_k^T x - sqrt(E_k) s_k|^2.
double cep_objective(const CMat& h, const CVec& x, const RVec& sqrt_e, const CVec& s);

/// Constant-envelope interference minimization by cyclic phase updates.
/// with_gain enables the common variable-gain amplifier, capped at sqrt(P0/Nt).
CepResult cep_descent(const ChannelContext& ch, const RVec& sqrt_e, const CVec& s, double p0,
                      bool with_gain, const std::optional<RVec>& init_thetas = std::nullopt);

}  // namespace slp
