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

#include "slp/channel_context.hpp"
#include "slp/ci_geometry.hpp"
#include "slp/constellation.hpp"
#include "slp/opt_kernels.hpp"
#include "slp/types.hpp"

namespace slp {

/// One vector of simultaneous data symbols.
struct SymbolSlot {
  std::vector<int> index;  // constellation indices, one per user
  CVec s;                  // the corresponding points

  static SymbolSlot from_indices(const Constellation& c, std::vector<int> index);
};

struct PrecodeResult {
  CVec x;
  UserScalars scalars;
  /// ||x||^2 for power-minimizing designs, the achieved level t otherwise.
  double objective = 0.0;
  /// Operating CI level (smallest per-user level for power minimization).
  double t = 0.0;
  /// Per-user amplitude the receiver scales its decision thresholds by.
  RVec rx_scale;
  /// Norm of the unnormalized design vector (perturbation-type precoders).
  double beta = 0.0;
  SolveReport report;
};

// Closed-form symbol-level baselines, all normalized to ||x||^2 = P0.
PrecodeResult zf_sym(const ChannelContext& ch, const CVec& s, double p0);
PrecodeResult rzf_sym(const ChannelContext& ch, const CVec& s, double p0, double sigma2);
PrecodeResult mrt_sym(const ChannelContext& ch, const CVec& s, double p0);

/// Block-level SINR-constrained power minimization via uplink-downlink duality.
/// Conjugation convention: virtual uplink signatures are g_k = conj(h_k), so
/// the downlink gain of beamformer w at user k is h_k^T w = g_k^H w.
struct DualityResult {
  CMat w;        // Nt x K beamformers, column k = sqrt(p_k) u_k
  RVec q;        // virtual uplink powers
  RVec p;        // downlink powers
  double power = 0.0;
  int iterations = 0;
};

DualityResult pm_duality(const ChannelContext& ch, std::span<const double> gamma, double sigma2);

/// Downlink SINR of every user for beamformers W.
RVec downlink_sinr(const CMat& h, const CMat& w, double sigma2);

/// Per-user CI thresholds t_k implied by a power-minimization spec.
RVec power_min_thresholds(const CiSpec& spec, const Constellation& c, Eigen::Index users);

/// CI power minimization. spec.mode must be PowerMin.
PrecodeResult cpm(const ChannelContext& ch, const SymbolSlot& slot, const Constellation& c,
                  const CiSpec& spec);

/// CI margin balancing under ||x||^2 <= P0 via the symbol-scaling
/// perturbation design. APSK and overloaded channels take a QP route.
PrecodeResult csb_symbol_scaling(const ChannelContext& ch, const SymbolSlot& slot,
                                 const Constellation& c, double p0, double alpha0 = 1.0);

/// Vector perturbation restricted to strictly phase-aligned nonnegative
/// perturbations.
PrecodeResult civp_strict(const ChannelContext& ch, const SymbolSlot& slot,
                          const Constellation& c, double p0);

/// CPM solved through the physical-layer multicast form, with per-user
/// beamformer recovery.
struct MulticastResult {
  PrecodeResult result;
  CMat w;  // Nt x K, sum_k w_k s_k = x
};

MulticastResult multicast_equivalent(const ChannelContext& ch, const SymbolSlot& slot,
                                     const Constellation& c, std::span<const double> gamma,
                                     double sigma2);

/// Interference scalars in the form matching a metric.
UserScalars scalars_for(const CMat& h, const CVec& x, const SymbolSlot& slot,
                        const Constellation& c, CiMetric metric);

}  // namespace slp
