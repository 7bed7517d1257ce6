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
#include <string_view>
#include <vector>

#include "slp/channel_context.hpp"
#include "slp/constellation.hpp"
#include "slp/precoders.hpp"

namespace slp {

enum class PrecoderId {
  Zf,
  Rzf,
  Mrt,
  PmDuality,
  CpmStrict,
  CpmNonStrict,
  CpmSs,
  CsbSs,
  Civp,
  Multicast,
  Dac1Lp,
  DacBCcd,
  Cep,
  CepVga,
};

std::optional<PrecoderId> parse_precoder(std::string_view name);
std::string_view to_string(PrecoderId id);
/// Every accepted CLI name, in declaration order.
std::vector<std::string_view> precoder_names();

/// Minimizes power under SINR/CI targets rather than working at a budget.
bool power_minimizing(PrecoderId id);
/// The transmit signal depends on the noise variance.
bool noise_dependent(PrecoderId id);
/// Throws MetricMismatch if the precoder cannot serve this constellation.
void check_supported(PrecoderId id, const Constellation& c);

struct PrecoderParams {
  double p0 = 1.0;
  double sigma2 = 1.0;
  /// Linear SINR targets, one per user (power-minimizing precoders).
  std::vector<double> gamma;
  int bits = 2;
};

/// Uniform entry point used by the simulator and the CLI demo. pm-duality
/// builds its block beamformers from scratch on every call.
PrecodeResult precode(PrecoderId id, const ChannelContext& ch, const SymbolSlot& slot,
                      const Constellation& c, const PrecoderParams& params);

/// Slot signal x = W s for block beamformers.
PrecodeResult apply_block(const ChannelContext& ch, const CMat& w, const SymbolSlot& slot);

}  // namespace slp
