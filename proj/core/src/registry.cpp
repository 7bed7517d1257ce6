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

#include "slp/registry.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "slp/errors.hpp"
#include "slp/quantized.hpp"

namespace slp {

namespace {

constexpr std::array<std::pair<std::string_view, PrecoderId>, 14> kNames{{
    {"zf", PrecoderId::Zf},
    {"rzf", PrecoderId::Rzf},
    {"mrt", PrecoderId::Mrt},
    {"pm-duality", PrecoderId::PmDuality},
    {"cpm-strict", PrecoderId::CpmStrict},
    {"cpm-nonstrict", PrecoderId::CpmNonStrict},
    {"cpm-ss", PrecoderId::CpmSs},
    {"csb-ss", PrecoderId::CsbSs},
    {"civp", PrecoderId::Civp},
    {"multicast", PrecoderId::Multicast},
    {"dac1-lp", PrecoderId::Dac1Lp},
    {"dacB-ccd", PrecoderId::DacBCcd},
    {"cep", PrecoderId::Cep},
    {"cep-vga", PrecoderId::CepVga},
}};

CiSpec cpm_spec(PrecoderId id, const PrecoderParams& p) {
  CiSpec spec;
  spec.metric = id == PrecoderId::CpmStrict      ? CiMetric::StrictRotation
                : id == PrecoderId::CpmNonStrict ? CiMetric::NonStrictRotation
                                                 : CiMetric::SymbolScaling;
  spec.mode = PowerMin{p.gamma, p.sigma2};
  return spec;
}

PrecodeResult from_cep(const ChannelContext& ch, const SymbolSlot& slot, const PrecoderParams& p,
                       bool with_gain) {
  // amplitude targets: the level ZF reaches under the same budget
  const double t_zf = zf_sym(ch, slot.s, p.p0).t;
  const RVec sqrt_e = RVec::Constant(ch.users(), t_zf);
  const CepResult ce = cep_descent(ch, sqrt_e, slot.s, p.p0, with_gain);
  PrecodeResult r;
  r.x = ce.point.signal();
  r.objective = ce.objective;
  r.t = t_zf;
  r.rx_scale = sqrt_e;
  const CVec lam = lambda_of(ch.h(), r.x, slot.s);
  r.scalars.lambda.assign(lam.data(), lam.data() + lam.size());
  r.report.iterations = ce.sweeps;
  return r;
}

}  // namespace

std::optional<PrecoderId> parse_precoder(std::string_view name) {
  for (const auto& [n, id] : kNames) {
    if (n == name) return id;
  }
  return std::nullopt;
}

std::string_view to_string(PrecoderId id) {
  for (const auto& [n, i] : kNames) {
    if (i == id) return n;
  }
  return "unknown";
}

std::vector<std::string_view> precoder_names() {
  std::vector<std::string_view> out;
  for (const auto& entry : kNames) out.push_back(entry.first);
  return out;
}

bool power_minimizing(PrecoderId id) {
  switch (id) {
    case PrecoderId::PmDuality:
    case PrecoderId::CpmStrict:
    case PrecoderId::CpmNonStrict:
    case PrecoderId::CpmSs:
    case PrecoderId::Multicast:
      return true;
    default:
      return false;
  }
}

bool noise_dependent(PrecoderId id) { return id == PrecoderId::Rzf || id == PrecoderId::DacBCcd; }

void check_supported(PrecoderId id, const Constellation& c) {
  const bool psk = c.kind() == ModKind::PSK;
  switch (id) {
    case PrecoderId::CpmStrict:
    case PrecoderId::CpmNonStrict:
    case PrecoderId::CpmSs:
      check_metric(c, cpm_spec(id, {}).metric);
      break;
    case PrecoderId::Civp:
    case PrecoderId::Multicast:
    case PrecoderId::Dac1Lp:
      if (!psk) {
        throw Error(Errc::MetricMismatch,
                    std::string(to_string(id)) + " is defined for PSK only, not " + c.name());
      }
      break;
    case PrecoderId::CsbSs:
      check_metric(c, c.kind() == ModKind::APSK ? CiMetric::NonStrictRotation : CiMetric::SymbolScaling);
      break;
    default:
      break;
  }
}

PrecodeResult apply_block(const ChannelContext& ch, const CMat& w, const SymbolSlot& slot) {
  PrecodeResult r;
  r.x = w * slot.s;
  r.objective = r.x.squaredNorm();
  // block-level beamformers: user k sees its own gain h_k^T w_k
  const CVec gain = (ch.h() * w).diagonal();
  r.rx_scale = gain.cwiseAbs();
  r.t = r.rx_scale.size() ? r.rx_scale.minCoeff() : 0.0;
  const CVec lam = lambda_of(ch.h(), r.x, slot.s);
  r.scalars.lambda.assign(lam.data(), lam.data() + lam.size());
  return r;
}

PrecodeResult precode(PrecoderId id, const ChannelContext& ch, const SymbolSlot& slot,
                      const Constellation& c, const PrecoderParams& p) {
  check_supported(id, c);
  switch (id) {
    case PrecoderId::Zf:
      return zf_sym(ch, slot.s, p.p0);
    case PrecoderId::Rzf:
      return rzf_sym(ch, slot.s, p.p0, p.sigma2);
    case PrecoderId::Mrt:
      return mrt_sym(ch, slot.s, p.p0);
    case PrecoderId::PmDuality:
      return apply_block(ch, pm_duality(ch, p.gamma, p.sigma2).w, slot);
    case PrecoderId::CpmStrict:
    case PrecoderId::CpmNonStrict:
    case PrecoderId::CpmSs:
      return cpm(ch, slot, c, cpm_spec(id, p));
    case PrecoderId::CsbSs:
      return csb_symbol_scaling(ch, slot, c, p.p0);
    case PrecoderId::Civp:
      return civp_strict(ch, slot, c, p.p0);
    case PrecoderId::Multicast:
      return multicast_equivalent(ch, slot, c, p.gamma, p.sigma2).result;
    case PrecoderId::Dac1Lp: {
      const OneBitResult ob = onebit_lp(ch, slot, c, p.p0);
      PrecodeResult r;
      r.x = ob.x;
      r.t = ob.t;
      r.objective = ob.t;
      r.rx_scale = RVec::Constant(ch.users(), std::max(ob.t, 0.0));
      const CVec lam = lambda_of(ch.h(), r.x, slot.s);
      r.scalars.lambda.assign(lam.data(), lam.data() + lam.size());
      r.report = ob.report;
      return r;
    }
    case PrecoderId::DacBCcd: {
      const auto alphabet = QuantAlphabet::uniform(p.bits, p.p0, static_cast<int>(ch.antennas()));
      const CcdResult cc = bbit_ccd(ch, slot.s, p.sigma2, alphabet);
      PrecodeResult r;
      r.x = cc.x;
      r.objective = cc.objective;
      r.t = 1.0 / cc.beta;
      r.rx_scale = RVec::Constant(ch.users(), r.t);
      const CVec lam = lambda_of(ch.h(), r.x, slot.s);
      r.scalars.lambda.assign(lam.data(), lam.data() + lam.size());
      r.report.iterations = cc.sweeps;
      return r;
    }
    case PrecoderId::Cep:
      return from_cep(ch, slot, p, false);
    case PrecoderId::CepVga:
      return from_cep(ch, slot, p, true);
  }
  throw Error(Errc::InvalidArgument, "unknown precoder");
}

}  // namespace slp
