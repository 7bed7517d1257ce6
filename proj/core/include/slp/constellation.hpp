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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slp/types.hpp"

namespace slp {

enum class ModKind { PSK, QAM, APSK };

enum class Component { Outer, Inner };

/// Ring layout for APSK. Rings are listed innermost first; radius ratios are
/// relative to the innermost ring (so the first entry is 1).
struct ApskRings {
  std::vector<int> counts;
  std::vector<double> radius_ratios;
  std::vector<double> phase_offsets;  // radians, first point of each ring

  /// DVB-S2 style 4+12 layout with outer/inner radius ratio 2.57.
  static ApskRings dvbs2_16();
};

/// Per-symbol classification of which received components may be pushed
/// outward. For PSK every entry is Outer.
struct ComponentClass {
  Component real_axis = Component::Outer;
  Component imag_axis = Component::Outer;
  Component point = Component::Outer;
};

/// Immutable unit-average-energy modulation alphabet with Gray labels.
class Constellation {
 public:
  ModKind kind() const { return kind_; }
  int order() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_; }

  std::span<const cplx> points() const { return points_; }
  cplx point(int m) const { return points_.at(static_cast<std::size_t>(m)); }
  std::uint32_t label(int m) const { return labels_.at(static_cast<std::size_t>(m)); }
  std::span<const std::uint32_t> labels() const { return labels_; }

  /// Half-angle of the constructive sector: pi/M for PSK, pi/N_outer for APSK.
  double theta_th() const { return theta_th_; }
  /// Rotation of the first PSK point (pi/M, or 0 for BPSK).
  double phase_offset() const { return phase_offset_; }

  /// APSK only: ascending ring radii, and ring index per point.
  std::span<const double> ring_radii() const { return ring_radii_; }
  int ring_of(int m) const { return ring_of_.at(static_cast<std::size_t>(m)); }

  /// QAM only: ascending per-axis amplitude levels.
  std::span<const double> level_set() const { return levels_; }
  /// QAM only: per-axis level indices of point m.
  int real_level(int m) const { return m / side(); }
  int imag_level(int m) const { return m % side(); }
  int side() const { return static_cast<int>(levels_.size()); }

  /// CLI-facing identifier such as "psk8" or "qam16".
  const std::string& name() const { return name_; }

  friend Constellation make_constellation(ModKind, int, const std::optional<ApskRings>&);

 private:
  Constellation() = default;

  ModKind kind_ = ModKind::PSK;
  int bits_ = 0;
  double theta_th_ = 0.0;
  double phase_offset_ = 0.0;
  std::vector<cplx> points_;
  std::vector<std::uint32_t> labels_;
  std::vector<double> ring_radii_;
  std::vector<int> ring_of_;
  std::vector<double> levels_;
  std::string name_;
};

/// PSK: any power of two M >= 2. QAM: M in {4, 16, 64, 256}. APSK: ring spec
/// (defaults to 4+12) whose counts sum to a power of two equal to `order`.
Constellation make_constellation(ModKind kind, int order,
                                 const std::optional<ApskRings>& apsk_rings = std::nullopt);

/// Parses "psk4", "psk8", "qam16", "qam64", "apsk16", ...
Constellation constellation_from_id(std::string_view id);

/// Hard decision. PSK decides by angle and ignores t; QAM thresholds sit at
/// midpoints of the t-scaled levels; APSK picks the nearest t-scaled point.
int detect(cplx y, const Constellation& c, double t);

std::vector<ComponentClass> classify_components(const Constellation& c);

std::uint32_t gray_code(std::uint32_t n);

}  // namespace slp
