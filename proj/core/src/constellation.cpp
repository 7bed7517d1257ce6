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

#include "slp/constellation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "slp/errors.hpp"

namespace slp {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(int v) { return std::countr_zero(static_cast<unsigned>(v)); }

void normalize_energy(std::vector<cplx>& pts) {
  double e = 0.0;
  for (const auto& p : pts) e += std::norm(p);
  const double scale = std::sqrt(static_cast<double>(pts.size()) / e);
  for (auto& p : pts) p *= scale;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

}  // namespace

std::uint32_t gray_code(std::uint32_t n) { return n ^ (n >> 1); }

ApskRings ApskRings::dvbs2_16() {
  return ApskRings{{4, 12}, {1.0, 2.57}, {kPi / 4.0, kPi / 12.0}};
}

Constellation make_constellation(ModKind kind, int order,
                                 const std::optional<ApskRings>& apsk_rings) {
  Constellation c;
  c.kind_ = kind;

  switch (kind) {
    case ModKind::PSK: {
      if (order < 2 || !is_power_of_two(order)) {
        throw Error(Errc::UnsupportedOrder, "PSK order must be a power of two >= 2, got " +
                                                std::to_string(order));
      }
      c.phase_offset_ = order == 2 ? 0.0 : kPi / order;
      c.theta_th_ = kPi / order;
      for (int m = 0; m < order; ++m) {
        const double phi = 2.0 * kPi * m / order + c.phase_offset_;
        c.points_.push_back(std::polar(1.0, phi));
        c.labels_.push_back(gray_code(static_cast<std::uint32_t>(m)));
      }
      c.name_ = "psk" + std::to_string(order);
      break;
    }
    case ModKind::QAM: {
      if (order != 4 && order != 16 && order != 64 && order != 256) {
        throw Error(Errc::UnsupportedOrder,
                    "QAM order must be one of 4, 16, 64, 256, got " + std::to_string(order));
      }
      const int side = static_cast<int>(std::lround(std::sqrt(order)));
      const int half_bits = log2_exact(side);
      const double unit = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
      for (int i = 0; i < side; ++i) c.levels_.push_back((2 * i - side + 1) * unit);
      for (int ir = 0; ir < side; ++ir) {
        for (int ii = 0; ii < side; ++ii) {
          c.points_.emplace_back(c.levels_[ir], c.levels_[ii]);
          c.labels_.push_back((gray_code(static_cast<std::uint32_t>(ir)) << half_bits) |
                              gray_code(static_cast<std::uint32_t>(ii)));
        }
      }
      c.theta_th_ = kPi / 4.0;
      c.name_ = "qam" + std::to_string(order);
      break;
    }
    case ModKind::APSK: {
      const ApskRings rings = apsk_rings.value_or(ApskRings::dvbs2_16());
      const auto nring = rings.counts.size();
      if (nring == 0 || rings.radius_ratios.size() != nring || rings.phase_offsets.size() != nring) {
        throw Error(Errc::UnsupportedOrder, "APSK ring spec has inconsistent lengths");
      }
      const int total = std::accumulate(rings.counts.begin(), rings.counts.end(), 0);
      if (total != order || !is_power_of_two(order) || order < 4) {
        throw Error(Errc::UnsupportedOrder, "APSK ring counts sum to " + std::to_string(total) +
                                                ", expected power-of-two order " +
                                                std::to_string(order));
      }
      for (std::size_t r = 0; r < nring; ++r) {
        if (rings.counts[r] < 1 || !(rings.radius_ratios[r] > 0.0) ||
            (r > 0 && !(rings.radius_ratios[r] > rings.radius_ratios[r - 1]))) {
          throw Error(Errc::UnsupportedOrder, "APSK rings must have positive counts and strictly "
                                              "increasing radii");
        }
      }
      // Per-ring Gray: consecutive points on a ring take consecutive Gray codes.
      std::uint32_t next = 0;
      for (std::size_t r = 0; r < nring; ++r) {
        for (int i = 0; i < rings.counts[r]; ++i) {
          const double phi = rings.phase_offsets[r] + 2.0 * kPi * i / rings.counts[r];
          c.points_.push_back(std::polar(rings.radius_ratios[r], phi));
          c.labels_.push_back(gray_code(next++));
          c.ring_of_.push_back(static_cast<int>(r));
        }
      }
      normalize_energy(c.points_);
      const double scale = std::abs(c.points_.front());
      for (std::size_t r = 0; r < nring; ++r) {
        c.ring_radii_.push_back(scale * rings.radius_ratios[r] / rings.radius_ratios[0]);
      }
      c.theta_th_ = kPi / rings.counts.back();
      c.name_ = "apsk" + std::to_string(order);
      break;
    }
  }
  c.bits_ = log2_exact(order);
  return c;
}

Constellation constellation_from_id(std::string_view id) {
  struct Prefix {
    std::string_view text;
    ModKind kind;
  };
  static constexpr Prefix kPrefixes[] = {
      {"apsk", ModKind::APSK}, {"psk", ModKind::PSK}, {"qam", ModKind::QAM}};
  for (const auto& p : kPrefixes) {
    if (!id.starts_with(p.text)) continue;
    const auto digits = id.substr(p.text.size());
    int order = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) break;
    return make_constellation(p.kind, order);
  }
  throw Error(Errc::UnsupportedOrder, "unknown modulation id '" + std::string(id) + "'");
}

int detect(cplx y, const Constellation& c, double t) {
  switch (c.kind()) {
    case ModKind::PSK: {
      const int m = c.order();
      const double step = 2.0 * kPi / m;
      const double a = wrap_angle(std::arg(y) - c.phase_offset() + 0.5 * step);
      return static_cast<int>(std::floor(a / step)) % m;
    }
    case ModKind::QAM: {
      const int side = c.side();
      const double unit = c.level_set()[1] - c.level_set()[0];  // level spacing
      auto axis = [&](double v) {
        // midpoint thresholds of t-scaled levels (2i - side + 1) * unit / 2
        const double u = v / (t * 0.5 * unit);
        const int i = static_cast<int>(std::floor((u + side) / 2.0));
        return std::clamp(i, 0, side - 1);
      };
      return axis(y.real()) * side + axis(y.imag());
    }
    case ModKind::APSK: {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int m = 0; m < c.order(); ++m) {
        const double d = std::norm(y - t * c.point(m));
        if (d < best_d) {
          best_d = d;
          best = m;
        }
      }
      return best;
    }
  }
  return 0;
}

std::vector<ComponentClass> classify_components(const Constellation& c) {
  std::vector<ComponentClass> out(static_cast<std::size_t>(c.order()));
  switch (c.kind()) {
    case ModKind::PSK:
      break;
    case ModKind::QAM: {
      const int top = c.side() - 1;
      for (int m = 0; m < c.order(); ++m) {
        auto cls = [&](int level) {
          return (level == 0 || level == top) ? Component::Outer : Component::Inner;
        };
        auto& e = out[static_cast<std::size_t>(m)];
        e.real_axis = cls(c.real_level(m));
        e.imag_axis = cls(c.imag_level(m));
        e.point = (e.real_axis == Component::Outer || e.imag_axis == Component::Outer)
                      ? Component::Outer
                      : Component::Inner;
      }
      break;
    }
    case ModKind::APSK: {
      const int outer = static_cast<int>(c.ring_radii().size()) - 1;
      for (int m = 0; m < c.order(); ++m) {
        const auto cls = c.ring_of(m) == outer ? Component::Outer : Component::Inner;
        out[static_cast<std::size_t>(m)] = {cls, cls, cls};
      }
      break;
    }
  }
  return out;
}

}  // namespace slp
