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
#include <iosfwd>
#include <optional>
#include <random>

#include "slp/types.hpp"

namespace slp {

/// Deterministic random stream identified by (master seed, stream id).
/// Distinct stream ids give statistically independent draws.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Child stream, e.g. separate channel and noise draws of one trial.
  SeededRng substream(std::uint64_t id) const;

  double gaussian();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  cplx complex_gaussian(double variance = 1.0);
  int uniform_int(int n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct NoiseSpec {
  double sigma2 = 1.0;  // per complex sample
};

/// K x Nt i.i.d. CN(0, 1) entries.
CMat sample_rayleigh(int k, int nt, SeededRng& rng);

/// y = Hx + n. Passing no NoiseSpec gives the noiseless evaluation.
CVec transmit(const CMat& h, const CVec& x, const std::optional<NoiseSpec>& noise, SeededRng& rng);
CVec transmit_noiseless(const CMat& h, const CVec& x);

/// Channel CSV: one row per user, entries as interleaved re,im pairs.
void write_channel_csv(std::ostream& os, const CMat& h);
CMat read_channel_csv(std::istream& is);

}  // namespace slp
