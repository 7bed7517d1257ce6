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

#include "slp/mimo_model.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slp/errors.hpp"
#include "slp/format.hpp"

namespace slp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

SeededRng SeededRng::substream(std::uint64_t id) const {
  return SeededRng(splitmix64(seed_ ^ 0x5bd1e995ULL) ^ stream_, id);
}

double SeededRng::gaussian() { return normal_(engine_); }

cplx SeededRng::complex_gaussian(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {s * re, s * im};
}

int SeededRng::uniform_int(int n) {
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(engine_);
}

CMat sample_rayleigh(int k, int nt, SeededRng& rng) {
  if (k < 1 || nt < 1) throw Error(Errc::InvalidArgument, "channel dimensions must be >= 1");
  CMat h(k, nt);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < nt; ++c) h(r, c) = rng.complex_gaussian(1.0);
  }
  return h;
}

CVec transmit_noiseless(const CMat& h, const CVec& x) {
  if (h.cols() != x.size()) {
    throw Error(Errc::DimensionMismatch, "H has " + std::to_string(h.cols()) +
                                             " columns but x has " + std::to_string(x.size()) +
                                             " entries");
  }
  return h * x;
}

CVec transmit(const CMat& h, const CVec& x, const std::optional<NoiseSpec>& noise, SeededRng& rng) {
  CVec y = transmit_noiseless(h, x);
  if (noise) {
    if (!(noise->sigma2 > 0.0)) throw Error(Errc::InvalidArgument, "sigma2 must be > 0");
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) += rng.complex_gaussian(noise->sigma2);
  }
  return y;
}

void write_channel_csv(std::ostream& os, const CMat& h) {
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      if (c > 0) os << ',';
      os << format_double(h(r, c).real()) << ',' << format_double(h(r, c).imag());
    }
    os << '\n';
  }
}

CMat read_channel_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* first = cell.data();
      while (first != cell.data() + cell.size() && *first == ' ') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc{}) {
        throw Error(Errc::InvalidArgument, "channel csv: cannot parse '" + cell + "'");
      }
      vals.push_back(v);
    }
    if (vals.size() % 2 != 0) {
      throw Error(Errc::InvalidArgument, "channel csv: odd number of values in a row");
    }
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw Error(Errc::DimensionMismatch, "channel csv: ragged rows");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw Error(Errc::InvalidArgument, "channel csv: no rows");
  const auto k = static_cast<Eigen::Index>(rows.size());
  const auto nt = static_cast<Eigen::Index>(rows.front().size() / 2);
  CMat h(k, nt);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < nt; ++c) {
      h(r, c) = cplx(rows[r][2 * c], rows[r][2 * c + 1]);
    }
  }
  return h;
}

}  // namespace slp
