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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "slp/errors.hpp"
#include "slp/quantized.hpp"

using namespace slp;

namespace {

SymbolSlot random_slot(std::mt19937_64& rng, const Constellation& c, int k) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (auto& i : idx) i = static_cast<int>(rng() % static_cast<unsigned>(c.order()));
  return SymbolSlot::from_indices(c, idx);
}

// min over beta >= floor of ||s - beta H x||^2 + K beta^2 sigma2, closed form
double best_mse(const CMat& h, const CVec& s, const CVec& x, double sigma2) {
  const CVec hx = h * x;
  const double den = hx.squaredNorm() + static_cast<double>(s.size()) * sigma2;
  const double beta = std::max(1e-12, s.dot(hx).real() / den);
  return (s - beta * hx).squaredNorm() + static_cast<double>(s.size()) * beta * beta * sigma2;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("uniform alphabets") {
  const double a = std::sqrt(2.0 / (2.0 * 4));
  const auto one = QuantAlphabet::uniform(1, 2.0, 4);
  CHECK(one.levels() == std::vector<double>{-a, a});
  const auto two = QuantAlphabet::uniform(2, 2.0, 4);
  REQUIRE(two.levels().size() == 4);
  CHECK(two.levels()[1] == doctest::Approx(-a / 3));
  CHECK(two.levels()[2] == doctest::Approx(a / 3));
  for (int b = 1; b <= 5; ++b) {
    const auto q = QuantAlphabet::uniform(b, 1.0, 3);
    const auto& lv = q.levels();
    CHECK(lv.size() == (1u << b));
    CHECK(q.bound() == std::sqrt(1.0 / 6.0));
    for (std::size_t i = 0; i < lv.size(); ++i) CHECK(lv[i] == -lv[lv.size() - 1 - i]);
    // uniform spacing
    for (std::size_t i = 1; i < lv.size(); ++i) {
      CHECK(lv[i] - lv[i - 1] == doctest::Approx(2.0 * q.bound() / ((1 << b) - 1)).epsilon(1e-12));
    }
  }
  CHECK(one.quantize(0.0) == a);
  CHECK(one.quantize(-1e-3) == -a);
  CHECK(one.contains(a));
  CHECK_FALSE(one.contains(0.5 * a));
  CHECK_THROWS_AS(QuantAlphabet::uniform(0, 1.0, 2), Error);
  CHECK_THROWS_AS(QuantAlphabet::from_levels({-1.0, 0.5}), Error);
}

TEST_CASE("one-bit single antenna example") {
  const auto c = constellation_from_id("psk2");
  const int plus = c.point(0).real() > 0 ? 0 : 1;
  const auto r = onebit_lp(ChannelContext(CMat::Identity(1, 1)), SymbolSlot::from_indices(c, {plus}), c, 1.0);
  const double a = std::sqrt(0.5);
  CHECK(r.t_relax == doctest::Approx(a).epsilon(1e-9));
  CHECK(r.x(0) == cplx(a, a));
  CHECK(r.t == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("one-bit outputs sit on the alphabet and respect the relaxation bound") {
  std::mt19937_64 rng(301);
  int consistent = 0;
  int matched = 0;
  int instances = 0;
  for (int m : {2, 4, 8}) {
    const auto c = make_constellation(ModKind::PSK, m);
    for (int trial = 0; trial < 40; ++trial) {
      const int nt = 2 + trial % 3;
      const int k = 1 + trial % 2;
      const CMat h = oracle::random_channel(rng, k, nt);
      const auto slot = random_slot(rng, c, k);
      const double p0 = 1.0;
      const double a = std::sqrt(p0 / (2.0 * nt));
      const auto r = onebit_lp(ChannelContext(h), slot, c, p0);
      for (Eigen::Index n = 0; n < nt; ++n) {
        CHECK(std::abs(r.x(n).real()) == a);
        CHECK(std::abs(r.x(n).imag()) == a);
      }
      const double best = oracle::onebit_best_level(h, slot.s, m, a);
      CHECK(r.t_relax >= best - 1e-9);
      CHECK(r.t <= best + 1e-12);
      CHECK(r.t == doctest::Approx(oracle::min_sector_level(h, r.x, slot.s, m)).epsilon(1e-9));
      ++instances;
      if (r.sign_consistent) {
        ++consistent;
        CHECK(r.t == doctest::Approx(best).epsilon(1e-9));
      }
      matched += std::abs(r.t - best) <= 1e-9 * (1.0 + std::abs(best));
    }
  }
  MESSAGE("sign-consistent " << consistent << ", enumeration optimum reached " << matched << " of "
                             << instances);
}

TEST_CASE("one-bit single user against enumeration") {
  std::mt19937_64 rng(302);
  const auto c = constellation_from_id("psk4");
  int consistent = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const CMat h = oracle::random_channel(rng, 1, 4);
    const auto slot = random_slot(rng, c, 1);
    const double a = std::sqrt(1.0 / 8.0);
    const auto r = onebit_lp(ChannelContext(h), slot, c, 1.0);
    const double best = oracle::onebit_best_level(h, slot.s, 4, a);
    if (r.sign_consistent) {
      ++consistent;
      CHECK(r.t == doctest::Approx(best).epsilon(1e-9));
    }
    CHECK(r.t_relax >= best - 1e-9);
    CHECK(r.t <= best + 1e-12);
  }
  // with one user the relaxed optimum rarely sits on a box vertex
  MESSAGE("sign-consistent relaxations: " << consistent << " of 50");
}

TEST_CASE("ccd keeps an exact solution") {
  std::mt19937_64 rng(303);
  const auto q = QuantAlphabet::uniform(2, 1.0, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat h = oracle::random_channel(rng, 3, 4);
    CVec x(4);
    for (int n = 0; n < 4; ++n) {
      x(n) = {q.levels()[rng() % 4], q.levels()[rng() % 4]};
    }
    const CVec s = h * x;
    const auto r = bbit_ccd(ChannelContext(h), s, 0.0, q, x);
    CHECK(r.beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.objective < 1e-20);
  }
}

TEST_CASE("ccd improves on the sign-quantized zero-forcing point") {
  std::mt19937_64 rng(304);
  const auto c = constellation_from_id("psk4");
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 4;
    const int nt = k + trial % 3;
    const CMat h = oracle::random_channel(rng, k, nt);
    const auto slot = random_slot(rng, c, k);
    const double sigma2 = 0.1;
    const auto q = QuantAlphabet::uniform(1, 1.0, nt);
    const CVec zf = h.adjoint() * (h * h.adjoint()).fullPivLu().solve(slot.s);
    CVec sgn(nt);
    for (int n = 0; n < nt; ++n) {
      sgn(n) = {zf(n).real() >= 0 ? q.bound() : -q.bound(), zf(n).imag() >= 0 ? q.bound() : -q.bound()};
    }
    const auto r = bbit_ccd(ChannelContext(h), slot.s, sigma2, q);
    CHECK(r.objective <= best_mse(h, slot.s, sgn, sigma2) + 1e-12);
    CHECK(nonincreasing(r.trace));
    CHECK(r.objective == doctest::Approx(ccd_objective(h, slot.s, r.x, r.beta, sigma2)).epsilon(1e-14));
  }
}

int ccd_exhaustive_hits(int total, bool check_bound) {
  std::mt19937_64 rng(305);
  const auto c = constellation_from_id("psk8");
  int optimal = 0;
  for (int trial = 0; trial < total; ++trial) {
    const CMat h = oracle::random_channel(rng, 1, 2);
    const auto slot = random_slot(rng, c, 1);
    const double sigma2 = 0.05;
    const auto q = QuantAlphabet::uniform(1, 1.0, 2);
    double best = 1e300;
    for (int code = 0; code < 16; ++code) {
      CVec x(2);
      for (int n = 0; n < 2; ++n) {
        x(n) = {(code >> (2 * n)) & 1 ? q.bound() : -q.bound(), (code >> (2 * n + 1)) & 1 ? q.bound() : -q.bound()};
      }
      best = std::min(best, best_mse(h, slot.s, x, sigma2));
    }
    const auto r = bbit_ccd(ChannelContext(h), slot.s, sigma2, q);
    if (check_bound) CHECK(r.objective >= best - 1e-12);
    optimal += r.objective <= best + 1e-12;
  }
  return optimal;
}

TEST_CASE("ccd never beats exhaustive search on two antennas") { ccd_exhaustive_hits(200, true); }

// Coordinate descent stops at points no single-level change improves, which
// are not always the global optimum of the 16-point alphabet.
TEST_CASE("ccd matches exhaustive search on two antennas" * doctest::may_fail()) {
  const int hits = ccd_exhaustive_hits(200, false);
  MESSAGE("ccd reached the exhaustive optimum on " << hits << " of 200");
  CHECK(hits == 200);
}

TEST_CASE("ccd output lies in the alphabet") {
  std::mt19937_64 rng(306);
  const auto c = constellation_from_id("qam16");
  for (int bits = 1; bits <= 4; ++bits) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMat h = oracle::random_channel(rng, 4, 6);
      const auto slot = random_slot(rng, c, 4);
      const auto q = QuantAlphabet::uniform(bits, 1.0, 6);
      const auto r = bbit_ccd(ChannelContext(h), slot.s, 0.2, q);
      for (Eigen::Index n = 0; n < 6; ++n) {
        CHECK(q.contains(r.x(n).real()));
        CHECK(q.contains(r.x(n).imag()));
      }
      CHECK(r.beta > 0.0);
      CHECK(nonincreasing(r.trace));
    }
  }
}

TEST_CASE("ccd objective does not grow with nested alphabets") {
  std::mt19937_64 rng(307);
  const auto c = constellation_from_id("psk4");
  const double a = 0.4;
  const auto q1 = QuantAlphabet::from_levels({-a, a});
  const auto q2 = QuantAlphabet::from_levels({-a, -a / 3, a / 3, a});
  const auto q3 = QuantAlphabet::from_levels({-a, -5 * a / 9, -a / 3, -a / 9, a / 9, a / 3, 5 * a / 9, a});
  for (int trial = 0; trial < 50; ++trial) {
    const CMat h = oracle::random_channel(rng, 4, 6);
    const ChannelContext ch(h);
    const auto slot = random_slot(rng, c, 4);
    const auto r1 = bbit_ccd(ch, slot.s, 0.1, q1);
    const auto r2 = bbit_ccd(ch, slot.s, 0.1, q2, r1.x);
    const auto r3 = bbit_ccd(ch, slot.s, 0.1, q3, r2.x);
    CHECK(r2.objective <= r1.objective + 1e-12);
    CHECK(r3.objective <= r2.objective + 1e-12);
  }
}

TEST_CASE("constant envelope single antenna closed form") {
  const auto c = constellation_from_id("psk8");
  const CVec s = CVec::Constant(1, c.point(3));
  const RVec e = RVec::Constant(1, 0.6);
  const auto r = cep_descent(ChannelContext(CMat::Identity(1, 1)), e, s, 1.0, false);
  CHECK(std::abs(std::remainder(r.point.thetas(0) - std::arg(s(0)), 2 * kPi)) < 1e-12);
  CHECK(r.objective == doctest::Approx((1.0 - 0.6) * (1.0 - 0.6)).epsilon(1e-12));
  const auto g = cep_descent(ChannelContext(CMat::Identity(1, 1)), e, s, 1.0, true);
  CHECK(g.point.gain == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(g.objective < 1e-24);
}

TEST_CASE("constant envelope iterates keep a common modulus") {
  std::mt19937_64 rng(308);
  const auto c = constellation_from_id("psk4");
  for (int trial = 0; trial < 50; ++trial) {
    const CMat h = oracle::random_channel(rng, 3, 5);
    const auto slot = random_slot(rng, c, 3);
    const RVec e = RVec::Constant(3, 0.5 + 0.1 * (trial % 7));
    for (bool vga : {false, true}) {
      const auto r = cep_descent(ChannelContext(h), e, slot.s, 2.0, vga);
      const CVec x = r.point.signal();
      for (Eigen::Index n = 0; n < 5; ++n) {
        CHECK(std::abs(std::abs(x(n)) - r.point.gain) <= 4e-16 * r.point.gain);
      }
      CHECK(nonincreasing(r.trace));
      CHECK(r.point.gain <= std::sqrt(2.0 / 5.0));
      if (!vga) CHECK(r.point.gain == std::sqrt(2.0 / 5.0));
      CHECK(r.objective == doctest::Approx(cep_objective(h, x, e, slot.s)).epsilon(1e-14));
    }
  }
}

TEST_CASE("constant envelope two antennas against a phase grid") {
  std::mt19937_64 rng(309);
  const auto c = constellation_from_id("psk4");
  for (int trial = 0; trial < 3; ++trial) {
    const CMat h = oracle::random_channel(rng, 1, 2);
    const auto slot = random_slot(rng, c, 1);
    const RVec e = RVec::Constant(1, 0.8);
    const double cm = std::sqrt(1.0 / 2.0);
    const auto r = cep_descent(ChannelContext(h), e, slot.s, 1.0, false);
    const double grid = oracle::torus_min(
        [&](double t1, double t2) {
          const cplx y = h(0, 0) * std::polar(cm, t1) + h(0, 1) * std::polar(cm, t2);
          return std::norm(y - 0.8 * slot.s(0));
        },
        1e-3);
    CHECK(std::abs(r.objective - grid) <= 1e-6);
  }
}

TEST_CASE("variable gain is capped") {
  const CVec s = CVec::Constant(2, 1.0);
  const RVec e = RVec::Constant(2, 100.0);
  const auto r = cep_descent(ChannelContext(CMat::Identity(2, 2)), e, s, 1.0, true);
  CHECK(r.point.gain == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}
