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
#include "slp/ci_constraints.hpp"
#include "slp/ci_geometry.hpp"
#include "slp/errors.hpp"

using namespace slp;

namespace {

std::vector<int> random_symbols(std::mt19937_64& rng, int k, int m) {
  std::uniform_int_distribution<int> d(0, m - 1);
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (auto& i : idx) i = d(rng);
  return idx;
}

CVec points_of(const Constellation& c, const std::vector<int>& idx) {
  CVec s(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) s(static_cast<Eigen::Index>(i)) = c.point(idx[i]);
  return s;
}

CVec random_cvec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = {d(rng), d(rng)};
  return v;
}

}  // namespace

TEST_CASE("lambda examples") {
  const CVec s = (CVec(3) << cplx(1, 1), cplx(-1, 2), cplx(0.5, -0.5)).finished();
  const CVec l = lambda_of(CMat::Identity(3, 3), s, s);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(std::abs(l(k) - 1.0) < 1e-15);
  CMat h(1, 1);
  h << 1.0;
  CHECK(lambda_of(h, CVec::Constant(1, 2.0), CVec::Constant(1, 1.0))(0) == cplx(2.0, 0.0));
  CHECK_THROWS_AS(lambda_of(h, CVec::Constant(1, 2.0), CVec::Constant(1, 0.0)), Error);
}

TEST_CASE("lambda matches direct complex division") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const CMat h = oracle::random_channel(rng, 2, 2);
    const CVec x = random_cvec(rng, 2);
    const CVec s = random_cvec(rng, 2);
    const CVec l = lambda_of(h, x, s);
    for (int k = 0; k < 2; ++k) {
      const cplx r = h(k, 0) * x(0) + h(k, 1) * x(1);
      CHECK(std::abs(l(k) - r / s(k)) < 1e-12);
    }
  }
}

TEST_CASE("symbol decomposition") {
  const auto qpsk = constellation_from_id("psk4");
  const double r = 1.0 / std::sqrt(2.0);
  // s e^{j pi/4} / (2 cos(pi/4)) = j / sqrt(2); the other half is 1 / sqrt(2)
  const auto b = decompose_symbol({r, r}, qpsk);
  CHECK(std::abs(b.a - cplx(0, r)) < 1e-15);
  CHECK(std::abs(b.b - cplx(r, 0)) < 1e-15);
  const auto q16 = constellation_from_id("qam16");
  const double u = 1.0 / std::sqrt(10.0);
  const auto bq = decompose_symbol({3 * u, u}, q16);
  CHECK(std::abs(bq.a - cplx(3 * u, 0)) < 1e-15);
  CHECK(std::abs(bq.b - cplx(0, u)) < 1e-15);
  for (const char* id : {"psk2", "psk4", "psk8", "psk16", "qam16", "qam64"}) {
    const auto c = constellation_from_id(id);
    for (cplx p : c.points()) {
      const auto d = decompose_symbol(p, c);
      CHECK(std::abs(d.a + d.b - p) < 1e-12);
      // linear independence over the reals; BPSK has Im s = 0 and goes through lambda instead
      if (c.order() > 2) CHECK(std::abs((std::conj(d.a) * d.b).imag()) > 1e-6);
    }
  }
}

TEST_CASE("alphas of a zero-forcing signal all equal t") {
  std::mt19937_64 rng(4);
  for (const char* id : {"psk4", "psk8", "qam16"}) {
    const auto c = constellation_from_id(id);
    const CMat h = oracle::random_channel(rng, 3, 3);
    const CVec s = points_of(c, random_symbols(rng, 3, c.order()));
    const double t = 0.8;
    const CVec x = h.fullPivLu().solve(t * s);
    const auto sc = alphas_of(h, x, s, c);
    for (const auto& a : sc.alpha) {
      CHECK(a[0] == doctest::Approx(t).epsilon(1e-10));
      CHECK(a[1] == doctest::Approx(t).epsilon(1e-10));
    }
    const auto zero = alphas_of(h, CVec::Zero(3), s, c);
    for (const auto& a : zero.alpha) {
      CHECK(a[0] == 0.0);
      CHECK(a[1] == 0.0);
    }
  }
}

TEST_CASE("qam alphas are per-axis ratios and reproduce the received sample") {
  std::mt19937_64 rng(8);
  const auto c = constellation_from_id("qam64");
  for (int trial = 0; trial < 100; ++trial) {
    const CMat h = oracle::random_channel(rng, 4, 4);
    const auto idx = random_symbols(rng, 4, c.order());
    const CVec s = points_of(c, idx);
    const CVec x = random_cvec(rng, 4);
    const auto sc = alphas_of(h, x, s, c);
    const CVec y = h * x;
    for (int k = 0; k < 4; ++k) {
      const auto& a = sc.alpha[static_cast<std::size_t>(k)];
      CHECK(a[0] == doctest::Approx(y(k).real() / s(k).real()).epsilon(1e-12));
      CHECK(a[1] == doctest::Approx(y(k).imag() / s(k).imag()).epsilon(1e-12));
      const auto b = decompose_symbol(s(k), c);
      CHECK(std::abs(a[0] * b.a + a[1] * b.b - y(k)) < 1e-9);
    }
  }
  const auto p8 = constellation_from_id("psk8");
  for (int trial = 0; trial < 100; ++trial) {
    const CMat h = oracle::random_channel(rng, 3, 3);
    const CVec s = points_of(p8, random_symbols(rng, 3, 8));
    const CVec x = random_cvec(rng, 3);
    const auto sc = alphas_of(h, x, s, p8);
    const CVec y = h * x;
    for (int k = 0; k < 3; ++k) {
      const auto& a = sc.alpha[static_cast<std::size_t>(k)];
      const auto b = decompose_symbol(s(k), p8);
      CHECK(std::abs(a[0] * b.a + a[1] * b.b - y(k)) < 1e-9);
    }
  }
}

TEST_CASE("margin examples") {
  const auto bpsk = constellation_from_id("psk2");
  const int sym0[] = {0};
  UserScalars one;
  one.lambda = {cplx(1.5, 0.0)};
  CHECK(ci_margin(one, bpsk, sym0, CiMetric::NonStrictRotation, 1.0).margin(0) ==
        doctest::Approx(0.5));

  const auto qpsk = constellation_from_id("psk4");
  const double t = 0.7;
  UserScalars edge;
  edge.lambda = {t * cplx(2.0, 1.0)};
  CHECK(std::abs(ci_margin(edge, qpsk, sym0, CiMetric::NonStrictRotation, t).margin(0)) < 1e-15);

  const auto q16 = constellation_from_id("qam16");
  const double u = 1.0 / std::sqrt(10.0);
  int inner = -1;
  for (int m = 0; m < 16; ++m) {
    if (std::abs(q16.point(m) - cplx(u, u)) < 1e-12) inner = m;
  }
  const int sym_inner[] = {inner};
  UserScalars a;
  a.alpha = {{t + 0.1, t}};
  CHECK(ci_margin(a, q16, sym_inner, CiMetric::SymbolScaling, t).margin(0) < 0.0);
  a.alpha = {{t, t}};
  CHECK(ci_margin(a, q16, sym_inner, CiMetric::SymbolScaling, t).margin(0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(ci_margin(one, q16, sym0, CiMetric::NonStrictRotation, t), Error);
  CHECK_THROWS_AS(check_metric(q16, CiMetric::StrictRotation), Error);
  CHECK_NOTHROW(check_metric(qpsk, CiMetric::StrictRotation));
}

TEST_CASE("strict margins carry an alignment flag") {
  const auto qpsk = constellation_from_id("psk4");
  const int sym[] = {0, 1};
  UserScalars sc;
  sc.lambda = {cplx(1.2, 0.0), cplx(1.3, 1e-6)};
  const auto m = ci_margin(sc, qpsk, sym, CiMetric::StrictRotation, 1.0);
  CHECK(m.margin(0) == doctest::Approx(0.2));
  CHECK(m.aligned[0]);
  CHECK_FALSE(m.aligned[1]);
  CHECK_FALSE(m.holds());
}

// Direct evaluation of the CI conditions on a received sample, written out
// from the geometry rather than through ci_margin.
bool condition_holds(const Constellation& c, int sym, cplx y, CiMetric metric, double t, double tol) {
  const cplx s = c.point(sym);
  if (c.kind() == ModKind::PSK) {
    const cplx l = y / s;
    if (metric == CiMetric::StrictRotation) return l.real() >= t - tol && std::abs(l.imag()) <= 1e-9;
    if (metric == CiMetric::NonStrictRotation || c.order() == 2) {
      return oracle::sector_level(l, c.order()) * std::sin(kPi / c.order()) >=
             t * std::sin(kPi / c.order()) - tol;
    }
    const auto b = decompose_symbol(s, c);
    const Eigen::Matrix2d m{{b.a.real(), b.b.real()}, {b.a.imag(), b.b.imag()}};
    const Eigen::Vector2d al = m.inverse() * Eigen::Vector2d(y.real(), y.imag());
    return al(0) >= t - tol && al(1) >= t - tol;
  }
  // square QAM: outer axes may grow past t, inner axes sit at t
  const double top = c.level_set().back();
  bool ok = true;
  for (int axis = 0; axis < 2; ++axis) {
    const double sv = axis == 0 ? s.real() : s.imag();
    const double yv = axis == 0 ? y.real() : y.imag();
    const double alpha = yv / sv;
    if (std::abs(std::abs(sv) - top) < 1e-12) {
      ok = ok && alpha >= t - tol;
    } else {
      ok = ok && std::abs(alpha - t) <= tol;
    }
  }
  return ok;
}

TEST_CASE("margin sign agrees with direct evaluation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> rad(0.0, 3.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  struct Case {
    const char* id;
    CiMetric metric;
  };
  for (const Case cs : {Case{"psk2", CiMetric::NonStrictRotation}, Case{"psk4", CiMetric::NonStrictRotation},
                        Case{"psk8", CiMetric::NonStrictRotation}, Case{"psk16", CiMetric::NonStrictRotation},
                        Case{"psk4", CiMetric::SymbolScaling}, Case{"psk8", CiMetric::SymbolScaling}}) {
    CAPTURE(cs.id);
    const auto c = constellation_from_id(cs.id);
    for (int trial = 0; trial < 2000; ++trial) {
      const int sym = static_cast<int>(rng() % static_cast<unsigned>(c.order()));
      const cplx y = std::polar(rad(rng), ang(rng));
      const double t = 0.5;
      CMat h = CMat::Identity(1, 1);
      const CVec x = CVec::Constant(1, y);
      const CVec s = CVec::Constant(1, c.point(sym));
      const int syms[] = {sym};
      const UserScalars sc = cs.metric == CiMetric::SymbolScaling && c.order() > 2
                                 ? alphas_of(h, x, s, c)
                                 : UserScalars{{lambda_of(h, x, s)(0)}, {}};
      const double m = ci_margin(sc, c, syms, cs.metric, t).margin(0);
      if (std::abs(m) < 1e-7) continue;
      CHECK((m >= 0.0) == condition_holds(c, sym, y, cs.metric, t, 0.0));
    }
  }
  const auto q = constellation_from_id("qam16");
  for (int trial = 0; trial < 2000; ++trial) {
    const int sym = static_cast<int>(rng() % 16);
    const double t = 0.5;
    const cplx s = q.point(sym);
    // half the samples sit exactly on the inner-axis equality
    cplx y = std::polar(rad(rng), ang(rng));
    if (trial % 2) {
      const double top = q.level_set().back();
      const double re = std::abs(std::abs(s.real()) - top) < 1e-12 ? y.real() : t * s.real();
      const double im = std::abs(std::abs(s.imag()) - top) < 1e-12 ? y.imag() : t * s.imag();
      y = {re, im};
    }
    const int syms[] = {sym};
    const auto sc = alphas_of(CMat::Identity(1, 1), CVec::Constant(1, y), CVec::Constant(1, s), q);
    const double m = ci_margin(sc, q, syms, CiMetric::SymbolScaling, t).margin(0);
    CHECK((m >= -1e-9) == condition_holds(q, sym, y, CiMetric::SymbolScaling, t, 1e-9));
  }
}

TEST_CASE("strict region sits inside the non-strict sector") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> re(-2.0, 4.0);
  const int sym[] = {0};
  for (int m : {4, 8, 16}) {
    const auto c = make_constellation(ModKind::PSK, m);
    for (int trial = 0; trial < 500; ++trial) {
      const double t = 0.3;
      UserScalars sc;
      sc.lambda = {cplx(re(rng), 0.0)};
      const auto strict = ci_margin(sc, c, sym, CiMetric::StrictRotation, t);
      if (!strict.holds()) continue;
      CHECK(ci_margin(sc, c, sym, CiMetric::NonStrictRotation, t).margin(0) >= -1e-12);
    }
  }
}

TEST_CASE("psk symbol scaling region equals the non-strict sector") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> rad(0.0, 3.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int m : {4, 8, 16, 32}) {
    const auto c = make_constellation(ModKind::PSK, m);
    for (int trial = 0; trial < 3000; ++trial) {
      const int sym = static_cast<int>(rng() % static_cast<unsigned>(m));
      const double t = 0.4;
      const cplx y = std::polar(rad(rng), ang(rng));
      const auto al = alphas_for(y, c.point(sym), c);
      const bool ss = al[0] >= t && al[1] >= t;
      const int syms[] = {sym};
      UserScalars sc;
      sc.lambda = {y / c.point(sym)};
      const double nm = ci_margin(sc, c, syms, CiMetric::NonStrictRotation, t).margin(0);
      if (std::abs(nm) < 1e-9) continue;
      CHECK(ss == (nm >= 0.0));
    }
  }
}

TEST_CASE("noise-robust threshold") {
  CHECK(noise_robust_t(0.0, 1.0, 4) == 0.0);
  CHECK(noise_robust_t(1.0, 1.0, 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const double r = noise_robust_t(1.0, 1.0, 128) / noise_robust_t(1.0, 1.0, 64);
  CHECK(r == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(noise_robust_t(1.0, 1.0, 128) == doctest::Approx(128 / kPi).epsilon(1e-3));
}

TEST_CASE("noise-robust sector keeps a distance of gamma sigma from both rays") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> rad(0.0, 6.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> g(0.0, 2.0);
  const int sym[] = {0};
  for (int m : {4, 8, 16}) {
    const auto c = make_constellation(ModKind::PSK, m);
    const double th = kPi / m;
    for (int trial = 0; trial < 2000; ++trial) {
      const double gamma = g(rng);
      const double sigma = 0.7;
      const cplx l = std::polar(rad(rng), ang(rng));
      const double dist = std::min(l.real() * std::sin(th) - l.imag() * std::cos(th),
                                   l.real() * std::sin(th) + l.imag() * std::cos(th));
      UserScalars sc;
      sc.lambda = {l};
      const double mg =
          ci_margin(sc, c, sym, CiMetric::NonStrictRotation, noise_robust_t(gamma, sigma, m)).margin(0);
      if (std::abs(dist - gamma * sigma) < 1e-9) continue;
      CHECK((mg >= 0.0) == (dist >= gamma * sigma));
    }
  }
}

TEST_CASE("sep threshold and erfinv") {
  CHECK(sep_t(0.5, 1.0, 4) == 0.0);
  CHECK(std::erf(erfinv(0.9)) == doctest::Approx(0.9).epsilon(1e-10));
  const double expect = oracle::bisect_erfinv(1.0 - 2.0 * 0.0227) / std::sin(kPi / 4);
  CHECK(sep_t(0.0227, 1.0, 4) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(sep_t(0.0227, 1.0, 4) == doctest::Approx(2.0).epsilon(2e-3));
  CHECK_THROWS_AS(sep_t(0.0, 1.0, 4), Error);
  CHECK_THROWS_AS(sep_t(0.7, 1.0, 4), Error);
  try {
    sep_t(-0.1, 1.0, 4);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OutOfRange);
  }
}

TEST_CASE("erfinv against series bisection") {
  for (double y = -0.999999; y < 1.0; y += 0.0123457) {
    CAPTURE(y);
    const double ref = oracle::bisect_erfinv(y);
    const double got = erfinv(y);
    CHECK(std::abs(got - ref) <= 1e-10 * std::max(std::abs(ref), 1e-300) + 1e-15);
  }
  CHECK(erfinv(0.0) == 0.0);
  for (double y : {1e-8, 0.5, 0.99, 0.9999, 0.99999, 0.999999}) {
    CHECK(erfinv(-y) == -erfinv(y));
    CHECK(std::abs(erfinv(y) - oracle::bisect_erfinv(y)) <= 1e-10 * erfinv(y));
  }
}

TEST_CASE("linear constraint rows agree with the margins") {
  std::mt19937_64 rng(41);
  struct Case {
    const char* id;
    CiMetric metric;
  };
  for (const Case cs : {Case{"psk2", CiMetric::NonStrictRotation}, Case{"psk4", CiMetric::NonStrictRotation},
                        Case{"psk8", CiMetric::NonStrictRotation}, Case{"psk4", CiMetric::StrictRotation},
                        Case{"psk8", CiMetric::SymbolScaling}, Case{"qam16", CiMetric::SymbolScaling},
                        Case{"apsk16", CiMetric::NonStrictRotation}}) {
    CAPTURE(cs.id);
    const auto c = constellation_from_id(cs.id);
    for (int trial = 0; trial < 200; ++trial) {
      const CMat h = oracle::random_channel(rng, 3, 4);
      const auto idx = random_symbols(rng, 3, c.order());
      const CVec s = points_of(c, idx);
      const double t = 0.2;
      // zero-forcing at a random level plus a small perturbation, so both
      // outcomes occur
      const double u = 0.4 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const CVec x = h.completeOrthogonalDecomposition().solve(CVec(u * s)) + random_cvec(rng, 4, 0.02);
      const auto cons = build_ci_constraints(h, idx, c, cs.metric);
      const RVec z = real_stack(x);
      const RVec tv = RVec::Constant(3, t);
      // each row is linear in z and must reproduce the metric it encodes
      const RVec ge = cons.ge.rows * z - cons.ge.rhs(tv);
      const RVec eq = cons.eq.rows * z - cons.eq.rhs(tv);
      const bool rows_ok = (ge.size() == 0 || ge.minCoeff() >= -1e-9) &&
                           (eq.size() == 0 || eq.cwiseAbs().maxCoeff() <= 1e-9);
      const bool want_alpha = cs.metric == CiMetric::SymbolScaling && c.order() > 2;
      UserScalars sc;
      if (want_alpha) {
        sc = alphas_of(h, x, s, c);
      } else {
        const CVec l = lambda_of(h, x, s);
        sc.lambda.assign(l.data(), l.data() + l.size());
      }
      const auto m = ci_margin(sc, c, idx, cs.metric, t);
      CHECK(rows_ok == m.holds(1e-9));
      // feasibility of a point built to satisfy the rows exactly
      if (cs.metric != CiMetric::StrictRotation && c.kind() == ModKind::PSK) {
        const CVec xz = h.completeOrthogonalDecomposition().solve(CVec(2.0 * t * s));
        const RVec zz = real_stack(xz);
        CHECK((cons.ge.rows * zz - cons.ge.rhs(tv)).minCoeff() >= -1e-9);
      }
    }
  }
}
