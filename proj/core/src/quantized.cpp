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

#include "slp/quantized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slp/ci_constraints.hpp"
#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kBetaFloor = 1e-12;
constexpr int kCcdMaxSweeps = 100;
constexpr int kCepMaxSweeps = 200;
constexpr double kCepRelTol = 1e-10;
constexpr double kZeroTie = 1e-9;

}  // namespace

QuantAlphabet QuantAlphabet::uniform(int bits, double p0, int nt) {
  if (bits < 1 || bits > 16) throw Error(Errc::InvalidArgument, "DAC resolution must be 1..16 bits");
  if (!(p0 > 0.0) || nt < 1) throw Error(Errc::InvalidArgument, "alphabet needs P0 > 0 and Nt >= 1");
  const double a = std::sqrt(p0 / (2.0 * nt));
  const int half = 1 << (bits - 1);
  const double denom = static_cast<double>((1 << bits) - 1);
  std::vector<double> lv;
  lv.reserve(static_cast<std::size_t>(2 * half));
  for (int i = half; i >= 1; --i) lv.push_back(-(2.0 * i - 1.0) / denom * a);
  for (int i = 1; i <= half; ++i) lv.push_back((2.0 * i - 1.0) / denom * a);
  lv.back() = a;
  lv.front() = -a;
  QuantAlphabet q;
  q.bits_ = bits;
  q.levels_ = std::move(lv);
  return q;
}

QuantAlphabet QuantAlphabet::from_levels(std::vector<double> levels) {
  std::sort(levels.begin(), levels.end());
  if (levels.size() < 2) throw Error(Errc::InvalidArgument, "alphabet needs at least two levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] != -levels[levels.size() - 1 - i]) {
      throw Error(Errc::InvalidArgument, "alphabet levels must be symmetric about zero");
    }
  }
  QuantAlphabet q;
  q.bits_ = static_cast<int>(std::ceil(std::log2(static_cast<double>(levels.size()))));
  q.levels_ = std::move(levels);
  return q;
}

double QuantAlphabet::quantize(double v) const {
  double best = levels_.front();
  double dist = std::abs(v - best);
  for (double l : levels_) {
    const double d = std::abs(v - l);
    if (d <= dist) {
      dist = d;
      best = l;
    }
  }
  return best;
}

bool QuantAlphabet::contains(double v) const {
  return std::find(levels_.begin(), levels_.end(), v) != levels_.end();
}

double nonstrict_level(const CMat& h, const CVec& x, const CVec& s, const Constellation& c) {
  if (c.kind() != ModKind::PSK) throw Error(Errc::MetricMismatch, "sector level needs PSK");
  const CVec lam = lambda_of(h, x, s);
  const double tan_th = std::tan(c.theta_th());
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double lk = c.order() == 2 ? lam(k).real() : lam(k).real() - std::abs(lam(k).imag()) / tan_th;
    t = std::min(t, lk);
  }
  return t;
}

OneBitResult onebit_lp(const ChannelContext& ch, const SymbolSlot& slot, const Constellation& c,
                       double p0) {
  if (c.kind() != ModKind::PSK) throw Error(Errc::MetricMismatch, "1-bit LP design needs PSK");
  if (!(p0 > 0.0)) throw Error(Errc::InvalidArgument, "power budget P0 must be > 0");
  const auto nt = ch.antennas();
  const auto n = 2 * nt;
  const double a = std::sqrt(p0 / (2.0 * static_cast<double>(nt)));
  const auto cons = build_ci_constraints(ch.h(), slot.index, c, CiMetric::NonStrictRotation);
  const auto m = cons.ge.size();

  // variables [z; t]: maximize t
  QpProblem lp;
  lp.q = RMat::Zero(n + 1, n + 1);
  lp.c = RVec::Zero(n + 1);
  lp.c(n) = -1.0;
  lp.a_ineq = RMat::Zero(m + 2 * n, n + 1);
  lp.b_ineq = RVec::Zero(m + 2 * n);
  lp.a_ineq.topLeftCorner(m, n) = -cons.ge.rows;
  lp.a_ineq.col(n).head(m) = cons.ge.level;
  lp.a_ineq.block(m, 0, n, n) = RMat::Identity(n, n);
  lp.a_ineq.block(m + n, 0, n, n) = -RMat::Identity(n, n);
  lp.b_ineq.tail(2 * n).setConstant(a);
  const QpResult sol = solve_qp(lp);
  if (sol.report.status != SolveStatus::Optimal) {
    throw Error(Errc::SolverFailure, "1-bit LP relaxation: " + std::string(to_string(sol.report.status)));
  }

  OneBitResult out;
  out.report = sol.report;
  out.t_relax = sol.z(n);
  RVec zq(n);
  out.sign_consistent = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = sol.z(i);
    zq(i) = (std::abs(v) <= kZeroTie * a || v > 0.0) ? a : -a;
    if (std::abs(std::abs(v) - a) > kZeroTie * a) out.sign_consistent = false;
  }
  out.x = complex_unstack(zq);
  out.t = nonstrict_level(ch.h(), out.x, slot.s, c);
  return out;
}

double ccd_objective(const CMat& h, const CVec& s, const CVec& x, double beta, double sigma2) {
  return (s - beta * (h * x)).squaredNorm() + static_cast<double>(s.size()) * beta * beta * sigma2;
}

CcdResult bbit_ccd(const ChannelContext& ch, const CVec& s, double sigma2,
                   const QuantAlphabet& alphabet, const std::optional<CVec>& init) {
  const auto k = ch.users();
  const auto nt = ch.antennas();
  if (s.size() != k) throw Error(Errc::DimensionMismatch, "one symbol per user required");
  if (!(sigma2 >= 0.0)) throw Error(Errc::InvalidArgument, "sigma2 must be >= 0");
  const CMat& h = ch.h();
  const double kd = static_cast<double>(k);

  RVec z(2 * nt);
  if (init) {
    if (init->size() != nt) throw Error(Errc::DimensionMismatch, "initial point has wrong length");
    z = real_stack(*init);
  } else {
    CVec zf = ch.pinv() * s;
    const double nrm = zf.norm();
    // power-scaled ZF, so its entries live on the alphabet's scale
    const double p0 = 2.0 * static_cast<double>(nt) * alphabet.bound() * alphabet.bound();
    if (nrm > 0.0) zf *= std::sqrt(p0) / nrm;
    z = real_stack(zf);
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = alphabet.quantize(z(i));

  CVec x = complex_unstack(z);
  CVec hx = h * x;
  auto best_beta = [&]() {
    const double num = s.dot(hx).real();  // Re(s^H H x)
    const double den = hx.squaredNorm() + kd * sigma2;
    return den > 0.0 ? std::max(kBetaFloor, num / den) : kBetaFloor;
  };
  double beta = best_beta();

  CcdResult out;
  double f = ccd_objective(h, s, x, beta, sigma2);
  out.trace.push_back(f);

  for (int sweep = 1; sweep <= kCcdMaxSweeps; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < 2 * nt; ++i) {
      const Eigen::Index n = i % nt;
      const cplx dir = i < nt ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
      const CVec col = dir * h.col(n);
      // each candidate level is scored with its own optimal beta
      double best_f = f;
      double best_v = z(i);
      double best_b = beta;
      for (double v : alphabet.levels()) {
        if (v == z(i)) continue;
        const CVec hv = hx + (v - z(i)) * col;
        const double den = hv.squaredNorm() + kd * sigma2;
        const double b = den > 0.0 ? std::max(kBetaFloor, s.dot(hv).real() / den) : kBetaFloor;
        const double fv = (s - b * hv).squaredNorm() + kd * b * b * sigma2;
        if (fv < best_f) {
          best_f = fv;
          best_v = v;
          best_b = b;
        }
      }
      if (best_v != z(i)) {
        hx += (best_v - z(i)) * col;
        z(i) = best_v;
        x(n) = cplx(z(n), z(nt + n));
        beta = best_b;
        f = best_f;
        out.trace.push_back(f);
        changed = true;
      }
    }
    const double nb = best_beta();
    if (nb != beta) {
      const double fb = ccd_objective(h, s, x, nb, sigma2);
      if (fb < f) {
        beta = nb;
        f = fb;
        out.trace.push_back(f);
        changed = true;
      }
    }
    out.sweeps = sweep;
    if (!changed) break;
  }

  out.x = x;
  out.beta = beta;
  out.objective = ccd_objective(h, s, x, beta, sigma2);
  return out;
}

CVec CePoint::signal() const {
  CVec x(thetas.size());
  for (Eigen::Index n = 0; n < thetas.size(); ++n) x(n) = std::polar(gain, thetas(n));
  return x;
}

double cep_objective(const CMat& h, const CVec& x, const RVec& sqrt_e, const CVec& s) {
  return (h * x - sqrt_e.cast<cplx>().cwiseProduct(s)).squaredNorm();
}

namespace {

CepResult cep_run(const CMat& h, const CVec& d, double cmax, bool with_gain, const RVec& thetas) {
  const auto nt = h.cols();
  CepResult out;
  CePoint& pt = out.point;
  pt.gain = cmax;
  pt.thetas = thetas;

  CVec x = pt.signal();
  CVec r = d - h * x;
  double f = r.squaredNorm();
  out.trace.push_back(f);

  for (int sweep = 1; sweep <= kCepMaxSweeps; ++sweep) {
    const double f_start = f;
    for (Eigen::Index n = 0; n < nt; ++n) {
      const CVec rest = r + h.col(n) * x(n);  // residual without antenna n
      const cplx corr = h.col(n).dot(rest);  // sum_k conj(h_kn) r_kn
      if (corr != cplx(0.0, 0.0)) {
        const double th = std::arg(corr);
        const cplx xn = std::polar(pt.gain, th);
        CVec cand = rest - h.col(n) * xn;
        const double fc = cand.squaredNorm();
        // keep the old phase unless the closed form actually improves
        if (fc <= f) {
          pt.thetas(n) = th;
          x(n) = xn;
          r = std::move(cand);
          f = fc;
        }
      }
      out.trace.push_back(f);
    }
    if (with_gain) {
      CVec v(nt);
      for (Eigen::Index n = 0; n < nt; ++n) v(n) = std::polar(1.0, pt.thetas(n));
      const CVec hv = h * v;
      const double den = hv.squaredNorm();
      if (den > 0.0) {
        const double g = std::clamp(hv.dot(d).real() / den, 0.0, cmax);
        const CVec cand = d - g * hv;
        if (cand.squaredNorm() <= f) {
          pt.gain = g;
          x = g * v;
          r = cand;
          f = r.squaredNorm();
          out.trace.push_back(f);
        }
      }
    }
    out.sweeps = sweep;
    if (std::abs(f_start - f) <= kCepRelTol * std::max(f_start, std::numeric_limits<double>::min())) break;
  }
  out.objective = (d - h * pt.signal()).squaredNorm();
  return out;
}

}  // namespace

CepResult cep_descent(const ChannelContext& ch, const RVec& sqrt_e, const CVec& s, double p0,
                      bool with_gain, const std::optional<RVec>& init_thetas) {
  const auto k = ch.users();
  const auto nt = ch.antennas();
  if (s.size() != k || sqrt_e.size() != k) {
    throw Error(Errc::DimensionMismatch, "one symbol and one amplitude target per user required");
  }
  if (!(p0 > 0.0)) throw Error(Errc::InvalidArgument, "power budget P0 must be > 0");
  const CMat& h = ch.h();
  const double cmax = std::sqrt(p0 / static_cast<double>(nt));
  const CVec d = sqrt_e.cast<cplx>().cwiseProduct(s);

  if (init_thetas) {
    if (init_thetas->size() != nt) throw Error(Errc::DimensionMismatch, "initial phases have wrong length");
    return cep_run(h, d, cmax, with_gain, *init_thetas);
  }
  // least-squares phases can sit exactly on a coordinate-wise stationary
  // saddle (one user, for instance); a zero-phase start runs as well
  const CVec ls = ch.pinv() * d;
  RVec th(nt);
  for (Eigen::Index n = 0; n < nt; ++n) th(n) = ls(n) == cplx(0.0, 0.0) ? 0.0 : std::arg(ls(n));
  CepResult a = cep_run(h, d, cmax, with_gain, th);
  CepResult b = cep_run(h, d, cmax, with_gain, RVec::Zero(nt));
  return b.objective < a.objective ? b : a;
}

}  // namespace slp
