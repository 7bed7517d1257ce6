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

#include "slp/precoders.hpp"

#include <algorithm>
#include <cmath>

#include "slp/ci_constraints.hpp"
#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kDualityTol = 1e-10;
constexpr int kDualityMaxIter = 500;
constexpr double kDualityBlowup = 1e14;

bool is_bpsk(const Constellation& c) { return c.kind() == ModKind::PSK && c.order() == 2; }

void check_slot(const ChannelContext& ch, const CVec& s) {
  if (s.size() != ch.users()) {
    throw Error(Errc::DimensionMismatch, "symbol vector length " + std::to_string(s.size()) +
                                             " != users " + std::to_string(ch.users()));
  }
}

void check_power(double p0) {
  if (!(p0 > 0.0)) throw Error(Errc::InvalidArgument, "power budget P0 must be > 0");
}

PrecodeResult normalized(const ChannelContext& ch, const CVec& u, const CVec& s, double p0) {
  const double beta = u.norm();
  if (!(beta > 0.0)) throw Error(Errc::ZeroDirection, "precoding direction is zero");
  PrecodeResult r;
  r.x = std::sqrt(p0) * u / beta;
  r.beta = beta;
  r.scalars.lambda.resize(static_cast<std::size_t>(s.size()));
  const CVec lam = lambda_of(ch.h(), r.x, s);
  for (Eigen::Index k = 0; k < s.size(); ++k) r.scalars.lambda[static_cast<std::size_t>(k)] = lam(k);
  return r;
}

[[noreturn]] void solver_failed(const char* who, SolveStatus st) {
  const Errc code = st == SolveStatus::Infeasible ? Errc::InfeasibleTargets : Errc::SolverFailure;
  throw Error(code, std::string(who) + ": QP returned " + std::string(to_string(st)));
}

// min ||x||^2 subject to the CI constraints at thresholds t. The problem is
// homogeneous in t, so it is solved at unit peak threshold and scaled back;
// this keeps multipliers O(1) at high SINR targets.
QpResult min_power_qp(const CiConstraints& cons, RVec t, Eigen::Index nt) {
  const double scale = t.size() && t.maxCoeff() > 0.0 ? t.maxCoeff() : 1.0;
  t /= scale;
  QpProblem qp;
  const auto n = 2 * nt;
  qp.q = 2.0 * RMat::Identity(n, n);
  qp.c = RVec::Zero(n);
  qp.a_ineq = -cons.ge.rows;
  qp.b_ineq = -cons.ge.rhs(t);
  qp.a_eq = cons.eq.rows;
  qp.b_eq = cons.eq.rhs(t);
  QpResult r = solve_qp(qp);
  r.z *= scale;
  r.nu *= scale;
  r.mu *= scale;
  return r;
}

// Perturbation NNLS: minimize ||x0 + C u|| over u >= 0.
struct PerturbationDesign {
  CVec x;
  SolveReport report;
};

PerturbationDesign solve_perturbation(const CVec& x0, const CMat& cols) {
  PerturbationDesign d;
  if (cols.cols() == 0) {
    d.x = x0;
    return d;
  }
  NnlsProblem p;
  p.a.resize(2 * cols.rows(), cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j) p.a.col(j) = real_stack(cols.col(j));
  p.b = -real_stack(x0);
  const NnlsResult r = solve_nnls(p);
  d.x = x0 + cols * r.x.cast<cplx>();
  d.report = r.report;
  return d;
}

PrecodeResult balanced_from(const ChannelContext& ch, const CVec& xt, const SymbolSlot& slot,
                            const Constellation& c, CiMetric metric, double p0, double alpha0) {
  const double beta = xt.norm();
  if (!(beta > 0.0)) throw Error(Errc::ZeroDirection, "perturbation design collapsed to zero");
  PrecodeResult r;
  r.x = std::sqrt(p0) * xt / beta;
  r.beta = beta;
  r.t = alpha0 * std::sqrt(p0) / beta;
  r.objective = r.t;
  r.rx_scale = RVec::Constant(ch.users(), r.t);
  r.scalars = scalars_for(ch.h(), r.x, slot, c, metric);
  return r;
}

// Overloaded channels and APSK: the CI region is not parameterized by the
// pseudo-inverse, so solve the homogeneous min-power problem at t = 1.
bool qp_balancing(const ChannelContext& ch, const SymbolSlot& slot, const Constellation& c,
                  CiMetric metric, double p0, double alpha0, PrecodeResult& out) {
  const auto cons = build_ci_constraints(ch.h(), slot.index, c, metric);
  const QpResult r = min_power_qp(cons, RVec::Constant(ch.users(), alpha0), ch.antennas());
  if (r.report.status != SolveStatus::Optimal) return false;
  out = balanced_from(ch, complex_unstack(r.z), slot, c, metric, p0, alpha0);
  out.report = r.report;
  return true;
}

}  // namespace

SymbolSlot SymbolSlot::from_indices(const Constellation& c, std::vector<int> index) {
  SymbolSlot slot;
  slot.s.resize(static_cast<Eigen::Index>(index.size()));
  for (std::size_t k = 0; k < index.size(); ++k) slot.s(static_cast<Eigen::Index>(k)) = c.point(index[k]);
  slot.index = std::move(index);
  return slot;
}

UserScalars scalars_for(const CMat& h, const CVec& x, const SymbolSlot& slot,
                        const Constellation& c, CiMetric metric) {
  if (metric == CiMetric::SymbolScaling && !is_bpsk(c)) return alphas_of(h, x, slot.s, c);
  UserScalars out;
  const CVec lam = lambda_of(h, x, slot.s);
  out.lambda.assign(lam.data(), lam.data() + lam.size());
  return out;
}

PrecodeResult zf_sym(const ChannelContext& ch, const CVec& s, double p0) {
  check_slot(ch, s);
  check_power(p0);
  ch.require_invertible();
  PrecodeResult r = normalized(ch, ch.pinv() * s, s, p0);
  r.t = std::sqrt(p0) / r.beta;
  r.objective = r.t;
  r.rx_scale = RVec::Constant(ch.users(), r.t);
  return r;
}

PrecodeResult rzf_sym(const ChannelContext& ch, const CVec& s, double p0, double sigma2) {
  check_slot(ch, s);
  check_power(p0);
  if (!(sigma2 >= 0.0)) throw Error(Errc::InvalidArgument, "sigma2 must be >= 0");
  const auto k = ch.users();
  const CMat& h = ch.h();
  const CMat gram = h * h.adjoint();
  const double xi = static_cast<double>(k) * sigma2 / p0;
  const CMat reg = gram + xi * CMat::Identity(k, k);
  const Eigen::PartialPivLU<CMat> lu(reg);
  const CMat inv_s = lu.solve(s);
  PrecodeResult r = normalized(ch, h.adjoint() * inv_s, s, p0);
  // effective gain of user k: c [H H^H (H H^H + xi I)^{-1}]_kk
  const CMat eff = gram * lu.inverse();
  const double scale = std::sqrt(p0) / r.beta;
  r.rx_scale.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) r.rx_scale(i) = scale * eff(i, i).real();
  r.t = r.rx_scale.minCoeff();
  r.objective = r.t;
  return r;
}

PrecodeResult mrt_sym(const ChannelContext& ch, const CVec& s, double p0) {
  check_slot(ch, s);
  check_power(p0);
  PrecodeResult r = normalized(ch, ch.h().adjoint() * s, s, p0);
  const double scale = std::sqrt(p0) / r.beta;
  r.rx_scale = scale * ch.h().rowwise().squaredNorm();
  r.t = r.rx_scale.minCoeff();
  r.objective = r.t;
  return r;
}

RVec downlink_sinr(const CMat& h, const CMat& w, double sigma2) {
  const CMat g = h * w;  // g(k, i) = h_k^T w_i
  RVec out(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const double sig = std::norm(g(k, k));
    const double interf = g.row(k).cwiseAbs2().sum() - sig;
    out(k) = sig / (interf + sigma2);
  }
  return out;
}

DualityResult pm_duality(const ChannelContext& ch, std::span<const double> gamma, double sigma2) {
  const auto k = ch.users();
  const auto nt = ch.antennas();
  if (static_cast<Eigen::Index>(gamma.size()) != k) {
    throw Error(Errc::DimensionMismatch, "one SINR target per user required");
  }
  if (ch.overloaded()) throw Error(Errc::InvalidArgument, "pm_duality needs K <= Nt");
  if (!(sigma2 > 0.0)) throw Error(Errc::InvalidArgument, "sigma2 must be > 0");
  for (double g : gamma) {
    if (!(g >= 0.0)) throw Error(Errc::InvalidArgument, "SINR targets must be >= 0");
  }
  const CMat g = ch.h().adjoint();  // columns g_k = conj(h_k)

  DualityResult out;
  RVec q = RVec::Zero(k);
  CMat a_inv_g;
  bool converged = false;
  for (int it = 1; it <= kDualityMaxIter; ++it) {
    CMat a = sigma2 * CMat::Identity(nt, nt);
    for (Eigen::Index i = 0; i < k; ++i) a += q(i) * g.col(i) * g.col(i).adjoint();
    const Eigen::LLT<CMat> llt(a);
    a_inv_g = llt.solve(g);
    RVec next(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double d = g.col(i).dot(a_inv_g.col(i)).real();
      // remove user i's own term: g^H A_{-i}^{-1} g = d / (1 - q_i d)
      const double denom = 1.0 - q(i) * d;
      if (!(denom > 0.0) || !(d > 0.0)) {
        throw Error(Errc::InfeasibleTargets, "duality fixed point left the feasible set");
      }
      next(i) = gamma[static_cast<std::size_t>(i)] * denom / d;
    }
    if (!next.allFinite() || next.maxCoeff() > kDualityBlowup) {
      throw Error(Errc::InfeasibleTargets, "duality fixed point diverges");
    }
    const double qn = next.norm();
    const double change = (next - q).norm();
    q = next;
    out.iterations = it;
    if (qn == 0.0 || change <= kDualityTol * qn) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(Errc::NotConverged, "duality fixed point did not converge in 500 iterations");

  CMat a = sigma2 * CMat::Identity(nt, nt);
  for (Eigen::Index i = 0; i < k; ++i) a += q(i) * g.col(i) * g.col(i).adjoint();
  a_inv_g = a.llt().solve(g);
  CMat u(nt, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double n = a_inv_g.col(i).norm();
    if (!(n > 0.0)) throw Error(Errc::ZeroDirection, "zero MMSE direction for user " + std::to_string(i));
    u.col(i) = a_inv_g.col(i) / n;
  }

  const CMat gain = ch.h() * u;  // gain(k, i) = h_k^T u_i
  RMat d = RMat::Zero(k, k);
  RVec rhs = RVec::Constant(k, sigma2);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double gi = gamma[static_cast<std::size_t>(i)];
    if (gi == 0.0) {
      d(i, i) = 1.0;
      rhs(i) = 0.0;
      continue;
    }
    for (Eigen::Index j = 0; j < k; ++j) d(i, j) = -std::norm(gain(i, j));
    d(i, i) = std::norm(gain(i, i)) / gi;
  }
  const RVec p = d.partialPivLu().solve(rhs);
  if (!p.allFinite() || p.minCoeff() < -1e-12 * std::max(1.0, p.maxCoeff())) {
    throw Error(Errc::InfeasibleTargets, "downlink power allocation is negative");
  }
  out.q = q;
  out.p = p.cwiseMax(0.0);
  out.w.resize(nt, k);
  for (Eigen::Index i = 0; i < k; ++i) out.w.col(i) = std::sqrt(out.p(i)) * u.col(i);
  out.power = out.p.sum();
  return out;
}

RVec power_min_thresholds(const CiSpec& spec, const Constellation& c, Eigen::Index users) {
  spec.validate();
  const auto* pm = std::get_if<PowerMin>(&spec.mode);
  if (pm == nullptr) throw Error(Errc::InvalidArgument, "power minimization needs a PowerMin spec");
  if (static_cast<Eigen::Index>(pm->gamma.size()) != users) {
    throw Error(Errc::DimensionMismatch, "one SINR target per user required");
  }
  const double sigma = std::sqrt(pm->sigma2);
  const bool robust = !std::holds_alternative<NoRobustness>(spec.robustness);
  if (robust && c.kind() != ModKind::PSK) {
    throw Error(Errc::MetricMismatch, "noise-robust and SEP thresholds are defined for PSK only");
  }
  RVec t(users);
  for (Eigen::Index k = 0; k < users; ++k) {
    const double g = pm->gamma[static_cast<std::size_t>(k)];
    if (std::holds_alternative<NoiseRobust>(spec.robustness)) {
      t(k) = noise_robust_t(g, sigma, c.order());
    } else if (const auto* sep = std::get_if<SepTarget>(&spec.robustness)) {
      t(k) = sep_t(sep->p, sigma, c.order());
    } else {
      t(k) = std::sqrt(g * pm->sigma2);
    }
  }
  return t;
}

PrecodeResult cpm(const ChannelContext& ch, const SymbolSlot& slot, const Constellation& c,
                  const CiSpec& spec) {
  check_slot(ch, slot.s);
  const RVec t = power_min_thresholds(spec, c, ch.users());
  const auto cons = build_ci_constraints(ch.h(), slot.index, c, spec.metric);
  const QpResult qp = min_power_qp(cons, t, ch.antennas());
  if (qp.report.status != SolveStatus::Optimal) solver_failed("cpm", qp.report.status);
  PrecodeResult r;
  r.x = complex_unstack(qp.z);
  r.objective = r.x.squaredNorm();
  r.t = t.minCoeff();
  r.rx_scale = t;
  r.scalars = scalars_for(ch.h(), r.x, slot, c, spec.metric);
  r.report = qp.report;
  return r;
}

PrecodeResult csb_symbol_scaling(const ChannelContext& ch, const SymbolSlot& slot,
                                 const Constellation& c, double p0, double alpha0) {
  check_slot(ch, slot.s);
  check_power(p0);
  if (!(alpha0 > 0.0)) throw Error(Errc::InvalidArgument, "alpha0 must be > 0");
  const CiMetric metric =
      c.kind() == ModKind::APSK ? CiMetric::NonStrictRotation : CiMetric::SymbolScaling;
  check_metric(c, metric);
  ch.require_invertible();

  PrecodeResult r;
  if (c.kind() == ModKind::APSK || ch.overloaded()) {
    if (qp_balancing(ch, slot, c, metric, p0, alpha0, r)) return r;
  }

  const auto classes = classify_components(c);
  const auto k = ch.users();
  const CMat& g = ch.pinv();
  CVec x0 = CVec::Zero(ch.antennas());
  CMat outer(ch.antennas(), 2 * k);
  Eigen::Index n_outer = 0;
  auto add = [&](Eigen::Index user, cplx component, Component cls) {
    const CVec col = g.col(user) * component;
    x0 += alpha0 * col;
    if (cls == Component::Outer) outer.col(n_outer++) = col;
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    const int m = slot.index[static_cast<std::size_t>(i)];
    const auto& cls = classes.at(static_cast<std::size_t>(m));
    if (is_bpsk(c)) {
      add(i, slot.s(i), Component::Outer);
      continue;
    }
    const auto [sa, sb] = decompose_symbol(slot.s(i), c);
    if (c.kind() == ModKind::APSK) {
      // overloaded APSK fallback: scale the whole point
      add(i, slot.s(i), cls.point);
      continue;
    }
    add(i, sa, cls.real_axis);
    add(i, sb, cls.imag_axis);
  }
  const auto design = solve_perturbation(x0, outer.leftCols(n_outer));
  r = balanced_from(ch, design.x, slot, c, metric, p0, alpha0);
  r.report = design.report;
  return r;
}

PrecodeResult civp_strict(const ChannelContext& ch, const SymbolSlot& slot,
                          const Constellation& c, double p0) {
  check_slot(ch, slot.s);
  check_power(p0);
  ch.require_invertible();
  PrecodeResult r;
  if (ch.overloaded() && c.kind() == ModKind::PSK &&
      qp_balancing(ch, slot, c, CiMetric::StrictRotation, p0, 1.0, r)) {
    return r;
  }

  const CMat& g = ch.pinv();
  const CMat cols = g * slot.s.asDiagonal();
  const auto design = solve_perturbation(g * slot.s, cols);
  r = balanced_from(ch, design.x, slot, c, CiMetric::StrictRotation, p0, 1.0);
  r.report = design.report;
  return r;
}

MulticastResult multicast_equivalent(const ChannelContext& ch, const SymbolSlot& slot,
                                     const Constellation& c, std::span<const double> gamma,
                                     double sigma2) {
  check_slot(ch, slot.s);
  if (c.kind() != ModKind::PSK) throw Error(Errc::MetricMismatch, "multicast form needs PSK");
  const auto k = ch.users();
  const auto nt = ch.antennas();
  if (static_cast<Eigen::Index>(gamma.size()) != k) {
    throw Error(Errc::DimensionMismatch, "one SINR target per user required");
  }
  CiSpec spec;
  spec.metric = CiMetric::NonStrictRotation;
  spec.mode = PowerMin{std::vector<double>(gamma.begin(), gamma.end()), sigma2};
  const RVec t = power_min_thresholds(spec, c, k);
  const double scale = t.maxCoeff() > 0.0 ? t.maxCoeff() : 1.0;

  // modified channels h~_k = h_k / s_k: every user now "receives" a common
  // real-positive symbol
  const CMat hm = slot.s.cwiseInverse().asDiagonal() * ch.h();
  const double th = c.theta_th();
  const bool half_plane = c.order() == 2;
  const Eigen::Index rows = half_plane ? k : 2 * k;
  QpProblem qp;
  qp.q = 2.0 * RMat::Identity(2 * nt, 2 * nt);
  qp.c = RVec::Zero(2 * nt);
  qp.a_ineq.resize(rows, 2 * nt);
  qp.b_ineq.resize(rows);
  for (Eigen::Index i = 0; i < k; ++i) {
    RVec re(2 * nt);
    RVec im(2 * nt);
    re << hm.row(i).real().transpose(), -hm.row(i).imag().transpose();
    im << hm.row(i).imag().transpose(), hm.row(i).real().transpose();
    if (half_plane) {
      qp.a_ineq.row(i) = -re.transpose();
      qp.b_ineq(i) = -t(i) / scale;
    } else {
      // (Re - t) tan(th) >= |Im|, multiplied through by cos(th)
      qp.a_ineq.row(2 * i) = -(std::sin(th) * re - std::cos(th) * im).transpose();
      qp.a_ineq.row(2 * i + 1) = -(std::sin(th) * re + std::cos(th) * im).transpose();
      qp.b_ineq(2 * i) = -std::sin(th) * t(i) / scale;
      qp.b_ineq(2 * i + 1) = -std::sin(th) * t(i) / scale;
    }
  }
  const QpResult sol = solve_qp(qp);
  if (sol.report.status != SolveStatus::Optimal) solver_failed("multicast", sol.report.status);

  MulticastResult out;
  auto& r = out.result;
  r.x = scale * complex_unstack(sol.z);
  r.objective = r.x.squaredNorm();
  r.t = t.minCoeff();
  r.rx_scale = t;
  r.scalars = scalars_for(ch.h(), r.x, slot, c, CiMetric::NonStrictRotation);
  r.report = sol.report;
  out.w.resize(nt, k);
  for (Eigen::Index i = 0; i < k; ++i) out.w.col(i) = r.x / (static_cast<double>(k) * slot.s(i));
  return out;
}

}  // namespace slp
