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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "slp/errors.hpp"
#include "slp/opt_kernels.hpp"

namespace slp {

namespace {

void validate(const QpProblem& p) {
  const auto n = p.vars();
  if (n < 1) throw Error(Errc::InvalidArgument, "QP: no variables");
  if (p.q.rows() != n || p.q.cols() != n) throw Error(Errc::DimensionMismatch, "QP: Q is not n x n");
  if (p.a_eq.rows() != p.b_eq.size() || (p.a_eq.rows() > 0 && p.a_eq.cols() != n)) {
    throw Error(Errc::DimensionMismatch, "QP: equality block sizes disagree");
  }
  if (p.a_ineq.rows() != p.b_ineq.size() || (p.a_ineq.rows() > 0 && p.a_ineq.cols() != n)) {
    throw Error(Errc::DimensionMismatch, "QP: inequality block sizes disagree");
  }
  if (!p.q.allFinite() || !p.c.allFinite() || !p.a_eq.allFinite() || !p.b_eq.allFinite() ||
      !p.a_ineq.allFinite() || !p.b_ineq.allFinite()) {
    throw Error(Errc::InvalidArgument, "QP: non-finite input");
  }
  const double scale = std::max(1.0, p.q.cwiseAbs().maxCoeff());
  if ((p.q - p.q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(Errc::InvalidArgument, "QP: Q is not symmetric");
  }
  if (!p.q.isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<RMat> es(p.q, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
      throw Error(Errc::InvalidArgument, "QP: Q is not positive semidefinite");
    }
  }
}

double objective(const QpProblem& p, const RVec& z) { return 0.5 * z.dot(p.q * z) + p.c.dot(z); }

double inf_norm(const RVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double max_step(const RVec& v, const RVec& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

struct EqpSolution {
  RVec z, nu, mu_act;
};

EqpSolution solve_eqp(const QpProblem& p, const std::vector<Eigen::Index>& act) {
  const auto n = p.vars();
  const auto ne = p.a_eq.rows();
  const auto na = static_cast<Eigen::Index>(act.size());
  RMat k = RMat::Zero(n + ne + na, n + ne + na);
  RVec rhs = RVec::Zero(n + ne + na);
  k.topLeftCorner(n, n) = p.q;
  rhs.head(n) = -p.c;
  if (ne) {
    k.block(0, n, n, ne) = p.a_eq.transpose();
    k.block(n, 0, ne, n) = p.a_eq;
    rhs.segment(n, ne) = p.b_eq;
  }
  for (Eigen::Index j = 0; j < na; ++j) {
    const auto i = act[static_cast<std::size_t>(j)];
    k.block(0, n + ne + j, n, 1) = p.a_ineq.row(i).transpose();
    k.block(n + ne + j, 0, 1, n) = p.a_ineq.row(i);
    rhs(n + ne + j) = p.b_ineq(i);
  }
  const Eigen::CompleteOrthogonalDecomposition<RMat> cod(k);
  RVec sol = cod.solve(rhs);
  for (int r = 0; r < 2; ++r) sol += cod.solve(rhs - k * sol);
  return {sol.head(n), sol.segment(n, ne), sol.tail(na)};
}

// Active-set refinement started from the interior iterate's guess of the
// binding rows. Interior iterates near a degenerate optimum can stall with a
// nonzero gap or lose stationarity accuracy; a few exact equality-constrained
// solves settle both.
std::vector<Eigen::Index> guess_active(const RVec& s, const RVec& mu) {
  std::vector<Eigen::Index> act;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (mu(i) > s(i)) act.push_back(i);
  }
  return act;
}

bool polish(const QpProblem& p, std::vector<Eigen::Index> act, QpResult& out,
            const SolverTolerances& tol) {
  const auto ni = p.a_ineq.rows();
  QpResult cand;
  std::set<std::vector<Eigen::Index>> seen;
  for (Eigen::Index round = 0; round < 2 * ni + 4; ++round) {
    std::vector<Eigen::Index> key = act;
    std::sort(key.begin(), key.end());
    if (!seen.insert(std::move(key)).second) return false;  // cycling on a degenerate vertex
    const EqpSolution e = solve_eqp(p, act);
    if (!e.z.allFinite() || !e.mu_act.allFinite()) return false;
    cand.z = e.z;
    cand.nu = e.nu;
    cand.mu = RVec::Zero(ni);
    Eigen::Index drop = -1;
    double worst_mu = -tol.qp_feasibility;
    for (std::size_t j = 0; j < act.size(); ++j) {
      const double m = e.mu_act(static_cast<Eigen::Index>(j));
      cand.mu(act[j]) = m;
      if (m < worst_mu) {
        worst_mu = m;
        drop = static_cast<Eigen::Index>(j);
      }
    }
    if (drop >= 0) {
      act.erase(act.begin() + drop);
      continue;
    }
    const RVec slack = p.a_ineq * cand.z - p.b_ineq;
    Eigen::Index add = -1;
    double worst_slack = tol.qp_feasibility;
    for (Eigen::Index i = 0; i < ni; ++i) {
      if (slack(i) > worst_slack && std::find(act.begin(), act.end(), i) == act.end()) {
        worst_slack = slack(i);
        add = i;
      }
    }
    if (add >= 0) {
      act.push_back(add);
      continue;
    }
    break;
  }
  if (!qp_certificate(p, cand).passes(tol)) return false;
  out.z = cand.z;
  out.nu = cand.nu;
  out.mu = cand.mu;
  return true;
}

}  // namespace

bool QpCertificate::passes(const SolverTolerances& tol) const {
  return eq_residual <= tol.qp_feasibility && ineq_violation <= tol.qp_feasibility &&
         stationarity <= tol.qp_stationarity && dual_violation <= tol.qp_feasibility &&
         complementarity <= tol.qp_complementarity;
}

double QpCertificate::worst() const {
  return std::max({eq_residual, ineq_violation, stationarity, dual_violation, complementarity});
}

QpCertificate qp_certificate(const QpProblem& p, const QpResult& r) {
  QpCertificate c;
  RVec grad = p.q * r.z + p.c;
  if (p.a_eq.rows() > 0) {
    c.eq_residual = inf_norm(p.a_eq * r.z - p.b_eq);
    grad += p.a_eq.transpose() * r.nu;
  }
  if (p.a_ineq.rows() > 0) {
    const RVec slack = p.a_ineq * r.z - p.b_ineq;
    c.ineq_violation = std::max(0.0, slack.maxCoeff());
    c.dual_violation = std::max(0.0, -r.mu.minCoeff());
    c.complementarity = std::abs(r.mu.dot(slack));
    grad += p.a_ineq.transpose() * r.mu;
  }
  c.stationarity = grad.norm();
  return c;
}

QpResult solve_qp(const QpProblem& p, const SolverTolerances& tol) {
  validate(p);
  const auto n = p.vars();
  const auto ne = p.a_eq.rows();
  const auto ni = p.a_ineq.rows();
  const RMat& ai = p.a_ineq;

  RVec z = RVec::Zero(n);
  RVec nu = RVec::Zero(ne);
  RVec s = (p.b_ineq - ai * z).cwiseMax(1.0);
  RVec mu = RVec::Ones(ni);

  QpResult out;
  double best_pres = std::numeric_limits<double>::infinity();
  int stall = 0;

  auto finish = [&](SolveStatus st, int it, bool keep = false) {
    if (!keep) {
      out.z = z;
      out.nu = nu;
      out.mu = mu;
    }
    out.report.status = st;
    out.report.iterations = it;
    out.report.kkt_residual = qp_certificate(p, out).worst();
    return out;
  };

  // a guess that already failed to polish is not retried
  std::vector<Eigen::Index> failed_guess;
  bool have_failed = false;

  const auto dim = n + ne;
  RMat kkt(dim, dim);
  RVec rhs(dim);

  for (int it = 0; it <= tol.qp_max_iter; ++it) {
    RVec r_d = p.q * z + p.c;
    if (ne) r_d += p.a_eq.transpose() * nu;
    if (ni) r_d += ai.transpose() * mu;
    const RVec r_e = ne ? RVec(p.a_eq * z - p.b_eq) : RVec();
    const RVec r_i = ni ? RVec(ai * z + s - p.b_ineq) : RVec();
    const double gap = ni ? s.dot(mu) / static_cast<double>(ni) : 0.0;
    const double pres = std::max(inf_norm(r_e), inf_norm(r_i));

    // The certificate is the stopping rule: once it passes, further
    // iterations only make the reduced KKT system worse conditioned.
    out.z = z;
    out.nu = nu;
    out.mu = mu;
    const QpCertificate cert = qp_certificate(p, out);
    if (cert.passes(tol)) {
      // an exact solve on the identified active set removes the residual
      // error the interior iterate still carries
      QpResult exact = out;
      if (ni && polish(p, guess_active(s, mu), exact, tol) &&
          objective(p, exact.z) <= objective(p, out.z) + 1e-12 * (1.0 + std::abs(objective(p, out.z)))) {
        out = exact;
        return finish(SolveStatus::Optimal, it, true);
      }
      return finish(SolveStatus::Optimal, it);
    }
    if (ni && pres <= tol.qp_feasibility) {
      auto guess = guess_active(s, mu);
      if (!have_failed || guess != failed_guess) {
        if (polish(p, guess, out, tol)) return finish(SolveStatus::Optimal, it, true);
        failed_guess = std::move(guess);
        have_failed = true;
      }
    }
    if (it == tol.qp_max_iter) break;

    if (inf_norm(z) > tol.qp_divergence) {
      return finish(pres <= tol.qp_stall_level ? SolveStatus::Unbounded : SolveStatus::Infeasible, it);
    }
    if (inf_norm(mu) > tol.qp_divergence || (ne && inf_norm(nu) > tol.qp_divergence)) {
      return finish(SolveStatus::Infeasible, it);
    }
    if (pres > tol.qp_stall_level) {
      if (pres < 0.99 * best_pres) {
        best_pres = pres;
        stall = 0;
      } else if (++stall >= tol.qp_stall_iters) {
        return finish(SolveStatus::Infeasible, it);
      }
    } else {
      stall = 0;
    }

    const RVec d = ni ? RVec(mu.cwiseQuotient(s)) : RVec();
    kkt.setZero();
    kkt.topLeftCorner(n, n) = p.q;
    if (ni) kkt.topLeftCorner(n, n) += ai.transpose() * d.asDiagonal() * ai;
    kkt.topLeftCorner(n, n).diagonal().array() += tol.qp_tikhonov;
    if (ne) {
      kkt.topRightCorner(n, ne) = p.a_eq.transpose();
      kkt.bottomLeftCorner(ne, n) = p.a_eq;
      kkt.bottomRightCorner(ne, ne).diagonal().setConstant(-tol.qp_tikhonov);
    }
    const Eigen::PartialPivLU<RMat> lu(kkt);

    RVec dz, dnu, ds, dmu;
    auto newton = [&](const RVec& r_c) {
      rhs.head(n) = -r_d;
      if (ni) rhs.head(n) -= ai.transpose() * (mu.cwiseProduct(r_i) - r_c).cwiseQuotient(s);
      if (ne) rhs.tail(ne) = -r_e;
      RVec sol = lu.solve(rhs);
      sol += lu.solve(rhs - kkt * sol);  // one step of iterative refinement
      dz = sol.head(n);
      dnu = sol.tail(ne);
      if (ni) {
        ds = -r_i - ai * dz;
        dmu = (-r_c - mu.cwiseProduct(ds)).cwiseQuotient(s);
      }
    };

    if (ni == 0) {
      newton(RVec());
      z += dz;
      nu += dnu;
      continue;
    }

    newton(s.cwiseProduct(mu));
    const double a_aff = std::min(max_step(s, ds), max_step(mu, dmu));
    const double gap_aff =
        (s + a_aff * ds).dot(mu + a_aff * dmu) / static_cast<double>(ni);
    const double sigma = std::pow(gap_aff / gap, 3);
    const RVec r_c = (s.cwiseProduct(mu) + ds.cwiseProduct(dmu)).array() - sigma * gap;
    newton(r_c);
    const double a = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(mu, dmu)));
    z += a * dz;
    nu += a * dnu;
    s += a * ds;
    mu += a * dmu;
  }

  return finish(SolveStatus::MaxIter, tol.qp_max_iter);
}

}  // namespace slp
