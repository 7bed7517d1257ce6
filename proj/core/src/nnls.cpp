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
#include <vector>

#include "slp/errors.hpp"
#include "slp/opt_kernels.hpp"

namespace slp {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

namespace {

void validate(const NnlsProblem& p) {
  if (p.a.rows() < 1 || p.a.cols() < 1) throw Error(Errc::InvalidArgument, "NNLS: empty design");
  if (p.a.rows() != p.b.size()) {
    throw Error(Errc::DimensionMismatch, "NNLS: A has " + std::to_string(p.a.rows()) +
                                             " rows, b has " + std::to_string(p.b.size()));
  }
  if (!p.a.allFinite() || !p.b.allFinite()) {
    throw Error(Errc::InvalidArgument, "NNLS: non-finite input");
  }
}

std::vector<Eigen::Index> indices_of(const std::vector<bool>& mask) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

// Unconstrained least squares restricted to the passive set, via the Gram
// matrix. Falls back to a small ridge when the passive columns are dependent.
RVec solve_passive(const RMat& gram, const RVec& atb, const std::vector<bool>& passive,
                   double ridge) {
  const auto idx = indices_of(passive);
  RVec out = RVec::Zero(atb.size());
  if (idx.empty()) return out;
  const auto np = static_cast<Eigen::Index>(idx.size());
  RMat g(np, np);
  RVec r(np);
  for (Eigen::Index i = 0; i < np; ++i) {
    r(i) = atb(idx[i]);
    for (Eigen::Index j = 0; j < np; ++j) g(i, j) = gram(idx[i], idx[j]);
  }
  Eigen::LLT<RMat> llt(g);
  RVec sol;
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    sol = llt.solve(r);
    // A Cholesky that succeeds on a numerically singular Gram matrix can still
    // return garbage; check the pivots.
    const RVec d = llt.matrixLLT().diagonal();
    ok = sol.allFinite() && d.minCoeff() > 1e-7 * std::sqrt(std::max(1.0, g.diagonal().maxCoeff()));
  }
  if (!ok) {
    const double scale = std::max(1.0, g.diagonal().maxCoeff());
    g.diagonal().array() += ridge * scale;
    sol = g.ldlt().solve(r);
  }
  for (Eigen::Index i = 0; i < np; ++i) out(idx[i]) = sol(i);
  return out;
}

}  // namespace

double nnls_kkt_violation(const NnlsProblem& p, const RVec& x, const SolverTolerances& tol) {
  const RVec g = p.a.transpose() * (p.a * x - p.b);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) worst = std::max(worst, -x(i));
    if (x(i) > tol.nnls_positive) {
      worst = std::max(worst, std::abs(g(i)));
    } else {
      worst = std::max(worst, -g(i));
    }
  }
  return worst;
}

NnlsResult solve_nnls(const NnlsProblem& p, const SolverTolerances& tol) {
  validate(p);
  const auto m = p.a.rows();
  const auto n = p.a.cols();
  const RMat gram = p.a.transpose() * p.a;
  const RVec atb = p.a.transpose() * p.b;

  const double col_norm1 = p.a.cwiseAbs().colwise().sum().maxCoeff();
  const double wtol = 10.0 * std::numeric_limits<double>::epsilon() * col_norm1 *
                      static_cast<double>(std::max(m, n)) * std::max(1.0, p.b.cwiseAbs().maxCoeff());

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  RVec x = RVec::Zero(n);
  RVec w = atb;
  const int max_iter = tol.nnls_iter_factor * static_cast<int>(n);
  int iter = 0;
  SolveStatus status = SolveStatus::Optimal;

  while (true) {
    Eigen::Index j = -1;
    double best = wtol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[i] && !blocked[i] && w(i) > best) {
        best = w(i);
        j = i;
      }
    }
    if (j < 0) break;
    if (++iter > max_iter) {
      status = SolveStatus::MaxIter;
      break;
    }
    passive[j] = true;

    bool first = true;
    while (true) {
      const RVec s = solve_passive(gram, atb, passive, tol.nnls_ridge);
      Eigen::Index worst = -1;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && s(i) <= 0.0) {
          const double a = x(i) / (x(i) - s(i));
          if (a < alpha) {
            alpha = a;
            worst = i;
          }
        }
      }
      if (worst < 0) {
        x = s;
        std::fill(blocked.begin(), blocked.end(), false);
        break;
      }
      if (first && worst == j && s(j) <= 0.0 && x(j) == 0.0) {
        // The entering variable cannot move: numerical noise in w(j).
        passive[j] = false;
        blocked[j] = true;
        break;
      }
      first = false;
      x += alpha * (s - x);
      x(worst) = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[i] && x(i) <= 0.0) {
          passive[i] = false;
          x(i) = 0.0;
        }
      }
    }
    w = atb - gram * x;
  }

  // Polish on the final passive set with a QR of the original columns.
  const auto idx = indices_of(passive);
  if (!idx.empty()) {
    RMat ap(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = p.a.col(idx[c]);
    const RVec xp = ap.colPivHouseholderQr().solve(p.b);
    if (xp.allFinite() && xp.minCoeff() > 0.0) {
      RVec polished = RVec::Zero(n);
      for (std::size_t c = 0; c < idx.size(); ++c) polished(idx[c]) = xp(static_cast<Eigen::Index>(c));
      if (nnls_kkt_violation(p, polished, tol) <= nnls_kkt_violation(p, x, tol)) x = polished;
    }
  }

  NnlsResult out;
  out.x = x;
  out.report.status = status;
  out.report.iterations = iter;
  out.report.kkt_residual = nnls_kkt_violation(p, x, tol);
  return out;
}

}  // namespace slp
