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

#include <string_view>

#include "slp/types.hpp"

namespace slp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

std::string_view to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;
  /// Worst certificate violation; meaningful for Optimal results only.
  double kkt_residual = 0.0;
};

/// All solver tolerances in one place. The certificate fields define what an
/// Optimal return promises; the rest steer the iterations.
struct SolverTolerances {
  // NNLS certificate: g = A^T(Ax - b); g_i >= -nnls_kkt on the active set,
  // |g_i| <= nnls_kkt where x_i > nnls_positive.
  double nnls_kkt = 1e-8;
  double nnls_positive = 1e-10;
  double nnls_ridge = 1e-10;
  int nnls_iter_factor = 10;

  // QP certificate.
  double qp_feasibility = 1e-9;
  double qp_stationarity = 1e-7;
  double qp_complementarity = 1e-7;
  // Interior-point controls.
  int qp_max_iter = 200;
  double qp_tikhonov = 1e-12;
  double qp_stall_level = 1e-6;
  int qp_stall_iters = 20;
  double qp_divergence = 1e12;
};

/// min ||Ax - b||_2 subject to x >= 0.
struct NnlsProblem {
  RMat a;
  RVec b;
};

struct NnlsResult {
  RVec x;
  SolveReport report;
};

/// Lawson-Hanson active set with Gram-matrix updates (Bro & de Jong), followed
/// by a QR polish of the passive-set least-squares solution.
NnlsResult solve_nnls(const NnlsProblem& p, const SolverTolerances& tol = {});

/// Worst violation of the NNLS KKT conditions at x.
double nnls_kkt_violation(const NnlsProblem& p, const RVec& x, const SolverTolerances& tol = {});

/// min 0.5 z^T Q z + c^T z  s.t.  Aeq z = beq,  Aineq z <= bineq.
/// Q must be symmetric positive semidefinite; Q = 0 gives a linear program.
struct QpProblem {
  RMat q;
  RVec c;
  RMat a_eq;
  RVec b_eq;
  RMat a_ineq;
  RVec b_ineq;

  Eigen::Index vars() const { return c.size(); }
};

struct QpResult {
  RVec z;
  RVec nu;  // equality multipliers
  RVec mu;  // inequality multipliers, >= 0
  SolveReport report;
};

/// Dense primal-dual interior point with Mehrotra predictor-corrector,
/// finished by an active-set refinement once the iterate is feasible.
/// Throws InvalidArgument if Q is not symmetric PSD or sizes disagree.
QpResult solve_qp(const QpProblem& p, const SolverTolerances& tol = {});

struct QpCertificate {
  double eq_residual = 0.0;          // ||Aeq z - beq||_inf
  double ineq_violation = 0.0;       // max(0, Aineq z - bineq)
  double stationarity = 0.0;         // ||Qz + c + Aeq^T nu + Aineq^T mu||_2
  double dual_violation = 0.0;       // max(0, -mu)
  double complementarity = 0.0;      // |mu^T (Aineq z - bineq)|

  bool passes(const SolverTolerances& tol = {}) const;
  double worst() const;
};

QpCertificate qp_certificate(const QpProblem& p, const QpResult& r);

}  // namespace slp
