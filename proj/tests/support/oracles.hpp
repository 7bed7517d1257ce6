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

// Brute-force reference computations used by the tests. Nothing in here calls
// into the solver or precoder code it is meant to check.

#include <functional>
#include <random>

#include "slp/types.hpp"

namespace oracle {

using slp::CMat;
using slp::CVec;
using slp::RMat;
using slp::RVec;

/// i.i.d. CN(0,1) matrix from a plain std engine.
CMat random_channel(std::mt19937_64& rng, int k, int nt);
RMat random_matrix(std::mt19937_64& rng, int rows, int cols);

/// erf by its Maclaurin series in long double; accurate for |x| < 3.5.
double series_erf(double x);
/// erfc by its continued fraction in long double; for x >= 2.
double cf_erfc(double x);
/// Inverse erf by bisection on series_erf, switching to cf_erfc in the tail.
double bisect_erfinv(double y);

struct NnlsSolution {
  RVec x;
  double objective = 0.0;  // ||Ax - b||^2
};
/// Solves unconstrained least squares on every passive set and keeps the best
/// nonnegative candidate.
NnlsSolution nnls_exhaustive(const RMat& a, const RVec& b);

/// min 0.5 z'Qz + c'z over the square [lo, hi]^2 sampled at `step`.
double qp_box_grid(const RMat& q, const RVec& c, double lo, double hi, double step);

/// min ||z||^2 subject to g z >= h (rows) over [-radius, radius]^d, by nested
/// grid search that ends at `final_step`. Returns +inf when no grid point is
/// feasible.
double min_norm_grid(const RMat& g, const RVec& h, double radius, double final_step);

/// max of f over the 3-sphere of given radius in R^4 (coarse grid over the
/// hyperspherical angles, then local refinement of the best cells).
double sphere_max4(const std::function<double(const RVec&)>& f, double radius, double final_step);

/// min of f over the 2-torus, full grid at `step` then local refinement.
double torus_min(const std::function<double(double, double)>& f, double step);

/// Sector level of received point lambda (symbol rotated onto the positive
/// real axis) for M-PSK, from the signed distances to both decision rays.
double sector_level(std::complex<double> lambda, int m);

/// Minimum sector level over users for transmit vector x.
double min_sector_level(const CMat& h, const CVec& x, const CVec& s, int m);

/// Best minimum sector level over every x with entries in a{+-1 +- j}.
double onebit_best_level(const CMat& h, const CVec& s, int m, double a);

}  // namespace oracle
