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

#include "slp/ci_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kAlignTol = 1e-9;

bool is_bpsk(const Constellation& c) { return c.kind() == ModKind::PSK && c.order() == 2; }

double sector_margin(cplx lambda, double t, double theta) {
  if (std::abs(std::cos(theta)) < 1e-15) return lambda.real() - t;
  return (lambda.real() - t) * std::tan(theta) - std::abs(lambda.imag());
}

// Giles' single-precision rational approximation; used only as a Newton seed.
double erfinv_seed(double x) {
  double w = -std::log((1.0 - x) * (1.0 + x));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  return p * x;
}

}  // namespace

void CiSpec::validate() const {
  if (const auto* pm = std::get_if<PowerMin>(&mode)) {
    if (!(pm->sigma2 > 0.0)) throw Error(Errc::InvalidArgument, "sigma2 must be > 0");
    for (double g : pm->gamma) {
      if (!(g >= 0.0)) throw Error(Errc::InvalidArgument, "SINR targets must be >= 0");
    }
  } else if (const auto* b = std::get_if<Balancing>(&mode)) {
    if (!(b->p0 > 0.0)) throw Error(Errc::InvalidArgument, "power budget P0 must be > 0");
  }
  if (const auto* sep = std::get_if<SepTarget>(&robustness)) {
    if (!(sep->p > 0.0 && sep->p < 0.5)) {
      throw Error(Errc::OutOfRange, "target SEP must lie in (0, 0.5)");
    }
  }
}

CVec lambda_of(const CMat& h, const CVec& x, const CVec& s) {
  if (h.cols() != x.size() || h.rows() != s.size()) {
    throw Error(Errc::DimensionMismatch, "lambda_of: H, x, s sizes disagree");
  }
  const CVec r = h * x;
  CVec lambda(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) == cplx(0.0, 0.0)) throw Error(Errc::ZeroSymbol, "symbol " + std::to_string(k));
    lambda(k) = r(k) / s(k);
  }
  return lambda;
}

SymbolBasis decompose_symbol(cplx s, const Constellation& c) {
  if (c.kind() == ModKind::PSK && c.order() > 2) {
    const double theta = kPi / c.order();
    const double denom = 2.0 * std::cos(theta);
    if (std::abs(denom) < 1e-15) throw Error(Errc::DegenerateBasis, "cos(pi/M) = 0");
    return {s * std::polar(1.0, theta) / denom, s * std::polar(1.0, -theta) / denom};
  }
  return {cplx(s.real(), 0.0), cplx(0.0, s.imag())};
}

std::array<double, 2> alphas_for(cplx received, cplx s, const Constellation& c) {
  const auto [a, b] = decompose_symbol(s, c);
  const double det = a.real() * b.imag() - b.real() * a.imag();
  if (std::abs(det) < 1e-14) {
    throw Error(Errc::SingularDecomposition, "symbol-scaling basis is degenerate");
  }
  return {(received.real() * b.imag() - b.real() * received.imag()) / det,
          (a.real() * received.imag() - received.real() * a.imag()) / det};
}

UserScalars alphas_of(const CMat& h, const CVec& x, const CVec& s, const Constellation& c) {
  if (h.cols() != x.size() || h.rows() != s.size()) {
    throw Error(Errc::DimensionMismatch, "alphas_of: H, x, s sizes disagree");
  }
  const CVec r = h * x;
  UserScalars out;
  out.alpha.reserve(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) out.alpha.push_back(alphas_for(r(k), s(k), c));
  return out;
}

void check_metric(const Constellation& c, CiMetric metric) {
  const bool ok = c.kind() == ModKind::PSK ||
                  (c.kind() == ModKind::QAM && metric == CiMetric::SymbolScaling) ||
                  (c.kind() == ModKind::APSK && metric == CiMetric::NonStrictRotation);
  if (!ok) {
    throw Error(Errc::MetricMismatch, "CI metric not defined for " + c.name());
  }
}

bool CiMargins::holds(double tol) const {
  for (Eigen::Index k = 0; k < margin.size(); ++k) {
    if (margin(k) < -tol || !aligned[static_cast<std::size_t>(k)]) return false;
  }
  return true;
}

CiMargins ci_margin(const UserScalars& scalars, const Constellation& c,
                    std::span<const int> symbols, CiMetric metric, double t) {
  check_metric(c, metric);
  const auto k_users = scalars.users();
  if (symbols.size() != k_users) {
    throw Error(Errc::DimensionMismatch, "ci_margin: scalar and symbol counts disagree");
  }
  const bool wants_alpha = metric == CiMetric::SymbolScaling && !is_bpsk(c);
  if (wants_alpha != scalars.symbol_scaling()) {
    throw Error(Errc::MetricMismatch, "interference scalars do not match the CI metric");
  }

  CiMargins out;
  out.margin.resize(static_cast<Eigen::Index>(k_users));
  out.aligned.assign(k_users, true);
  const auto classes = classify_components(c);

  for (std::size_t k = 0; k < k_users; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const auto& cls = classes.at(static_cast<std::size_t>(symbols[k]));
    double m = 0.0;
    switch (metric) {
      case CiMetric::StrictRotation: {
        const cplx l = scalars.lambda[k];
        m = l.real() - t;
        out.aligned[k] = std::abs(l.imag()) <= kAlignTol;
        break;
      }
      case CiMetric::NonStrictRotation: {
        const cplx l = scalars.lambda[k];
        if (c.kind() == ModKind::APSK && cls.point == Component::Inner) {
          m = -std::abs(l - t);
        } else {
          m = sector_margin(l, t, c.theta_th());
        }
        break;
      }
      case CiMetric::SymbolScaling: {
        if (is_bpsk(c)) {
          // real/imag split with Im s = 0: the imaginary part must stay at zero
          const cplx l = scalars.lambda[k];
          m = std::min(l.real() - t, -std::abs(l.imag()));
          break;
        }
        const auto& a = scalars.alpha[k];
        const Component axes[2] = {cls.real_axis, cls.imag_axis};
        m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 2; ++i) {
          const double d = a[static_cast<std::size_t>(i)] - t;
          m = std::min(m, axes[i] == Component::Outer ? d : -std::abs(d));
        }
        break;
      }
    }
    out.margin(kk) = m;
  }
  return out;
}

double noise_robust_t(double gamma, double sigma, int m) {
  if (!(gamma >= 0.0) || !(sigma > 0.0) || m < 2) {
    throw Error(Errc::InvalidArgument, "noise_robust_t needs gamma >= 0, sigma > 0, M >= 2");
  }
  return gamma * sigma / std::sin(kPi / m);
}

double sep_t(double p, double sigma, int m) {
  if (!(p > 0.0 && p <= 0.5)) throw Error(Errc::OutOfRange, "SEP target must lie in (0, 0.5]");
  if (!(sigma > 0.0) || m < 2) throw Error(Errc::InvalidArgument, "sep_t needs sigma > 0, M >= 2");
  return erfinv(1.0 - 2.0 * p) * sigma / std::sin(kPi / m);
}

double erfinv(double y) {
  if (!(y > -1.0 && y < 1.0)) {
    if (y == 1.0) return std::numeric_limits<double>::infinity();
    if (y == -1.0) return -std::numeric_limits<double>::infinity();
    throw Error(Errc::OutOfRange, "erfinv argument must lie in [-1, 1]");
  }
  if (y == 0.0) return 0.0;
  const double sign = y < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(y);
  double x = erfinv_seed(a);
  const double two_over_sqrt_pi = 2.0 / std::sqrt(kPi);
  for (int it = 0; it < 8; ++it) {
    // Tail residuals go through erfc to keep relative accuracy near |y| -> 1.
    const double f = a > 0.5 ? (1.0 - a) - std::erfc(x) : std::erf(x) - a;
    const double fp = two_over_sqrt_pi * std::exp(-x * x);
    const double step = f / fp;
    // Halley correction: erf'' = -2x erf'
    const double halley = step / (1.0 + x * step);
    x -= halley;
    if (std::abs(halley) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return sign * x;
}

}  // namespace slp
