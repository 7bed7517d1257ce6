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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace slp {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr std::string_view kCsvHeader =
    "metric,precoder,mod,k,nt,x_value,aggregate,count_num,count_den,seed";

enum class ErrorMetric { Ber, Ser };

struct SimConfig {
  int k = 4;
  int nt = 4;
  std::string mod = "psk4";
  std::string precoder;
  /// SNR points (ber-sweep) or SINR targets Gamma_0 (power-sweep), in dB.
  std::vector<double> grid_db;
  int trials = 100;
  int slots = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  double p0 = 1.0;
  int bits = 2;
  ErrorMetric error_metric = ErrorMetric::Ber;
  /// Also emit "min_margin" rows with noiseless CI margins.
  bool margins = false;

  /// Throws Error(Errc::Config) naming the offending field.
  void validate() const;
};

struct ResultRow {
  std::string metric;
  std::string precoder;
  std::string mod;
  int k = 0;
  int nt = 0;
  double x_value = 0.0;
  double aggregate = 0.0;
  std::uint64_t count_num = 0;
  std::uint64_t count_den = 0;
  std::uint64_t seed = 0;
};

/// Error rate versus SNR = 10 log10(P0 / sigma2).
std::vector<ResultRow> run_ber_sweep(const SimConfig& cfg);

/// Average transmit power (dBW) versus common SINR target, sigma2 = 1.
std::vector<ResultRow> run_power_sweep(const SimConfig& cfg);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::string to_csv_line(const ResultRow& row);

}  // namespace slp
