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

#include <benchmark/benchmark.h>

#include <random>

#include "slp/mimo_model.hpp"
#include "slp/opt_kernels.hpp"
#include "slp/precoders.hpp"
#include "slp/quantized.hpp"

using namespace slp;

namespace {

RMat gaussian(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> n;
  RMat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

struct Instance {
  ChannelContext ch;
  SymbolSlot slot;
};

Instance instance(int k, int nt, const Constellation& c, std::uint64_t seed) {
  SeededRng rng(seed, 0);
  CMat h = sample_rayleigh(k, nt, rng);
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (auto& i : idx) i = rng.uniform_int(c.order());
  return {ChannelContext(std::move(h)), SymbolSlot::from_indices(c, idx)};
}

}  // namespace

static void BM_Nnls(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const NnlsProblem p{gaussian(rng, 2 * n, n), gaussian(rng, 2 * n, 1).col(0)};
  for (auto _ : state) benchmark::DoNotOptimize(solve_nnls(p).x.data());
}
BENCHMARK(BM_Nnls)->Arg(8)->Arg(24)->Arg(64);

static void BM_Qp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const RMat r = gaussian(rng, n, n);
  QpProblem p;
  p.q = r.transpose() * r;
  p.c = gaussian(rng, n, 1).col(0);
  p.a_eq.resize(0, n);
  p.b_eq.resize(0);
  p.a_ineq.resize(2 * n, n);
  p.a_ineq << RMat::Identity(n, n), -RMat::Identity(n, n);
  p.b_ineq = RVec::Constant(2 * n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_qp(p).z.data());
}
BENCHMARK(BM_Qp)->Arg(8)->Arg(24)->Arg(48);

static void BM_CsbSymbolScaling(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto c = constellation_from_id("psk8");
  const auto in = instance(k, k, c, 3);
  for (auto _ : state) benchmark::DoNotOptimize(csb_symbol_scaling(in.ch, in.slot, c, 1.0).t);
}
BENCHMARK(BM_CsbSymbolScaling)->Arg(4)->Arg(12)->Arg(32);

static void BM_CpmNonStrict(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto c = constellation_from_id("psk4");
  const auto in = instance(k, k, c, 4);
  CiSpec spec;
  spec.metric = CiMetric::NonStrictRotation;
  spec.mode = PowerMin{std::vector<double>(static_cast<std::size_t>(k), 10.0), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(cpm(in.ch, in.slot, c, spec).objective);
}
BENCHMARK(BM_CpmNonStrict)->Arg(4)->Arg(12);

static void BM_Duality(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto in = instance(k, k, constellation_from_id("psk4"), 5);
  const std::vector<double> gamma(static_cast<std::size_t>(k), 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(pm_duality(in.ch, gamma, 1.0).power);
}
BENCHMARK(BM_Duality)->Arg(4)->Arg(12);

static void BM_OneBitLp(benchmark::State& state) {
  const auto c = constellation_from_id("psk4");
  const auto in = instance(8, static_cast<int>(state.range(0)), c, 6);
  for (auto _ : state) benchmark::DoNotOptimize(onebit_lp(in.ch, in.slot, c, 1.0).t);
}
BENCHMARK(BM_OneBitLp)->Arg(16)->Arg(64);

static void BM_Ccd(benchmark::State& state) {
  const int nt = static_cast<int>(state.range(0));
  const auto in = instance(8, nt, constellation_from_id("qam16"), 7);
  const auto q = QuantAlphabet::uniform(3, 1.0, nt);
  for (auto _ : state) benchmark::DoNotOptimize(bbit_ccd(in.ch, in.slot.s, 0.1, q).objective);
}
BENCHMARK(BM_Ccd)->Arg(16)->Arg(64);

static void BM_Cep(benchmark::State& state) {
  const int nt = static_cast<int>(state.range(0));
  const auto in = instance(8, nt, constellation_from_id("psk8"), 8);
  const RVec e = RVec::Constant(8, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(cep_descent(in.ch, e, in.slot.s, 1.0, true).objective);
}
BENCHMARK(BM_Cep)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
