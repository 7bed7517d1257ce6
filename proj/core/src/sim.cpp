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

#include "slp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "slp/ci_geometry.hpp"
#include "slp/constellation.hpp"
#include "slp/errors.hpp"
#include "slp/format.hpp"
#include "slp/mimo_model.hpp"
#include "slp/registry.hpp"

namespace slp {

namespace {

constexpr double kPowerFloorDbw = -100.0;
constexpr double kMarginTol = 1e-6;

[[noreturn]] void config_error(std::string_view field, const std::string& what) {
  throw Error(Errc::Config, std::string(field) + ": " + what);
}

// Runs fn(trial) for every trial on a small thread pool. Results must be
// written to per-trial slots so that aggregation order is fixed.
template <class Fn>
void for_each_trial(int trials, int workers, Fn&& fn) {
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  auto work = [&] {
    while (!failed.load()) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        fn(t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
        failed = true;
      }
    }
  };
  const int n = std::clamp(workers, 1, trials);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Setup {
  Constellation c;
  PrecoderId id;
};

Setup prepare(const SimConfig& cfg) {
  cfg.validate();
  Setup s{constellation_from_id(cfg.mod), *parse_precoder(cfg.precoder)};
  return s;
}

std::vector<int> draw_symbols(SeededRng& rng, int k, int m) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (auto& i : idx) i = rng.uniform_int(m);
  return idx;
}

CiMetric diagnostic_metric(PrecoderId id, const Constellation& c) {
  switch (id) {
    case PrecoderId::CpmStrict:
    case PrecoderId::Civp:
      return CiMetric::StrictRotation;
    case PrecoderId::CpmSs:
      return CiMetric::SymbolScaling;
    default:
      return c.kind() == ModKind::QAM ? CiMetric::SymbolScaling : CiMetric::NonStrictRotation;
  }
}

ResultRow base_row(const SimConfig& cfg, std::string metric, double x) {
  ResultRow r;
  r.metric = std::move(metric);
  r.precoder = cfg.precoder;
  r.mod = cfg.mod;
  r.k = cfg.k;
  r.nt = cfg.nt;
  r.x_value = x;
  r.seed = cfg.seed;
  return r;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

void SimConfig::validate() const {
  if (k < 1) config_error("k", "must be >= 1");
  if (nt < 1) config_error("nt", "must be >= 1");
  if (grid_db.empty()) config_error("grid", "needs at least one point");
  for (double g : grid_db) {
    if (!std::isfinite(g)) config_error("grid", "points must be finite");
  }
  if (trials < 1) config_error("trials", "must be >= 1");
  if (slots < 1) config_error("slots", "must be >= 1");
  if (workers < 1) config_error("workers", "must be >= 1");
  if (!(p0 > 0.0)) config_error("p0", "must be > 0");
  if (bits < 1 || bits > 16) config_error("bits", "must lie in 1..16");
  if (precoder.empty()) config_error("precoder", "is required");
  const auto id = parse_precoder(precoder);
  if (!id) config_error("precoder", "unknown precoder '" + precoder + "'");
  std::optional<Constellation> c;
  try {
    c = constellation_from_id(mod);
  } catch (const Error& e) {
    config_error("mod", e.what());
  }
  try {
    check_supported(*id, *c);
  } catch (const Error& e) {
    config_error("precoder", e.what());
  }
  if (*id == PrecoderId::PmDuality && k > nt) config_error("precoder", "pm-duality needs k <= nt");
}

std::vector<ResultRow> run_ber_sweep(const SimConfig& cfg) {
  const Setup st = prepare(cfg);
  if (st.id == PrecoderId::PmDuality) {
    config_error("precoder", "pm-duality is a block-level power minimizer; use power-sweep");
  }
  const Constellation& c = st.c;
  const auto np = cfg.grid_db.size();
  const int m = c.order();
  const bool rescale = power_minimizing(st.id);
  const CiMetric diag = diagnostic_metric(st.id, c);

  struct Counts {
    std::vector<std::uint64_t> bit_err, sym_err, neg;
    std::vector<double> margin;
  };
  std::vector<Counts> per_trial(static_cast<std::size_t>(cfg.trials));

  for_each_trial(cfg.trials, cfg.workers, [&](int trial) {
    Counts& cnt = per_trial[static_cast<std::size_t>(trial)];
    cnt.bit_err.assign(np, 0);
    cnt.sym_err.assign(np, 0);
    cnt.neg.assign(np, 0);
    cnt.margin.assign(np, 0.0);
    const SeededRng root(cfg.seed, static_cast<std::uint64_t>(trial));
    SeededRng chan = root.substream(0);
    SeededRng noise = root.substream(1);
    const ChannelContext ch(sample_rayleigh(cfg.k, cfg.nt, chan));

    PrecoderParams params;
    params.p0 = cfg.p0;
    params.bits = cfg.bits;
    params.gamma.assign(static_cast<std::size_t>(cfg.k), 1.0);

    auto run = [&](const SymbolSlot& slot, double sigma2) {
      params.sigma2 = sigma2;
      PrecodeResult r = precode(st.id, ch, slot, c, params);
      if (rescale) {
        const double n2 = r.x.squaredNorm();
        if (n2 > 0.0) {
          const double f = std::sqrt(cfg.p0 / n2);
          r.x *= f;
          r.rx_scale *= f;
          r.t *= f;
        }
      }
      return r;
    };

    CVec n(cfg.k);
    for (int s = 0; s < cfg.slots; ++s) {
      const SymbolSlot slot = SymbolSlot::from_indices(c, draw_symbols(chan, cfg.k, m));
      for (int i = 0; i < cfg.k; ++i) n(i) = noise.complex_gaussian(1.0);

      std::optional<PrecodeResult> fixed;
      if (!noise_dependent(st.id)) fixed = run(slot, 1.0);
      for (std::size_t p = 0; p < np; ++p) {
        const double sigma2 = cfg.p0 / std::pow(10.0, cfg.grid_db[p] / 10.0);
        const PrecodeResult r = fixed ? *fixed : run(slot, sigma2);
        const CVec y = ch.h() * r.x + std::sqrt(sigma2) * n;
        for (int u = 0; u < cfg.k; ++u) {
          const double scale = std::max(r.rx_scale(u), 1e-300);
          const int got = detect(y(u), c, scale);
          const int sent = slot.index[static_cast<std::size_t>(u)];
          if (got != sent) {
            ++cnt.sym_err[p];
            cnt.bit_err[p] += static_cast<std::uint64_t>(std::popcount(c.label(got) ^ c.label(sent)));
          }
        }
        if (cfg.margins) {
          const auto scal = scalars_for(ch.h(), r.x, slot, c, diag);
          const double mm = ci_margin(scal, c, slot.index, diag, r.t).min();
          cnt.margin[p] += mm;
          if (mm < -kMarginTol) ++cnt.neg[p];
        }
      }
    }
  });

  const auto slots_total = static_cast<std::uint64_t>(cfg.trials) * static_cast<std::uint64_t>(cfg.slots);
  const auto symbols = slots_total * static_cast<std::uint64_t>(cfg.k);
  const auto bits = symbols * static_cast<std::uint64_t>(c.bits_per_symbol());
  std::vector<ResultRow> rows;
  for (std::size_t p = 0; p < np; ++p) {
    std::uint64_t be = 0;
    std::uint64_t se = 0;
    std::uint64_t neg = 0;
    double margin = 0.0;
    for (const auto& cnt : per_trial) {
      be += cnt.bit_err[p];
      se += cnt.sym_err[p];
      neg += cnt.neg[p];
      margin += cnt.margin[p];
    }
    const double x = cfg.grid_db[p];
    ResultRow row = base_row(cfg, cfg.error_metric == ErrorMetric::Ber ? "ber" : "ser", x);
    row.count_num = cfg.error_metric == ErrorMetric::Ber ? be : se;
    row.count_den = cfg.error_metric == ErrorMetric::Ber ? bits : symbols;
    row.aggregate = ratio(row.count_num, row.count_den);
    rows.push_back(row);
    if (cfg.margins) {
      ResultRow mr = base_row(cfg, "min_margin", x);
      mr.aggregate = margin / static_cast<double>(slots_total);
      mr.count_num = neg;
      mr.count_den = slots_total;
      rows.push_back(mr);
    }
  }
  return rows;
}

std::vector<ResultRow> run_power_sweep(const SimConfig& cfg) {
  const Setup st = prepare(cfg);
  if (!power_minimizing(st.id)) {
    config_error("precoder", "power-sweep needs pm-duality, cpm-strict, cpm-nonstrict, cpm-ss or multicast");
  }
  const Constellation& c = st.c;
  const auto np = cfg.grid_db.size();
  std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(cfg.trials));

  for_each_trial(cfg.trials, cfg.workers, [&](int trial) {
    auto& sums = per_trial[static_cast<std::size_t>(trial)];
    sums.assign(np, 0.0);
    const SeededRng root(cfg.seed, static_cast<std::uint64_t>(trial));
    SeededRng chan = root.substream(0);
    const ChannelContext ch(sample_rayleigh(cfg.k, cfg.nt, chan));
    std::vector<SymbolSlot> slots;
    for (int s = 0; s < cfg.slots; ++s) {
      slots.push_back(SymbolSlot::from_indices(c, draw_symbols(chan, cfg.k, c.order())));
    }
    PrecoderParams params;
    params.p0 = cfg.p0;
    params.sigma2 = 1.0;
    params.bits = cfg.bits;
    for (std::size_t p = 0; p < np; ++p) {
      params.gamma.assign(static_cast<std::size_t>(cfg.k), std::pow(10.0, cfg.grid_db[p] / 10.0));
      if (st.id == PrecoderId::PmDuality) {
        const CMat w = pm_duality(ch, params.gamma, params.sigma2).w;
        for (const auto& slot : slots) sums[p] += (w * slot.s).squaredNorm();
      } else {
        for (const auto& slot : slots) sums[p] += precode(st.id, ch, slot, c, params).x.squaredNorm();
      }
    }
  });

  const auto slots_total = static_cast<std::uint64_t>(cfg.trials) * static_cast<std::uint64_t>(cfg.slots);
  std::vector<ResultRow> rows;
  for (std::size_t p = 0; p < np; ++p) {
    double total = 0.0;
    for (const auto& sums : per_trial) total += sums[p];
    const double mean = total / static_cast<double>(slots_total);
    ResultRow row = base_row(cfg, "avg_power_dbw", cfg.grid_db[p]);
    row.aggregate = mean > 0.0 ? std::max(kPowerFloorDbw, 10.0 * std::log10(mean)) : kPowerFloorDbw;
    row.count_num = slots_total;
    row.count_den = static_cast<std::uint64_t>(cfg.trials);
    rows.push_back(row);
  }
  return rows;
}

std::string to_csv_line(const ResultRow& r) {
  std::string out;
  out += r.metric + ',' + r.precoder + ',' + r.mod + ',';
  out += std::to_string(r.k) + ',' + std::to_string(r.nt) + ',';
  out += format_double(r.x_value) + ',' + format_double(r.aggregate) + ',';
  out += std::to_string(r.count_num) + ',' + std::to_string(r.count_den) + ',';
  out += std::to_string(r.seed);
  return out;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

}  // namespace slp
