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

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slp/ci_geometry.hpp"
#include "slp/errors.hpp"
#include "slp/format.hpp"
#include "slp/mimo_model.hpp"
#include "slp/registry.hpp"
#include "slp/sim.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

double parse_number(const std::string& field, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw slp::Error(slp::Errc::Config, field + ": cannot parse '" + std::string(text) + "'");
  }
  return v;
}

// "a:step:b" (inclusive) or "a,b,c".
std::vector<double> parse_grid(const std::string& field, const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw slp::Error(slp::Errc::Config, field + ": range must be start:step:stop");
    const double a = parse_number(field, parts[0]);
    const double step = parse_number(field, parts[1]);
    const double b = parse_number(field, parts[2]);
    if (!(step > 0.0) || b < a) throw slp::Error(slp::Errc::Config, field + ": need step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(field, p));
  if (out.empty()) throw slp::Error(slp::Errc::Config, field + ": empty grid");
  return out;
}

void print_demo(std::ostream& os, const slp::CMat& h, const slp::SymbolSlot& slot,
                const slp::Constellation& c, slp::PrecoderId id, const slp::PrecodeResult& r) {
  using slp::format_double;
  const slp::CiMetric metric = c.kind() == slp::ModKind::QAM ? slp::CiMetric::SymbolScaling
                               : id == slp::PrecoderId::Civp || id == slp::PrecoderId::CpmStrict
                                   ? slp::CiMetric::StrictRotation
                                   : slp::CiMetric::NonStrictRotation;
  const auto scal = slp::scalars_for(h, r.x, slot, c, metric);
  const auto margins = slp::ci_margin(scal, c, slot.index, metric, r.t);
  os << "precoder " << slp::to_string(id) << " mod " << c.name() << "\n";
  os << "power " << format_double(r.x.squaredNorm()) << " t " << format_double(r.t)
     << " objective " << format_double(r.objective) << " status " << slp::to_string(r.report.status)
     << " iterations " << r.report.iterations << "\n";
  for (std::size_t k = 0; k < slot.index.size(); ++k) {
    os << "user " << k << " symbol " << slot.index[k];
    if (scal.symbol_scaling()) {
      os << " alpha " << format_double(scal.alpha[k][0]) << ' ' << format_double(scal.alpha[k][1]);
    } else {
      os << " lambda " << format_double(scal.lambda[k].real()) << ' '
         << format_double(scal.lambda[k].imag());
    }
    os << " margin " << format_double(margins.margin(static_cast<Eigen::Index>(k))) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol-level precoding simulator"};
  app.set_config("--config", "", "flat key=value file; keys match long flag names");
  app.require_subcommand(1);
  app.fallthrough();

  slp::SimConfig cfg;
  std::string grid;
  std::string metric = "ber";
  std::string out_path;
  std::string channel_in;
  std::string channel_out;
  double snr_db = 20.0;
  double gamma_db = 10.0;

  app.add_option("--k", cfg.k, "number of users");
  app.add_option("--nt", cfg.nt, "number of transmit antennas");
  app.add_option("--mod", cfg.mod, "constellation: psk2, psk4, psk8, qam16, qam64, apsk16, ...");
  app.add_option("--precoder", cfg.precoder, "precoder name");
  app.add_option("--trials", cfg.trials, "channel realizations");
  app.add_option("--slots", cfg.slots, "symbol slots per channel realization");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--workers", cfg.workers, "worker threads");
  app.add_option("--p0", cfg.p0, "transmit power budget");
  app.add_option("--bits", cfg.bits, "DAC resolution for dacB-ccd");
  app.add_option("--out", out_path, "output file (default stdout)");

  auto* ber = app.add_subcommand("ber-sweep", "error rate versus SNR");
  ber->add_option("--snr", grid, "SNR grid in dB, start:step:stop or a,b,c");
  ber->add_option("--metric", metric, "ber or ser")->check(CLI::IsMember({"ber", "ser"}));
  ber->add_flag("--margins", cfg.margins, "also emit noiseless CI margin rows");

  auto* power = app.add_subcommand("power-sweep", "average transmit power versus SINR target");
  power->add_option("--gamma", grid, "SINR target grid in dB, start:step:stop or a,b,c");

  auto* demo = app.add_subcommand("demo", "single slot with per-user interference scalars");
  demo->add_option("--snr", snr_db, "SNR in dB for noise-dependent precoders");
  demo->add_option("--gamma", gamma_db, "SINR target in dB for power-minimizing precoders");
  demo->add_option("--channel-in", channel_in, "read the channel from CSV");
  demo->add_option("--channel-out", channel_out, "write the channel to CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "config error: out: cannot open '" << out_path << "'\n";
      return kExitConfig;
    }
  }
  std::ostream& os = out_path.empty() ? std::cout : file;

  try {
    if (cfg.precoder.empty()) throw slp::Error(slp::Errc::Config, "precoder: is required");
    if (*ber || *power) {
      if (grid.empty()) {
        throw slp::Error(slp::Errc::Config, *ber ? "snr: grid is required" : "gamma: grid is required");
      }
      cfg.grid_db = parse_grid(*ber ? "snr" : "gamma", grid);
      cfg.error_metric = metric == "ser" ? slp::ErrorMetric::Ser : slp::ErrorMetric::Ber;
      const auto rows = *ber ? slp::run_ber_sweep(cfg) : slp::run_power_sweep(cfg);
      slp::write_csv(os, rows);
      return 0;
    }

    // demo
    cfg.grid_db = {snr_db};
    cfg.validate();
    const auto c = slp::constellation_from_id(cfg.mod);
    const auto id = *slp::parse_precoder(cfg.precoder);
    const slp::SeededRng root(cfg.seed, 0);
    slp::SeededRng chan = root.substream(0);
    slp::SeededRng sym = root.substream(1);
    slp::CMat h;
    if (!channel_in.empty()) {
      std::ifstream in(channel_in);
      if (!in) throw slp::Error(slp::Errc::Config, "channel-in: cannot open '" + channel_in + "'");
      h = slp::read_channel_csv(in);
      if (h.rows() != cfg.k || h.cols() != cfg.nt) {
        throw slp::Error(slp::Errc::Config, "channel-in: matrix is not k x nt");
      }
    } else {
      h = slp::sample_rayleigh(cfg.k, cfg.nt, chan);
    }
    if (!channel_out.empty()) {
      std::ofstream out(channel_out);
      if (!out) throw slp::Error(slp::Errc::Config, "channel-out: cannot open '" + channel_out + "'");
      slp::write_channel_csv(out, h);
    }
    std::vector<int> idx(static_cast<std::size_t>(cfg.k));
    for (auto& i : idx) i = sym.uniform_int(c.order());
    const auto slot = slp::SymbolSlot::from_indices(c, idx);
    slp::PrecoderParams params;
    params.p0 = cfg.p0;
    params.bits = cfg.bits;
    params.sigma2 = slp::power_minimizing(id) ? 1.0 : cfg.p0 / std::pow(10.0, snr_db / 10.0);
    params.gamma.assign(static_cast<std::size_t>(cfg.k), std::pow(10.0, gamma_db / 10.0));
    const slp::ChannelContext ch(h);
    print_demo(os, h, slot, c, id, slp::precode(id, ch, slot, c, params));
    return 0;
  } catch (const slp::Error& e) {
    const bool config = e.code() == slp::Errc::Config;
    if (config) {
      std::cerr << "config error: " << e.detail() << "\n";
    } else {
      std::cerr << "solver error: " << e.what() << "\n";
    }
    return config ? kExitConfig : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
