// Copyright 2026 The peecs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line simulator: closed-loop sensor control with the LMB or the
// multi-Bernoulli filter, Monte-Carlo aggregation and CSV/SVG output.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "peecs/config.hpp"
#include "peecs/harness.hpp"
#include "peecs/output.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
  std::optional<int> workers;
  bool plot{false};
};

peecs::RunConfig load(const CommonOptions& opts) {
  peecs::RunConfig cfg =
      opts.config_path.empty() ? peecs::RunConfig{} : peecs::load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.n_trials = *opts.trials;
  if (opts.out) cfg.output_dir = *opts.out;
  if (opts.workers) cfg.workers = *opts.workers;
  cfg.plot = cfg.plot || opts.plot;
  cfg.validate();
  return cfg;
}

void print_summary(const peecs::RunConfig& cfg, const peecs::MonteCarloResult& result,
                   double seconds) {
  const auto total = [](const peecs::ScanAggregate& s) { return s.ospa_total.mean; };
  const auto dist = [](const peecs::ScanAggregate& s) { return s.centroid_distance.mean; };
  const int late_first = std::min(21, cfg.n_scans);
  std::printf("%-15s trials=%d scans=%d  mean OSPA: k<=10 %.3f, k>=%d %.3f  "
              "centroid distance: k=1 %.1f, last %.1f  (%.1fs)\n",
              std::string(peecs::to_string(cfg.mode)).c_str(), cfg.n_trials, cfg.n_scans,
              peecs::window_mean(result.per_scan, 1, 10, total), late_first,
              peecs::window_mean(result.per_scan, late_first, cfg.n_scans, total),
              peecs::window_mean(result.per_scan, 1, 1, dist),
              peecs::window_mean(result.per_scan, cfg.n_scans, cfg.n_scans, dist), seconds);
}

peecs::MonteCarloResult run_mode(const peecs::RunConfig& cfg, const std::filesystem::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  auto result = peecs::run_monte_carlo(cfg, cfg.n_trials, cfg.seed);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  peecs::emit_outputs(result, dir, cfg.plot, cfg.ospa.cutoff);
  print_summary(cfg, result, seconds);
  return result;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool trials_required) {
  cmd->add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Base random seed");
  auto* trials = cmd->add_option("--trials", opts.trials, "Number of Monte-Carlo trials");
  if (trials_required) trials->required();
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--workers", opts.workers, "Worker threads (results do not depend on it)");
  cmd->add_flag("--plot", opts.plot, "Also write SVG plots");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor control for multi-object tracking with a labeled multi-Bernoulli filter"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string mode;
  auto* run = app.add_subcommand("run", "Run Monte-Carlo trials in one filter mode");
  add_common(run, run_opts, /*trials_required=*/false);
  run->add_option("--mode", mode, "lmb-peecs or cbmember-peecs")
      ->check(CLI::IsMember({"lmb-peecs", "cbmember-peecs"}));

  CommonOptions cmp_opts;
  auto* compare = app.add_subcommand("compare", "Run both filter modes on shared random draws");
  add_common(compare, cmp_opts, /*trials_required=*/true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      peecs::RunConfig cfg = load(run_opts);
      if (!mode.empty()) cfg.mode = peecs::parse_filter_mode(mode);
      run_mode(cfg, cfg.output_dir);
    } else {
      peecs::RunConfig cfg = load(cmp_opts);
      const std::filesystem::path root = cfg.output_dir;
      cfg.mode = peecs::FilterMode::kLmbPeecs;
      const auto lmb = run_mode(cfg, root / "lmb-peecs");
      cfg.mode = peecs::FilterMode::kCbMemberPeecs;
      const auto cbm = run_mode(cfg, root / "cbmember-peecs");

      std::string csv =
          "k,lmb_total,cbm_total,lmb_loc,cbm_loc,lmb_card,cbm_card\n";
      for (std::size_t i = 0; i < lmb.per_scan.size(); ++i) {
        const auto& a = lmb.per_scan[i];
        const auto& b = cbm.per_scan[i];
        csv += std::to_string(a.k) + ',' + peecs::format_number(a.ospa_total.mean) + ',' +
               peecs::format_number(b.ospa_total.mean) + ',' +
               peecs::format_number(a.ospa_loc.mean) + ',' + peecs::format_number(b.ospa_loc.mean) +
               ',' + peecs::format_number(a.ospa_card.mean) + ',' +
               peecs::format_number(b.ospa_card.mean) + '\n';
      }
      peecs::write_text(root / "comparison.csv", csv);
      if (cfg.plot) {
        peecs::write_text(root / "comparison.svg",
                          peecs::error_svg({{"lmb-peecs", lmb.per_scan},
                                            {"cbmember-peecs", cbm.per_scan}},
                                           cfg.ospa.cutoff));
      }
    }
  } catch (const peecs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
