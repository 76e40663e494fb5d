#pragma once

// Run orchestration: turns a SimulationConfig into CSV files plus a
// manifest.json in the configured output directory.

#include <map>
#include <string>
#include <vector>

#include "fastlight/config.hpp"

namespace fastlight {

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string sha256;
  std::size_t rows = 0;
};

struct RunSummary {
  std::string mode;
  std::vector<OutputFile> outputs;
  std::map<std::string, double> diagnostics;
  std::string manifest_path;
};

std::string version_string();

/// Figure recipe applied on top of `base`: physics, grid, seed, jobs and
/// output directory are kept; medium, pulse and mode follow the figure.
SimulationConfig figure_recipe(const SimulationConfig& base, int figure);

/// Retarded-time window used when run.t_min / run.t_max are absent.
/// Pulse runs: [peak - (support + 1) tau, peak + 60 tau].
/// Pulse-free runs: [0, window_factor <tau_D> + window_margin tau].
TimeWindow resolve_window(const SimulationConfig& cfg);

/// Lab times for snapshots when run.snapshot_times is empty. With a pulse:
/// the vacuum peak at entry, mid-medium, exit and half a medium past the
/// exit. Without one: a quarter, half, three quarters and all of the window.
std::vector<double> resolve_snapshot_times(const SimulationConfig& cfg, const TimeWindow& window);

/// Nine lengths evenly spaced over [1, 5] c tau.
std::vector<double> default_sweep_lengths(const PhysicalParams& p);

/// Executes the configured mode. The config is validated first.
RunSummary run_command(const SimulationConfig& cfg);

}  // namespace fastlight
