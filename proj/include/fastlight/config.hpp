#pragma once

// Run configuration. Text format: INI-like sections, one `key = value` per
// line, `#` starts a comment. Lists are comma separated. Every key is
// optional; an empty file gives the Rb D2 defaults. Key names are unique, so
// keys placed before any section header are accepted as well. See README.md for the
// full key reference.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastlight/ensemble.hpp"
#include "fastlight/physics.hpp"
#include "fastlight/solver.hpp"

namespace fastlight {

enum class RunMode { analytic, propagate, sf, sweep, fig };
enum class QuadratureKind { gauss_hermite, banded, resonant };
enum class InitialCondition { inverted, seeded };

struct GridSettings {
  std::optional<double> dx;  // cm
  std::optional<double> dt;  // ns
  int detuning_nodes = kDefaultDetuningNodes;
  QuadratureKind quadrature = QuadratureKind::gauss_hermite;
  std::optional<double> band_half_width;  // ns^-1, banded rule only
  std::optional<double> band_spacing;     // ns^-1, banded rule only
  bool unsafe = false;

  bool operator==(const GridSettings&) const = default;
};

struct RunSettings {
  RunMode mode = RunMode::propagate;
  int figure = 0;
  std::uint64_t seed = 20070601;
  unsigned jobs = 1;
  std::optional<double> t_min;  // retarded-time window, ns; derived when absent
  std::optional<double> t_max;
  std::vector<double> snapshot_times;  // lab times, ns; derived when empty
  int snapshot_points = 500;
  double snapshot_margin = 0.5;  // vacuum shown on each side, in medium lengths
  std::vector<double> probe_positions;  // cm; empty = exit face
  std::string output_dir = "out";
  InitialCondition initial_state = InitialCondition::inverted;
  VelocityMode velocity_mode = VelocityMode::limit;
  std::vector<double> lengths;  // sweep lengths, cm; derived when empty
  std::size_t n_runs = 20;
  PhaseMode phase_mode = PhaseMode::binary;
  double window_factor = 3.0;
  double window_margin = 10.0;  // tau

  bool operator==(const RunSettings&) const = default;
};

struct SimulationConfig {
  PhysicalParams physics;
  MediumSpec medium;
  bool pulse_enabled = true;
  PulseSpec pulse;  // pulse.tau always mirrors physics.tau
  GridSettings grid;
  RunSettings run;

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
  bool operator==(const SimulationConfig&) const = default;
};

/// Parses and validates. ParseError carries the line number.
SimulationConfig parse_config(std::string_view text);

/// Parses without the final validation, so overrides can still be applied.
SimulationConfig parse_config_unvalidated(std::string_view text);

/// Applies `section.key=value` (or `key=value`). Throws ParseError (line 0) for unknown keys
/// or malformed values.
void apply_override(SimulationConfig& cfg, std::string_view assignment);

/// Canonical text form. parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimulationConfig& cfg);

std::string to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);

/// Detuning rule selected by the grid settings.
DetuningDistribution make_detuning(const SimulationConfig& cfg);

/// Solver overrides derived from the grid settings.
GridOverrides make_grid_overrides(const SimulationConfig& cfg);

}  // namespace fastlight
