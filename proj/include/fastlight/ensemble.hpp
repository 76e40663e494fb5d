#pragma once

// Superfluorescence seeding and seeded Monte Carlo ensembles.
//
// Each x node starts in  c1 = sin(theta0/2) e^{i phi},  c2 = cos(theta0/2)
// with theta0 ~ gaussian(2/sqrt(N_a), 1/sqrt(N_a)) resampled until positive.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastlight/physics.hpp"
#include "fastlight/solver.hpp"

namespace fastlight {

enum class PhaseMode {
  binary,   // phi in {0, pi}
  uniform,  // phi uniform in [0, 2 pi)
};

struct SFInitialState {
  std::vector<double> theta0;
  std::vector<double> phi;
  std::uint64_t seed = 0;
};

struct SeededState {
  SFInitialState sf;
  InitialAtomicState atoms;
};

/// Reproducible from `seed`. theta0 and phi come from independent streams,
/// so switching the phase mode keeps the same tipping angles.
SeededState sample_initial_state(std::uint64_t seed, std::size_t nx, double atom_count,
                                 PhaseMode mode = PhaseMode::binary);

/// Per-run seed: seed0 mixed with a hash of (length, run index).
std::uint64_t run_seed(std::uint64_t seed0, double length, std::size_t run_index);

/// Observation window for an SF run of the given length:
/// [0, factor * <tau_D> + margin_tau * tau], with <tau_D> taken as 0 when g = 0.
TimeWindow sf_window(const PhysicalParams& p, double length, double factor, double margin_tau);

struct EnsembleConfig {
  PhysicalParams params;
  double x0 = 0.0;
  std::vector<double> lengths;  // cm
  std::size_t n_runs = 20;
  std::uint64_t seed0 = 20070601;
  unsigned jobs = 1;
  double window_factor = 3.0;
  double window_margin_tau = 10.0;
  GridOverrides grid;
  PhaseMode phase_mode = PhaseMode::binary;
};

struct RunOutcome {
  double length = 0.0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::optional<double> delay;           // mean tipping angle criterion, ns
  std::optional<double> max_node_delay;  // resonant-group style criterion, ns
  double norm_residual = 0.0;
  std::string error;  // non-empty when the run aborted
};

struct DelayStatistics {
  double length = 0.0;
  std::vector<double> samples;  // triggering runs only, run-index order
  double mean = 0.0;
  double stddev = 0.0;          // sample standard deviation (n - 1)
  std::size_t non_triggering = 0;
  std::size_t failures = 0;
  TimeWindow window;
  double polder_prediction = 0.0;  // +inf when g = 0
  double max_norm_residual = 0.0;
  std::vector<RunOutcome> runs;
};

/// One SF run with no input pulse.
RunOutcome run_sf_once(const EnsembleConfig& cfg, double length, std::size_t run_index);

/// All (length, run) jobs on `cfg.jobs` worker threads. Results depend only
/// on the configuration, never on scheduling.
std::vector<DelayStatistics> run_ensemble(const EnsembleConfig& cfg);

struct PolderRow {
  double length = 0.0;
  double mean_delay = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
  double polder = 0.0;   // +inf when g = 0
  double advance = 0.0;
  bool sf_before_advance = false;  // polder <= advance: the advance is not observable
};

struct PolderReport {
  std::vector<PolderRow> rows;
  std::optional<double> crossover_theory;    // cm, where <tau_D> = tau_adv
  std::optional<double> crossover_measured;  // cm, interpolated on the measured means
};

/// Length where the mean SF delay meets the advance time, by bisection on
/// [e^2 L0, upper]. Empty when g = 0 or no sign change.
std::optional<double> advance_delay_crossover(const PhysicalParams& p, double upper);

PolderReport compare_to_polder(std::span<const DelayStatistics> stats, const PhysicalParams& p);

}  // namespace fastlight
