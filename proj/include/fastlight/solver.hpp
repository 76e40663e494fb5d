#pragma once

// Maxwell-Schroedinger integrator in the retarded frame (x, t_r = t - x/c).
//
// At every spatial slice the atomic amplitudes of each detuning node are
// evolved over the retarded-time grid with RK4; the field is then marched one
// dx step with a Heun predictor-corrector:
//
//   dOmega/dx = -(i g / c) P(x, t_r),   P = sum_j w_j c1_j conj(c2_j).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fastlight/physics.hpp"
#include "fastlight/quadrature.hpp"

namespace fastlight {

struct TimeWindow {
  double t_min = 0.0;
  double t_max = 0.0;
  bool operator==(const TimeWindow&) const = default;
};

/// Explicit resolution choices. Anything left empty is derived from the physics.
struct GridOverrides {
  std::optional<double> dx;
  std::optional<double> dt;
  std::optional<int> detuning_nodes;
  std::optional<DetuningDistribution> detuning;  // replaces the Gauss-Hermite rule
  bool unsafe = false;                            // skip the resolution limits
};

struct SimulationGrid {
  double x0 = 0.0;
  double dx = 0.0;
  std::size_t nx = 0;
  double t_min = 0.0;
  double dt = 0.0;
  std::size_t nt = 0;
  DetuningDistribution detuning;

  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double t(std::size_t k) const { return t_min + dt * static_cast<double>(k); }
  double x1() const { return x(nx - 1); }
  double t_max() const { return t(nt - 1); }
};

/// Largest admissible dx: a tenth of the Beer length (unbounded when g = 0).
double max_dx(const PhysicalParams& p);
/// Largest admissible dt: min(tau/20, 0.1/|delta_max|).
double max_dt(const PhysicalParams& p, const DetuningDistribution& detuning);

/// Retarded-time steps per tau used when dt is not overridden.
inline constexpr double kDefaultStepsPerTau = 50.0;

/// Half-width (in tau) treated as the support of an uncut sech: beyond it the
/// envelope is below 1e-8 of its peak.
double infinite_wing_support(const PulseSpec& pulse);

/// Builds a grid over [x0, x1] x [t_min, t_max]. dx and dt are shrunk to fit
/// the intervals exactly. Rejects windows that clip `pulse` and resolutions
/// above the limits unless `overrides.unsafe` is set.
SimulationGrid build_grid(const MediumSpec& m, const PhysicalParams& p, TimeWindow window,
                          const GridOverrides& overrides = {}, const PulseSpec* pulse = nullptr);

/// Per-node amplitude history, laid out [time][node].
struct AmplitudeTrajectories {
  std::size_t nt = 0;
  std::size_t n_nodes = 0;
  std::vector<AmplitudePair> data;

  const AmplitudePair& at(std::size_t k, std::size_t j) const { return data[k * n_nodes + j]; }
  AmplitudePair& at(std::size_t k, std::size_t j) { return data[k * n_nodes + j]; }
};

/// RK4 evolution of every detuning node under a given field slice. The
/// detuning rotation is integrated exactly (interaction picture); the field
/// at half steps comes from 4-point interpolation. `init` holds one pair
/// per node, or a single pair shared by all nodes.
AmplitudeTrajectories evolve_atoms_slice(std::span<const cplx> omega, std::span<const AmplitudePair> init,
                                         const DetuningDistribution& detuning, double dt);

/// P(t) = sum_j w_j c1 conj(c2), summed in node order.
std::vector<cplx> polarization(const AmplitudeTrajectories& traj, const DetuningDistribution& detuning);

/// t = -infinity state per x node; shared by every detuning node at that x.
struct InitialAtomicState {
  std::vector<AmplitudePair> per_x;

  static InitialAtomicState perfect_inversion(std::size_t nx);
};

struct FieldRecord {
  std::size_t nx = 0;
  std::size_t nt = 0;
  double x0 = 0.0;
  double dx = 0.0;
  double t_min = 0.0;
  double dt = 0.0;
  std::vector<cplx> omega;  // nx * nt, row per x node; empty when not kept
  std::vector<cplx> boundary_input;
  std::vector<cplx> output_series;

  bool has_full_field() const { return omega.size() == nx * nt; }
  std::span<const cplx> slice(std::size_t i) const { return {omega.data() + i * nt, nt}; }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double t(std::size_t k) const { return t_min + dt * static_cast<double>(k); }
  double t_max() const { return t(nt - 1); }
};

struct AtomGrid {
  std::size_t nx = 0;
  std::size_t n_nodes = 0;
  std::vector<AmplitudePair> amplitudes;  // [x][node]

  const AmplitudePair& at(std::size_t i, std::size_t j) const { return amplitudes[i * n_nodes + j]; }
  AmplitudePair& at(std::size_t i, std::size_t j) { return amplitudes[i * n_nodes + j]; }
};

struct ProbeHistory {
  std::size_t x_index = 0;
  double x = 0.0;
  AmplitudeTrajectories amplitudes;
};

struct SolverOptions {
  /// Positions whose full amplitude history is kept (nearest node). Empty
  /// means the exit face only.
  std::vector<double> probe_positions;
  bool keep_field = true;
};

struct PropagationResult {
  FieldRecord field;
  std::vector<ProbeHistory> probes;
  AtomGrid final_atoms;        // state at t_max
  double max_norm_residual = 0.0;  // over every cell and time step
};

/// Samples the vacuum pulse on the retarded-time grid (all zeros for no pulse).
std::vector<cplx> sample_boundary(const SimulationGrid& grid, const PulseSpec* pulse);

/// Marches the field from x0 to x1. Throws NumericalError naming the slice if
/// the field turns non-finite or the norm drifts by more than 1e-6.
PropagationResult propagate(const SimulationGrid& grid, const PhysicalParams& p,
                            std::span<const cplx> boundary_input, const InitialAtomicState& init,
                            const SolverOptions& options = {});

struct SnapshotPoint {
  double x = 0.0;
  cplx omega;
};

/// Lab-frame field Omega(x) at time t_lab for the given positions. The medium
/// is read from the record at t_r = t_lab - x/c (bilinear interpolation); the
/// incoming vacuum section is the pulse translated at c and the outgoing one
/// is the exit series translated at c. Retarded times before the window are
/// zero field; times after it throw ValidationError.
std::vector<SnapshotPoint> lab_frame_snapshot(const FieldRecord& record, double t_lab, const MediumSpec& m,
                                              const PulseSpec* pulse, std::span<const double> positions);

}  // namespace fastlight
