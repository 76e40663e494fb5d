#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fastlight/physics.hpp"
#include "fastlight/solver.hpp"

namespace fastlight {

struct AreaResult {
  double theta = 0.0;       // trapezoidal integral of Re Omega, rad
  double theta_imag = 0.0;  // same for Im Omega (should stay ~0 for real runs)
  bool clipped = false;     // an endpoint exceeds 1e-6 of the peak magnitude
};

AreaResult pulse_area(std::span<const cplx> series, double dt);

struct AreaProfile {
  std::vector<double> x;
  std::vector<double> theta;
  /// d theta/dx - (alpha/2) sin theta, finite differences (central inside).
  std::vector<double> residual;
  double alpha_used = 0.0;
};

/// Area at every x node of a record kept with the full field.
AreaProfile area_profile(const FieldRecord& record, const PhysicalParams& p);

struct AdvanceMeasurement {
  double peak_time_out = 0.0;        // ns, retarded time
  double peak_time_reference = 0.0;  // ns
  double advance_in_tau = 0.0;       // (reference - out) / tau
};

/// Peak time of |Omega| from a 3-point parabola through the largest sample.
/// Throws NumericalError when the maximum sits on a window edge.
double interpolated_peak_time(std::span<const cplx> series, double t_min, double dt);

AdvanceMeasurement peak_advance(std::span<const cplx> output, std::span<const cplx> reference, double t_min,
                                double dt, double tau);

/// Bloch-vector polar angle measured from the inverted state, in [0, pi].
/// Equal to arccos(|c2|^2 - |c1|^2) for unit-norm pairs; evaluated as
/// 2 atan2(|c1|, |c2|) to stay accurate for tiny angles.
double tipping_angle(cplx c1, cplx c2);
inline double tipping_angle(const AmplitudePair& a) { return tipping_angle(a.c1, a.c2); }

struct SfDelay {
  /// Weighted-mean tipping angle reaches 1 rad; ns from window start.
  std::optional<double> mean_angle_delay;
  /// Largest single-node tipping angle reaches 1 rad.
  std::optional<double> max_node_delay;
};

inline constexpr double kSfThreshold = 1.0;

/// Scans a probe history for the 1-radian crossing (linear interpolation
/// between samples). Empty optionals mean the threshold was never reached.
SfDelay sf_delay_scan(const AmplitudeTrajectories& history, const DetuningDistribution& detuning, double dt);

/// Mean-angle delay; throws NumericalError("no SF within window") if absent.
double sf_delay_time(const AmplitudeTrajectories& history, const DetuningDistribution& detuning, double dt);

/// Weighted-mean tipping angle per time node.
std::vector<double> mean_tipping_series(const AmplitudeTrajectories& history, const DetuningDistribution& detuning);

/// max over cells of |1 - (|c1|^2 + |c2|^2)|.
double norm_residual(const AtomGrid& atoms);

}  // namespace fastlight
