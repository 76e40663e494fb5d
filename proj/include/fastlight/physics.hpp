#pragma once

// Closed-form results for coherent sech-pulse propagation in an inverted
// two-level medium.
//
// Units throughout: time ns, length cm, frequencies and Rabi values ns^-1,
// coupling g ns^-2, density cm^-3.

#include <complex>
#include <optional>

#include "fastlight/quadrature.hpp"

namespace fastlight {

using cplx = std::complex<double>;

/// Vacuum speed of light, cm/ns.
inline constexpr double kSpeedOfLight = 29.9792458;

/// Rb D2 defaults: T2* = 0.733 ns, g = 266 ns^-2, tau = 0.1 ns.
struct PhysicalParams {
  double g = 266.0;            // atom-field coupling, ns^-2
  double t2_star = 0.733;      // inhomogeneous lifetime, ns
  double tau = 0.1;            // pulse width, ns
  double density = 8.0e10;     // N, cm^-3
  double wavelength = 7.8e-5;  // lambda, cm

  static constexpr double c = kSpeedOfLight;

  void validate() const;
  bool operator==(const PhysicalParams&) const = default;
};

/// Uniform cell occupying [x0, x1]; density is zero outside.
struct MediumSpec {
  double x0 = 0.0;
  double x1 = 2.0 * kSpeedOfLight * 0.1;

  double length() const { return x1 - x0; }
  void validate() const;
  bool operator==(const MediumSpec&) const = default;
};

/// Vacuum sech pulse. peak_time is the retarded time t - x/c of the peak,
/// i.e. the lab time at which the vacuum pulse peak would cross x = 0.
struct PulseSpec {
  double peak_time = 0.0;
  double tau = 0.1;
  /// Hard cutoff at |t - peak_time| > cutoff_half_width * tau; none = infinite wings.
  std::optional<double> cutoff_half_width;
  /// Defaults to 2/tau (Area 2 pi for infinite wings).
  std::optional<double> peak_amplitude;

  double amplitude() const { return peak_amplitude.value_or(2.0 / tau); }
  void validate() const;
  bool operator==(const PulseSpec&) const = default;
};

enum class VelocityMode {
  limit,       // long-T2* limit, 1 - c/v_g = g tau^2 / 2
  quadrature,  // full detuning integral evaluated on a DetuningDistribution
};

/// Normalized vacuum envelope, forced to exactly zero outside the cutoff window.
double sech_envelope(double t, const PulseSpec& spec);

/// The dispersion integral  I = int F(delta) d delta / (delta^2 + 1/tau^2).
double dispersion_integral(const PhysicalParams& p, const DetuningDistribution& detuning);

/// v_g / c. Quadrature mode uses `detuning` if given, otherwise the default
/// Gauss-Hermite rule for p.t2_star. Throws NumericalError when 1 - c/v_g = 0.
double group_velocity(const PhysicalParams& p, VelocityMode mode,
                      const DetuningDistribution* detuning = nullptr);

/// Inverse Beer length sqrt(pi/2) g T2* / c, cm^-1.
double beers_alpha(const PhysicalParams& p);

/// Phase offsets (ns) of the medium and exit branches, long-T2* limit.
struct PhaseOffsets {
  double phi0 = 0.0;
  double phi1 = 0.0;
};
PhaseOffsets phase_offsets(const MediumSpec& m, const PhysicalParams& p);

/// Piecewise vacuum / medium / vacuum sech solution at lab position x and
/// lab time t. The medium branch travels at v_g; the outer branches at c.
/// In limit mode the offsets are exactly phase_offsets(); in quadrature mode
/// the same continuity construction is applied with the quadrature v_g.
double analytic_field(double x, double t, const MediumSpec& m, const PhysicalParams& p,
                      VelocityMode mode = VelocityMode::limit,
                      const DetuningDistribution* detuning = nullptr);

struct AmplitudePair {
  cplx c1;
  cplx c2;
  bool operator==(const AmplitudePair&) const = default;
};

/// Resonant atom amplitudes inside the medium (limit-mode v_g):
/// c1 = i sech(u), c2 = -tanh(u). Throws ValidationError outside [x0, x1].
AmplitudePair analytic_amplitudes(double x, double t, const MediumSpec& m, const PhysicalParams& p);

/// Peak advance L g tau^2 / (2c), ns.
double advance_time(double length, const PhysicalParams& p);

/// L0 = (2 pi N lambda)^(-1/2), cm.
double sf_length_scale(const PhysicalParams& p);

/// Mean superfluorescence delay (3c / 4gL) [ln(L/L0)]^2, ns. Requires L > L0.
double sf_delay_mean(double length, const PhysicalParams& p);

/// Atoms in a Fresnel-number-one cylinder: N lambda L^2.
double atom_count(const PhysicalParams& p, double length);

/// Mean initial tipping angle 2/sqrt(N_a).
double mean_tipping_angle(double atom_count);

}  // namespace fastlight
