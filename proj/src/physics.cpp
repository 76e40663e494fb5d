#include "fastlight/physics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fastlight/error.hpp"

namespace fastlight {

void PhysicalParams::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("g must be >= 0 (got " + std::to_string(g) + ")");
  if (!(t2_star > 0.0) || !std::isfinite(t2_star)) throw ValidationError("T2star must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be > 0");
  if (!(density >= 0.0) || !std::isfinite(density)) throw ValidationError("density N must be >= 0");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw ValidationError("lambda must be > 0");
}

void MediumSpec::validate() const {
  if (!std::isfinite(x0) || !std::isfinite(x1) || !(x1 > x0))
    throw ValidationError("medium requires x1 > x0");
}

void PulseSpec::validate() const {
  if (!(tau > 0.0)) throw ValidationError("pulse tau must be > 0");
  if (!std::isfinite(peak_time)) throw ValidationError("pulse peak_time must be finite");
  if (cutoff_half_width && !(*cutoff_half_width > 0.0))
    throw ValidationError("cutoff_half_width must be > 0 when present");
  if (peak_amplitude && !std::isfinite(*peak_amplitude))
    throw ValidationError("peak_amplitude must be finite");
}

double sech_envelope(double t, const PulseSpec& spec) {
  const double s = (t - spec.peak_time) / spec.tau;
  if (spec.cutoff_half_width && std::abs(s) > *spec.cutoff_half_width) return 0.0;
  return spec.amplitude() / std::cosh(s);
}

double dispersion_integral(const PhysicalParams& p, const DetuningDistribution& detuning) {
  const double inv_tau2 = 1.0 / (p.tau * p.tau);
  return detuning.integrate([&](double d) { return 1.0 / (d * d + inv_tau2); });
}

namespace {

// 1 - c/v_g
double slowness_excess(const PhysicalParams& p, VelocityMode mode, const DetuningDistribution* detuning) {
  if (mode == VelocityMode::limit) return 0.5 * p.g * p.tau * p.tau;
  if (detuning) return 0.5 * p.g * dispersion_integral(p, *detuning);
  return 0.5 * p.g * dispersion_integral(p, gaussian_detuning_quadrature(p.t2_star));
}

}  // namespace

double group_velocity(const PhysicalParams& p, VelocityMode mode, const DetuningDistribution* detuning) {
  const double denom = 1.0 - slowness_excess(p, mode, detuning);
  if (std::abs(denom) < 1e-12) throw NumericalError("diverging group velocity: 1 - g I / 2 = 0");
  return 1.0 / denom;
}

double beers_alpha(const PhysicalParams& p) {
  return std::sqrt(std::numbers::pi / 2.0) * p.g * p.t2_star / p.c;
}

PhaseOffsets phase_offsets(const MediumSpec& m, const PhysicalParams& p) {
  const double k = p.tau * p.tau * p.g / (2.0 * p.c);
  return {-k * m.x0, k * (m.x1 - m.x0)};
}

double analytic_field(double x, double t, const MediumSpec& m, const PhysicalParams& p, VelocityMode mode,
                      const DetuningDistribution* detuning) {
  const double amp = 2.0 / p.tau;
  if (x < m.x0) return amp / std::cosh((t - x / p.c) / p.tau);

  // Inverse-velocity excess 1/c - 1/v_g; both offsets follow from continuity.
  double phi0 = 0.0;
  double phi1 = 0.0;
  double inv_vg = 0.0;
  if (mode == VelocityMode::limit) {
    const PhaseOffsets off = phase_offsets(m, p);
    phi0 = off.phi0;
    phi1 = off.phi1;
    inv_vg = 1.0 / p.c - p.g * p.tau * p.tau / (2.0 * p.c);
  } else {
    const double excess = slowness_excess(p, mode, detuning) / p.c;
    phi0 = -excess * m.x0;
    phi1 = excess * (m.x1 - m.x0);
    inv_vg = 1.0 / p.c - excess;
  }
  if (x <= m.x1) return amp / std::cosh((t - x * inv_vg + phi0) / p.tau);
  return amp / std::cosh((t - x / p.c + phi1) / p.tau);
}

AmplitudePair analytic_amplitudes(double x, double t, const MediumSpec& m, const PhysicalParams& p) {
  if (x < m.x0 || x > m.x1) throw ValidationError("analytic_amplitudes: x outside the medium");
  const double inv_vg = 1.0 / p.c - p.g * p.tau * p.tau / (2.0 * p.c);
  const double u = (t - x * inv_vg + phase_offsets(m, p).phi0) / p.tau;
  return {cplx(0.0, 1.0 / std::cosh(u)), cplx(-std::tanh(u), 0.0)};
}

double advance_time(double length, const PhysicalParams& p) {
  return length * p.g * p.tau * p.tau / (2.0 * p.c);
}

double sf_length_scale(const PhysicalParams& p) {
  if (!(p.density > 0.0)) throw ValidationError("SF length scale needs density N > 0");
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * p.density * p.wavelength);
}

double sf_delay_mean(double length, const PhysicalParams& p) {
  const double l0 = sf_length_scale(p);
  if (!(length > l0))
    throw ValidationError("sf_delay_mean requires L > L0 = " + std::to_string(l0) + " cm");
  if (!(p.g > 0.0)) throw ValidationError("sf_delay_mean requires g > 0");
  const double lg = std::log(length / l0);
  return 3.0 * p.c / (4.0 * p.g * length) * lg * lg;
}

double atom_count(const PhysicalParams& p, double length) {
  return p.density * p.wavelength * length * length;
}

double mean_tipping_angle(double atom_count) { return 2.0 / std::sqrt(atom_count); }

}  // namespace fastlight
