#include "fastlight/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fastlight/error.hpp"

namespace fastlight {

AreaResult pulse_area(std::span<const cplx> series, double dt) {
  AreaResult r;
  if (series.size() < 2) return r;
  double peak = 0.0;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    r.theta += 0.5 * dt * (series[k].real() + series[k + 1].real());
    r.theta_imag += 0.5 * dt * (series[k].imag() + series[k + 1].imag());
  }
  for (const cplx& v : series) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(series.front()), std::abs(series.back()));
  r.clipped = peak > 0.0 && edge > 1e-6 * peak;
  return r;
}

AreaProfile area_profile(const FieldRecord& record, const PhysicalParams& p) {
  if (!record.has_full_field()) throw ValidationError("area_profile needs a record with the full field kept");
  AreaProfile prof;
  prof.alpha_used = beers_alpha(p);
  const std::size_t nx = record.nx;
  prof.x.resize(nx);
  prof.theta.resize(nx);
  prof.residual.assign(nx, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    prof.x[i] = record.x(i);
    prof.theta[i] = pulse_area(record.slice(i), record.dt).theta;
  }
  if (nx < 2) return prof;
  for (std::size_t i = 0; i < nx; ++i) {
    double slope = 0.0;
    if (i == 0) {
      slope = (prof.theta[1] - prof.theta[0]) / record.dx;
    } else if (i + 1 == nx) {
      slope = (prof.theta[i] - prof.theta[i - 1]) / record.dx;
    } else {
      slope = (prof.theta[i + 1] - prof.theta[i - 1]) / (2.0 * record.dx);
    }
    prof.residual[i] = slope - 0.5 * prof.alpha_used * std::sin(prof.theta[i]);
  }
  return prof;
}

double interpolated_peak_time(std::span<const cplx> series, double t_min, double dt) {
  if (series.size() < 3) throw NumericalError("peak search needs at least three samples");
  std::size_t km = 0;
  for (std::size_t k = 1; k < series.size(); ++k)
    if (std::abs(series[k]) > std::abs(series[km])) km = k;
  if (km == 0 || km + 1 == series.size())
    throw NumericalError("series maximum lies on the window edge; peak cannot be localised");
  const double y0 = std::abs(series[km - 1]);
  const double y1 = std::abs(series[km]);
  const double y2 = std::abs(series[km + 1]);
  const double curvature = y0 - 2.0 * y1 + y2;
  const double offset = curvature != 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
  return t_min + (static_cast<double>(km) + offset) * dt;
}

AdvanceMeasurement peak_advance(std::span<const cplx> output, std::span<const cplx> reference, double t_min,
                                double dt, double tau) {
  AdvanceMeasurement m;
  m.peak_time_out = interpolated_peak_time(output, t_min, dt);
  m.peak_time_reference = interpolated_peak_time(reference, t_min, dt);
  m.advance_in_tau = (m.peak_time_reference - m.peak_time_out) / tau;
  return m;
}

double tipping_angle(cplx c1, cplx c2) { return 2.0 * std::atan2(std::abs(c1), std::abs(c2)); }

std::vector<double> mean_tipping_series(const AmplitudeTrajectories& history, const DetuningDistribution& detuning) {
  if (history.n_nodes != detuning.size()) throw ValidationError("tipping series: node count mismatch");
  std::vector<double> out(history.nt, 0.0);
  for (std::size_t k = 0; k < history.nt; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < history.n_nodes; ++j) acc += detuning.weights[j] * tipping_angle(history.at(k, j));
    out[k] = acc;
  }
  return out;
}

namespace {

std::optional<double> first_crossing(std::span<const double> series, double level, double dt) {
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] >= level) {
      if (k == 0) return 0.0;
      const double f = (level - series[k - 1]) / (series[k] - series[k - 1]);
      return (static_cast<double>(k - 1) + f) * dt;
    }
  }
  return std::nullopt;
}

}  // namespace

SfDelay sf_delay_scan(const AmplitudeTrajectories& history, const DetuningDistribution& detuning, double dt) {
  SfDelay d;
  const std::vector<double> mean = mean_tipping_series(history, detuning);
  std::vector<double> max_node(history.nt, 0.0);
  for (std::size_t k = 0; k < history.nt; ++k)
    for (std::size_t j = 0; j < history.n_nodes; ++j)
      max_node[k] = std::max(max_node[k], tipping_angle(history.at(k, j)));
  d.mean_angle_delay = first_crossing(mean, kSfThreshold, dt);
  d.max_node_delay = first_crossing(max_node, kSfThreshold, dt);
  return d;
}

double sf_delay_time(const AmplitudeTrajectories& history, const DetuningDistribution& detuning, double dt) {
  const SfDelay d = sf_delay_scan(history, detuning, dt);
  if (!d.mean_angle_delay) throw NumericalError("no SF within window");
  return *d.mean_angle_delay;
}

double norm_residual(const AtomGrid& atoms) {
  double worst = 0.0;
  for (const AmplitudePair& a : atoms.amplitudes)
    worst = std::max(worst, std::abs(1.0 - (std::norm(a.c1) + std::norm(a.c2))));
  return worst;
}

}  // namespace fastlight
