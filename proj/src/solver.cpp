#include "fastlight/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fastlight/error.hpp"

namespace fastlight {

namespace {

constexpr double kNormAbort = 1e-6;

// Field value at t_k + dt/2 from the neighbouring samples.
cplx half_step_value(std::span<const cplx> omega, std::size_t k) {
  const std::size_t nt = omega.size();
  if (nt < 3) return 0.5 * (omega[k] + omega[k + 1]);
  if (k == 0) return 0.375 * omega[0] + 0.75 * omega[1] - 0.125 * omega[2];
  if (k + 2 >= nt) return -0.125 * omega[k - 1] + 0.75 * omega[k] + 0.375 * omega[k + 1];
  return (9.0 * (omega[k] + omega[k + 1]) - omega[k - 1] - omega[k + 2]) / 16.0;
}

// Structure-of-arrays RK4 integrator for one spatial slice. In the frame
// rotating with each node's detuning the equations read
//   db1/ds = i (Omega/2) b2 e^{-i delta s},  db2/ds = i (Omega*/2) b1 e^{+i delta s}
// with s measured from the start of the step, so a field-free step is exact.
class SliceIntegrator {
 public:
  SliceIntegrator(const DetuningDistribution& d, double dt) : n_(d.size()), dt_(dt) {
    w_ = d.weights;
    ehr_.resize(n_);
    ehi_.resize(n_);
    efr_.resize(n_);
    efi_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      ehr_[j] = std::cos(d.nodes[j] * dt / 2.0);
      ehi_[j] = -std::sin(d.nodes[j] * dt / 2.0);
      efr_[j] = std::cos(d.nodes[j] * dt);
      efi_[j] = -std::sin(d.nodes[j] * dt);
    }
    b1r_.resize(n_);
    b1i_.resize(n_);
    b2r_.resize(n_);
    b2i_.resize(n_);
    dev_.resize(n_);
  }

  std::size_t nodes() const { return n_; }

  // Returns the largest norm deviation seen. `init` has one entry per node or
  // a single shared entry.
  double run(std::span<const cplx> omega, std::span<const AmplitudePair> init, std::span<cplx> pol,
             AmplitudeTrajectories* record, std::span<AmplitudePair> final_state) {
    const std::size_t nt = omega.size();
    for (std::size_t j = 0; j < n_; ++j) {
      const AmplitudePair& a = init.size() == 1 ? init[0] : init[j];
      b1r_[j] = a.c1.real();
      b1i_[j] = a.c1.imag();
      b2r_[j] = a.c2.real();
      b2i_[j] = a.c2.imag();
    }
    if (record) {
      record->nt = nt;
      record->n_nodes = n_;
      record->data.resize(nt * n_);
    }
    double max_dev = measure(0, pol, record);

    const double h = dt_;
    const double h2 = 0.5 * dt_;
    const double h6 = dt_ / 6.0;
    for (std::size_t k = 0; k + 1 < nt; ++k) {
      const cplx a0 = 0.5 * omega[k];
      const cplx ah = 0.5 * half_step_value(omega, k);
      const cplx a1 = 0.5 * omega[k + 1];
      const double a0r = a0.real(), a0i = a0.imag();
      const double ahr = ah.real(), ahi = ah.imag();
      const double a1r = a1.real(), a1i = a1.imag();

      double* __restrict b1r = b1r_.data();
      double* __restrict b1i = b1i_.data();
      double* __restrict b2r = b2r_.data();
      double* __restrict b2i = b2i_.data();
      const double* __restrict ehr = ehr_.data();
      const double* __restrict ehi = ehi_.data();
      const double* __restrict efr = efr_.data();
      const double* __restrict efi = efi_.data();

      for (std::size_t j = 0; j < n_; ++j) {
        const double y1r = b1r[j], y1i = b1i[j], y2r = b2r[j], y2i = b2i[j];

        // i a m  = (-(ar mi + ai mr), ar mr - ai mi)
        // i a* q = (-(ar qi - ai qr), ar qr + ai qi)
        const double k1r1 = -(a0r * y2i + a0i * y2r);
        const double k1i1 = a0r * y2r - a0i * y2i;
        const double k1r2 = -(a0r * y1i - a0i * y1r);
        const double k1i2 = a0r * y1r + a0i * y1i;

        double z1r = y1r + h2 * k1r1, z1i = y1i + h2 * k1i1;
        double z2r = y2r + h2 * k1r2, z2i = y2i + h2 * k1i2;
        double mr = z2r * ehr[j] - z2i * ehi[j], mi = z2r * ehi[j] + z2i * ehr[j];
        double qr = z1r * ehr[j] + z1i * ehi[j], qi = z1i * ehr[j] - z1r * ehi[j];
        const double k2r1 = -(ahr * mi + ahi * mr);
        const double k2i1 = ahr * mr - ahi * mi;
        const double k2r2 = -(ahr * qi - ahi * qr);
        const double k2i2 = ahr * qr + ahi * qi;

        z1r = y1r + h2 * k2r1, z1i = y1i + h2 * k2i1;
        z2r = y2r + h2 * k2r2, z2i = y2i + h2 * k2i2;
        mr = z2r * ehr[j] - z2i * ehi[j], mi = z2r * ehi[j] + z2i * ehr[j];
        qr = z1r * ehr[j] + z1i * ehi[j], qi = z1i * ehr[j] - z1r * ehi[j];
        const double k3r1 = -(ahr * mi + ahi * mr);
        const double k3i1 = ahr * mr - ahi * mi;
        const double k3r2 = -(ahr * qi - ahi * qr);
        const double k3i2 = ahr * qr + ahi * qi;

        z1r = y1r + h * k3r1, z1i = y1i + h * k3i1;
        z2r = y2r + h * k3r2, z2i = y2i + h * k3i2;
        mr = z2r * efr[j] - z2i * efi[j], mi = z2r * efi[j] + z2i * efr[j];
        qr = z1r * efr[j] + z1i * efi[j], qi = z1i * efr[j] - z1r * efi[j];
        const double k4r1 = -(a1r * mi + a1i * mr);
        const double k4i1 = a1r * mr - a1i * mi;
        const double k4r2 = -(a1r * qi - a1i * qr);
        const double k4i2 = a1r * qr + a1i * qi;

        const double n1r = y1r + h6 * (k1r1 + 2.0 * (k2r1 + k3r1) + k4r1);
        const double n1i = y1i + h6 * (k1i1 + 2.0 * (k2i1 + k3i1) + k4i1);
        const double n2r = y2r + h6 * (k1r2 + 2.0 * (k2r2 + k3r2) + k4r2);
        const double n2i = y2i + h6 * (k1i2 + 2.0 * (k2i2 + k3i2) + k4i2);

        // Back to the lab frame: c2 = b2 e^{-i delta dt}.
        b1r[j] = n1r;
        b1i[j] = n1i;
        b2r[j] = n2r * efr[j] - n2i * efi[j];
        b2i[j] = n2r * efi[j] + n2i * efr[j];
      }
      max_dev = std::max(max_dev, measure(k + 1, pol, record));
    }

    for (std::size_t j = 0; j < final_state.size() && j < n_; ++j)
      final_state[j] = {cplx(b1r_[j], b1i_[j]), cplx(b2r_[j], b2i_[j])};
    return max_dev;
  }

 private:
  // Polarization, optional recording and norm deviation at time node k.
  double measure(std::size_t k, std::span<cplx> pol, AmplitudeTrajectories* record) {
    for (std::size_t j = 0; j < n_; ++j) {
      dev_[j] = std::abs(b1r_[j] * b1r_[j] + b1i_[j] * b1i_[j] + b2r_[j] * b2r_[j] + b2i_[j] * b2i_[j] - 1.0);
    }
    double pr = 0.0, pi = 0.0, dev = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      // c1 conj(c2)
      pr += w_[j] * (b1r_[j] * b2r_[j] + b1i_[j] * b2i_[j]);
      pi += w_[j] * (b1i_[j] * b2r_[j] - b1r_[j] * b2i_[j]);
      dev = std::max(dev, dev_[j]);
    }
    if (!pol.empty()) pol[k] = cplx(pr, pi);
    if (record) {
      for (std::size_t j = 0; j < n_; ++j)
        record->at(k, j) = {cplx(b1r_[j], b1i_[j]), cplx(b2r_[j], b2i_[j])};
    }
    return dev;
  }

  std::size_t n_;
  double dt_;
  std::vector<double> w_, ehr_, ehi_, efr_, efi_;
  std::vector<double> b1r_, b1i_, b2r_, b2i_, dev_;
};

void check_finite(std::span<const cplx> values, std::size_t slice, double x) {
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("non-finite field at slice " + std::to_string(slice) + " (x = " + std::to_string(x) +
                           " cm)");
  }
}

}  // namespace

double max_dx(const PhysicalParams& p) {
  const double alpha = beers_alpha(p);
  if (alpha <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.1 / alpha;
}

double max_dt(const PhysicalParams& p, const DetuningDistribution& detuning) {
  double limit = p.tau / 20.0;
  const double dmax = detuning.max_abs_node();
  if (dmax > 0.0) limit = std::min(limit, 0.1 / dmax);
  return limit;
}

double infinite_wing_support(const PulseSpec& pulse) {
  return pulse.cutoff_half_width ? *pulse.cutoff_half_width : std::acosh(1e8);
}

SimulationGrid build_grid(const MediumSpec& m, const PhysicalParams& p, TimeWindow window,
                          const GridOverrides& overrides, const PulseSpec* pulse) {
  m.validate();
  p.validate();
  if (!std::isfinite(window.t_min) || !std::isfinite(window.t_max) || !(window.t_max > window.t_min))
    throw ValidationError("time window must satisfy t_max > t_min");

  SimulationGrid grid;
  if (overrides.detuning) {
    grid.detuning = *overrides.detuning;
  } else {
    grid.detuning = gaussian_detuning_quadrature(p.t2_star, overrides.detuning_nodes.value_or(kDefaultDetuningNodes));
  }
  grid.detuning.validate();

  if (pulse) {
    pulse->validate();
    const double half = infinite_wing_support(*pulse) * pulse->tau;
    // The boundary series is the vacuum envelope in retarded time, so its
    // support does not depend on x0.
    if (pulse->peak_time - half < window.t_min || pulse->peak_time + half > window.t_max)
      throw ValidationError("time window [" + std::to_string(window.t_min) + ", " + std::to_string(window.t_max) +
                            "] ns clips the pulse support [" + std::to_string(pulse->peak_time - half) + ", " +
                            std::to_string(pulse->peak_time + half) + "] ns");
  }

  const double dx_limit = max_dx(p);
  const double dt_limit = max_dt(p, grid.detuning);
  const double dx_req = overrides.dx.value_or(dx_limit);
  const double dt_req = overrides.dt.value_or(std::min(dt_limit, p.tau / kDefaultStepsPerTau));
  if (!(dx_req > 0.0) || !(dt_req > 0.0)) throw ValidationError("dx and dt must be > 0");
  if (!overrides.unsafe) {
    if (dx_req > dx_limit * (1.0 + 1e-12))
      throw ValidationError("dx = " + std::to_string(dx_req) + " cm exceeds the gain-length limit " +
                            std::to_string(dx_limit) + " cm (set unsafe to force)");
    if (dt_req > dt_limit * (1.0 + 1e-12))
      throw ValidationError("dt = " + std::to_string(dt_req) + " ns exceeds the limit " + std::to_string(dt_limit) +
                            " ns (set unsafe to force)");
  }

  const double length = m.length();
  // An empty medium has no gain scale; one interval covers it.
  const double x_steps = std::isfinite(dx_req) ? std::ceil(length / dx_req - 1e-9) : 1.0;
  grid.nx = static_cast<std::size_t>(std::max(1.0, x_steps)) + 1;
  grid.x0 = m.x0;
  grid.dx = length / static_cast<double>(grid.nx - 1);

  const double span = window.t_max - window.t_min;
  grid.nt = static_cast<std::size_t>(std::max(2.0, std::ceil(span / dt_req - 1e-9))) + 1;
  grid.t_min = window.t_min;
  grid.dt = span / static_cast<double>(grid.nt - 1);
  return grid;
}

AmplitudeTrajectories evolve_atoms_slice(std::span<const cplx> omega, std::span<const AmplitudePair> init,
                                         const DetuningDistribution& detuning, double dt) {
  if (omega.size() < 2) throw ValidationError("evolve_atoms_slice needs at least two time nodes");
  if (init.size() != 1 && init.size() != detuning.size())
    throw ValidationError("evolve_atoms_slice: one initial pair per detuning node (or one shared pair)");
  check_finite(omega, 0, 0.0);
  SliceIntegrator integrator(detuning, dt);
  AmplitudeTrajectories traj;
  integrator.run(omega, init, {}, &traj, {});
  return traj;
}

std::vector<cplx> polarization(const AmplitudeTrajectories& traj, const DetuningDistribution& detuning) {
  if (traj.n_nodes != detuning.size()) throw ValidationError("polarization: node count mismatch");
  std::vector<cplx> p(traj.nt);
  for (std::size_t k = 0; k < traj.nt; ++k) {
    double pr = 0.0, pi = 0.0;
    for (std::size_t j = 0; j < traj.n_nodes; ++j) {
      const AmplitudePair& a = traj.at(k, j);
      pr += detuning.weights[j] * (a.c1.real() * a.c2.real() + a.c1.imag() * a.c2.imag());
      pi += detuning.weights[j] * (a.c1.imag() * a.c2.real() - a.c1.real() * a.c2.imag());
    }
    p[k] = cplx(pr, pi);
  }
  return p;
}

InitialAtomicState InitialAtomicState::perfect_inversion(std::size_t nx) {
  return {std::vector<AmplitudePair>(nx, AmplitudePair{cplx(0.0, 0.0), cplx(1.0, 0.0)})};
}

std::vector<cplx> sample_boundary(const SimulationGrid& grid, const PulseSpec* pulse) {
  std::vector<cplx> b(grid.nt, cplx(0.0, 0.0));
  if (pulse) {
    for (std::size_t k = 0; k < grid.nt; ++k) b[k] = sech_envelope(grid.t(k), *pulse);
  }
  return b;
}

PropagationResult propagate(const SimulationGrid& grid, const PhysicalParams& p, std::span<const cplx> boundary_input,
                            const InitialAtomicState& init, const SolverOptions& options) {
  const std::size_t nx = grid.nx;
  const std::size_t nt = grid.nt;
  const std::size_t nn = grid.detuning.size();
  if (boundary_input.size() != nt) throw ValidationError("boundary input length must equal the number of time nodes");
  if (init.per_x.size() != nx) throw ValidationError("initial state must have one entry per x node");
  check_finite(boundary_input, 0, grid.x0);

  PropagationResult result;
  FieldRecord& rec = result.field;
  rec.nx = nx;
  rec.nt = nt;
  rec.x0 = grid.x0;
  rec.dx = grid.dx;
  rec.t_min = grid.t_min;
  rec.dt = grid.dt;
  rec.boundary_input.assign(boundary_input.begin(), boundary_input.end());
  if (options.keep_field) rec.omega.resize(nx * nt);

  std::vector<double> probe_x = options.probe_positions;
  if (probe_x.empty()) probe_x.push_back(grid.x1());
  for (double px : probe_x) {
    if (px < grid.x0 - 1e-12 || px > grid.x1() + 1e-12) throw ValidationError("probe position outside the medium");
    ProbeHistory ph;
    ph.x_index = static_cast<std::size_t>(std::lround((px - grid.x0) / grid.dx));
    ph.x_index = std::min(ph.x_index, nx - 1);
    ph.x = grid.x(ph.x_index);
    result.probes.push_back(std::move(ph));
  }
  const auto probe_for = [&](std::size_t i) -> AmplitudeTrajectories* {
    for (auto& ph : result.probes)
      if (ph.x_index == i) return &ph.amplitudes;
    return nullptr;
  };

  result.final_atoms.nx = nx;
  result.final_atoms.n_nodes = nn;
  result.final_atoms.amplitudes.resize(nx * nn);

  SliceIntegrator integrator(grid.detuning, grid.dt);
  std::vector<cplx> omega(boundary_input.begin(), boundary_input.end());
  std::vector<cplx> trial(nt), pol(nt), pol_trial(nt);

  const auto final_slot = [&](std::size_t i) {
    return std::span<AmplitudePair>(result.final_atoms.amplitudes.data() + i * nn, nn);
  };
  const auto settle = [&](std::size_t i) {
    AmplitudeTrajectories* probe = probe_for(i);
    const double dev =
        integrator.run(omega, std::span<const AmplitudePair>(&init.per_x[i], 1), pol, probe, final_slot(i));
    // Duplicate probes at the same node share one history.
    for (auto& ph : result.probes)
      if (ph.x_index == i && &ph.amplitudes != probe) ph.amplitudes = *probe;
    result.max_norm_residual = std::max(result.max_norm_residual, dev);
    if (!(dev <= kNormAbort))
      throw NumericalError("norm violation " + std::to_string(dev) + " at slice " + std::to_string(i) +
                           " (x = " + std::to_string(grid.x(i)) + " cm)");
    if (options.keep_field) std::copy(omega.begin(), omega.end(), rec.omega.begin() + static_cast<std::ptrdiff_t>(i * nt));
  };

  settle(0);
  const double k = p.g * grid.dx / p.c;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    // -i k P = k (Im P, -Re P)
    for (std::size_t n = 0; n < nt; ++n)
      trial[n] = omega[n] + k * cplx(pol[n].imag(), -pol[n].real());
    check_finite(trial, i + 1, grid.x(i + 1));
    integrator.run(trial, std::span<const AmplitudePair>(&init.per_x[i + 1], 1), pol_trial, nullptr, {});
    for (std::size_t n = 0; n < nt; ++n) {
      const cplx s = pol[n] + pol_trial[n];
      omega[n] += 0.5 * k * cplx(s.imag(), -s.real());
    }
    check_finite(omega, i + 1, grid.x(i + 1));
    settle(i + 1);
  }
  rec.output_series = omega;
  return result;
}

std::vector<SnapshotPoint> lab_frame_snapshot(const FieldRecord& record, double t_lab, const MediumSpec& m,
                                              const PulseSpec* pulse, std::span<const double> positions) {
  if (!record.has_full_field()) throw ValidationError("snapshot needs a record with the full field kept");
  const double c = kSpeedOfLight;

  // Linear interpolation of a retarded-time series; zero before the window.
  const auto sample = [&](std::span<const cplx> series, double tr) -> cplx {
    if (tr < record.t_min) return 0.0;
    const double s = (tr - record.t_min) / record.dt;
    if (s > static_cast<double>(record.nt - 1) + 1e-9)
      throw ValidationError("snapshot at t = " + std::to_string(t_lab) + " ns needs retarded time " +
                            std::to_string(tr) + " ns beyond the simulated window");
    const auto k = std::min(static_cast<std::size_t>(s), record.nt - 2);
    const double f = s - static_cast<double>(k);
    return (1.0 - f) * series[k] + f * series[k + 1];
  };

  std::vector<SnapshotPoint> out;
  out.reserve(positions.size());
  for (double x : positions) {
    cplx v;
    const double tr = t_lab - x / c;
    if (x < m.x0) {
      v = pulse ? cplx(sech_envelope(tr, *pulse), 0.0) : cplx(0.0, 0.0);
    } else if (x > m.x1) {
      v = sample(record.output_series, tr);
    } else {
      const double s = std::clamp((x - record.x0) / record.dx, 0.0, static_cast<double>(record.nx - 1));
      const auto i = std::min(static_cast<std::size_t>(s), record.nx > 1 ? record.nx - 2 : 0);
      const double f = record.nx > 1 ? s - static_cast<double>(i) : 0.0;
      const cplx lo = sample(record.slice(i), tr);
      const cplx hi = record.nx > 1 ? sample(record.slice(i + 1), tr) : lo;
      v = (1.0 - f) * lo + f * hi;
    }
    out.push_back({x, v});
  }
  return out;
}

}  // namespace fastlight
