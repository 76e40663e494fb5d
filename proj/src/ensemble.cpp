#include "fastlight/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "fastlight/diagnostics.hpp"
#include "fastlight/error.hpp"

namespace fastlight {

namespace {

// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kPhaseStream = 0x5f3759df00c0ffeeULL;

}  // namespace

SeededState sample_initial_state(std::uint64_t seed, std::size_t nx, double atom_count, PhaseMode mode) {
  if (!(atom_count > 1.0)) throw ValidationError("SF seeding requires N_a > 1");
  const double mean = mean_tipping_angle(atom_count);
  const double sigma = 1.0 / std::sqrt(atom_count);

  std::mt19937_64 angle_rng(mix64(seed));
  std::mt19937_64 phase_rng(mix64(seed ^ kPhaseStream));
  std::normal_distribution<double> angle(mean, sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SeededState s;
  s.sf.seed = seed;
  s.sf.theta0.resize(nx);
  s.sf.phi.resize(nx);
  s.atoms.per_x.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double theta = angle(angle_rng);
    while (!(theta > 0.0)) theta = angle(angle_rng);
    const double u = unit(phase_rng);
    const double phi = mode == PhaseMode::binary ? (u < 0.5 ? 0.0 : std::numbers::pi) : 2.0 * std::numbers::pi * u;
    s.sf.theta0[i] = theta;
    s.sf.phi[i] = phi;
    s.atoms.per_x[i] = {std::polar(std::sin(0.5 * theta), phi), cplx(std::cos(0.5 * theta), 0.0)};
  }
  return s;
}

std::uint64_t run_seed(std::uint64_t seed0, double length, std::size_t run_index) {
  return mix64(seed0 ^ mix64(std::bit_cast<std::uint64_t>(length)) ^ mix64(0xa5a5a5a5ULL + run_index));
}

TimeWindow sf_window(const PhysicalParams& p, double length, double factor, double margin_tau) {
  const double delay = p.g > 0.0 ? sf_delay_mean(length, p) : 0.0;
  return {0.0, factor * delay + margin_tau * p.tau};
}

RunOutcome run_sf_once(const EnsembleConfig& cfg, double length, std::size_t run_index) {
  RunOutcome out;
  out.length = length;
  out.run_index = run_index;
  out.seed = run_seed(cfg.seed0, length, run_index);
  try {
    const MediumSpec medium{cfg.x0, cfg.x0 + length};
    const TimeWindow window = sf_window(cfg.params, length, cfg.window_factor, cfg.window_margin_tau);
    const SimulationGrid grid = build_grid(medium, cfg.params, window, cfg.grid, nullptr);
    const SeededState seeded =
        sample_initial_state(out.seed, grid.nx, atom_count(cfg.params, length), cfg.phase_mode);
    const std::vector<cplx> boundary = sample_boundary(grid, nullptr);
    SolverOptions opts;
    opts.keep_field = false;
    const PropagationResult res = propagate(grid, cfg.params, boundary, seeded.atoms, opts);
    const SfDelay d = sf_delay_scan(res.probes.front().amplitudes, grid.detuning, grid.dt);
    out.delay = d.mean_angle_delay;
    out.max_node_delay = d.max_node_delay;
    out.norm_residual = res.max_norm_residual;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<DelayStatistics> run_ensemble(const EnsembleConfig& cfg) {
  cfg.params.validate();
  if (cfg.n_runs < 1) throw ValidationError("ensemble needs n_runs >= 1");
  if (cfg.lengths.empty()) throw ValidationError("ensemble needs at least one length");
  const double l0 = sf_length_scale(cfg.params);
  for (double L : cfg.lengths)
    if (!(L > l0)) throw ValidationError("ensemble lengths must exceed L0 = " + std::to_string(l0) + " cm");

  const std::size_t total = cfg.lengths.size() * cfg.n_runs;
  std::vector<RunOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t job = next.fetch_add(1); job < total; job = next.fetch_add(1))
      outcomes[job] = run_sf_once(cfg, cfg.lengths[job / cfg.n_runs], job % cfg.n_runs);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(total)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  }

  std::vector<DelayStatistics> stats;
  for (std::size_t li = 0; li < cfg.lengths.size(); ++li) {
    DelayStatistics s;
    s.length = cfg.lengths[li];
    s.window = sf_window(cfg.params, s.length, cfg.window_factor, cfg.window_margin_tau);
    s.polder_prediction =
        cfg.params.g > 0.0 ? sf_delay_mean(s.length, cfg.params) : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.n_runs; ++k) {
      const RunOutcome& o = outcomes[li * cfg.n_runs + k];
      s.runs.push_back(o);
      s.max_norm_residual = std::max(s.max_norm_residual, o.norm_residual);
      if (!o.error.empty()) {
        ++s.failures;
      } else if (!o.delay) {
        ++s.non_triggering;
      } else {
        s.samples.push_back(*o.delay);
      }
    }
    if (!s.samples.empty()) {
      double sum = 0.0;
      for (double v : s.samples) sum += v;
      s.mean = sum / static_cast<double>(s.samples.size());
      double ss = 0.0;
      for (double v : s.samples) ss += (v - s.mean) * (v - s.mean);
      s.stddev = s.samples.size() > 1 ? std::sqrt(ss / static_cast<double>(s.samples.size() - 1)) : 0.0;
    }
    stats.push_back(std::move(s));
  }
  return stats;
}

std::optional<double> advance_delay_crossover(const PhysicalParams& p, double upper) {
  if (!(p.g > 0.0) || !(p.density > 0.0)) return std::nullopt;
  double lo = std::exp(2.0) * sf_length_scale(p);
  double hi = upper;
  const auto f = [&](double L) { return sf_delay_mean(L, p) - advance_time(L, p); };
  if (!(hi > lo) || f(lo) <= 0.0 || f(hi) >= 0.0) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PolderReport compare_to_polder(std::span<const DelayStatistics> stats, const PhysicalParams& p) {
  if (stats.empty()) throw ValidationError("compare_to_polder needs at least one length");
  PolderReport rep;
  for (const DelayStatistics& s : stats) {
    PolderRow row;
    row.length = s.length;
    row.mean_delay = s.mean;
    row.stddev = s.stddev;
    row.samples = s.samples.size();
    row.polder = p.g > 0.0 ? sf_delay_mean(s.length, p) : std::numeric_limits<double>::infinity();
    row.advance = advance_time(s.length, p);
    row.sf_before_advance = row.polder <= row.advance;
    rep.rows.push_back(row);
  }
  double longest = 0.0;
  for (const PolderRow& r : rep.rows) longest = std::max(longest, r.length);
  rep.crossover_theory = advance_delay_crossover(p, std::max(100.0 * kSpeedOfLight * p.tau, 10.0 * longest));

  std::vector<PolderRow> measured;
  for (const PolderRow& r : rep.rows)
    if (r.samples > 0) measured.push_back(r);
  std::sort(measured.begin(), measured.end(), [](const PolderRow& a, const PolderRow& b) { return a.length < b.length; });
  for (std::size_t i = 0; i + 1 < measured.size(); ++i) {
    const double a = measured[i].mean_delay - measured[i].advance;
    const double b = measured[i + 1].mean_delay - measured[i + 1].advance;
    if (a > 0.0 && b <= 0.0) {
      const double f = a / (a - b);
      rep.crossover_measured = measured[i].length + f * (measured[i + 1].length - measured[i].length);
      break;
    }
  }
  return rep;
}

}  // namespace fastlight
