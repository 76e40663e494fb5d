#include "fastlight/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>

#include <json.hpp>

#include "fastlight/csv.hpp"
#include "fastlight/diagnostics.hpp"
#include "fastlight/ensemble.hpp"
#include "fastlight/error.hpp"

#ifndef FASTLIGHT_VERSION
#define FASTLIGHT_VERSION "0.0.0"
#endif

namespace fastlight {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPulseTailTau = 60.0;

class OutputSink {
 public:
  explicit OutputSink(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
  }

  void write(const std::string& name, const CsvTable& table) {
    const std::string path = (std::filesystem::path(dir_) / name).string();
    outputs_.push_back({name, write_series(path, table), table.rows.size()});
  }

  const std::string& dir() const { return dir_; }
  const std::vector<OutputFile>& outputs() const { return outputs_; }

 private:
  std::string dir_;
  std::vector<OutputFile> outputs_;
};

double safe(double v) { return std::isfinite(v) ? v : 0.0; }

json grid_json(const SimulationGrid& g) {
  return json{{"x0", g.x0},         {"x1", g.x1()}, {"dx", g.dx},       {"nx", g.nx},
              {"t_min", g.t_min},   {"dt", g.dt},   {"nt", g.nt},       {"t_max", g.t_max()},
              {"detuning_nodes", g.detuning.size()}};
}

std::vector<double> snapshot_positions(const SimulationConfig& cfg) {
  const double L = cfg.medium.length();
  const double a = cfg.medium.x0 - cfg.run.snapshot_margin * L;
  const double b = cfg.medium.x1 + cfg.run.snapshot_margin * L;
  const auto n = static_cast<std::size_t>(cfg.run.snapshot_points);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

std::string snapshot_name(std::size_t k) { return "snapshot_" + std::to_string(k) + ".csv"; }

// Retarded-time series in both normalised and raw units.
CsvTable series_table(const FieldRecord& rec, double tau) {
  const double unit = 2.0 / tau;
  CsvTable t{{"t_tau", "in_re_norm", "in_im_norm", "out_re_norm", "out_im_norm", "t_ns", "in_re", "in_im", "out_re",
              "out_im"},
             {}};
  t.rows.reserve(rec.nt);
  for (std::size_t k = 0; k < rec.nt; ++k) {
    const cplx in = rec.boundary_input[k];
    const cplx out = rec.output_series[k];
    t.rows.push_back({rec.t(k) / tau, in.real() / unit, in.imag() / unit, out.real() / unit, out.imag() / unit,
                      rec.t(k), in.real(), in.imag(), out.real(), out.imag()});
  }
  return t;
}

CsvTable area_table(const AreaProfile& prof, double ctau) {
  CsvTable t{{"x_ctau", "theta_over_pi", "x_cm", "theta", "residual"}, {}};
  for (std::size_t i = 0; i < prof.x.size(); ++i)
    t.rows.push_back({prof.x[i] / ctau, prof.theta[i] / std::numbers::pi, prof.x[i], prof.theta[i], prof.residual[i]});
  return t;
}

CsvTable probe_table(const ProbeHistory& probe, const DetuningDistribution& det, double t_min, double dt,
                     double tau) {
  CsvTable t{{"t_tau", "mean_tipping_angle", "max_tipping_angle", "inversion", "t_ns"}, {}};
  const std::vector<double> mean = mean_tipping_series(probe.amplitudes, det);
  for (std::size_t k = 0; k < probe.amplitudes.nt; ++k) {
    double worst = 0.0;
    double inversion = 0.0;
    for (std::size_t j = 0; j < probe.amplitudes.n_nodes; ++j) {
      const AmplitudePair& a = probe.amplitudes.at(k, j);
      worst = std::max(worst, tipping_angle(a));
      inversion += det.weights[j] * (std::norm(a.c2) - std::norm(a.c1));
    }
    const double time = t_min + dt * static_cast<double>(k);
    t.rows.push_back({time / tau, mean[k], worst, inversion, time});
  }
  return t;
}

CsvTable snapshot_table(const std::vector<SnapshotPoint>& pts, double ctau, double tau) {
  const double unit = 2.0 / tau;
  CsvTable t{{"x_ctau", "omega_re_norm", "omega_im_norm", "x_cm", "omega_re", "omega_im"}, {}};
  for (const SnapshotPoint& s : pts)
    t.rows.push_back({s.x / ctau, s.omega.real() / unit, s.omega.imag() / unit, s.x, s.omega.real(), s.omega.imag()});
  return t;
}

struct Context {
  const SimulationConfig& cfg;
  OutputSink sink;
  json manifest_extra = json::object();
  std::map<std::string, double> diagnostics;
};

void run_analytic(Context& ctx) {
  const SimulationConfig& cfg = ctx.cfg;
  const PhysicalParams& p = cfg.physics;
  const double ctau = kSpeedOfLight * p.tau;
  const double unit = 2.0 / p.tau;
  const std::optional<DetuningDistribution> det =
      cfg.run.velocity_mode == VelocityMode::quadrature ? std::optional(make_detuning(cfg)) : std::nullopt;
  const double vg = group_velocity(p, cfg.run.velocity_mode, det ? &*det : nullptr);
  ctx.diagnostics["group_velocity_over_c"] = vg;
  ctx.diagnostics["beer_alpha_per_cm"] = beers_alpha(p);
  ctx.diagnostics["advance_time_ns"] = advance_time(cfg.medium.length(), p);

  const std::vector<double> xs = snapshot_positions(cfg);
  const std::vector<double> times = resolve_snapshot_times(cfg, {});
  json snaps = json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t_shift = times[k] - cfg.pulse.peak_time;
    CsvTable field{{"x_ctau", "omega_norm", "x_cm", "omega"}, {}};
    for (double x : xs) {
      const double v = analytic_field(x, t_shift, cfg.medium, p, cfg.run.velocity_mode, det ? &*det : nullptr);
      field.rows.push_back({x / ctau, v / unit, x, v});
    }
    ctx.sink.write(snapshot_name(k), field);

    CsvTable atoms{{"x_ctau", "c1_re", "c1_im", "c2_re", "c2_im", "x_cm"}, {}};
    for (double x : xs) {
      if (x < cfg.medium.x0 || x > cfg.medium.x1) continue;
      const AmplitudePair a = analytic_amplitudes(x, t_shift, cfg.medium, p);
      atoms.rows.push_back({x / ctau, a.c1.real(), a.c1.imag(), a.c2.real(), a.c2.imag(), x});
    }
    ctx.sink.write("amplitudes_" + std::to_string(k) + ".csv", atoms);
    snaps.push_back({{"t_ns", times[k]}, {"t_tau", times[k] / p.tau}});
  }
  ctx.manifest_extra["snapshots"] = snaps;
}

// Shared by propagate and sf: one solver run with full diagnostics.
void run_single(Context& ctx, bool use_pulse, bool seeded) {
  const SimulationConfig& cfg = ctx.cfg;
  const PhysicalParams& p = cfg.physics;
  const double ctau = kSpeedOfLight * p.tau;
  const PulseSpec* pulse = use_pulse ? &cfg.pulse : nullptr;

  const TimeWindow window = resolve_window(cfg);
  const SimulationGrid grid = build_grid(cfg.medium, p, window, make_grid_overrides(cfg), pulse);
  ctx.manifest_extra["grid"] = grid_json(grid);

  InitialAtomicState init = InitialAtomicState::perfect_inversion(grid.nx);
  if (seeded) {
    const double na = atom_count(p, cfg.medium.length());
    init = sample_initial_state(cfg.run.seed, grid.nx, na, cfg.run.phase_mode).atoms;
    ctx.diagnostics["atom_count"] = na;
  }
  SolverOptions opts;
  opts.probe_positions = cfg.run.probe_positions;
  const PropagationResult res = propagate(grid, p, sample_boundary(grid, pulse), init, opts);
  const FieldRecord& rec = res.field;
  ctx.diagnostics["max_norm_residual"] = res.max_norm_residual;

  ctx.sink.write("series.csv", series_table(rec, p.tau));
  const AreaProfile prof = area_profile(rec, p);
  ctx.sink.write("area.csv", area_table(prof, ctau));

  if (use_pulse) {
    const AdvanceMeasurement adv = peak_advance(rec.output_series, rec.boundary_input, rec.t_min, rec.dt, p.tau);
    ctx.diagnostics["peak_advance_tau"] = adv.advance_in_tau;
    ctx.diagnostics["output_peak_time_ns"] = adv.peak_time_out;
    ctx.diagnostics["input_peak_time_ns"] = adv.peak_time_reference;
    ctx.diagnostics["predicted_advance_tau"] = advance_time(cfg.medium.length(), p) / p.tau;
    ctx.diagnostics["area_entry_over_pi"] = prof.theta.front() / std::numbers::pi;
    ctx.diagnostics["area_exit_over_pi"] = prof.theta.back() / std::numbers::pi;
  }

  json probes = json::array();
  for (std::size_t k = 0; k < res.probes.size(); ++k) {
    const ProbeHistory& pr = res.probes[k];
    const std::string name = "probe_" + std::to_string(k) + ".csv";
    ctx.sink.write(name, probe_table(pr, grid.detuning, grid.t_min, grid.dt, p.tau));
    json entry{{"file", name}, {"x_cm", pr.x}, {"x_index", pr.x_index}};
    if (seeded) {
      const SfDelay d = sf_delay_scan(pr.amplitudes, grid.detuning, grid.dt);
      entry["sf_delay_ns"] = d.mean_angle_delay ? json(*d.mean_angle_delay) : json(nullptr);
      entry["sf_max_node_delay_ns"] = d.max_node_delay ? json(*d.max_node_delay) : json(nullptr);
      if (k == 0) {
        ctx.diagnostics["sf_triggered"] = d.mean_angle_delay ? 1.0 : 0.0;
        if (d.mean_angle_delay) ctx.diagnostics["sf_delay_ns"] = *d.mean_angle_delay;
        if (p.g > 0.0) ctx.diagnostics["polder_delay_ns"] = sf_delay_mean(cfg.medium.length(), p);
      }
    }
    probes.push_back(entry);
  }
  ctx.manifest_extra["probes"] = probes;

  const std::vector<double> xs = snapshot_positions(cfg);
  const std::vector<double> times = resolve_snapshot_times(cfg, window);
  json snaps = json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto pts = lab_frame_snapshot(rec, times[k], cfg.medium, pulse, xs);
    ctx.sink.write(snapshot_name(k), snapshot_table(pts, ctau, p.tau));
    snaps.push_back({{"t_ns", times[k]}, {"t_tau", times[k] / p.tau}});
  }
  ctx.manifest_extra["snapshots"] = snaps;
}

void run_sweep(Context& ctx) {
  const SimulationConfig& cfg = ctx.cfg;
  const PhysicalParams& p = cfg.physics;
  const double ctau = kSpeedOfLight * p.tau;
  EnsembleConfig ec;
  ec.params = p;
  ec.x0 = cfg.medium.x0;
  ec.lengths = cfg.run.lengths.empty() ? default_sweep_lengths(p) : cfg.run.lengths;
  ec.n_runs = cfg.run.n_runs;
  ec.seed0 = cfg.run.seed;
  ec.jobs = cfg.run.jobs;
  ec.window_factor = cfg.run.window_factor;
  ec.window_margin_tau = cfg.run.window_margin;
  ec.grid = make_grid_overrides(cfg);
  ec.phase_mode = cfg.run.phase_mode;

  const std::vector<DelayStatistics> stats = run_ensemble(ec);

  CsvTable runs{{"length_ctau", "run", "seed", "triggered", "delay_tau", "max_node_delay_tau", "length_cm",
                 "delay_ns", "max_node_delay_ns", "norm_residual", "error"},
                {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double worst_norm = 0.0;
  std::size_t failures = 0;
  json grids = json::array();
  for (const DelayStatistics& s : stats) {
    worst_norm = std::max(worst_norm, s.max_norm_residual);
    failures += s.failures;
    const SimulationGrid g = build_grid({ec.x0, ec.x0 + s.length}, p, s.window, ec.grid, nullptr);
    json gj = grid_json(g);
    gj["length_cm"] = s.length;
    grids.push_back(gj);
    for (const RunOutcome& o : s.runs) {
      const double d = o.delay.value_or(nan);
      const double m = o.max_node_delay.value_or(nan);
      runs.rows.push_back({o.length / ctau, static_cast<std::int64_t>(o.run_index), o.seed,
                           static_cast<std::int64_t>(o.delay ? 1 : 0), d / p.tau, m / p.tau, o.length, d, m,
                           o.norm_residual, o.error});
    }
  }
  ctx.sink.write("delays.csv", runs);

  const PolderReport rep = compare_to_polder(stats, p);
  CsvTable table{{"length_ctau", "mean_delay_tau", "std_delay_tau", "polder_tau", "advance_tau", "samples",
                  "non_triggering", "sf_before_advance", "length_cm", "mean_delay_ns", "std_delay_ns", "polder_ns",
                  "advance_ns"},
                 {}};
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const PolderRow& r = rep.rows[i];
    const double mean = r.samples ? r.mean_delay : nan;
    const double sd = r.samples ? r.stddev : nan;
    table.rows.push_back({r.length / ctau, mean / p.tau, sd / p.tau, r.polder / p.tau, r.advance / p.tau,
                          static_cast<std::int64_t>(r.samples), static_cast<std::int64_t>(stats[i].non_triggering),
                          static_cast<std::int64_t>(r.sf_before_advance ? 1 : 0), r.length, mean, sd, r.polder,
                          r.advance});
  }
  ctx.sink.write("polder.csv", table);

  CsvTable cross{{"kind", "length_ctau", "length_cm", "advance_tau"}, {}};
  if (rep.crossover_theory)
    cross.rows.push_back({std::string("theory"), *rep.crossover_theory / ctau, *rep.crossover_theory,
                          advance_time(*rep.crossover_theory, p) / p.tau});
  if (rep.crossover_measured)
    cross.rows.push_back({std::string("measured"), *rep.crossover_measured / ctau, *rep.crossover_measured,
                          advance_time(*rep.crossover_measured, p) / p.tau});
  ctx.sink.write("crossover.csv", cross);

  ctx.diagnostics["max_norm_residual"] = worst_norm;
  ctx.diagnostics["failed_runs"] = static_cast<double>(failures);
  if (rep.crossover_theory) ctx.diagnostics["crossover_theory_ctau"] = *rep.crossover_theory / ctau;
  if (rep.crossover_measured) ctx.diagnostics["crossover_measured_ctau"] = *rep.crossover_measured / ctau;
  ctx.manifest_extra["grid"] = grids;
}

}  // namespace

std::string version_string() { return FASTLIGHT_VERSION; }

SimulationConfig figure_recipe(const SimulationConfig& base, int figure) {
  SimulationConfig cfg = base;
  cfg.run.figure = figure;
  cfg.medium = MediumSpec{0.0, 2.0 * kSpeedOfLight * cfg.physics.tau};
  cfg.pulse = PulseSpec{};
  cfg.pulse.tau = cfg.physics.tau;
  cfg.pulse_enabled = true;
  cfg.run.probe_positions.clear();
  switch (figure) {
    case 2:
      cfg.run.mode = RunMode::analytic;
      cfg.run.velocity_mode = VelocityMode::limit;
      break;
    case 4:
    case 5:
      cfg.run.mode = RunMode::propagate;
      cfg.run.initial_state = InitialCondition::inverted;
      cfg.pulse.cutoff_half_width = 10.0;
      break;
    case 6:
      cfg.run.mode = RunMode::sweep;
      cfg.pulse_enabled = false;
      break;
    case 7:
      cfg.run.mode = RunMode::propagate;
      cfg.run.initial_state = InitialCondition::seeded;
      cfg.pulse.cutoff_half_width = 10.0;
      break;
    case 8:
      cfg.run.mode = RunMode::sf;
      cfg.pulse_enabled = false;
      break;
    default:
      throw ValidationError("no recipe for figure " + std::to_string(figure) + " (available: 2, 4, 5, 6, 7, 8)");
  }
  return cfg;
}

TimeWindow resolve_window(const SimulationConfig& cfg) {
  const PhysicalParams& p = cfg.physics;
  TimeWindow w;
  const bool pulse_run = cfg.pulse_enabled && cfg.run.mode != RunMode::sf;
  if (pulse_run) {
    const double support = infinite_wing_support(cfg.pulse);
    w = {cfg.pulse.peak_time - (support + 1.0) * p.tau, cfg.pulse.peak_time + kPulseTailTau * p.tau};
  } else {
    w = sf_window(p, cfg.medium.length(), cfg.run.window_factor, cfg.run.window_margin);
  }
  if (cfg.run.t_min) w.t_min = *cfg.run.t_min;
  if (cfg.run.t_max) w.t_max = *cfg.run.t_max;
  if (!(w.t_max > w.t_min)) throw ValidationError("time window requires t_max > t_min");
  return w;
}

std::vector<double> resolve_snapshot_times(const SimulationConfig& cfg, const TimeWindow& window) {
  if (!cfg.run.snapshot_times.empty()) return cfg.run.snapshot_times;
  const double c = kSpeedOfLight;
  const double L = cfg.medium.length();
  std::vector<double> t;
  if (cfg.pulse_enabled && cfg.run.mode != RunMode::sf) {
    for (double f : {0.0, 0.5, 1.0, 1.5}) t.push_back(cfg.pulse.peak_time + (cfg.medium.x0 + f * L) / c);
  } else {
    for (double f : {0.25, 0.5, 0.75, 1.0}) t.push_back(cfg.medium.x0 / c + window.t_min + f * (window.t_max - window.t_min));
  }
  return t;
}

std::vector<double> default_sweep_lengths(const PhysicalParams& p) {
  std::vector<double> out;
  const double ctau = kSpeedOfLight * p.tau;
  for (int i = 0; i < 9; ++i) out.push_back((1.0 + 0.5 * i) * ctau);
  return out;
}

RunSummary run_command(const SimulationConfig& input) {
  input.validate();
  const SimulationConfig cfg = input.run.mode == RunMode::fig ? figure_recipe(input, input.run.figure) : input;
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  Context ctx{cfg, OutputSink(cfg.run.output_dir), json::object(), {}};
  switch (cfg.run.mode) {
    case RunMode::analytic:
      run_analytic(ctx);
      break;
    case RunMode::propagate:
      run_single(ctx, cfg.pulse_enabled, cfg.run.initial_state == InitialCondition::seeded);
      break;
    case RunMode::sf:
      run_single(ctx, false, true);
      break;
    case RunMode::sweep:
      run_sweep(ctx);
      break;
    case RunMode::fig:
      throw ValidationError("figure recipes cannot nest");
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunSummary summary;
  summary.mode = to_string(cfg.run.mode);
  summary.outputs = ctx.sink.outputs();
  summary.diagnostics = ctx.diagnostics;

  json manifest;
  manifest["version"] = version_string();
  manifest["mode"] = to_string(input.run.mode);
  if (input.run.mode == RunMode::fig) {
    manifest["figure"] = input.run.figure;
    manifest["recipe_mode"] = summary.mode;
  }
  manifest["config"] = serialize_config(input);
  manifest["resolved_config"] = serialize_config(cfg);
  manifest["wall_clock_seconds"] = elapsed;
  manifest["medium_ctau"] = {cfg.medium.x0 / (kSpeedOfLight * cfg.physics.tau),
                             cfg.medium.x1 / (kSpeedOfLight * cfg.physics.tau)};
  for (auto& [k, v] : ctx.manifest_extra.items()) manifest[k] = v;
  json diag = json::object();
  for (const auto& [k, v] : summary.diagnostics) diag[k] = safe(v);
  manifest["diagnostics"] = diag;
  json outs = json::array();
  for (const OutputFile& f : summary.outputs) outs.push_back({{"file", f.name}, {"sha256", f.sha256}, {"rows", f.rows}});
  manifest["outputs"] = outs;

  summary.manifest_path = (std::filesystem::path(cfg.run.output_dir) / "manifest.json").string();
  write_file(summary.manifest_path, manifest.dump(2) + "\n");
  return summary;
}

}  // namespace fastlight
