#include "fastlight/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

#include "fastlight/error.hpp"

namespace fastlight {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s, int line, std::string_view key) {
  s = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(line, std::string(key) + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, int line, std::string_view key) {
  s = trim(s);
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(line, std::string(key) + ": expected an integer, got '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s, int line, std::string_view key) {
  s = trim(s);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ParseError(line, std::string(key) + ": expected true or false, got '" + std::string(s) + "'");
}

std::optional<double> parse_opt_double(std::string_view s, int line, std::string_view key) {
  s = trim(s);
  if (s == "none" || s == "auto") return std::nullopt;
  return parse_double(s, line, key);
}

std::vector<double> parse_list(std::string_view s, int line, std::string_view key) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty() || s == "none" || s == "auto") return out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(parse_double(s.substr(0, comma), line, key));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out.empty() ? "auto" : out;
}

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table, int line,
             std::string_view key) {
  s = trim(s);
  for (const auto& [name, value] : table)
    if (name == s) return value;
  std::string allowed;
  for (const auto& [name, value] : table) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  throw ParseError(line, std::string(key) + ": unknown value '" + std::string(s) + "' (allowed: " + allowed + ")");
}

template <typename E, std::size_t N>
std::string enum_name(E v, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, value] : table)
    if (value == v) return std::string(name);
  return "?";
}

constexpr std::array<std::pair<std::string_view, RunMode>, 5> kModes{{{"analytic", RunMode::analytic},
                                                                      {"propagate", RunMode::propagate},
                                                                      {"sf", RunMode::sf},
                                                                      {"sweep", RunMode::sweep},
                                                                      {"fig", RunMode::fig}}};
constexpr std::array<std::pair<std::string_view, QuadratureKind>, 3> kQuadratures{
    {{"gauss_hermite", QuadratureKind::gauss_hermite},
     {"banded", QuadratureKind::banded},
     {"resonant", QuadratureKind::resonant}}};
constexpr std::array<std::pair<std::string_view, InitialCondition>, 2> kInitial{
    {{"inverted", InitialCondition::inverted}, {"seeded", InitialCondition::seeded}}};
constexpr std::array<std::pair<std::string_view, VelocityMode>, 2> kVelocity{
    {{"limit", VelocityMode::limit}, {"quadrature", VelocityMode::quadrature}}};
constexpr std::array<std::pair<std::string_view, PhaseMode>, 2> kPhase{
    {{"binary", PhaseMode::binary}, {"uniform", PhaseMode::uniform}}};

struct Key {
  std::string_view section;
  std::string_view name;
  std::function<void(SimulationConfig&, std::string_view, int)> set;
  std::function<std::string(const SimulationConfig&)> get;
};

#define FL_DOUBLE(sec, key, field)                                                             \
  Key {                                                                                        \
    sec, #key, [](SimulationConfig& c, std::string_view v, int l) { c.field = parse_double(v, l, #key); }, \
        [](const SimulationConfig& c) { return fmt(c.field); }                                \
  }
#define FL_OPT(sec, key, field)                                                                    \
  Key {                                                                                            \
    sec, #key, [](SimulationConfig& c, std::string_view v, int l) { c.field = parse_opt_double(v, l, #key); }, \
        [](const SimulationConfig& c) { return fmt_opt(c.field); }                                 \
  }
#define FL_LIST(sec, key, field)                                                              \
  Key {                                                                                       \
    sec, #key, [](SimulationConfig& c, std::string_view v, int l) { c.field = parse_list(v, l, #key); }, \
        [](const SimulationConfig& c) { return fmt_list(c.field); }                           \
  }
#define FL_ENUM(sec, key, field, table)                                                              \
  Key {                                                                                              \
    sec, #key, [](SimulationConfig& c, std::string_view v, int l) { c.field = parse_enum(v, table, l, #key); }, \
        [](const SimulationConfig& c) { return enum_name(c.field, table); }                          \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      FL_DOUBLE("physics", g, physics.g),
      FL_DOUBLE("physics", t2_star, physics.t2_star),
      FL_DOUBLE("physics", tau, physics.tau),
      FL_DOUBLE("physics", density, physics.density),
      FL_DOUBLE("physics", wavelength, physics.wavelength),
      FL_DOUBLE("medium", x0, medium.x0),
      FL_DOUBLE("medium", x1, medium.x1),
      Key{"pulse", "enabled",
          [](SimulationConfig& c, std::string_view v, int l) { c.pulse_enabled = parse_bool(v, l, "enabled"); },
          [](const SimulationConfig& c) { return std::string(c.pulse_enabled ? "true" : "false"); }},
      FL_DOUBLE("pulse", peak_time, pulse.peak_time),
      FL_OPT("pulse", cutoff_half_width, pulse.cutoff_half_width),
      FL_OPT("pulse", peak_amplitude, pulse.peak_amplitude),
      FL_OPT("grid", dx, grid.dx),
      FL_OPT("grid", dt, grid.dt),
      Key{"grid", "detuning_nodes",
          [](SimulationConfig& c, std::string_view v, int l) {
            c.grid.detuning_nodes = parse_int<int>(v, l, "detuning_nodes");
          },
          [](const SimulationConfig& c) { return std::to_string(c.grid.detuning_nodes); }},
      FL_ENUM("grid", quadrature, grid.quadrature, kQuadratures),
      FL_OPT("grid", band_half_width, grid.band_half_width),
      FL_OPT("grid", band_spacing, grid.band_spacing),
      Key{"grid", "unsafe",
          [](SimulationConfig& c, std::string_view v, int l) { c.grid.unsafe = parse_bool(v, l, "unsafe"); },
          [](const SimulationConfig& c) { return std::string(c.grid.unsafe ? "true" : "false"); }},
      FL_ENUM("run", mode, run.mode, kModes),
      Key{"run", "figure",
          [](SimulationConfig& c, std::string_view v, int l) { c.run.figure = parse_int<int>(v, l, "figure"); },
          [](const SimulationConfig& c) { return std::to_string(c.run.figure); }},
      Key{"run", "seed",
          [](SimulationConfig& c, std::string_view v, int l) { c.run.seed = parse_int<std::uint64_t>(v, l, "seed"); },
          [](const SimulationConfig& c) { return std::to_string(c.run.seed); }},
      Key{"run", "jobs",
          [](SimulationConfig& c, std::string_view v, int l) { c.run.jobs = parse_int<unsigned>(v, l, "jobs"); },
          [](const SimulationConfig& c) { return std::to_string(c.run.jobs); }},
      FL_OPT("run", t_min, run.t_min),
      FL_OPT("run", t_max, run.t_max),
      FL_LIST("run", snapshot_times, run.snapshot_times),
      Key{"run", "snapshot_points",
          [](SimulationConfig& c, std::string_view v, int l) {
            c.run.snapshot_points = parse_int<int>(v, l, "snapshot_points");
          },
          [](const SimulationConfig& c) { return std::to_string(c.run.snapshot_points); }},
      FL_DOUBLE("run", snapshot_margin, run.snapshot_margin),
      FL_LIST("run", probe_positions, run.probe_positions),
      Key{"run", "output_dir",
          [](SimulationConfig& c, std::string_view v, int) { c.run.output_dir = std::string(trim(v)); },
          [](const SimulationConfig& c) { return c.run.output_dir; }},
      FL_ENUM("run", initial_state, run.initial_state, kInitial),
      FL_ENUM("run", velocity_mode, run.velocity_mode, kVelocity),
      FL_LIST("run", lengths, run.lengths),
      Key{"run", "n_runs",
          [](SimulationConfig& c, std::string_view v, int l) {
            c.run.n_runs = parse_int<std::size_t>(v, l, "n_runs");
          },
          [](const SimulationConfig& c) { return std::to_string(c.run.n_runs); }},
      FL_ENUM("run", phase_mode, run.phase_mode, kPhase),
      FL_DOUBLE("run", window_factor, run.window_factor),
      FL_DOUBLE("run", window_margin, run.window_margin),
  };
  return table;
}

#undef FL_DOUBLE
#undef FL_OPT
#undef FL_LIST
#undef FL_ENUM

const Key* find_key(std::string_view section, std::string_view name) {
  for (const Key& k : keys())
    if (k.section == section && k.name == name) return &k;
  return nullptr;
}

// Key names are unique across sections, so a bare name resolves on its own.
const Key* find_bare_key(std::string_view name) {
  for (const Key& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

bool known_section(std::string_view s) {
  return s == "physics" || s == "medium" || s == "pulse" || s == "grid" || s == "run";
}

void finish(SimulationConfig& cfg) { cfg.pulse.tau = cfg.physics.tau; }

}  // namespace

void SimulationConfig::validate() const {
  physics.validate();
  medium.validate();
  if (pulse_enabled) pulse.validate();
  if (pulse.tau != physics.tau) throw ValidationError("pulse tau must equal physics tau");
  if (grid.dx && !(*grid.dx > 0.0)) throw ValidationError("grid.dx must be > 0");
  if (grid.dt && !(*grid.dt > 0.0)) throw ValidationError("grid.dt must be > 0");
  if (grid.detuning_nodes < 2 || grid.detuning_nodes % 2 != 0)
    throw ValidationError("grid.detuning_nodes must be even and >= 2");
  if (grid.band_half_width && !(*grid.band_half_width > 0.0))
    throw ValidationError("grid.band_half_width must be > 0");
  if (grid.band_spacing && !(*grid.band_spacing > 0.0)) throw ValidationError("grid.band_spacing must be > 0");
  if (run.mode == RunMode::fig && (run.figure < 2 || run.figure > 8 || run.figure == 3))
    throw ValidationError("run.figure must be one of 2, 4, 5, 6, 7, 8");
  if (run.jobs < 1) throw ValidationError("run.jobs must be >= 1");
  if (run.t_min && run.t_max && !(*run.t_max > *run.t_min)) throw ValidationError("run.t_max must exceed run.t_min");
  if (run.snapshot_points < 2) throw ValidationError("run.snapshot_points must be >= 2");
  if (!(run.snapshot_margin >= 0.0)) throw ValidationError("run.snapshot_margin must be >= 0");
  for (double x : run.probe_positions)
    if (!(x >= medium.x0 && x <= medium.x1)) throw ValidationError("run.probe_positions must lie inside [x0, x1]");
  if (run.output_dir.empty()) throw ValidationError("run.output_dir must not be empty");
  for (double L : run.lengths)
    if (!(L > 0.0)) throw ValidationError("run.lengths must be > 0");
  if (run.n_runs < 1) throw ValidationError("run.n_runs must be >= 1");
  if (!(run.window_factor > 0.0)) throw ValidationError("run.window_factor must be > 0");
  if (!(run.window_margin >= 0.0)) throw ValidationError("run.window_margin must be >= 0");
  if (run.mode == RunMode::propagate && !pulse_enabled && run.initial_state == InitialCondition::inverted)
    throw ValidationError("propagate mode needs an input pulse or a seeded initial state");
  if (run.mode == RunMode::analytic && !pulse_enabled) throw ValidationError("analytic mode needs the pulse enabled");
}

SimulationConfig parse_config_unvalidated(std::string_view text) {
  SimulationConfig cfg;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string name(trim(line.substr(0, eq)));
    const Key* key = section.empty() ? find_bare_key(name) : find_key(section, name);
    if (!key)
      throw ParseError(line_no, section.empty() ? "unknown key '" + name + "'"
                                                : "unknown key '" + name + "' in [" + section + "]");
    if (!seen.insert(std::string(key->section) + "." + name).second)
      throw ParseError(line_no, "duplicate key '" + name + "'");
    key->set(cfg, line.substr(eq + 1), line_no);
  }
  finish(cfg);
  return cfg;
}

SimulationConfig parse_config(std::string_view text) {
  SimulationConfig cfg = parse_config_unvalidated(text);
  cfg.validate();
  return cfg;
}

void apply_override(SimulationConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ParseError(0, "override '" + std::string(assignment) + "' is not of the form section.key=value");
  const std::string_view path = trim(assignment.substr(0, eq));
  const auto dot = path.find('.');
  const Key* key = dot == std::string_view::npos ? find_bare_key(path) : find_key(path.substr(0, dot), path.substr(dot + 1));
  if (!key) throw ParseError(0, "unknown override key '" + std::string(path) + "'");
  key->set(cfg, assignment.substr(eq + 1), 0);
  finish(cfg);
}

std::string serialize_config(const SimulationConfig& cfg) {
  std::string out;
  std::string_view section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + std::string(section) + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

std::string to_string(RunMode mode) { return enum_name(mode, kModes); }

RunMode parse_run_mode(std::string_view text) { return parse_enum(text, kModes, 0, "mode"); }

DetuningDistribution make_detuning(const SimulationConfig& cfg) {
  const double t2 = cfg.physics.t2_star;
  switch (cfg.grid.quadrature) {
    case QuadratureKind::resonant:
      return resonant_detuning();
    case QuadratureKind::banded: {
      const double bandwidth = 1.0 / cfg.physics.tau;
      const double half = cfg.grid.band_half_width.value_or(20.0 * bandwidth);
      const double spacing = cfg.grid.band_spacing.value_or(0.05 * bandwidth);
      return banded_detuning_quadrature(t2, half, spacing);
    }
    case QuadratureKind::gauss_hermite:
      break;
  }
  return gaussian_detuning_quadrature(t2, cfg.grid.detuning_nodes);
}

GridOverrides make_grid_overrides(const SimulationConfig& cfg) {
  GridOverrides o;
  o.dx = cfg.grid.dx;
  o.dt = cfg.grid.dt;
  o.detuning_nodes = cfg.grid.detuning_nodes;
  o.unsafe = cfg.grid.unsafe;
  if (cfg.grid.quadrature != QuadratureKind::gauss_hermite) o.detuning = make_detuning(cfg);
  return o;
}

}  // namespace fastlight
