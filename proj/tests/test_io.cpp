#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "fastlight/config.hpp"
#include "fastlight/csv.hpp"
#include "fastlight/error.hpp"
#include "fastlight/runner.hpp"

using namespace fastlight;

namespace {

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fastlight_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("empty configuration gives the default scenario") {
  const SimulationConfig cfg = parse_config("");
  CHECK(cfg.physics == PhysicalParams{});
  CHECK(cfg.physics.g == 266.0);
  CHECK(cfg.physics.t2_star == 0.733);
  CHECK(cfg.physics.tau == 0.1);
  CHECK(cfg.medium.length() == doctest::Approx(2.0 * kSpeedOfLight * 0.1));
  CHECK(cfg.pulse_enabled);
  CHECK_FALSE(cfg.pulse.cutoff_half_width);
  CHECK(cfg.run.mode == RunMode::propagate);
}

TEST_CASE("configuration values and errors") {
  CHECK_THROWS_WITH_AS(parse_config("g = -1\n"), doctest::Contains("g must be >= 0"), ValidationError);
  CHECK(*parse_config("cutoff_half_width = 10").pulse.cutoff_half_width == 10.0);

  const SimulationConfig cfg = parse_config(
      "# comment\n[physics]\ng = 100  # inline\ntau = 0.2\n\n[pulse]\ncutoff_half_width = 8\n"
      "[run]\nmode = sweep\nlengths = 3, 6,9\nphase_mode = uniform\n");
  CHECK(cfg.physics.g == 100.0);
  CHECK(cfg.pulse.tau == 0.2);
  CHECK(cfg.run.mode == RunMode::sweep);
  CHECK(cfg.run.lengths == std::vector<double>{3.0, 6.0, 9.0});
  CHECK(cfg.run.phase_mode == PhaseMode::uniform);

  try {
    parse_config("[physics]\ng = 1\n\n[physics]\nbogus = 2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_config("[nope]\n"), doctest::Contains("line 1"), ParseError);
  CHECK_THROWS_WITH_AS(parse_config("[physics]\ng = abc\n"), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse_config("[physics]\ng = 1\ng = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[physics]\ng\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[run]\nmode = dance\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[run]\nmode = fig\nfigure = 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[medium]\nx1 = -1\n"), ValidationError);
}

TEST_CASE("configuration round trip") {
  SimulationConfig cfg = parse_config("");
  CHECK(parse_config(serialize_config(cfg)) == cfg);

  cfg.physics.g = 0.1 + 0.2;
  cfg.physics.t2_star = 1.0 / 3.0;
  cfg.pulse.cutoff_half_width = 10.0;
  cfg.pulse.peak_amplitude = 7.25;
  cfg.grid.dx = 1e-3;
  cfg.grid.quadrature = QuadratureKind::banded;
  cfg.grid.band_spacing = 0.5;
  cfg.run.mode = RunMode::fig;
  cfg.run.figure = 7;
  cfg.run.seed = 18446744073709551615ULL;
  cfg.run.snapshot_times = {0.1, -0.25, 1e-9};
  cfg.run.probe_positions = {1.0, 2.0};
  cfg.run.output_dir = "some/dir";
  cfg.run.initial_state = InitialCondition::seeded;
  cfg.run.t_max = 5.0;
  cfg.validate();
  const std::string text = serialize_config(cfg);
  const SimulationConfig back = parse_config(text);
  CHECK(back == cfg);
  CHECK(serialize_config(back) == text);
}

TEST_CASE("overrides") {
  SimulationConfig cfg = parse_config("");
  apply_override(cfg, "physics.g=0");
  apply_override(cfg, " run.lengths = 1,2 ");
  apply_override(cfg, "tau=0.05");
  CHECK(cfg.physics.g == 0.0);
  CHECK(cfg.run.lengths == std::vector<double>{1.0, 2.0});
  CHECK(cfg.pulse.tau == 0.05);
  CHECK_THROWS_AS(apply_override(cfg, "physics.nope=1"), ParseError);
  CHECK_THROWS_AS(apply_override(cfg, "novalue"), ParseError);
}

TEST_CASE("csv formatting") {
  CsvTable empty{{"a", "b"}, {}};
  CHECK(format_csv(empty) == "a,b\n");
  CsvTable t{{"x", "n", "s"}, {{0.1, std::int64_t{-3}, std::string("plain")}, {1.0, std::int64_t{4}, std::string("a,b")}}};
  CHECK(format_csv(t) == "x,n,s\n0.10000000000000001,-3,plain\n1,4,\"a,b\"\n");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(-2.5e-20) == "-2.4999999999999999e-20");
  CHECK(format_double(0.5) == "0.5");
  CsvTable ragged{{"a", "b"}, {{1.0}}};
  CHECK_THROWS_AS(format_csv(ragged), ValidationError);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_WITH_AS(write_series("/nonexistent-dir/x.csv", empty), doctest::Contains("/nonexistent-dir/x.csv"),
                       IoError);
}

TEST_CASE("figure recipes") {
  const SimulationConfig base = parse_config("[physics]\ng = 200\n[run]\nseed = 5\n");
  const SimulationConfig f4 = figure_recipe(base, 4);
  CHECK(f4.run.mode == RunMode::propagate);
  CHECK(*f4.pulse.cutoff_half_width == 10.0);
  CHECK(f4.physics.g == 200.0);
  CHECK(f4.run.seed == 5);
  const SimulationConfig f6 = figure_recipe(base, 6);
  CHECK(f6.run.mode == RunMode::sweep);
  CHECK(f6.run.n_runs == 20);
  CHECK(default_sweep_lengths(f6.physics).size() == 9);
  CHECK(figure_recipe(base, 7).run.initial_state == InitialCondition::seeded);
  CHECK(figure_recipe(base, 8).run.mode == RunMode::sf);
  CHECK_THROWS_AS(figure_recipe(base, 3), ValidationError);
}

TEST_CASE("default windows and snapshot times") {
  SimulationConfig cfg = parse_config("cutoff_half_width = 10");
  const TimeWindow w = resolve_window(cfg);
  CHECK(w.t_min == doctest::Approx(-1.1));
  CHECK(w.t_max == doctest::Approx(6.0));
  const auto times = resolve_snapshot_times(cfg, w);
  REQUIRE(times.size() == 4);
  CHECK(times[0] == 0.0);
  CHECK(times[3] == doctest::Approx(1.5 * cfg.medium.length() / kSpeedOfLight));
  cfg.run.mode = RunMode::sf;
  const TimeWindow s = resolve_window(cfg);
  CHECK(s.t_min == 0.0);
  CHECK(s.t_max == doctest::Approx(3.0 * sf_delay_mean(cfg.medium.length(), cfg.physics) + 1.0));
}

TEST_CASE("figure 2 output") {
  SimulationConfig cfg = parse_config("[run]\nmode = fig\nfigure = 2\n");
  cfg.run.output_dir = scratch("fig2");
  const RunSummary s = run_command(cfg);
  std::size_t snapshots = 0;
  for (const OutputFile& f : s.outputs) {
    if (f.name.rfind("snapshot_", 0) != 0) continue;
    ++snapshots;
    const std::string text = read_file(cfg.run.output_dir + "/" + f.name);
    CHECK(count_lines(text) == 501);
    CHECK(sha256_hex(text) == f.sha256);
  }
  CHECK(snapshots == 4);

  const auto manifest = nlohmann::json::parse(read_file(s.manifest_path));
  CHECK(manifest["mode"] == "fig");
  CHECK(manifest["figure"] == 2);
  CHECK(manifest["outputs"].size() == s.outputs.size());
  CHECK(manifest["medium_ctau"][1].get<double>() == doctest::Approx(2.0));
  const SimulationConfig echoed = parse_config(manifest["config"].get<std::string>());
  CHECK(echoed == cfg);

  // First snapshot row agrees with the closed form at the first snapshot time.
  const std::string text = read_file(cfg.run.output_dir + "/snapshot_0.csv");
  const auto line_end = text.find('\n', text.find('\n') + 1);
  const std::string row = text.substr(text.find('\n') + 1, line_end - text.find('\n') - 1);
  const double x_cm = std::stod(row.substr(row.find(',', row.find(',') + 1) + 1));
  const double omega = std::stod(row.substr(row.rfind(',') + 1));
  const SimulationConfig f2 = figure_recipe(cfg, 2);
  const double t0 = resolve_snapshot_times(f2, {})[0];
  CHECK(omega == doctest::Approx(analytic_field(x_cm, t0, f2.medium, f2.physics)).epsilon(1e-15));

  const RunSummary again = run_command(cfg);
  REQUIRE(again.outputs.size() == s.outputs.size());
  for (std::size_t i = 0; i < s.outputs.size(); ++i) CHECK(again.outputs[i].sha256 == s.outputs[i].sha256);
}

TEST_CASE("propagate with an empty medium reports zero advance") {
  SimulationConfig cfg = parse_config("[physics]\ng = 0\n[pulse]\ncutoff_half_width = 10\n");
  cfg.run.output_dir = scratch("empty");
  const RunSummary s = run_command(cfg);
  CHECK(s.diagnostics.at("peak_advance_tau") == 0.0);
  CHECK(std::filesystem::exists(s.manifest_path));
}

TEST_CASE("run modes check their preconditions") {
  SimulationConfig cfg = parse_config_unvalidated("[pulse]\nenabled = false\n");
  cfg.run.mode = RunMode::analytic;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.run.mode = RunMode::propagate;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.run.initial_state = InitialCondition::seeded;
  CHECK_NOTHROW(cfg.validate());
}
