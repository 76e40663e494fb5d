#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef FASTLIGHT_CLI
#error "FASTLIGHT_CLI must name the CLI binary"
#endif

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(FASTLIGHT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("cli exit codes are distinct per failure class") {
  const auto out = (std::filesystem::temp_directory_path() / "fastlight_cli_out").string();
  CHECK(run("--mode analytic --out " + out) == 0);
  CHECK(std::filesystem::exists(out + "/manifest.json"));
  CHECK(run("--print-config") == 0);
  CHECK(run("--no-such-flag") == 1);
  CHECK(run("--config " + write_config("fl_parse.ini", "[physics]\ng = x\n")) == 2);
  CHECK(run("--config " + write_config("fl_valid.ini", "g = -1\n")) == 3);
  CHECK(run("--override physics.tau=-1") == 3);
  CHECK(run("--override physics.nope=1") == 2);
  CHECK(run("propagate --override grid.unsafe=true --override grid.dt=0.01 --override pulse.peak_amplitude=4000 "
            "--override pulse.cutoff_half_width=5 --override grid.quadrature=resonant --override medium.x1=0.2 --out " +
            out) == 4);
  CHECK(run("--config /no/such/file.ini") == 5);
  CHECK(run("--mode analytic --out /proc/forbidden") == 5);
}

TEST_CASE("a bare number selects a figure recipe") {
  const auto out = (std::filesystem::temp_directory_path() / "fastlight_cli_fig2").string();
  CHECK(run("2 --out " + out) == 0);
  CHECK(std::filesystem::exists(out + "/snapshot_0.csv"));
  CHECK(run("3") == 3);
  CHECK(run("99999999999") == 1);
}
