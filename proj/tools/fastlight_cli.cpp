// fastlight: command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 parse, 3 validation, 4 numerical abort,
// 5 I/O, 6 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fastlight/config.hpp"
#include "fastlight/csv.hpp"
#include "fastlight/error.hpp"
#include "fastlight/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kParse = 2, kValidation = 3, kNumerical = 4, kIo = 5, kInternal = 6 };

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "fastlight: " << kind << " error: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-light and superfluorescence simulator for inverted two-level media"};
  std::string config_path;
  std::string mode_text;
  std::optional<int> figure;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::vector<std::string> overrides;
  bool print_config = false;

  app.add_option("--config", config_path, "Configuration file");
  app.add_option("--mode,mode", mode_text, "analytic | propagate | sf | sweep | fig");
  app.add_option("figure", figure, "Figure number for fig mode (2, 4, 5, 6, 7, 8)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Base seed");
  app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--override", overrides, "section.key=value (repeatable)");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (!figure && !mode_text.empty() &&
      std::all_of(mode_text.begin(), mode_text.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    int fig = 0;
    const auto [end, ec] = std::from_chars(mode_text.data(), mode_text.data() + mode_text.size(), fig);
    if (ec != std::errc() || end != mode_text.data() + mode_text.size()) {
      std::cerr << "fastlight: usage error: bad figure number '" << mode_text << "'\n";
      return kUsage;
    }
    figure = fig;
    mode_text.clear();
  }

  try {
    const std::string text = config_path.empty() ? std::string() : fastlight::read_file(config_path);
    fastlight::SimulationConfig cfg = fastlight::parse_config_unvalidated(text);
    for (const std::string& o : overrides) fastlight::apply_override(cfg, o);
    if (!mode_text.empty()) cfg.run.mode = fastlight::parse_run_mode(mode_text);
    if (figure) {
      cfg.run.figure = *figure;
      if (mode_text.empty()) cfg.run.mode = fastlight::RunMode::fig;
    }
    if (out_dir) cfg.run.output_dir = *out_dir;
    if (seed) cfg.run.seed = *seed;
    if (jobs) cfg.run.jobs = *jobs;
    cfg.validate();

    if (print_config) {
      std::cout << fastlight::serialize_config(cfg);
      return kOk;
    }

    const fastlight::RunSummary summary = fastlight::run_command(cfg);
    std::cout << "mode " << summary.mode << "\n";
    for (const auto& [key, value] : summary.diagnostics)
      std::cout << "  " << key << " = " << fastlight::format_double(value) << "\n";
    for (const auto& f : summary.outputs) std::cout << "  wrote " << f.name << " (" << f.rows << " rows)\n";
    std::cout << "  manifest " << summary.manifest_path << "\n";
    return kOk;
  } catch (const fastlight::ParseError& e) {
    return report("parse", e, kParse);
  } catch (const fastlight::ValidationError& e) {
    return report("validation", e, kValidation);
  } catch (const fastlight::NumericalError& e) {
    return report("numerical", e, kNumerical);
  } catch (const fastlight::IoError& e) {
    return report("I/O", e, kIo);
  } catch (const std::exception& e) {
    return report("internal", e, kInternal);
  }
}
