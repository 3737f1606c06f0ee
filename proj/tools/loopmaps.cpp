#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "loopmaps/commands.hpp"

namespace fs = std::filesystem;
using loopmaps::io::Json;

namespace {

int config_failure(const std::string& command, const std::string& message) {
  const Json report = {{"command", command},
                       {"schema", loopmaps::io::kSchemaVersion},
                       {"status", "config_error"},
                       {"passed", false},
                       {"error", {{"type", "config"}, {"message", message}}}};
  std::cout << loopmaps::report_text(report);
  return loopmaps::kExitConfig;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic maps from holomorphic potentials via loop-group factorization"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  double tol = 0.0;
  int grid = 0;
  int trunc = 0;
  std::uint64_t seed = 0;
  CLI::Option* tol_opt = app.add_option("--tol", tol, "headline pass threshold of the command");
  CLI::Option* grid_opt = app.add_option("--grid", grid, "grid samples per side (odd when centred at 0)");
  CLI::Option* trunc_opt = app.add_option("--trunc", trunc, "loop truncation M");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "seed for randomized batteries");
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "directory for report.json and field exports");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"run", "integrate a potential, split, export Psi/Phi/b/phi and verify"},
      {"uniton", "compare Phi of the uniton-gauged potential with Phi_mu plus a uniton"},
      {"gauss", "Gauss bundles of a Grassmannian map and the second fundamental form identities"},
      {"dress", "plus dressing against the gauge action, or simple-factor dressing"},
      {"complete", "simple factors gamma_a approaching the uniton gauge as a -> 0"},
      {"verify", "check a stored Phi field (LoopField JSON)"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::string command = "?";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_failure(command, e.what());
  }
  command = app.get_subcommands().front()->get_name();

  loopmaps::Overrides ov;
  if (*tol_opt) ov.tol = tol;
  if (*grid_opt) ov.grid = grid;
  if (*trunc_opt) ov.trunc = trunc;
  if (*seed_opt) ov.seed = seed;

  loopmaps::CommandResult result;
  try {
    const loopmaps::ExperimentConfig cfg = loopmaps::load_config(config_path, command, ov);
    result = loopmaps::run_command(command, cfg, !out_dir.empty());
  } catch (const loopmaps::ConfigError& e) {
    return config_failure(command, e.what());
  }

  const std::string text = loopmaps::report_text(result.report);
  std::cout << text;
  if (!out_dir.empty()) {
    try {
      fs::create_directories(out_dir);
      for (const auto& [name, contents] : result.files) write_file(fs::path(out_dir) / name, contents);
      write_file(fs::path(out_dir) / "report.json", text);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return loopmaps::kExitConfig;
    }
  }
  return result.exit_code;
}
