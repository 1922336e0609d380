// fsat: run fidelity-saturation sweeps, validate configs, render figures.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fsat/config.hpp"
#include "fsat/error.hpp"
#include "fsat/experiment.hpp"
#include "fsat/figures.hpp"

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

int fail(std::string_view kind, const std::string& message) {
  std::cerr << "error kind=" << kind << " message=" << quoted(message) << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fidelity saturation experiments"};
  app.set_version_flag("--version", fsat::tool_version());
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  int workers = 0;
  bool resume = false;
  std::string output_dir;
  bool quiet = false;
  app.add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_flag("--resume", resume, "Continue an interrupted run in the output directory");
  app.add_option("--output-dir", output_dir, "Output directory (overrides the config)");
  app.add_flag("-q,--quiet", quiet, "No progress lines");

  std::string config_path, result_path;
  auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  auto* figures = app.add_subcommand("figures", "Render SVG figures from a results.csv");
  figures->add_option("result", result_path, "results.csv of a finished run")->required();
  auto* validate = app.add_subcommand("validate", "Parse and check a config file");
  validate->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  try {
    if (*validate) {
      const fsat::ExperimentConfig cfg = fsat::load_config(config_path);
      std::cout << "ok config_hash=" << cfg.hash() << '\n' << cfg.canonical_text();
      return 0;
    }
    if (*run) {
      const fsat::ExperimentConfig cfg = fsat::load_config(config_path);
      fsat::RunOptions opts;
      opts.workers = workers;
      opts.resume = resume;
      if (!output_dir.empty()) opts.output_dir = output_dir;
      if (!quiet) opts.log = [](const std::string& m) { std::cerr << m << '\n'; };
      const fsat::ExperimentResult r = fsat::run_experiment(cfg, opts);
      const auto dir = opts.output_dir.value_or(cfg.output_dir);
      std::cout << "ok results=" << (dir / "results.csv").string() << " rows=" << r.rows.size() << '\n';
      for (const auto& n : r.notes) std::cout << "note " << n << '\n';
      return 0;
    }
    if (*figures) {
      const fsat::ExperimentResult r = fsat::load_result(result_path);
      const std::filesystem::path dir =
          output_dir.empty() ? std::filesystem::path(result_path).parent_path() / "figures" : std::filesystem::path(output_dir);
      const fsat::FigureReport rep = fsat::emit_figures(r, dir);
      for (const auto& p : rep.written) std::cout << "wrote " << p.string() << '\n';
      for (const auto& n : rep.notes) std::cout << "note " << n << '\n';
      return 0;
    }
  } catch (const fsat::Error& e) {
    return fail(fsat::to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail("Internal", e.what());
  }
  return 0;
}
