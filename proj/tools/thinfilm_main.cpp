// Command-line front end for the two-layer film simulator: single runs,
// parameter sweeps, mode-convergence studies, plotting, checkpoint tools.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thinfilm/checkpoint.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/experiment.hpp"
#include "thinfilm/scenario.hpp"
#include "thinfilm/svg_plot.hpp"
#include "thinfilm/version.hpp"

namespace fs = std::filesystem;
using namespace thinfilm;

namespace {

// Precedence: --output-dir, then [output] dir from the config, then
// $THINFILM_OUTPUT_ROOT/<config stem>, then ./<config stem>.out.
std::string resolve_output_dir(const std::string& flag_value, const std::string& config_value,
                               const std::string& config_path) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  const std::string stem = fs::path(config_path).stem().string();
  if (const char* root = std::getenv("THINFILM_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
    return (fs::path(root) / stem).string();
  }
  return stem + ".out";
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InitialDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNegativeData;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thinfilm: spectral simulator for a coupled two-layer film system"};
  app.set_version_flag("--version", std::string(kVersion));
  app.fallthrough();  // global flags may follow the subcommand

  std::string output_dir;
  int threads = 1;
  bool verbose = false;
  app.add_option("--output-dir", output_dir, "Override the output directory");
  app.add_option("--threads", threads, "Worker threads for sweep sub-runs")->default_val(1);
  app.add_flag("--verbose", verbose, "Progress logging to stderr");

  std::string sim_config, resume_path;
  auto* sim = app.add_subcommand("simulate", "Integrate one configured scenario");
  sim->add_option("config", sim_config, "Scenario configuration file")->required();
  sim->add_option("--resume", resume_path, "Continue from a checkpoint file");

  std::string sweep_spec_path;
  auto* sweep = app.add_subcommand("sweep-eps", "Run the scenario across an eps list");
  sweep->add_option("spec", sweep_spec_path, "Sweep specification file")->required();

  std::string conv_spec_path;
  auto* conv = app.add_subcommand("converge-modes", "Self-convergence study across mode counts");
  conv->add_option("spec", conv_spec_path, "Study specification file")->required();

  std::string plot_csv, plot_spec_path;
  auto* plot = app.add_subcommand("plot", "Render a CSV time series as an SVG chart");
  plot->add_option("csv", plot_csv, "Input CSV file")->required();
  plot->add_option("plotspec", plot_spec_path, "Plot specification file")->required();

  auto* ckpt = app.add_subcommand("checkpoint", "Checkpoint utilities");
  std::string ckpt_path;
  auto* ckpt_show = ckpt->add_subcommand("show", "Print checkpoint header fields");
  ckpt_show->add_option("path", ckpt_path, "Checkpoint file")->required();

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (sim->parsed()) {
    return run_guarded([&] {
      ScenarioConfig cfg = ScenarioConfig::from_file(sim_config);
      cfg.output_dir = resolve_output_dir(output_dir, cfg.output_dir, sim_config);
      std::optional<CheckpointData> resume;
      if (!resume_path.empty()) resume = load_checkpoint(resume_path);
      const auto outcome = run_simulate(cfg, resume ? &*resume : nullptr, verbose);
      if (outcome.exit_code == kExitOk) {
        std::cout << "wrote " << outcome.output_dir << "\n";
      } else {
        std::cerr << "stiffness abort: " << outcome.record.abort_reason << " (partial outputs in "
                  << outcome.output_dir << ")\n";
      }
      return outcome.exit_code;
    });
  }

  if (sweep->parsed()) {
    return run_guarded([&] {
      SweepSpec spec = SweepSpec::from_file(sweep_spec_path);
      spec.base.output_dir =
          resolve_output_dir(output_dir, spec.base.output_dir, sweep_spec_path);
      if (spec.variable != SweepSpec::Variable::eps) {
        throw ConfigError(sweep_spec_path + ": sweep-eps needs sweep.variable = eps");
      }
      const int code = run_sweep_eps(spec, threads, verbose);
      std::cout << "wrote " << spec.base.output_dir << "/" << spec.summary_name << "\n";
      return code;
    });
  }

  if (conv->parsed()) {
    return run_guarded([&] {
      SweepSpec spec = SweepSpec::from_file(conv_spec_path);
      spec.base.output_dir = resolve_output_dir(output_dir, spec.base.output_dir, conv_spec_path);
      if (spec.variable != SweepSpec::Variable::modes) {
        throw ConfigError(conv_spec_path + ": converge-modes needs sweep.variable = modes");
      }
      const int code = run_converge_modes(spec, threads, verbose);
      std::cout << "wrote " << spec.base.output_dir << "/" << spec.summary_name << "\n";
      return code;
    });
  }

  if (plot->parsed()) {
    return run_guarded([&] {
      PlotSpec spec = PlotSpec::from_file(plot_spec_path);
      if (!output_dir.empty() && !spec.output.empty()) {
        spec.output = (fs::path(output_dir) / fs::path(spec.output).filename()).string();
      }
      write_plot(plot_csv, spec);
      std::cout << "wrote " << (spec.output.empty() ? plot_csv + ".svg" : spec.output) << "\n";
      return kExitOk;
    });
  }

  if (ckpt_show->parsed()) {
    return run_guarded([&] {
      const CheckpointData data = load_checkpoint(ckpt_path);
      std::cout << "format_version = " << data.format_version << "\n"
                << "n = " << data.n << "\n"
                << "L = " << format_full(data.L) << "\n"
                << "eps = " << format_full(data.eps) << "\n"
                << "R = " << format_full(data.R) << "\n"
                << "mu = " << format_full(data.mu) << "\n"
                << "t = " << format_full(data.t) << "\n"
                << "dt_next = " << format_full(data.dt_next) << "\n"
                << "energy_slack = " << format_full(data.energy_slack) << "\n"
                << "manifest = " << (data.manifest.empty() ? "-" : data.manifest) << "\n"
                << "coefficients = " << 2 * (data.n + 1) << "\n";
      return kExitOk;
    });
  }

  std::cerr << "no subcommand selected\n";
  return kExitConfig;
}
