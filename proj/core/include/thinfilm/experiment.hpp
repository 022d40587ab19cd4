#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinfilm/checkpoint.hpp"
#include "thinfilm/scenario.hpp"
#include "thinfilm/time_integrator.hpp"

namespace thinfilm {

// Exit codes shared by the library drivers and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNegativeData = 3;
inline constexpr int kExitStiffness = 4;
inline constexpr int kExitNumeric = 5;

struct SimulateOutcome {
  int exit_code = kExitOk;
  std::string output_dir;
  TrajectoryRecord record;
  GalerkinState initial;
};

/// Runs one scenario and writes diagnostics.csv, per-snapshot profile files,
/// the run manifest, and a final checkpoint into the output directory.
/// On stiffness abort the partial outputs are retained and the exit code is
/// kExitStiffness. Config/data/numeric failures propagate as exceptions.
SimulateOutcome run_simulate(const ScenarioConfig& cfg,
                             const CheckpointData* resume = nullptr,
                             bool verbose = false,
                             const RecordingOptions* rec_override = nullptr);

struct SweepSpec {
  enum class Variable { eps, modes };
  Variable variable = Variable::eps;
  std::vector<double> values;  // strictly monotone
  ScenarioConfig base;
  std::string summary_name;

  static SweepSpec from_file(const std::string& path,
                             const std::optional<std::string>& output_override = {});
};

/// One row per epsilon value with the final diagnostics and the scalings
/// chi_f / eps and chi_g / sqrt(eps). Sub-runs are independent and may run on
/// a worker pool; a failed sub-run is recorded in its row and the sweep
/// continues. Returns the worst exit code encountered.
int run_sweep_eps(const SweepSpec& spec, int threads = 1, bool verbose = false);

/// For consecutive mode counts n < n', reports the max-norm difference of the
/// final 256-point profiles and of the shared coefficients.
int run_converge_modes(const SweepSpec& spec, int threads = 1, bool verbose = false);

// --- output helpers ----------------------------------------------------

inline constexpr const char* kDiagnosticsHeader =
    "t,mass_f,mass_g,energy,dissipation,min_f,min_g,chi_f,chi_g,dE_dt_residual";

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows,
                           const std::string& manifest_hash);

void write_snapshot_csv(const std::string& path, const SpectralBasis& basis,
                        const Snapshot& snap, const std::string& manifest_hash,
                        int points = 256);

void write_manifest(const std::string& path, const ScenarioConfig& cfg);

}  // namespace thinfilm
