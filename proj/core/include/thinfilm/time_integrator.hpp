#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thinfilm/diagnostics.hpp"
#include "thinfilm/galerkin_rhs.hpp"

namespace thinfilm {

struct IntegratorControls {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double dt_init = 1e-6;
  double dt_min = 1e-13;
  // Maximum tolerated per-step energy increase. Negative means "resolve at
  // start of integration" to 1e-10 * max(1, energy(initial state)).
  double energy_slack = -1.0;
  double t_final = 0.0;
  double snapshot_every = 0.0;  // <= 0: record only the first and last states

  void validate() const;
};

enum class RejectReason { none, error_norm, energy_rise };

struct StepResult {
  bool accepted = false;
  GalerkinState state;       // new state if accepted, input state otherwise
  double dt_used = 0;
  double dt_next = 0;
  double err_est = 0;        // scaled norm; accepted implies err_est <= 1
  double err_raw = 0;        // max_i |y5_i - y4_i|
  double energy_after = 0;   // energy of `state`
  RejectReason reject = RejectReason::none;
};

struct Snapshot {
  double t = 0;
  std::vector<double> F, G;
  double dt_next = 0;  // controller state right after this snapshot was taken
};

enum class RunStatus { completed, stiffness_abort };

/// Per-accepted-step scalar series (entry 0 is the initial state).
struct StepSeries {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> dissipation;  // filled if RecordingOptions::dissipation
  int flux_modes = -1;              // j range recorded in dF/dG, -1 = none
  std::vector<double> dF, dG;       // flattened [step * (flux_modes+1) + j]
};

struct TrajectoryRecord {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRow> rows;  // at snapshot cadence
  StepSeries series;
  RunStatus status = RunStatus::completed;
  std::string abort_reason;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  std::size_t rhs_evals = 0;
  double final_dt_next = 0;  // unclamped controller state, for checkpoint/resume
  GalerkinState final_state;
};

struct RecordingOptions {
  bool rows = true;          // diagnostics rows at snapshot cadence
  bool dissipation = false;  // per-step dissipation samples
  int flux_modes = -1;       // per-step flux projections dF_j, dG_j for j <= this
};

/// Replacement vector field for validation harnesses; the default is the
/// assembled Galerkin right-hand side.
using GalerkinRhsFn = std::function<void(const GalerkinState&, RhsOutput&)>;

/// Called after every accepted step with the new state and its vector field.
using StepObserver = std::function<void(const GalerkinState&, const RhsOutput&, const StepResult&)>;

/// dt * clamp(0.9 * err^(-1/5), 0.2, 5.0). Constants are fixed, not
/// configurable, so trajectories reproduce across installations.
double adapt_dt(double err_est, double dt);

/// One embedded Dormand-Prince 5(4) trial step. Accepted iff the scaled error
/// norm is <= 1 and the discrete energy rises by at most the slack. The mass
/// coefficients F[0], G[0] never enter the ODE vector, so they are preserved
/// bit-exactly by construction.
StepResult step(const GalerkinState& s, double dt, const SystemParams& p,
                const SpectralBasis& basis, const IntegratorControls& c,
                const GalerkinRhsFn& rhs_override = {});

/// Advances to t_final (or stiffness abort). Deterministic: identical inputs
/// produce bit-identical trajectories. A single integration is sequential;
/// independent integrations may run in parallel threads.
TrajectoryRecord integrate(const GalerkinState& initial, const SystemParams& p,
                           const SpectralBasis& basis, const IntegratorControls& c,
                           const RecordingOptions& rec = {},
                           const std::vector<StepObserver>& observers = {},
                           const GalerkinRhsFn& rhs_override = {});

/// Generic embedded Dormand-Prince 5(4) core over a flat state vector,
/// exposed so scalar validation problems can drive the exact same tableau.
class Rk54Stepper {
public:
  using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

  Rk54Stepper(std::size_t dim, Rhs rhs);

  struct Attempt {
    double err_scaled = 0;
    double err_raw = 0;
  };

  // Trial step from (t, y) with size dt; writes the fifth-order result to
  // y_new. Uses the cached FSAL derivative when `have_fsal`. A non-finite
  // stage past the first, or a non-finite result, reports an infinite error
  // so the controller rejects and shrinks; a non-finite right-hand side at
  // the step's base state propagates as NumericError.
  Attempt attempt(double t, std::span<const double> y, double dt, double rel_tol,
                  double abs_tol, std::span<double> y_new, bool have_fsal = false);

  // Evaluate and cache the derivative at (t, y) as the first stage.
  void prime(double t, std::span<const double> y);

  // Promote the last stage to the first stage of the next step.
  void accept_fsal();

  std::size_t evals() const { return evals_; }

private:
  std::size_t dim_;
  Rhs rhs_;
  std::size_t evals_ = 0;
  std::vector<double> k_[7];
  std::vector<double> scratch_;
};

}  // namespace thinfilm
