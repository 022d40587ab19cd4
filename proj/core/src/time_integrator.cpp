#include "thinfilm/time_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,      500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

void IntegratorControls::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ParameterError("tolerances must be positive");
  if (!(dt_min > 0.0) || !(dt_init > 0.0) || dt_min > dt_init) {
    throw ParameterError("require 0 < dt_min <= dt_init");
  }
  if (!std::isfinite(t_final) || t_final < 0.0) {
    throw ParameterError("t_final must be finite and non-negative");
  }
}

double adapt_dt(double err_est, double dt) {
  if (!(err_est >= 0.0)) throw UsageError("error estimate must be non-negative");
  double factor = 5.0;
  if (err_est > 0.0) factor = std::clamp(0.9 * std::pow(err_est, -0.2), 0.2, 5.0);
  return dt * factor;
}

Rk54Stepper::Rk54Stepper(std::size_t dim, Rhs rhs) : dim_(dim), rhs_(std::move(rhs)) {
  for (auto& k : k_) k.resize(dim_);
  scratch_.resize(dim_);
}

void Rk54Stepper::prime(double t, std::span<const double> y) {
  rhs_(t, y, k_[0]);
  ++evals_;
}

void Rk54Stepper::accept_fsal() { std::swap(k_[0], k_[6]); }

Rk54Stepper::Attempt Rk54Stepper::attempt(double t, std::span<const double> y, double dt,
                                          double rel_tol, double abs_tol,
                                          std::span<double> y_new, bool have_fsal) {
  if (y.size() != dim_ || y_new.size() != dim_) throw UsageError("state dimension mismatch");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("step size must be positive and finite");

  if (!have_fsal) prime(t, y);
  for (int stage = 1; stage < 7; ++stage) {
    const double* a = kA[stage];
    for (std::size_t i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < stage; ++j) acc += a[j] * k_[j][i];
      scratch_[i] = y[i] + dt * acc;
    }
    try {
      rhs_(t + kC[stage] * dt, scratch_, k_[stage]);
    } catch (const NumericError&) {
      // Blow-up at a trial position: report as an infinitely bad step so the
      // controller shrinks, rather than aborting the whole integration.
      return {kInf, kInf};
    }
    ++evals_;
  }

  double err_raw = 0.0;
  double err_scaled = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double y5 = 0.0, e = 0.0;
    for (int j = 0; j < 7; ++j) {
      y5 += kB5[j] * k_[j][i];
      e += (kB5[j] - kB4[j]) * k_[j][i];
    }
    y5 = y[i] + dt * y5;
    e *= dt;
    y_new[i] = y5;
    const double ea = std::abs(e);
    const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5));
    err_raw = std::max(err_raw, ea);
    err_scaled = std::max(err_scaled, ea / scale);
    if (!std::isfinite(y5) || !std::isfinite(e)) return {kInf, kInf};
  }
  return {err_scaled, err_raw};
}

namespace {

// Adapts the Galerkin system to the flat ODE vector [F_1..F_n, G_1..G_n].
// The mass coefficients F[0], G[0] never enter the vector.
struct GalerkinOde {
  const SpectralBasis& basis;
  const SystemParams& params;
  const GalerkinRhsFn& override_fn;
  GalerkinRhs rhs;
  GalerkinRhs::Workspace ws;
  GalerkinState scratch;
  RhsOutput rout;
  int n;

  GalerkinOde(const SpectralBasis& b, const SystemParams& p, const GalerkinRhsFn& ov,
              const GalerkinState& proto)
      : basis(b), params(p), override_fn(ov), rhs(b, p), scratch(proto), n(b.max_mode()) {}

  void unpack(std::span<const double> y, double t) {
    scratch.t = t;
    for (int k = 1; k <= n; ++k) {
      scratch.F[k] = y[k - 1];
      scratch.G[k] = y[n + k - 1];
    }
  }

  void operator()(double t, std::span<const double> y, std::span<double> dydt) {
    unpack(y, t);
    if (override_fn) {
      override_fn(scratch, rout);
      if (rout.dF.size() != scratch.F.size() || rout.dG.size() != scratch.G.size()) {
        throw UsageError("replacement vector field produced wrong dimensions");
      }
    } else {
      rhs.assemble_psi(scratch, ws, rout);
    }
    for (int k = 1; k <= n; ++k) {
      dydt[k - 1] = rout.dF[k];
      dydt[n + k - 1] = rout.dG[k];
    }
  }
};

void pack(const GalerkinState& s, std::vector<double>& y) {
  const int n = s.max_mode();
  y.resize(2 * static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    y[k - 1] = s.F[k];
    y[n + k - 1] = s.G[k];
  }
}

void unpack_into(std::span<const double> y, double t, GalerkinState& s) {
  const int n = s.max_mode();
  s.t = t;
  for (int k = 1; k <= n; ++k) {
    s.F[k] = y[k - 1];
    s.G[k] = y[n + k - 1];
  }
}

void check_shapes(const GalerkinState& s, const SpectralBasis& basis) {
  if (s.F.size() != static_cast<std::size_t>(basis.size()) || s.G.size() != s.F.size()) {
    throw UsageError("state coefficient vectors do not match the basis truncation");
  }
  for (std::size_t i = 0; i < s.F.size(); ++i) {
    if (!std::isfinite(s.F[i])) throw NumericError("F", i);
    if (!std::isfinite(s.G[i])) throw NumericError("G", i);
  }
}

double resolve_slack(const IntegratorControls& c, double initial_energy) {
  if (c.energy_slack >= 0.0) return c.energy_slack;
  return 1e-10 * std::max(1.0, initial_energy);
}

}  // namespace

StepResult step(const GalerkinState& s, double dt, const SystemParams& p,
                const SpectralBasis& basis, const IntegratorControls& c,
                const GalerkinRhsFn& rhs_override) {
  p.validate();
  c.validate();
  check_shapes(s, basis);
  if (!(dt > 0.0)) throw UsageError("step size must be positive");

  GalerkinOde ode(basis, p, rhs_override, s);
  const int n = basis.max_mode();
  Rk54Stepper stepper(2 * static_cast<std::size_t>(n),
                      [&ode](double t, std::span<const double> y, std::span<double> dydt) {
                        ode(t, y, dydt);
                      });
  std::vector<double> y, y_new(2 * static_cast<std::size_t>(n));
  pack(s, y);

  const double e_old = energy(s, p);
  const double slack = resolve_slack(c, e_old);
  const auto att = stepper.attempt(s.t, y, dt, c.rel_tol, c.abs_tol, y_new, false);

  StepResult r;
  r.dt_used = dt;
  r.err_est = att.err_scaled;
  r.err_raw = att.err_raw;

  const bool err_ok = att.err_scaled <= 1.0;
  GalerkinState trial = s;
  double e_new = e_old;
  if (err_ok) {
    unpack_into(y_new, s.t + dt, trial);
    e_new = energy(trial, p);
  }
  if (err_ok && e_new <= e_old + slack) {
    r.accepted = true;
    r.state = std::move(trial);
    r.energy_after = e_new;
    r.dt_next = adapt_dt(att.err_scaled, dt);
  } else {
    r.accepted = false;
    r.state = s;
    r.energy_after = e_old;
    r.reject = err_ok ? RejectReason::energy_rise : RejectReason::error_norm;
    r.dt_next = err_ok ? std::min(adapt_dt(att.err_scaled, dt), 0.5 * dt)
                       : adapt_dt(att.err_scaled, dt);
  }
  return r;
}

TrajectoryRecord integrate(const GalerkinState& initial, const SystemParams& p,
                           const SpectralBasis& basis, const IntegratorControls& c,
                           const RecordingOptions& rec, const std::vector<StepObserver>& observers,
                           const GalerkinRhsFn& rhs_override) {
  p.validate();
  c.validate();
  check_shapes(initial, basis);
  if (c.t_final < initial.t) throw UsageError("t_final precedes the initial time");

  const int n = basis.max_mode();
  GalerkinOde ode(basis, p, rhs_override, initial);
  Rk54Stepper stepper(2 * static_cast<std::size_t>(n),
                      [&ode](double t, std::span<const double> y, std::span<double> dydt) {
                        ode(t, y, dydt);
                      });

  TrajectoryRecord record;
  record.series.flux_modes = std::min(rec.flux_modes, n);

  std::vector<double> y, y_new(2 * static_cast<std::size_t>(n));
  pack(initial, y);
  GalerkinState state = initial;
  GalerkinState trial = initial;

  double t = initial.t;
  const double t_end = c.t_final;
  const double t_scale = std::max({1.0, std::abs(t), std::abs(t_end)});
  double e_now = energy(state, p);
  const double slack = resolve_slack(c, e_now);

  const double cadence = c.snapshot_every > 0.0 ? c.snapshot_every : kInf;
  double next_snap = t + cadence;

  stepper.prime(t, y);  // also provides the vector field at the initial state

  const auto push_series = [&](const GalerkinState& st, double e) {
    record.series.t.push_back(st.t);
    record.series.energy.push_back(e);
    if (rec.dissipation) record.series.dissipation.push_back(dissipation(st, p, basis));
    const int fm = record.series.flux_modes;
    if (fm >= 0) {
      for (int j = 0; j <= fm; ++j) record.series.dF.push_back(ode.rout.dF[j]);
      for (int j = 0; j <= fm; ++j) record.series.dG.push_back(ode.rout.dG[j]);
    }
  };
  const auto push_snapshot = [&](const GalerkinState& st, double dt_next) {
    record.snapshots.push_back({st.t, st.F, st.G, dt_next});
    if (rec.rows) record.rows.push_back(diagnostics_row(st, p, basis, &ode.rout));
  };

  push_series(state, e_now);
  push_snapshot(state, c.dt_init);

  double dt_ctrl = c.dt_init;
  while (t_end - t > 1e-14 * t_scale) {
    double dt = dt_ctrl;
    bool last = false;
    if (t + dt >= t_end) {
      dt = t_end - t;
      last = true;
    }

    const auto att = stepper.attempt(t, y, dt, c.rel_tol, c.abs_tol, y_new, true);
    const bool err_ok = att.err_scaled <= 1.0;
    double e_new = 0.0;
    bool energy_ok = false;
    if (err_ok) {
      unpack_into(y_new, last ? t_end : t + dt, trial);
      e_new = energy(trial, p);
      energy_ok = e_new <= e_now + slack;
    }

    if (err_ok && energy_ok) {
      ++record.steps_accepted;
      std::swap(y, y_new);
      std::swap(state, trial);
      t = state.t;
      e_now = e_new;
      stepper.accept_fsal();  // k7 is the vector field at the new state
      dt_ctrl = adapt_dt(att.err_scaled, dt);

      push_series(state, e_now);
      if (!observers.empty()) {
        StepResult sr;
        sr.accepted = true;
        sr.state = state;
        sr.dt_used = dt;
        sr.dt_next = dt_ctrl;
        sr.err_est = att.err_scaled;
        sr.err_raw = att.err_raw;
        sr.energy_after = e_now;
        for (const auto& obs : observers) obs(state, ode.rout, sr);
      }
      if (t + 1e-12 * t_scale >= next_snap) {
        push_snapshot(state, dt_ctrl);
        while (next_snap <= t + 1e-12 * t_scale) next_snap += cadence;
      }
    } else {
      ++record.steps_rejected;
      dt_ctrl = err_ok ? std::min(adapt_dt(att.err_scaled, dt), 0.5 * dt)
                       : adapt_dt(att.err_scaled, dt);
      if (dt_ctrl < c.dt_min) {
        record.status = RunStatus::stiffness_abort;
        record.abort_reason = "step size " + std::to_string(dt_ctrl) + " fell below dt_min at t = " +
                              std::to_string(t);
        break;
      }
    }
  }

  if (record.snapshots.empty() || record.snapshots.back().t != t) {
    push_snapshot(state, dt_ctrl);
  }
  record.final_state = state;
  record.final_dt_next = dt_ctrl;
  record.rhs_evals = stepper.evals();
  return record;
}

}  // namespace thinfilm
