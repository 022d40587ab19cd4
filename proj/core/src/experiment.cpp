#include "thinfilm/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "thinfilm/errors.hpp"

namespace fs = std::filesystem;

namespace thinfilm {

namespace {

std::string snapshot_name(const char* stem, std::size_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu.%s", stem, index, ext);
  return buf;
}

CheckpointData make_checkpoint(const ScenarioConfig& cfg, const Snapshot& snap,
                               double energy_slack) {
  CheckpointData data;
  data.n = static_cast<int>(snap.F.size()) - 1;
  data.L = cfg.params.L;
  data.eps = cfg.params.eps;
  data.R = cfg.params.R;
  data.mu = cfg.params.mu;
  data.t = snap.t;
  data.dt_next = snap.dt_next;
  data.energy_slack = energy_slack;
  data.manifest = cfg.manifest_hash();
  data.F = snap.F;
  data.G = snap.G;
  return data;
}

}  // namespace

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows,
                           const std::string& manifest_hash) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "# manifest " << manifest_hash << "\n";
  out << kDiagnosticsHeader << "\n";
  for (const auto& r : rows) {
    out << format_full(r.t) << ',' << format_full(r.mass_f) << ',' << format_full(r.mass_g) << ','
        << format_full(r.energy) << ',' << format_full(r.dissipation) << ','
        << format_full(r.min_f) << ',' << format_full(r.min_g) << ',' << format_full(r.chi_f)
        << ',' << format_full(r.chi_g) << ',' << format_full(r.dE_dt_residual) << "\n";
  }
}

void write_snapshot_csv(const std::string& path, const SpectralBasis& basis, const Snapshot& snap,
                        const std::string& manifest_hash, int points) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  const auto f = basis.sample_uniform(snap.F, points);
  const auto g = basis.sample_uniform(snap.G, points);
  out << "# manifest " << manifest_hash << "\n";
  out << "# t " << format_full(snap.t) << "\n";
  out << "x,f,g\n";
  const double L = basis.length();
  for (int i = 0; i < points; ++i) {
    const double x = L * static_cast<double>(i) / (points - 1);
    out << format_full(x) << ',' << format_full(f[i]) << ',' << format_full(g[i]) << "\n";
  }
}

void write_manifest(const std::string& path, const ScenarioConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << cfg.canonical_text();
  out << "manifest_hash = " << cfg.manifest_hash() << "\n";
}

SimulateOutcome run_simulate(const ScenarioConfig& cfg, const CheckpointData* resume, bool verbose,
                             const RecordingOptions* rec_override) {
  cfg.params.validate();
  SpectralBasis basis(cfg.params.L, cfg.modes, cfg.resolved_cells());

  IntegratorControls controls = cfg.controls;
  GalerkinState s0;
  if (resume != nullptr) {
    const auto same = [](double a, double b) { return a == b; };
    if (!same(resume->L, cfg.params.L) || !same(resume->eps, cfg.params.eps) ||
        !same(resume->R, cfg.params.R) || !same(resume->mu, cfg.params.mu)) {
      throw ConfigError("checkpoint system parameters disagree with the configuration");
    }
    if (resume->n > cfg.modes) {
      throw ConfigError("checkpoint has more modes than the configuration allows");
    }
    s0 = promote_state(*resume, cfg.modes);
    if (resume->dt_next > 0.0) controls.dt_init = resume->dt_next;
    if (controls.energy_slack < 0.0 && resume->energy_slack >= 0.0) {
      controls.energy_slack = resume->energy_slack;
    }
  } else {
    s0 = initial_state(cfg, basis);
  }
  if (controls.energy_slack < 0.0) {
    controls.energy_slack = 1e-10 * std::max(1.0, energy(s0, cfg.params));
  }

  RecordingOptions rec;
  if (rec_override != nullptr) rec = *rec_override;

  if (verbose) {
    std::clog << "[simulate] n=" << cfg.modes << " cells=" << cfg.resolved_cells()
              << " eps=" << cfg.params.eps << " t: " << s0.t << " -> " << controls.t_final
              << "\n";
  }

  SimulateOutcome outcome;
  outcome.initial = s0;
  outcome.record = integrate(s0, cfg.params, basis, controls, rec);
  outcome.output_dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  outcome.exit_code =
      outcome.record.status == RunStatus::stiffness_abort ? kExitStiffness : kExitOk;

  const fs::path dir(outcome.output_dir);
  fs::create_directories(dir);
  const std::string hash = cfg.manifest_hash();

  write_manifest((dir / "manifest.txt").string(), cfg);
  write_diagnostics_csv((dir / "diagnostics.csv").string(), outcome.record.rows, hash);
  for (std::size_t i = 0; i < outcome.record.snapshots.size(); ++i) {
    const auto& snap = outcome.record.snapshots[i];
    write_snapshot_csv((dir / snapshot_name("snapshot", i, "csv")).string(), basis, snap, hash);
    if (cfg.checkpoint_snapshots) {
      save_checkpoint((dir / snapshot_name("checkpoint", i, "txt")).string(),
                      make_checkpoint(cfg, snap, controls.energy_slack));
    }
  }
  Snapshot final_snap{outcome.record.final_state.t, outcome.record.final_state.F,
                      outcome.record.final_state.G, outcome.record.final_dt_next};
  save_checkpoint((dir / "final.checkpoint").string(),
                  make_checkpoint(cfg, final_snap, controls.energy_slack));

  if (outcome.record.status == RunStatus::stiffness_abort) {
    std::ofstream reason(dir / "abort_reason.txt");
    reason << outcome.record.abort_reason << "\n";
    if (verbose) std::clog << "[simulate] stiffness abort: " << outcome.record.abort_reason << "\n";
  } else if (verbose) {
    std::clog << "[simulate] done: " << outcome.record.steps_accepted << " accepted, "
              << outcome.record.steps_rejected << " rejected steps\n";
  }
  return outcome;
}

SweepSpec SweepSpec::from_file(const std::string& path,
                               const std::optional<std::string>& output_override) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  SweepSpec spec;
  spec.base = ScenarioConfig::from_kv(kv);
  if (output_override) spec.base.output_dir = *output_override;

  const std::string var = kv.get_string("sweep.variable");
  if (var == "eps") {
    spec.variable = Variable::eps;
  } else if (var == "modes") {
    spec.variable = Variable::modes;
  } else {
    throw ConfigError(path + ": sweep.variable must be 'eps' or 'modes'");
  }
  spec.summary_name = kv.get_string("sweep.summary",
                                    spec.variable == Variable::eps ? "sweep_eps.csv"
                                                                   : "converge_modes.csv");

  std::string values = kv.get_string("sweep.values");
  for (auto& c : values) {
    if (c == ',') c = ' ';
  }
  std::istringstream vs(values);
  double v;
  while (vs >> v) spec.values.push_back(v);
  if (spec.values.empty()) throw ConfigError(path + ": sweep.values is empty");

  const bool strict = spec.variable == Variable::eps;
  bool incr = true, decr = true;
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (strict ? spec.values[i] <= spec.values[i - 1] : spec.values[i] < spec.values[i - 1]) {
      incr = false;
    }
    if (strict ? spec.values[i] >= spec.values[i - 1] : spec.values[i] > spec.values[i - 1]) {
      decr = false;
    }
  }
  if (!incr && !decr) {
    throw ConfigError(path + ": sweep.values must be monotone");
  }
  return spec;
}

namespace {

struct SubRun {
  ScenarioConfig cfg;
  SimulateOutcome outcome;
  std::string status = "ok";
  bool have_rows = false;
};

std::string value_tag(double v) {
  std::string tag = format_full(v);
  for (auto& c : tag) {
    if (c == '.' || c == '+' || c == '-') c = '_';
  }
  return tag;
}

void run_subruns(std::vector<SubRun>& runs, int threads, bool verbose) {
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      auto& r = runs[i];
      try {
        r.outcome = run_simulate(r.cfg, nullptr, verbose);
        r.have_rows = !r.outcome.record.rows.empty();
        if (r.outcome.exit_code == kExitStiffness) r.status = "stiffness_abort";
      } catch (const InitialDataError&) {
        r.status = "negative_data";
      } catch (const NumericError&) {
        r.status = "numeric_error";
      } catch (const std::exception&) {
        r.status = "error";
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(runs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
}

int worst_code(const std::vector<SubRun>& runs) {
  int code = kExitOk;
  for (const auto& r : runs) {
    if (r.status == "ok") continue;
    if (r.status == "stiffness_abort") code = std::max(code, kExitStiffness);
    else if (r.status == "negative_data") code = std::max(code, kExitNegativeData);
    else if (r.status == "numeric_error") code = std::max(code, kExitNumeric);
    else code = std::max(code, 1);
  }
  return code;
}

}  // namespace

int run_sweep_eps(const SweepSpec& spec, int threads, bool verbose) {
  if (spec.variable != SweepSpec::Variable::eps) {
    throw UsageError("run_sweep_eps requires sweep.variable = eps");
  }
  const fs::path root(spec.base.output_dir.empty() ? "." : spec.base.output_dir);
  fs::create_directories(root);

  std::vector<SubRun> runs(spec.values.size());
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    runs[i].cfg = spec.base;
    runs[i].cfg.params.eps = spec.values[i];
    runs[i].cfg.output_dir = (root / ("eps_" + value_tag(spec.values[i]))).string();
  }
  run_subruns(runs, threads, verbose);

  std::ofstream out(root / spec.summary_name);
  if (!out) throw ConfigError("cannot write sweep summary");
  out << "# manifest " << spec.base.manifest_hash() << "\n";
  out << "eps,chi_f,chi_g,min_f,min_g,energy,chi_f_over_eps,chi_g_over_sqrt_eps,status\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double eps = spec.values[i];
    const auto& r = runs[i];
    if (r.have_rows) {
      const auto& row = r.outcome.record.rows.back();
      out << format_full(eps) << ',' << format_full(row.chi_f) << ',' << format_full(row.chi_g)
          << ',' << format_full(row.min_f) << ',' << format_full(row.min_g) << ','
          << format_full(row.energy) << ',' << format_full(row.chi_f / eps) << ','
          << format_full(row.chi_g / std::sqrt(eps)) << ',' << r.status << "\n";
    } else {
      out << format_full(eps) << ",nan,nan,nan,nan,nan,nan,nan," << r.status << "\n";
    }
  }
  return worst_code(runs);
}

int run_converge_modes(const SweepSpec& spec, int threads, bool verbose) {
  if (spec.variable != SweepSpec::Variable::modes) {
    throw UsageError("run_converge_modes requires sweep.variable = modes");
  }
  const fs::path root(spec.base.output_dir.empty() ? "." : spec.base.output_dir);
  fs::create_directories(root);

  std::vector<SubRun> runs(spec.values.size());
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const int n = static_cast<int>(spec.values[i]);
    if (n < 1 || spec.values[i] != n) {
      throw ConfigError("converge-modes values must be positive integers");
    }
    runs[i].cfg = spec.base;
    runs[i].cfg.modes = n;
    runs[i].cfg.cells = -1;  // per-run default so the grid scales with n
    runs[i].cfg.output_dir = (root / ("modes_" + std::to_string(n))).string();
  }
  run_subruns(runs, threads, verbose);

  constexpr int kPoints = 256;
  std::ofstream out(root / spec.summary_name);
  if (!out) throw ConfigError("cannot write convergence summary");
  out << "# manifest " << spec.base.manifest_hash() << "\n";
  out << "n_from,n_to,profile_diff,coeff_diff,status\n";
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const auto& a = runs[i];
    const auto& b = runs[i + 1];
    const int na = a.cfg.modes, nb = b.cfg.modes;
    if (a.status != "ok" || b.status != "ok") {
      out << na << ',' << nb << ",nan,nan," << (a.status != "ok" ? a.status : b.status) << "\n";
      continue;
    }
    SpectralBasis basis_a(a.cfg.params.L, na, a.cfg.resolved_cells());
    SpectralBasis basis_b(b.cfg.params.L, nb, b.cfg.resolved_cells());
    const auto& sa = a.outcome.record.final_state;
    const auto& sb = b.outcome.record.final_state;
    const auto fa = basis_a.sample_uniform(sa.F, kPoints);
    const auto ga = basis_a.sample_uniform(sa.G, kPoints);
    const auto fb = basis_b.sample_uniform(sb.F, kPoints);
    const auto gb = basis_b.sample_uniform(sb.G, kPoints);
    double profile_diff = 0.0;
    for (int q = 0; q < kPoints; ++q) {
      profile_diff = std::max(profile_diff, std::abs(fa[q] - fb[q]));
      profile_diff = std::max(profile_diff, std::abs(ga[q] - gb[q]));
    }
    double coeff_diff = 0.0;
    for (int k = 0; k <= std::min(na, nb); ++k) {
      coeff_diff = std::max(coeff_diff, std::abs(sa.F[k] - sb.F[k]));
      coeff_diff = std::max(coeff_diff, std::abs(sa.G[k] - sb.G[k]));
    }
    out << na << ',' << nb << ',' << format_full(profile_diff) << ',' << format_full(coeff_diff)
        << ",ok\n";
  }
  return worst_code(runs);
}

}  // namespace thinfilm
