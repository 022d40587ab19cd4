#include "thinfilm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thinfilm/errors.hpp"
#include "thinfilm/time_integrator.hpp"

namespace thinfilm {

namespace {

double mode_eigenvalue(int k, double L) {
  const double omega = k * std::numbers::pi / L;
  return omega * omega;
}

}  // namespace

double energy(const GalerkinState& s, const SystemParams& p) {
  if (s.F.size() != s.G.size()) throw UsageError("F and G must have equal length");
  double acc = 0.0;
  for (int k = 1; k < static_cast<int>(s.F.size()); ++k) {
    const double sum = s.F[k] + s.G[k];
    acc += mode_eigenvalue(k, p.L) * (s.F[k] * s.F[k] + p.R * sum * sum);
  }
  return 0.5 * acc;
}

void energy_gradient(const GalerkinState& s, const SystemParams& p, std::span<double> dF,
                     std::span<double> dG) {
  const std::size_t m = s.F.size();
  if (s.G.size() != m || dF.size() != m || dG.size() != m) {
    throw UsageError("gradient spans must match the coefficient length");
  }
  dF[0] = dG[0] = 0.0;
  for (int k = 1; k < static_cast<int>(m); ++k) {
    const double lam = mode_eigenvalue(k, p.L);
    dF[k] = lam * ((1.0 + p.R) * s.F[k] + p.R * s.G[k]);
    dG[k] = lam * p.R * (s.F[k] + s.G[k]);
  }
}

double dissipation(const GalerkinState& s, const SystemParams& p, const SpectralBasis& basis) {
  GalerkinRhs rhs(basis, p);
  const auto j = rhs.dissipation_fluxes(s);
  const auto& w = basis.grid().weights;
  double acc = 0.0;
  const double c_g = p.mu * p.R * p.R;
  const double c_fg = 0.75 * p.R * p.R;
  for (std::size_t q = 0; q < w.size(); ++q) {
    acc += w[q] * (c_g * j.j_g[q] * j.j_g[q] + c_fg * j.j_fg[q] * j.j_fg[q] + j.j_f[q] * j.j_f[q]);
  }
  return acc;
}

std::pair<double, double> negative_part(const GalerkinState& s, const MollifierFamily& chi,
                                        const SpectralBasis& basis) {
  const auto f = basis.synthesize(s.F, 0);
  const auto g = basis.synthesize(s.G, 0);
  const auto& w = basis.grid().weights;
  double cf = 0.0, cg = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    cf += w[q] * chi(f[q]);
    cg += w[q] * chi(g[q]);
  }
  return {cf, cg};
}

PositivityMasks positivity_sets(const GalerkinState& s, double threshold,
                                const SpectralBasis& basis, int output_points) {
  if (threshold < 0.0) throw ParameterError("positivity threshold must be non-negative");
  const auto f = basis.sample_uniform(s.F, output_points);
  const auto g = basis.sample_uniform(s.G, output_points);
  PositivityMasks masks;
  masks.f.resize(output_points);
  masks.g.resize(output_points);
  for (int i = 0; i < output_points; ++i) {
    masks.f[i] = f[i] > threshold ? 1 : 0;
    masks.g[i] = g[i] > threshold ? 1 : 0;
  }
  return masks;
}

DiagnosticsRow diagnostics_row(const GalerkinState& s, const SystemParams& p,
                               const SpectralBasis& basis, const RhsOutput* rhs_at_s) {
  DiagnosticsRow row;
  row.t = s.t;
  row.mass_f = std::sqrt(p.L) * s.F[0];
  row.mass_g = std::sqrt(p.L) * s.G[0];
  row.energy = energy(s, p);

  GalerkinRhs rhs(basis, p);
  const auto j = rhs.dissipation_fluxes(s);
  const auto& w = basis.grid().weights;
  const double c_g = p.mu * p.R * p.R;
  const double c_fg = 0.75 * p.R * p.R;
  double d = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    d += w[q] * (c_g * j.j_g[q] * j.j_g[q] + c_fg * j.j_fg[q] * j.j_fg[q] + j.j_f[q] * j.j_f[q]);
  }
  row.dissipation = d;

  const auto f = basis.synthesize(s.F, 0);
  const auto g = basis.synthesize(s.G, 0);
  row.min_f = *std::min_element(f.begin(), f.end());
  row.min_g = *std::min_element(g.begin(), g.end());

  const MollifierFamily chi(std::sqrt(p.eps));
  double cf = 0.0, cg = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    cf += w[q] * chi(f[q]);
    cg += w[q] * chi(g[q]);
  }
  row.chi_f = cf;
  row.chi_g = cg;

  RhsOutput local;
  if (rhs_at_s == nullptr) {
    local = rhs.assemble_psi(s);
    rhs_at_s = &local;
  }
  std::vector<double> gf(s.F.size()), gg(s.G.size());
  energy_gradient(s, p, gf, gg);
  double de = 0.0;
  for (std::size_t k = 0; k < s.F.size(); ++k) {
    de += gf[k] * rhs_at_s->dF[k] + gg[k] * rhs_at_s->dG[k];
  }
  row.dE_dt_residual = std::abs(de + d) / std::max(d, 1e-14);
  return row;
}

double integrate_time_series(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size()) throw UsageError("time series lengths differ");
  const std::size_t m = t.size();
  if (m < 2) return 0.0;
  double acc = 0.0;
  std::size_t i = 0;
  // quadratic through consecutive interval pairs, trapezoid on a leftover
  for (; i + 2 < m; i += 2) {
    const double h1 = t[i + 1] - t[i];
    const double h2 = t[i + 2] - t[i + 1];
    const double H = h1 + h2;
    acc += H / 6.0 * ((2.0 - h2 / h1) * v[i] + H * H / (h1 * h2) * v[i + 1] +
                      (2.0 - h1 / h2) * v[i + 2]);
  }
  if (i + 1 < m) acc += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
  return acc;
}

double weak_residual(const TrajectoryRecord& record, int mode, bool for_g) {
  const auto& series = record.series;
  if (mode < 0) throw UsageError("mode index must be non-negative");
  if (series.flux_modes < mode) {
    throw UsageError("trajectory was recorded without flux projections for this mode");
  }
  if (record.snapshots.empty()) throw UsageError("trajectory has no snapshots");
  const std::size_t stride = static_cast<std::size_t>(series.flux_modes) + 1;
  const std::size_t steps = series.t.size();
  std::vector<double> v(steps);
  const auto& flat = for_g ? series.dG : series.dF;
  for (std::size_t i = 0; i < steps; ++i) v[i] = flat[i * stride + mode];
  const double quad = integrate_time_series(series.t, v);
  const auto& first = for_g ? record.snapshots.front().G : record.snapshots.front().F;
  const auto& last = for_g ? record.final_state.G : record.final_state.F;
  return std::abs((last[mode] - first[mode]) - quad);
}

}  // namespace thinfilm
