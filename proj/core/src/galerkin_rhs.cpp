#include "thinfilm/galerkin_rhs.hpp"
#include <algorithm>

#include <cmath>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

void check_finite(const std::vector<double>& v, const char* field) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NumericError(field, i);
  }
}

// Two-lane dual dot product: deterministic fixed-order reduction with enough
// instruction-level parallelism for the hot projection loop.
void dot2(const double* __restrict w, const double* __restrict hf, const double* __restrict hg,
          std::size_t m, double& out_f, double& out_g) {
  double s0 = 0.0, s1 = 0.0, r0 = 0.0, r1 = 0.0;
  std::size_t q = 0;
  for (; q + 2 <= m; q += 2) {
    s0 += w[q] * hf[q];
    s1 += w[q + 1] * hf[q + 1];
    r0 += w[q] * hg[q];
    r1 += w[q + 1] * hg[q + 1];
  }
  for (; q < m; ++q) {
    s0 += w[q] * hf[q];
    r0 += w[q] * hg[q];
  }
  out_f = s0 + s1;
  out_g = r0 + r1;
}

}  // namespace

void SystemParams::validate() const {
  if (!(R > 0.0)) throw ParameterError("surface-tension ratio R must be positive");
  if (!(mu > 0.0)) throw ParameterError("viscosity ratio mu must be positive");
  if (!(L > 0.0)) throw ParameterError("interval length L must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in (0, 1]");
}

GalerkinRhs::GalerkinRhs(const SpectralBasis& basis, const SystemParams& params)
    : basis_(&basis), params_(params) {
  params_.validate();
  if (std::abs(params_.L - basis.length()) > 1e-12 * params_.L) {
    throw UsageError("basis interval length disagrees with system parameters");
  }
}

void GalerkinRhs::check_state(const GalerkinState& s) const {
  const std::size_t want = static_cast<std::size_t>(basis_->size());
  if (s.F.size() != want || s.G.size() != want) {
    throw UsageError("state coefficient vectors do not match the basis truncation");
  }
  check_finite(s.F, "F");
  check_finite(s.G, "G");
}

void GalerkinRhs::nodal_fields(const GalerkinState& s, Workspace& ws) const {
  const std::size_t nodes = basis_->grid().nodes.size();
  const int n = basis_->max_mode();
  ws.f.resize(nodes);
  ws.g.resize(nodes);
  ws.d3f.resize(nodes);
  ws.d3g.resize(nodes);
  ws.hf.resize(nodes);
  ws.hg.resize(nodes);

  double* __restrict f = ws.f.data();
  double* __restrict g = ws.g.data();
  double* __restrict d3f = ws.d3f.data();
  double* __restrict d3g = ws.d3g.data();
  const double* __restrict tab0 = basis_->mode_table(0, 0);
  const double* __restrict tab3 = basis_->mode_table(3, 0);
  // four modes per pass over the node tables; the first pass writes instead
  // of accumulating so no zero-fill of the output arrays is needed
  int k = 0;
  bool first = true;
  for (; k + 4 <= n + 1; k += 4) {
    const double F0 = s.F[k], F1 = s.F[k + 1], F2 = s.F[k + 2], F3 = s.F[k + 3];
    const double G0 = s.G[k], G1 = s.G[k + 1], G2 = s.G[k + 2], G3 = s.G[k + 3];
    const double* __restrict a0 = tab0 + static_cast<std::size_t>(k) * nodes;
    const double* __restrict b0 = a0 + nodes;
    const double* __restrict c0 = b0 + nodes;
    const double* __restrict e0 = c0 + nodes;
    const double* __restrict a3 = tab3 + static_cast<std::size_t>(k) * nodes;
    const double* __restrict b3 = a3 + nodes;
    const double* __restrict c3 = b3 + nodes;
    const double* __restrict e3 = c3 + nodes;
    if (first) {
      for (std::size_t q = 0; q < nodes; ++q) {
        f[q] = (F0 * a0[q] + F1 * b0[q]) + (F2 * c0[q] + F3 * e0[q]);
        g[q] = (G0 * a0[q] + G1 * b0[q]) + (G2 * c0[q] + G3 * e0[q]);
        d3f[q] = (F0 * a3[q] + F1 * b3[q]) + (F2 * c3[q] + F3 * e3[q]);
        d3g[q] = (G0 * a3[q] + G1 * b3[q]) + (G2 * c3[q] + G3 * e3[q]);
      }
      first = false;
    } else {
      for (std::size_t q = 0; q < nodes; ++q) {
        f[q] += (F0 * a0[q] + F1 * b0[q]) + (F2 * c0[q] + F3 * e0[q]);
        g[q] += (G0 * a0[q] + G1 * b0[q]) + (G2 * c0[q] + G3 * e0[q]);
        d3f[q] += (F0 * a3[q] + F1 * b3[q]) + (F2 * c3[q] + F3 * e3[q]);
        d3g[q] += (G0 * a3[q] + G1 * b3[q]) + (G2 * c3[q] + G3 * e3[q]);
      }
    }
  }
  if (first) {
    std::fill_n(f, nodes, 0.0);
    std::fill_n(g, nodes, 0.0);
    std::fill_n(d3f, nodes, 0.0);
    std::fill_n(d3g, nodes, 0.0);
  }
  for (; k <= n; ++k) {
    const double Fk = s.F[k];
    const double Gk = s.G[k];
    if (Fk == 0.0 && Gk == 0.0) continue;
    const double* __restrict t0 = tab0 + static_cast<std::size_t>(k) * nodes;
    const double* __restrict t3 = tab3 + static_cast<std::size_t>(k) * nodes;
    for (std::size_t q = 0; q < nodes; ++q) {
      f[q] += Fk * t0[q];
      g[q] += Gk * t0[q];
      d3f[q] += Fk * t3[q];
      d3g[q] += Gk * t3[q];
    }
  }

  const double R = params_.R, mu = params_.mu, eps = params_.eps;
  double* __restrict hf = ws.hf.data();
  double* __restrict hg = ws.hg.data();
  for (std::size_t q = 0; q < nodes; ++q) {
    const double af = eps + (f[q] > 0.0 ? f[q] : 0.0);
    const double ag = eps + (g[q] > 0.0 ? g[q] : 0.0);
    const double af2 = af * af, af3 = af2 * af;
    const double ag2 = ag * ag, ag3 = ag2 * ag;
    const double w = d3f[q] + d3g[q];
    hf[q] = af3 * d3f[q] + 0.5 * R * (2.0 * af3 + 3.0 * af2 * ag) * w;
    hg[q] = 1.5 * af2 * ag * d3f[q] + 0.5 * R * (2.0 * mu * ag3 + 3.0 * af2 * ag + 6.0 * af * ag2) * w;
  }

  // cheap totals probe; located field-by-field only on failure
  double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
  std::size_t q = 0;
  for (; q + 2 <= nodes; q += 2) {
    p0 += f[q] + g[q] + hf[q];
    p1 += d3f[q] + d3g[q] + hg[q];
    p2 += f[q + 1] + g[q + 1] + hf[q + 1];
    p3 += d3f[q + 1] + d3g[q + 1] + hg[q + 1];
  }
  for (; q < nodes; ++q) {
    p0 += f[q] + g[q] + hf[q];
    p1 += d3f[q] + d3g[q] + hg[q];
  }
  if (!std::isfinite((p0 + p1) + (p2 + p3))) {
    check_finite(ws.f, "f");
    check_finite(ws.g, "g");
    check_finite(ws.d3f, "d3f");
    check_finite(ws.d3g, "d3g");
    check_finite(ws.hf, "H_f");
    check_finite(ws.hg, "H_g");
  }
}

void GalerkinRhs::assemble_psi(const GalerkinState& s, Workspace& ws, RhsOutput& out) const {
  check_state(s);
  nodal_fields(s, ws);

  const std::size_t nodes = basis_->grid().nodes.size();
  const int n = basis_->max_mode();
  out.dF.resize(n + 1);
  out.dG.resize(n + 1);
  out.dF[0] = 0.0;  // mass rows are zero by construction, not by quadrature
  out.dG[0] = 0.0;
  for (int j = 1; j <= n; ++j) {
    dot2(basis_->weighted_deriv_table(j), ws.hf.data(), ws.hg.data(), nodes, out.dF[j],
         out.dG[j]);
  }
}

RhsOutput GalerkinRhs::assemble_psi(const GalerkinState& s) const {
  Workspace ws;
  RhsOutput out;
  assemble_psi(s, ws, out);
  return out;
}

std::vector<double> GalerkinRhs::flux_f(const GalerkinState& s) const {
  check_state(s);
  Workspace ws;
  nodal_fields(s, ws);
  return std::move(ws.hf);
}

std::vector<double> GalerkinRhs::flux_g(const GalerkinState& s) const {
  check_state(s);
  Workspace ws;
  nodal_fields(s, ws);
  return std::move(ws.hg);
}

GalerkinRhs::DissipationFields GalerkinRhs::dissipation_fluxes(const GalerkinState& s) const {
  check_state(s);
  Workspace ws;
  nodal_fields(s, ws);
  const std::size_t nodes = basis_->grid().nodes.size();
  DissipationFields out;
  out.j_f.resize(nodes);
  out.j_g.resize(nodes);
  out.j_fg.resize(nodes);
  const double R = params_.R, eps = params_.eps;
  for (std::size_t q = 0; q < nodes; ++q) {
    const double af = eps + (ws.f[q] > 0.0 ? ws.f[q] : 0.0);
    const double ag = eps + (ws.g[q] > 0.0 ? ws.g[q] : 0.0);
    const double saf = std::sqrt(af), sag = std::sqrt(ag);
    const double w = ws.d3f[q] + ws.d3g[q];
    out.j_g[q] = ag * sag * w;
    out.j_fg[q] = saf * ag * w;
    out.j_f[q] = saf * (af * ws.d3f[q] + 0.5 * R * (2.0 * af + 3.0 * ag) * w);
  }
  return out;
}

std::vector<double> GalerkinRhs::flux_g_factored(const GalerkinState& s) const {
  check_state(s);
  Workspace ws;
  nodal_fields(s, ws);
  const DissipationFields j = dissipation_fluxes(s);
  const std::size_t nodes = basis_->grid().nodes.size();
  std::vector<double> out(nodes);
  const double R = params_.R, mu = params_.mu, eps = params_.eps;
  for (std::size_t q = 0; q < nodes; ++q) {
    const double af = eps + (ws.f[q] > 0.0 ? ws.f[q] : 0.0);
    const double ag = eps + (ws.g[q] > 0.0 ? ws.g[q] : 0.0);
    const double saf = std::sqrt(af), sag = std::sqrt(ag);
    out[q] = mu * R * ag * sag * j.j_g[q] + 0.75 * R * saf * ag * j.j_fg[q] +
             1.5 * saf * ag * j.j_f[q];
  }
  return out;
}

}  // namespace thinfilm
