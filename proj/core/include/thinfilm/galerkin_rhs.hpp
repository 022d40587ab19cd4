#pragma once

#include <span>
#include <vector>

#include "thinfilm/spectral_basis.hpp"

namespace thinfilm {

/// Material constants of the two-layer system plus the regularization level.
struct SystemParams {
  double R = 1.0;     // surface-tension ratio gamma_g / gamma_f
  double mu = 1.0;    // viscosity ratio mu_f / mu_g
  double L = 1.0;     // interval length
  double eps = 0.01;  // regularization parameter, in (0, 1]

  void validate() const;  // throws ParameterError
};

/// Cosine coefficients of the two layer profiles at one time instant.
/// F[0] and G[0] carry the (conserved) masses: mass_f = sqrt(L) * F[0].
struct GalerkinState {
  std::vector<double> F;
  std::vector<double> G;
  double t = 0.0;

  int max_mode() const { return static_cast<int>(F.size()) - 1; }
};

struct RhsOutput {
  std::vector<double> dF;  // dF[0] == 0 exactly
  std::vector<double> dG;  // dG[0] == 0 exactly
};

/// Assembles the Galerkin vector field and the flux densities.
///
/// Strategy: synthesize the nodal fields f, g, f''', g''' once per call,
/// form the two flux fields pointwise, then take quadrature inner products
/// with each phi_j' -- O(nodes * n) instead of the O(nodes * n^2) double
/// loop. Mode 0 is forced to literal zero so mass conservation is bit-exact.
///
/// Pure function of immutable inputs; call sites own the workspace, so any
/// number of threads may evaluate concurrently with separate workspaces.
class GalerkinRhs {
public:
  GalerkinRhs(const SpectralBasis& basis, const SystemParams& params);

  struct Workspace {
    std::vector<double> f, g, d3f, d3g, hf, hg;
  };

  void assemble_psi(const GalerkinState& s, Workspace& ws, RhsOutput& out) const;
  RhsOutput assemble_psi(const GalerkinState& s) const;

  // Nodal values of the flux densities at the quadrature nodes.
  std::vector<double> flux_f(const GalerkinState& s) const;
  std::vector<double> flux_g(const GalerkinState& s) const;
  // Three-term factored form of the g-flux; agrees with flux_g pointwise.
  std::vector<double> flux_g_factored(const GalerkinState& s) const;

  /// Weighted third-derivative fields whose squared quadrature sums form the
  /// dissipation:
  ///   j_g  = a^{3/2}(g) d3(f+g)
  ///   j_fg = a^{1/2}(f) a(g) d3(f+g)
  ///   j_f  = a^{1/2}(f) [a(f) d3f + (R/2)(2a(f) + 3a(g)) d3(f+g)]
  struct DissipationFields {
    std::vector<double> j_f, j_g, j_fg;
  };
  DissipationFields dissipation_fluxes(const GalerkinState& s) const;

  const SpectralBasis& basis() const { return *basis_; }
  const SystemParams& params() const { return params_; }

private:
  void nodal_fields(const GalerkinState& s, Workspace& ws) const;
  void check_state(const GalerkinState& s) const;

  const SpectralBasis* basis_;
  SystemParams params_;
};

}  // namespace thinfilm
