#pragma once

#include <span>
#include <utility>
#include <vector>

#include "thinfilm/galerkin_rhs.hpp"
#include "thinfilm/regularization.hpp"

namespace thinfilm {

struct TrajectoryRecord;  // time_integrator.hpp

/// One row of the diagnostics time series (the CSV schema).
struct DiagnosticsRow {
  double t = 0;
  double mass_f = 0, mass_g = 0;
  double energy = 0, dissipation = 0;
  double min_f = 0, min_g = 0;
  double chi_f = 0, chi_g = 0;  // negative-part functionals at delta = sqrt(eps)
  double dE_dt_residual = 0;
};

/// 1/2 sum_k lambda_k [F_k^2 + R (F_k + G_k)^2]; closed form, no quadrature.
double energy(const GalerkinState& s, const SystemParams& p);

/// Gradient of the closed-form energy with respect to (F, G).
void energy_gradient(const GalerkinState& s, const SystemParams& p,
                     std::span<double> dF, std::span<double> dG);

/// Quadrature of mu R^2 j_g^2 + (3 R^2 / 4) j_fg^2 + j_f^2; always >= 0.
double dissipation(const GalerkinState& s, const SystemParams& p, const SpectralBasis& basis);

/// (int chi_delta(f) dx, int chi_delta(g) dx); zero for non-negative profiles.
std::pair<double, double> negative_part(const GalerkinState& s, const MollifierFamily& chi,
                                        const SpectralBasis& basis);

/// Nodal masks of {f > threshold} and {g > threshold} on a uniform grid.
struct PositivityMasks {
  std::vector<unsigned char> f, g;
};
PositivityMasks positivity_sets(const GalerkinState& s, double threshold,
                                const SpectralBasis& basis, int output_points);

/// Full diagnostics row. When the right-hand side at `s` is already known
/// (e.g. from the integrator's FSAL stage) pass it to avoid a reassembly.
DiagnosticsRow diagnostics_row(const GalerkinState& s, const SystemParams& p,
                               const SpectralBasis& basis, const RhsOutput* rhs_at_s = nullptr);

/// Integral of an (irregularly sampled) time series by composite quadratic
/// interpolation over interval pairs, trapezoid on a leftover interval.
double integrate_time_series(std::span<const double> t, std::span<const double> v);

/// | (c_j(T) - c_j(0)) - time-quadrature of d c_j/dt | for c = F (or G when
/// `for_g`), using the per-step flux projections recorded in the trajectory.
double weak_residual(const TrajectoryRecord& record, int mode, bool for_g = false);

}  // namespace thinfilm
