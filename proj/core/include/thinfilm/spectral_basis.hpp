#pragma once

#include <span>
#include <vector>

namespace thinfilm {

/// Composite Gauss-Legendre rule on (0, L): `cells` uniform cells with four
/// points each. Low per-cell order converges robustly even when the integrand
/// is only Lipschitz (the regularizer has a kink where a profile crosses 0).
struct QuadratureGrid {
  int cells = 0;
  std::vector<double> nodes;    // ascending, size 4 * cells
  std::vector<double> weights;  // positive, sum to L
};

QuadratureGrid make_quadrature_grid(double L, int cells);

/// phi_0 = sqrt(1/L), phi_k = sqrt(2/L) cos(k pi x / L).
double basis_value(int k, double x, double L);

/// Closed-form derivative of phi_k, order in {1,2,3}. Derivatives are never
/// formed by numerical differentiation so that assembled right-hand sides
/// stay exactly consistent with the discrete energy identity.
double basis_deriv(int k, double x, double L, int order);

/// Orthonormal Neumann cosine eigenbasis on (0, L), truncated at mode n,
/// with basis/derivative tables precomputed at the quadrature nodes.
/// Immutable after construction; all evaluation is const and thread-safe.
class SpectralBasis {
public:
  SpectralBasis(double L, int n);            // default grid: 8*(n+1) cells
  SpectralBasis(double L, int n, int cells);

  double length() const { return L_; }
  int max_mode() const { return n_; }
  int size() const { return n_ + 1; }        // number of coefficients
  double eigenvalue(int k) const;            // lambda_k = (k pi / L)^2
  const QuadratureGrid& grid() const { return grid_; }
  int node_count() const { return static_cast<int>(grid_.nodes.size()); }

  // Tabulated phi_k^(order) at the quadrature nodes, contiguous over nodes.
  const double* mode_table(int order, int k) const;
  // w_q * phi_k'(x_q), fused for inner products against derivative tests.
  const double* weighted_deriv_table(int k) const;

  // Nodal values of sum_k coeffs[k] phi_k^(order) at the quadrature nodes.
  std::vector<double> synthesize(std::span<const double> coeffs, int order) const;
  void synthesize(std::span<const double> coeffs, int order, std::span<double> out) const;

  // coeffs[k] = quadrature(samples * phi_k); inverse of synthesize on the span.
  std::vector<double> project(std::span<const double> samples) const;

  // Quadrature sum of a nodal field.
  double integrate(std::span<const double> nodal) const;

  // Closed-form resampling of a coefficient vector onto `points` uniform
  // abscissae spanning [0, L] (used for user-facing snapshots).
  std::vector<double> sample_uniform(std::span<const double> coeffs, int points,
                                     int order = 0) const;

private:
  double L_ = 1.0;
  int n_ = 0;
  QuadratureGrid grid_;
  std::vector<double> lambda_;
  std::vector<double> tab_[4];   // [order]: (n+1) x nodes, row-major
  std::vector<double> wderiv_;   // (n+1) x nodes
};

}  // namespace thinfilm
