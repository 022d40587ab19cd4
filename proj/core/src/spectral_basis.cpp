#include "thinfilm/spectral_basis.hpp"

#include <cmath>
#include <numbers>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

// 4-point Gauss-Legendre rule on [-1, 1].
constexpr double kGx[4] = {-0.8611363115940525752239465, -0.3399810435848562648026658,
                           0.3399810435848562648026658, 0.8611363115940525752239465};
constexpr double kGw[4] = {0.3478548451374538573730639, 0.6521451548625461426269361,
                           0.6521451548625461426269361, 0.3478548451374538573730639};

void require(bool ok, const char* msg) {
  if (!ok) throw UsageError(msg);
}

}  // namespace

QuadratureGrid make_quadrature_grid(double L, int cells) {
  if (L <= 0.0) throw ParameterError("interval length must be positive");
  if (cells < 1) throw ParameterError("quadrature grid needs at least one cell");
  QuadratureGrid grid;
  grid.cells = cells;
  grid.nodes.reserve(4 * static_cast<std::size_t>(cells));
  grid.weights.reserve(4 * static_cast<std::size_t>(cells));
  const double h = L / cells;
  for (int m = 0; m < cells; ++m) {
    const double mid = (m + 0.5) * h;
    for (int i = 0; i < 4; ++i) {
      grid.nodes.push_back(mid + 0.5 * h * kGx[i]);
      grid.weights.push_back(0.5 * h * kGw[i]);
    }
  }
  return grid;
}

double basis_value(int k, double x, double L) {
  if (L <= 0.0) throw ParameterError("interval length must be positive");
  require(k >= 0, "mode index must be non-negative");
  if (x < 0.0 || x > L) throw DomainError("evaluation point outside [0, L]");
  if (k == 0) return std::sqrt(1.0 / L);
  return std::sqrt(2.0 / L) * std::cos(k * std::numbers::pi * x / L);
}

double basis_deriv(int k, double x, double L, int order) {
  if (L <= 0.0) throw ParameterError("interval length must be positive");
  require(k >= 0, "mode index must be non-negative");
  require(order >= 1 && order <= 3, "derivative order must be 1, 2 or 3");
  if (x < 0.0 || x > L) throw DomainError("evaluation point outside [0, L]");
  if (k == 0) return 0.0;
  const double omega = k * std::numbers::pi / L;
  const double amp = std::sqrt(2.0 / L);
  switch (order) {
    case 1:
      // sin(k pi x / L) vanishes at both endpoints in closed form.
      if (x == 0.0 || x == L) return 0.0;
      return -amp * omega * std::sin(omega * x);
    case 2:
      return -amp * omega * omega * std::cos(omega * x);
    default:
      if (x == 0.0 || x == L) return 0.0;
      return amp * omega * omega * omega * std::sin(omega * x);
  }
}

SpectralBasis::SpectralBasis(double L, int n) : SpectralBasis(L, n, 8 * (n + 1)) {}

SpectralBasis::SpectralBasis(double L, int n, int cells) : L_(L), n_(n) {
  if (L <= 0.0) throw ParameterError("interval length must be positive");
  if (n < 0) throw ParameterError("mode count must be non-negative");
  grid_ = make_quadrature_grid(L, cells);

  lambda_.resize(n_ + 1);
  for (int k = 0; k <= n_; ++k) {
    const double omega = k * std::numbers::pi / L_;
    lambda_[k] = omega * omega;
  }

  const std::size_t nodes = grid_.nodes.size();
  for (int order = 0; order < 4; ++order) {
    tab_[order].resize((n_ + 1) * nodes);
  }
  wderiv_.resize((n_ + 1) * nodes);
  for (int k = 0; k <= n_; ++k) {
    for (std::size_t q = 0; q < nodes; ++q) {
      const double x = grid_.nodes[q];
      tab_[0][k * nodes + q] = basis_value(k, x, L_);
      for (int order = 1; order < 4; ++order) {
        tab_[order][k * nodes + q] = basis_deriv(k, x, L_, order);
      }
      wderiv_[k * nodes + q] = grid_.weights[q] * tab_[1][k * nodes + q];
    }
  }
}

double SpectralBasis::eigenvalue(int k) const {
  require(k >= 0 && k <= n_, "mode index out of range");
  return lambda_[k];
}

const double* SpectralBasis::mode_table(int order, int k) const {
  require(order >= 0 && order <= 3, "derivative order must be in 0..3");
  require(k >= 0 && k <= n_, "mode index out of range");
  return tab_[order].data() + static_cast<std::size_t>(k) * grid_.nodes.size();
}

const double* SpectralBasis::weighted_deriv_table(int k) const {
  require(k >= 0 && k <= n_, "mode index out of range");
  return wderiv_.data() + static_cast<std::size_t>(k) * grid_.nodes.size();
}

void SpectralBasis::synthesize(std::span<const double> coeffs, int order,
                               std::span<double> out) const {
  require(static_cast<int>(coeffs.size()) == n_ + 1, "coefficient vector has wrong length");
  require(order >= 0 && order <= 3, "derivative order must be in 0..3");
  const std::size_t nodes = grid_.nodes.size();
  require(out.size() == nodes, "output span has wrong length");
  for (std::size_t q = 0; q < nodes; ++q) out[q] = 0.0;
  const double* tab = tab_[order].data();
  for (int k = 0; k <= n_; ++k) {
    const double c = coeffs[k];
    if (c == 0.0) continue;
    const double* row = tab + static_cast<std::size_t>(k) * nodes;
    for (std::size_t q = 0; q < nodes; ++q) out[q] += c * row[q];
  }
}

std::vector<double> SpectralBasis::synthesize(std::span<const double> coeffs, int order) const {
  std::vector<double> out(grid_.nodes.size());
  synthesize(coeffs, order, out);
  return out;
}

std::vector<double> SpectralBasis::project(std::span<const double> samples) const {
  const std::size_t nodes = grid_.nodes.size();
  require(samples.size() == nodes, "sample vector must live on the quadrature nodes");
  std::vector<double> coeffs(n_ + 1);
  const double* tab = tab_[0].data();
  for (int k = 0; k <= n_; ++k) {
    const double* row = tab + static_cast<std::size_t>(k) * nodes;
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes; ++q) acc += grid_.weights[q] * samples[q] * row[q];
    coeffs[k] = acc;
  }
  return coeffs;
}

double SpectralBasis::integrate(std::span<const double> nodal) const {
  const std::size_t nodes = grid_.nodes.size();
  require(nodal.size() == nodes, "nodal vector must live on the quadrature nodes");
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes; ++q) acc += grid_.weights[q] * nodal[q];
  return acc;
}

std::vector<double> SpectralBasis::sample_uniform(std::span<const double> coeffs, int points,
                                                  int order) const {
  require(static_cast<int>(coeffs.size()) == n_ + 1, "coefficient vector has wrong length");
  require(points >= 2, "need at least two sample points");
  require(order >= 0 && order <= 3, "derivative order must be in 0..3");
  std::vector<double> out(points, 0.0);
  for (int i = 0; i < points; ++i) {
    const double x = L_ * static_cast<double>(i) / (points - 1);
    double acc = 0.0;
    for (int k = 0; k <= n_; ++k) {
      const double c = coeffs[k];
      if (c == 0.0) continue;
      acc += c * (order == 0 ? basis_value(k, x, L_) : basis_deriv(k, x, L_, order));
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace thinfilm
