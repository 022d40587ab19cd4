#include "thinfilm/regularization.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

double a_eps(double eps, double s) {
  if (eps <= 0.0) throw ParameterError("regularization parameter eps must be positive");
  return eps + (s > 0.0 ? s : 0.0);
}

double a_eps_pow(double eps, double s, double p) {
  const double a = a_eps(eps, s);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 0.5) return std::sqrt(a);
  if (p == 1.5) return a * std::sqrt(a);
  return std::pow(a, p);
}

namespace {

// 8-point Gauss-Legendre rule on [-1, 1], used for the one-off table build.
constexpr double kG8x[8] = {-0.9602898564975362316836, -0.7966664774136267395916,
                            -0.5255324099163289858177, -0.1834346424956498049395,
                            0.1834346424956498049395,  0.5255324099163289858177,
                            0.7966664774136267395916,  0.9602898564975362316836};
constexpr double kG8w[8] = {0.1012285362903762591525, 0.2223810344533744705444,
                            0.3137066458778872873380, 0.3626837833783619829652,
                            0.3626837833783619829652, 0.3137066458778872873380,
                            0.2223810344533744705444, 0.1012285362903762591525};

double bump_raw(double x) {
  if (x <= -1.0 || x >= 0.0) return 0.0;
  const double r = -x * (x + 1.0);
  return std::exp(-1.0 / r);
}

template <typename F>
double gauss8(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += kG8w[i] * f(mid + half * kG8x[i]);
  return half * acc;
}

template <typename F>
double composite_gauss8(F&& f, double a, double b, int cells) {
  const double h = (b - a) / cells;
  double acc = 0.0;
  for (int m = 0; m < cells; ++m) acc += gauss8(f, a + m * h, a + (m + 1) * h);
  return acc;
}

// Normalization constant, computed once with a cell-doubling consistency check.
double compute_normalization() {
  const double coarse = composite_gauss8(bump_raw, -1.0, 0.0, 512);
  const double fine = composite_gauss8(bump_raw, -1.0, 0.0, 1024);
  if (std::abs(coarse - fine) > 1e-12 * fine) {
    throw std::logic_error("bump normalization quadrature failed to converge");
  }
  return 1.0 / fine;
}

const double kBumpNorm = compute_normalization();

// Dense sampling plus ternary refinement of max |f| on [a, b].
template <typename F>
double refine_sup(F&& f, double a, double b, int samples) {
  double best = 0.0;
  double xbest = a;
  for (int i = 0; i <= samples; ++i) {
    const double x = a + (b - a) * i / samples;
    const double v = std::abs(f(x));
    if (v > best) {
      best = v;
      xbest = x;
    }
  }
  double lo = xbest - (b - a) / samples;
  double hi = xbest + (b - a) / samples;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (std::abs(f(m1)) < std::abs(f(m2))) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::abs(f(0.5 * (lo + hi)));
}

// chi1 and chi1' on a uniform table over [-1.5, 0.5]. Values at x >= 0 are
// identically zero and values below -1 continue linearly, so the only work is
// the cumulative double integral across the bump support. The per-segment
// Gauss sums keep the node values accurate to ~1e-14, which leaves the cubic
// interpolation error (~1e-12) as the dominant one.
struct Chi1Table {
  static constexpr int kPoints = 4096;
  static constexpr double kLo = -1.5;
  static constexpr double kHi = 0.5;

  double step = (kHi - kLo) / (kPoints - 1);
  std::vector<double> chi;   // chi1 at nodes
  std::vector<double> dchi;  // chi1' at nodes
  double c1 = 0.0;           // chi1(-1)

  Chi1Table() : chi(kPoints), dchi(kPoints) {
    int j = kPoints - 1;
    for (; j >= 0; --j) {
      const double x = node(j);
      if (x < 0.0) break;
      chi[j] = 0.0;
      dchi[j] = 0.0;
    }
    double w_right = 0.0;    // W at node j+1
    double chi_right = 0.0;  // chi1 at node j+1
    for (; j >= 0; --j) {
      const double x0 = node(j);
      const double x1 = node(j + 1);
      // W(t) = W(x1) + int_t^{x1} bump for t in [x0, x1]
      const auto w_at = [&](double t) { return w_right + gauss8(bump::value, t, x1); };
      chi[j] = chi_right + gauss8(w_at, x0, x1);
      dchi[j] = -w_at(x0);
      w_right = w_at(x0);
      chi_right = chi[j];
    }
    c1 = interpolate(chi, -1.0);
  }

  static double node(int j) { return kLo + j * ((kHi - kLo) / (kPoints - 1)); }

  double interpolate(const std::vector<double>& v, double x) const {
    const double u = (x - kLo) / step;
    int i = static_cast<int>(std::floor(u));
    if (i < 1) i = 1;
    if (i > kPoints - 3) i = kPoints - 3;
    const double t = u - i;
    // 4-point Lagrange weights on nodes {-1, 0, 1, 2}
    const double wm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w0 = (t * t - 1.0) * (t - 2.0) / 2.0;
    const double w1 = -t * (t + 1.0) * (t - 2.0) / 2.0;
    const double w2 = t * (t * t - 1.0) / 6.0;
    return wm1 * v[i - 1] + w0 * v[i] + w1 * v[i + 1] + w2 * v[i + 2];
  }
};

const Chi1Table& chi1_table() {
  static const Chi1Table table;
  return table;
}

}  // namespace

namespace bump {

double value(double x) { return kBumpNorm * bump_raw(x); }

double deriv(double x) {
  if (x <= -1.0 || x >= 0.0) return 0.0;
  const double r = -x * (x + 1.0);
  return value(x) * (-2.0 * x - 1.0) / (r * r);
}

double normalization() { return kBumpNorm; }

double sup_value() {
  static const double v = refine_sup(value, -1.0, 0.0, 20000);
  return v;
}

double sup_deriv() {
  static const double v = refine_sup(deriv, -1.0, 0.0, 20000);
  return v;
}

}  // namespace bump

double MollifierFamily::chi1(double x, int order) {
  const auto& tab = chi1_table();
  switch (order) {
    case 0:
      if (x >= 0.0) return 0.0;
      if (x <= Chi1Table::kLo) return (-x - 1.0) + tab.c1;
      // chi1 >= 0; clamp away interpolation undershoot next to the support edge
      return std::max(0.0, tab.interpolate(tab.chi, x));
    case 1:
      if (x >= 0.0) return 0.0;
      if (x <= Chi1Table::kLo) return -1.0;
      // chi1' = -W lives in [-1, 0]
      return std::min(0.0, std::max(-1.0, tab.interpolate(tab.dchi, x)));
    case 2:
      return bump::value(x);
    case 3:
      return bump::deriv(x);
    default:
      throw UsageError("mollifier derivative order must be in 0..3");
  }
}

MollifierFamily::MollifierFamily(double delta) : delta_(delta) {
  if (!(delta > 0.0)) throw ParameterError("mollifier scale delta must be positive");
  chi1_table();  // build eagerly so construction stays the only non-const phase
}

double MollifierFamily::operator()(double x, int order) const {
  const double u = x / delta_;
  switch (order) {
    case 0:
      return delta_ * chi1(u, 0);
    case 1:
      return chi1(u, 1);
    case 2:
      return chi1(u, 2) / delta_;
    case 3:
      return chi1(u, 3) / (delta_ * delta_);
    default:
      throw UsageError("mollifier derivative order must be in 0..3");
  }
}

}  // namespace thinfilm
