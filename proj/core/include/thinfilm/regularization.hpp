#pragma once

namespace thinfilm {

/// a_eps(s) = eps + max(0, s). Lower-bounded by eps and 1-Lipschitz.
double a_eps(double eps, double s);

/// a_eps(s)^p, formed as a single power of the already-clamped value.
/// Intended exponents: 1/2, 1, 3/2, 2, 3.
double a_eps_pow(double eps, double s, double p);

/// The generating bump: C * exp(-1 / (-x (x+1))) on (-1, 0), zero elsewhere.
/// C is fixed once at startup so the bump has unit integral.
namespace bump {
double value(double x);
double deriv(double x);
double normalization();  // C
double sup_value();      // sup |bump|, found by dense sampling + refinement
double sup_deriv();      // sup |bump'|
}  // namespace bump

/// Mollifier family chi_delta(x) = delta * chi1(x / delta), where
///   chi1(x) = -int_0^x int_s^inf bump(tau) dtau ds.
/// chi_delta approximates the negative part max(-x, 0) to within delta and
/// vanishes identically on [0, inf).
///
/// chi1 and chi1' require the nested integral, which is far too costly inside
/// per-step diagnostics; they are tabulated once on [-1.5, 0.5] (4096 points)
/// and evaluated by cubic interpolation, accurate to ~1e-12 against direct
/// quadrature. chi1'' = bump and chi1''' = bump' are closed forms.
class MollifierFamily {
public:
  explicit MollifierFamily(double delta);  // delta > 0 or ParameterError

  double delta() const { return delta_; }

  // order 0 -> chi_delta(x), orders 1..3 -> derivatives.
  double operator()(double x, int order = 0) const;

  // The unscaled profile chi1 and its derivatives.
  static double chi1(double x, int order = 0);

private:
  double delta_;
};

}  // namespace thinfilm
