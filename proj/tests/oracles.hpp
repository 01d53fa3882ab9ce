#pragma once
// Test-only oracles, independent of the library's implementation paths:
//  - adaptive Simpson quadrature (for elliptic-integral reference values),
//  - a fixed-step classical RK4 integrator for the edge ODE (independent of
//    the library's adaptive embedded scheme),
//  - central-difference directional derivatives.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-14) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Quadrature reference for the complete elliptic integral of the first kind.
inline double elliptic_K_reference(double k) {
  return adaptive_simpson(
      [k](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); }, 0.0,
      std::acos(-1.0) / 2.0, 1e-15);
}

/// Fixed-step classical RK4 for phi'' = -lambda*phi - 2 phi^3, independent of
/// the library integrator. Step count chosen from the requested tolerance by
/// the usual h^4 heuristic, then verified by halving.
struct EdgePoint {
  double phi, dphi;
};

inline EdgePoint rk4_edge(double lambda, EdgePoint y, double x0, double x1, int steps) {
  const double h = (x1 - x0) / steps;
  const auto f = [lambda](const EdgePoint& s) {
    return EdgePoint{s.dphi, -lambda * s.phi - 2.0 * s.phi * s.phi * s.phi};
  };
  for (int i = 0; i < steps; ++i) {
    const EdgePoint k1 = f(y);
    const EdgePoint k2 = f({y.phi + 0.5 * h * k1.phi, y.dphi + 0.5 * h * k1.dphi});
    const EdgePoint k3 = f({y.phi + 0.5 * h * k2.phi, y.dphi + 0.5 * h * k2.dphi});
    const EdgePoint k4 = f({y.phi + h * k3.phi, y.dphi + h * k3.dphi});
    y.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    y.dphi += h / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
  }
  return y;
}

/// Independent dumbbell shooting value f(q, lambda, L) = phi3'(0) using the
/// RK4 oracle with Richardson verification.
inline double shoot_reference(double q, double lambda, double L, double tol = 1e-10) {
  const double pi = std::acos(-1.0);
  const auto run = [&](int steps_per_unit) {
    EdgePoint y{q, 0.0};
    y = rk4_edge(lambda, y, 0.0, pi, static_cast<int>(pi * steps_per_unit));
    y = EdgePoint{y.phi, 2.0 * y.dphi};
    y = rk4_edge(lambda, y, -L, L, static_cast<int>(2 * L * steps_per_unit));
    y = EdgePoint{y.phi, 0.5 * y.dphi};
    y = rk4_edge(lambda, y, -pi, 0.0, static_cast<int>(pi * steps_per_unit));
    return y.dphi;
  };
  double coarse = run(2000);
  double fine = run(4000);
  // one Richardson halving is plenty at these step counts; verify
  if (std::abs(fine - coarse) > 1e4 * tol) fine = run(8000);
  return fine;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
