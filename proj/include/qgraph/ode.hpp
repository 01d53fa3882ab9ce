#pragma once
// Adaptive Dormand-Prince 5(4) integration of the stationary edge equation
//   phi'' = -Lambda*phi - 2*phi^3
// as the first-order system y = (phi, phi'). Used by the shooting module.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qgraph {

struct EdgeState {
  double phi = 0.0;
  double dphi = 0.0;
};

struct IntegrationResult {
  EdgeState y;
  bool diverged = false;
  double x_reached = 0.0;
};

namespace detail {

inline std::array<double, 2> edge_rhs(double lambda, const std::array<double, 2>& y) {
  return {y[1], -lambda * y[0] - 2.0 * y[0] * y[0] * y[0]};
}

}  // namespace detail

/// Integrate the edge ODE from x0 to x1 with local tolerance `tol` and a
/// blow-up guard: |phi| > guard reports a divergent shot (the focusing cubic
/// escapes any fixed ball quickly once the numerical orbit leaves the energy
/// surface). Optionally records the state at `samples` uniformly spaced points
/// including both ends.
inline IntegrationResult integrate_edge(double lambda, EdgeState y0, double x0, double x1,
                                        double tol = 1e-12, double guard = 1e6,
                                        std::vector<EdgeState>* dense = nullptr,
                                        int samples = 0) {
  // Dormand-Prince coefficients.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const double dir = x1 >= x0 ? 1.0 : -1.0;
  const double total = std::abs(x1 - x0);

  std::array<double, 2> y = {y0.phi, y0.dphi};
  double x = x0;

  if (dense) {
    dense->clear();
    dense->reserve(samples + 1);
    dense->push_back({y[0], y[1]});
  }
  int next_sample = 1;

  double h = dir * std::min(1e-2, total);
  const double hmin = total * 1e-15 + 1e-15;

  auto step_to = [&](double target) -> bool {
    while (dir * (target - x) > 1e-15 * (1.0 + std::abs(target))) {
      if (std::abs(h) > std::abs(target - x)) h = target - x;
      const auto k1 = detail::edge_rhs(lambda, y);
      std::array<double, 2> t;
      for (int i = 0; i < 2; ++i) t[i] = y[i] + h * a21 * k1[i];
      const auto k2 = detail::edge_rhs(lambda, t);
      for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      const auto k3 = detail::edge_rhs(lambda, t);
      for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      const auto k4 = detail::edge_rhs(lambda, t);
      for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      const auto k5 = detail::edge_rhs(lambda, t);
      for (int i = 0; i < 2; ++i)
        t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      const auto k6 = detail::edge_rhs(lambda, t);
      std::array<double, 2> y5;
      for (int i = 0; i < 2; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      const auto k7 = detail::edge_rhs(lambda, y5);

      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double ei =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(0.5 * err);

      if (err <= 1.0) {
        x += h;
        y = y5;
        if (std::abs(y[0]) > guard || std::abs(y[1]) > guard * guard) return false;
      }
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
      h *= fac;
      if (std::abs(h) < hmin) h = dir * hmin;
    }
    return true;
  };

  bool ok = true;
  if (dense && samples > 0) {
    for (; next_sample <= samples && ok; ++next_sample) {
      const double target = x0 + (x1 - x0) * next_sample / samples;
      ok = step_to(target);
      dense->push_back({y[0], y[1]});
    }
    // pad so callers always see samples+1 states
    while (static_cast<int>(dense->size()) < samples + 1) dense->push_back({y[0], y[1]});
  } else {
    ok = step_to(x1);
  }

  return {{y[0], y[1]}, !ok, x};
}

}  // namespace qgraph
