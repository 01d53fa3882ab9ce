#pragma once
// The discrete self-trapping system on the bowtie graph: Hamiltonians in
// vertex and diagonal coordinates, linearized stability of the constant
// state, the Poisson reduction on the sphere with its circle/hyperbola fixed
// points, and the seven exactly parameterized branches of relative fixed
// points
//     a - b - a^3 - W a = 0
//    -2a + 4b - 2c - b^3 - W b = 0
//    -b + c - c^3 - W c = 0
// on the reduced subspace u = (a, a, b, c, c).

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/graph.hpp"
#include "qgraph/polynomial.hpp"

namespace qgraph {

using Complex = std::complex<double>;
using DstState = Eigen::Matrix<Complex, 5, 1>;

/// Bowtie coupling matrix (the graph Laplacian of build_bowtie()).
inline Eigen::Matrix<double, 5, 5> bowtie_coupling() {
  Eigen::Matrix<double, 5, 5> L;
  L << 2, -1, -1, 0, 0,
      -1, 2, -1, 0, 0,
      -1, -1, 4, -1, -1,
       0, 0, -1, 2, -1,
       0, 0, -1, -1, 2;
  return L;
}

/// Normalized eigenvectors of the coupling matrix, ordered so that the
/// eigenvalues read (0, 5, 1, 3, 3).
inline Eigen::Matrix<double, 5, 5> bowtie_eigenvectors() {
  Eigen::Matrix<double, 5, 5> V;
  const double s5 = std::sqrt(5.0), s20 = std::sqrt(20.0), s2 = std::sqrt(2.0);
  V.col(0) << 1 / s5, 1 / s5, 1 / s5, 1 / s5, 1 / s5;
  V.col(1) << 1 / s20, 1 / s20, -4 / s20, 1 / s20, 1 / s20;
  V.col(2) << -0.5, -0.5, 0.0, 0.5, 0.5;
  V.col(3) << 1 / s2, -1 / s2, 0.0, 0.0, 0.0;
  V.col(4) << 0.0, 0.0, 0.0, 1 / s2, -1 / s2;
  return V;
}

constexpr std::array<double, 5> kBowtieEigenvalues = {0.0, 5.0, 1.0, 3.0, 3.0};

/// H = conj(u)^T L u - (1/2) sum |u_n|^4.
inline double dst_hamiltonian(const DstState& u) {
  const auto L = bowtie_coupling();
  Complex quad = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) quad += std::conj(u(i)) * L(i, j) * u(j);
  double quart = 0.0;
  for (int i = 0; i < 5; ++i) quart += std::pow(std::norm(u(i)), 2);
  return quad.real() - 0.5 * quart;
}

/// The same Hamiltonian in the diagonalizing coordinates u = sum z_j v_j.
inline double dst_hamiltonian_diag(const DstState& z) {
  const double s5 = std::sqrt(5.0), s10 = std::sqrt(10.0);
  const auto p4 = [](const Complex& w) { return std::pow(std::norm(w), 2); };
  double H = 5.0 * std::norm(z(1)) + std::norm(z(2)) + 3.0 * std::norm(z(3)) + 3.0 * std::norm(z(4));
  H -= p4(z(0) - 2.0 * z(1)) / 50.0;
  const Complex base = 2.0 * z(0) + z(1);
  H -= (p4(base + s5 * z(2) + s10 * z(3)) + p4(base + s5 * z(2) - s10 * z(3)) +
        p4(base - s5 * z(2) + s10 * z(4)) + p4(base - s5 * z(2) - s10 * z(4))) /
       800.0;
  return H;
}

/// Right-hand side of i du/dt = L u - |u|^2 u (Hamilton's equations for H).
inline DstState dst_velocity(const DstState& u) {
  const auto L = bowtie_coupling();
  DstState rhs = DstState::Zero();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) rhs(i) += L(i, j) * u(j);
    rhs(i) -= std::norm(u(i)) * u(i);
  }
  return Complex(0.0, -1.0) * rhs;  // du/dt = -i (L u - |u|^2 u)
}

/// Linearized eigenvalue pairs of the constant state at squared norm R:
/// +-sqrt(2R/5 - 1) and +-sqrt(2R - 25), as complex numbers. The first pair
/// hits zero at R = 5/2 (pitchfork), the second at R = 25/2 (transcritical).
struct ReducedStabilityEigs {
  std::array<Complex, 2> pair1;  // +-sqrt(2R/5 - 1)
  std::array<Complex, 2> pair2;  // +-sqrt(2R - 25)
};

inline ReducedStabilityEigs reduced_stability_eigs(double R) {
  if (R < 0.0) throw std::invalid_argument("reduced_stability_eigs: R must be nonnegative");
  const Complex r1 = std::sqrt(Complex(0.4 * R - 1.0, 0.0));
  const Complex r2 = std::sqrt(Complex(2.0 * R - 25.0, 0.0));
  return {{r1, -r1}, {r2, -r2}};
}

// ---------------------------------------------------------------------------
// Poisson reduction on the sphere
// ---------------------------------------------------------------------------

struct SphereState {
  double X = 0.0, Y = 0.0, Z = 0.0, R = 0.0;

  double casimir_residual() const { return std::abs(X * X + Y * Y + Z * Z - R * R); }
  void require_on_sphere(double tol = 1e-10) const {
    if (casimir_residual() > tol * std::max(1.0, R * R))
      throw std::invalid_argument("SphereState: X^2+Y^2+Z^2 != R^2");
  }
};

/// Reduced Hamiltonian on the sphere of radius R.
inline double sphere_hamiltonian(const SphereState& s) {
  const double X = s.X, Y = s.Y, Z = s.Z, R = s.R;
  return -2.5 * Z + 3.0 * R * X / 20.0 + 9.0 * R * Z / 80.0 - X * X / 20.0 - 3.0 * X * Z / 20.0 +
         Y * Y / 20.0 - Z * Z / 160.0 + (2.5 * R - 33.0 * R * R / 160.0);
}

/// Poisson vector field of the reduced flow.
inline std::array<double, 3> poisson_field(const SphereState& s) {
  const double X = s.X, Y = s.Y, Z = s.Z, R = s.R;
  return {(-9.0 * R + 12.0 * X + 9.0 * Z + 200.0) * Y / 80.0,
          (-12.0 * X * X + 7.0 * X * Z + 12.0 * Z * Z + (9.0 * R - 200.0) * X - 12.0 * R * Z) / 80.0,
          (3.0 * R - 4.0 * X - 3.0 * Z) * Y / 20.0};
}

/// Classical fourth-order one-step integration of the Poisson flow; used for
/// invariant (Casimir / energy) checks only.
inline SphereState poisson_rk4_step(const SphereState& s, double dt) {
  const auto f = [&](double X, double Y, double Z) {
    return poisson_field({X, Y, Z, s.R});
  };
  const auto k1 = f(s.X, s.Y, s.Z);
  const auto k2 = f(s.X + 0.5 * dt * k1[0], s.Y + 0.5 * dt * k1[1], s.Z + 0.5 * dt * k1[2]);
  const auto k3 = f(s.X + 0.5 * dt * k2[0], s.Y + 0.5 * dt * k2[1], s.Z + 0.5 * dt * k2[2]);
  const auto k4 = f(s.X + dt * k3[0], s.Y + dt * k3[1], s.Z + dt * k3[2]);
  SphereState out = s;
  out.X += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
  out.Y += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  out.Z += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
  return out;
}

/// Fixed points of the reduced flow: Y = 0 together with
///   X^2 + Z^2 = R^2,
///   -12 X^2 + 7 X Z + 12 Z^2 + (9R - 200) X - 12 R Z = 0.
/// Z is eliminated by the resultant; each real candidate is polished by a 2x2
/// Newton iteration and kept only if both residuals drop below 1e-9 (relative
/// to the equation scales). (0, R) is a fixed point for every R > 0.
inline std::vector<std::pair<double, double>> circle_hyperbola_fixed_points(double R) {
  if (!(R > 0.0)) throw std::invalid_argument("circle_hyperbola_fixed_points: R must be positive");

  // circle: 1*Z^2 + 0*Z + (X^2 - R^2); hyperbola: 12 Z^2 + (7X - 12R) Z + (-12X^2 + (9R-200)X)
  const Poly a2 = Poly::constant(1.0);
  const Poly a1 = Poly::constant(0.0);
  const Poly a0 = Poly({-R * R, 0.0, 1.0});
  const Poly b2 = Poly::constant(12.0);
  const Poly b1 = Poly({-12.0 * R, 7.0});
  const Poly b0 = Poly({0.0, 9.0 * R - 200.0, -12.0});
  const Poly res = resultant_of_quadratics(a2, a1, a0, b2, b1, b0);

  const double fscale = std::max(1.0, R * R);
  const double gscale = std::max(1.0, 200.0 * R + 24.0 * R * R);
  const auto f = [&](double X, double Z) { return X * X + Z * Z - R * R; };
  const auto g = [&](double X, double Z) {
    return -12.0 * X * X + 7.0 * X * Z + 12.0 * Z * Z + (9.0 * R - 200.0) * X - 12.0 * R * Z;
  };

  std::vector<std::pair<double, double>> points;
  for (double x : real_roots(res, 1e-7)) {
    if (std::abs(x) > R * (1.0 + 1e-9)) continue;
    const double zr = std::sqrt(std::max(0.0, R * R - x * x));
    for (double z : {zr, -zr}) {
      double X = x, Z = z;
      // 2x2 Newton polish on (f, g)
      for (int it = 0; it < 50; ++it) {
        const double fv = f(X, Z), gv = g(X, Z);
        if (std::abs(fv) <= 1e-12 * fscale && std::abs(gv) <= 1e-12 * gscale) break;
        const double fx = 2.0 * X, fz = 2.0 * Z;
        const double gx = -24.0 * X + 7.0 * Z + 9.0 * R - 200.0;
        const double gz = 7.0 * X + 24.0 * Z - 12.0 * R;
        const double det = fx * gz - fz * gx;
        if (std::abs(det) < 1e-14 * fscale) break;
        X -= (fv * gz - fz * gv) / det;
        Z -= (fx * gv - fv * gx) / det;
      }
      if (std::abs(f(X, Z)) <= 1e-9 * fscale && std::abs(g(X, Z)) <= 1e-9 * gscale) {
        bool dup = false;
        for (const auto& p : points)
          if (std::hypot(p.first - X, p.second - Z) < 1e-7 * std::max(1.0, R)) dup = true;
        if (!dup) points.emplace_back(X, Z);
      }
    }
  }
  return points;
}

/// Number of circle/hyperbola intersections, robust near tangency: counts
/// real roots of the resultant carrying a valid Z. Jumps 2 -> 4 at the
/// closed-form threshold radius near 7.57.
inline int circle_hyperbola_intersection_count(double R) {
  const Poly a2 = Poly::constant(1.0);
  const Poly a1 = Poly::constant(0.0);
  const Poly a0 = Poly({-R * R, 0.0, 1.0});
  const Poly b2 = Poly::constant(12.0);
  const Poly b1 = Poly({-12.0 * R, 7.0});
  const Poly b0 = Poly({0.0, 9.0 * R - 200.0, -12.0});
  const Poly res = resultant_of_quadratics(a2, a1, a0, b2, b1, b0);
  const auto g = [&](double X, double Z) {
    return -12.0 * X * X + 7.0 * X * Z + 12.0 * Z * Z + (9.0 * R - 200.0) * X - 12.0 * R * Z;
  };
  const double gscale = std::max(1.0, 200.0 * R + 24.0 * R * R);
  int count = 0;
  for (double x : real_roots(res, 1e-6, 1e-7)) {
    if (std::abs(x) > R * (1.0 + 1e-7)) continue;
    const double zr = std::sqrt(std::max(0.0, R * R - x * x));
    int here = 0;
    for (double z : {zr, -zr}) {
      if (std::abs(g(x, z)) <= 1e-4 * gscale) ++here;
      if (zr == 0.0) break;
    }
    count += std::min(here, 2);
  }
  return count;
}

/// Closed-form threshold radius where the second hyperbola branch first
/// crosses the circle.
inline double circle_hyperbola_threshold() {
  const double t = std::pow(15.0, 2.0 / 3.0);
  const double s = std::sqrt(241.0 - 12.0 * t);
  return -13.0 - s + std::sqrt(482.0 + 12.0 * t + 7378.0 / s);
}

// ---------------------------------------------------------------------------
// Branches 1-7
// ---------------------------------------------------------------------------

struct DstBranchPoint {
  int branch_id = 0;
  double theta = 0.0;  // parameter (NaN for the Omega-parameterized branches 1-2)
  double a = 0.0, b = 0.0, c = 0.0;
  double omega = 0.0;
  double Q = 0.0;  // 2a^2 + b^2 + 2c^2

  Eigen::Vector3d abc() const { return {a, b, c}; }
};

/// Residual of the reduced stationary system at (a, b, c, Omega).
inline Eigen::Vector3d dst_reduced_residual(double a, double b, double c, double omega) {
  return {a - b - a * a * a - omega * a,
          -2.0 * a + 4.0 * b - 2.0 * c - b * b * b - omega * b,
          -b + c - c * c * c - omega * c};
}

namespace detail {

inline DstBranchPoint make_point(int id, double theta, double a, double b, double c, double omega,
                                 double residual_tol = 1e-10) {
  const Eigen::Vector3d r = dst_reduced_residual(a, b, c, omega);
  const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
  if (r.cwiseAbs().maxCoeff() > residual_tol * scale * scale * scale)
    throw std::runtime_error("bowtie branch " + std::to_string(id) +
                             ": defining-equation residual too large (the frequency "
                             "parameterization is ill-conditioned this close to a pole)");
  DstBranchPoint p;
  p.branch_id = id;
  p.theta = theta;
  p.a = a;
  p.b = b;
  p.c = c;
  p.omega = omega;
  p.Q = 2.0 * a * a + b * b + 2.0 * c * c;
  return p;
}

/// Frequency along the a = c family (branches 3 and 4).
inline double omega_s1_family(double theta) {
  return 5.0 - 1.5 * (3.0 * std::sqrt(3.0) * std::cos(theta) - 5.0 * std::sin(theta)) /
                   std::sin(3.0 * theta);
}

/// Real physically relevant root (Omega <= 1) of the cubic factor for
/// branches 6 and 7, refined by one Newton step on the printed polynomial.
inline std::optional<double> omega_cubic_family(double theta) {
  const double mu = std::sin(theta) * std::sin(theta);
  const double q = 4.0 * mu - 3.0;
  const Poly cubic({-64.0 * mu * mu * mu + 48.0 * mu * mu - 36.0 * mu + 81.0,
                    3.0 * q * (16.0 * mu * mu - 4.0 * mu + 3.0),
                    -24.0 * (2.0 * mu - 1.0) * q * mu,
                    4.0 * q * q * mu});
  std::optional<double> best;
  for (double w : real_roots(cubic)) {
    if (w > 1.0 + 1e-12) continue;  // physically irrelevant
    // one extra Newton step against coefficient round-off
    const Poly d = cubic.derivative();
    if (std::abs(d(w)) > 1e-300) w -= cubic(w) / d(w);
    if (!best || w < *best) best = w;  // the relevant root is the smallest real one
  }
  return best;
}

/// The other cubic roots, for the irrelevance check.
inline std::vector<std::complex<double>> cubic_family_roots(double theta) {
  const double mu = std::sin(theta) * std::sin(theta);
  const double q = 4.0 * mu - 3.0;
  const Poly cubic({-64.0 * mu * mu * mu + 48.0 * mu * mu - 36.0 * mu + 81.0,
                    3.0 * q * (16.0 * mu * mu - 4.0 * mu + 3.0),
                    -24.0 * (2.0 * mu - 1.0) * q * mu,
                    4.0 * q * q * mu});
  return poly_roots(cubic);
}

}  // namespace detail

/// Domain of the branch parameter.
inline std::pair<double, double> dst_branch_domain(int branch_id) {
  const double pi = std::numbers::pi;
  switch (branch_id) {
    case 1: return {-std::numeric_limits<double>::infinity(), 0.0};  // Omega <= 0
    case 2: return {-std::numeric_limits<double>::infinity(), 1.0};  // Omega <= 1
    case 3: return {0.0, std::atan(3.0 * std::sqrt(3.0) / 5.0)};
    case 4: return {pi / 3.0, 2.0 * pi / 3.0};
    case 5: return {pi / 3.0, 2.0 * pi / 3.0};
    case 6: return {pi / 3.0, 2.0 * pi / 3.0};
    case 7: return {0.0, pi / 3.0};
  }
  throw std::invalid_argument("dst_branch_domain: branch_id must be 1..7");
}

/// Point on one of the seven branches. Branches 1 and 2 are parameterized by
/// Omega (param = Omega), branches 3..7 by the angle theta inside
/// dst_branch_domain. Every returned point is residual-checked against the
/// defining equations at 1e-10.
inline DstBranchPoint dst_branch_point(int branch_id, double param) {
  const auto [lo, hi] = dst_branch_domain(branch_id);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (branch_id) {
    case 1: {  // constant state: a=b=c, Omega = -a^2, Q = 5 a^2
      if (param > 0.0) throw std::invalid_argument("branch 1: requires Omega <= 0");
      const double a = std::sqrt(-param);
      return detail::make_point(1, nan, a, a, a, param);
    }
    case 2: {  // c = -a, b = 0, Omega = 1 - a^2, Q = 4 a^2
      if (param > 1.0) throw std::invalid_argument("branch 2: requires Omega <= 1");
      const double a = std::sqrt(1.0 - param);
      return detail::make_point(2, nan, a, 0.0, -a, param);
    }
    case 3:
    case 4: {
      if (!(param > lo && param < hi))
        throw std::invalid_argument("branch 3/4: theta outside its interval");
      const double omega = detail::omega_s1_family(param);
      if (omega > 5.0) throw std::invalid_argument("branch 3/4: Omega > 5 (outside the ellipse)");
      const double amp = 2.0 * std::sqrt(5.0 - omega) / std::sqrt(3.0);
      const double a = amp * std::sin(param - std::numbers::pi / 3.0);
      const double b = amp * std::sin(param + std::numbers::pi / 3.0);
      return detail::make_point(branch_id, param, a, b, a, omega);
    }
    case 5: {
      if (!(param > lo && param < hi))
        throw std::invalid_argument("branch 5: theta outside its interval");
      const double mu = std::sin(param) * std::sin(param);
      const double omega = (4.0 * mu - 6.0) / (4.0 * mu - 3.0);
      const double amp = 2.0 * std::sqrt(1.0 - omega) / std::sqrt(3.0);
      const double a = amp * std::sin(param - std::numbers::pi / 3.0);
      const double c = amp * std::sin(param + std::numbers::pi / 3.0);
      const double b = -2.0 * std::pow(1.0 - omega, 1.5) * std::sin(3.0 * param) /
                       (3.0 * std::sqrt(3.0));
      return detail::make_point(5, param, a, b, c, omega);
    }
    case 6:
    case 7: {
      if (!(param > lo && param < hi))
        throw std::invalid_argument("branch 6/7: theta outside its interval");
      const auto omega = detail::omega_cubic_family(param);
      if (!omega) throw std::invalid_argument("branch 6/7: no physically relevant root");
      const double amp = 2.0 * std::sqrt(1.0 - *omega) / std::sqrt(3.0);
      const double a = amp * std::sin(param - std::numbers::pi / 3.0);
      const double c = amp * std::sin(param + std::numbers::pi / 3.0);
      const double b = -2.0 * std::pow(1.0 - *omega, 1.5) * std::sin(3.0 * param) /
                       (3.0 * std::sqrt(3.0));
      return detail::make_point(branch_id, param, a, b, c, *omega);
    }
  }
  throw std::invalid_argument("dst_branch_point: branch_id must be 1..7");
}

// ---------------------------------------------------------------------------
// Branch events
// ---------------------------------------------------------------------------

struct DstEvent {
  std::string kind;  // pitchfork / transcritical / fold / symmetry-breaking / saddle-node
  int branch_a = 0;
  int branch_b = 0;  // 0 when the event involves a single branch
  double omega = 0.0;
  double Q = 0.0;
  double theta = 0.0;  // parameter on branch_a (or the single branch)
};

namespace detail {

template <class F>
double bisect_zero(F&& f, double lo, double hi) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0)
    throw std::runtime_error("dst_branch_events: locator bracket has no sign change");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double golden_max(F&& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Scan branches 1-7 and locate their bifurcation events:
///   pitchfork       branch 1 -> 6 at Omega = -1/2 (Q = 5/2),
///   transcritical   branch 1 <-> 4 at Omega = -5/2 (Q = 25/2),
///   fold            on branch 4 (root of dOmega/dtheta, Omega ~ -1.94),
///   symmetry-break  branch 4 -> 5 contact at theta = pi/2 (Omega = -2),
///   saddle-node     birth of branch 7 (max of Omega, ~ -2.7).
inline std::vector<DstEvent> dst_branch_events() {
  const double pi = std::numbers::pi;
  std::vector<DstEvent> events;

  // branch 6 touches branch 1 where its a - c gap vanishes (the gap is
  // proportional to cos(theta), so the crossing is transversal)
  {
    const auto gap = [](double th) {
      const auto p = dst_branch_point(6, th);
      return p.a - p.c;
    };
    const double th = detail::bisect_zero(gap, pi / 2.0 - 0.3, pi / 2.0 + 0.3);
    const auto p = dst_branch_point(6, th);
    events.push_back({"pitchfork", 1, 6, p.omega, p.Q, th});
  }

  // branch 4 crosses branch 1 where a - b vanishes
  {
    const auto gap = [](double th) {
      const auto p = dst_branch_point(4, th);
      return p.a - p.b;
    };
    const double th = detail::bisect_zero(gap, pi / 2.0 - 0.4, pi / 2.0 + 0.4);
    const auto p = dst_branch_point(4, th);
    events.push_back({"transcritical", 1, 4, p.omega, p.Q, th});
  }

  // fold: interior maximum of Omega on branch 4, refined as a root of the
  // derivative of the frequency parameterization
  {
    const auto dwdth = [](double th) {
      const double e = 1e-7;
      return (detail::omega_s1_family(th + e) - detail::omega_s1_family(th - e)) / (2.0 * e);
    };
    const double th0 = detail::golden_max([](double th) { return detail::omega_s1_family(th); },
                                          pi / 3.0 + 1e-6, pi / 2.0 - 1e-6);
    const double th = detail::bisect_zero(dwdth, th0 - 0.05, th0 + 0.05);
    const auto p = dst_branch_point(4, th);
    events.push_back({"fold", 4, 0, p.omega, p.Q, th});
  }

  // branch 5 meets branch 4 where its a - c gap vanishes (theta = pi/2)
  {
    const auto gap = [](double th) {
      const auto p = dst_branch_point(5, th);
      return p.a - p.c;
    };
    const double th = detail::bisect_zero(gap, pi / 2.0 - 0.4, pi / 2.0 + 0.4);
    const auto p = dst_branch_point(5, th);
    events.push_back({"symmetry-breaking", 4, 5, p.omega, p.Q, th});
  }

  // saddle-node: maximum of Omega over branch 7
  {
    const double th = detail::golden_max(
        [](double t) {
          const auto w = detail::omega_cubic_family(t);
          return w ? *w : -std::numeric_limits<double>::infinity();
        },
        1e-4, pi / 3.0 - 1e-4);
    const auto p = dst_branch_point(7, th);
    events.push_back({"saddle-node", 7, 0, p.omega, p.Q, th});
  }

  return events;
}

}  // namespace qgraph
