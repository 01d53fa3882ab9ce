#pragma once
// Bifurcation classification for the stationary cubic NLS on a graph via the
// normal-form test quantities Theta1..Theta5 built from the linearization
//   L10 = -d^2/dx^2 - Lambda0 - 6 Phi0^2
// at a located branch point, plus the perturbation-expansion coefficients for
// the pitchfork (odd crossing) and transcritical (even crossing) of the
// constant branch.
//
// The kernel vector and every L10^{-1} application use a symmetric ghost-point
// closure of the vertex conditions (stiffness A, lumped trapezoid mass B), so
// the structural orthogonalities of the constant branch hold to machine
// precision. Kernel-orthogonal inversion goes through the bordered system
// [L10, B*Y; (B*Y)^T, 0].

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "qgraph/discretize.hpp"

namespace qgraph {

/// Symmetric FD pencil for L10 on the grid of a DiscreteSystem:
/// M = A - B*diag(Lambda0 + 6 Phi0^2), with A the Kirchhoff stiffness matrix
/// and B the diagonal trapezoid mass. Eigenpairs of (M, B) discretize the
/// spectrum of L10.
class LinearizedOperator {
 public:
  LinearizedOperator(const DiscreteSystem& sys, const Eigen::VectorXd& phi0, double lambda0)
      : n_(sys.size()), B_(sys.trapezoid_weights()), phi0_(phi0), lambda0_(lambda0) {
    const FdGrid& grid = sys.grid();
    std::vector<Eigen::Triplet<double>> trip;
    for (int m = 0; m < sys.graph().edge_count(); ++m) {
      const double inv_h = 1.0 / grid.h[m];
      for (int i = 0; i < grid.intervals[m]; ++i) {
        const int p = grid.node_index(m, i);
        const int q = grid.node_index(m, i + 1);
        trip.emplace_back(p, p, inv_h);
        trip.emplace_back(q, q, inv_h);
        trip.emplace_back(p, q, -inv_h);
        trip.emplace_back(q, p, -inv_h);
      }
    }
    for (int i = 0; i < n_; ++i)
      trip.emplace_back(i, i, -B_(i) * (lambda0 + 6.0 * phi0(i) * phi0(i)));
    M_.resize(n_, n_);
    M_.setFromTriplets(trip.begin(), trip.end());
  }

  int size() const { return n_; }
  const Eigen::SparseMatrix<double>& matrix() const { return M_; }
  const Eigen::VectorXd& mass() const { return B_; }

  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return f.dot(B_.asDiagonal() * g);
  }
  double norm(const Eigen::VectorXd& f) const { return std::sqrt(inner(f, f)); }

  /// Apply the operator in function space: B^{-1} M u.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    return B_.cwiseInverse().asDiagonal() * (M_ * u);
  }

  /// Smallest-|theta| eigenpair of (M, B) by generalized inverse iteration,
  /// optionally deflating a known direction.
  std::pair<double, Eigen::VectorXd> smallest_eigenpair(
      const Eigen::VectorXd* deflate = nullptr) const {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M_);
    Eigen::SparseMatrix<double> M = M_;
    if (lu.info() != Eigen::Success) {
      Eigen::SparseMatrix<double> I(n_, n_);
      I.setIdentity();
      M = M_ + 1e-12 * I;
      lu.compute(M);
      if (lu.info() != Eigen::Success)
        throw std::runtime_error("LinearizedOperator: factorization failed");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n_);
    for (int i = 0; i < n_; ++i) v(i) += 1e-2 * std::sin(1.0 + 2.9 * i);
    if (deflate) v -= inner(*deflate, v) / inner(*deflate, *deflate) * (*deflate);
    v /= norm(v);
    double theta = 0.0;
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd w = lu.solve(B_.asDiagonal() * v);
      if (deflate) w -= inner(*deflate, w) / inner(*deflate, *deflate) * (*deflate);
      const double nw = norm(w);
      if (!w.allFinite() || nw == 0.0) break;
      w /= nw;
      if (inner(v, w) < 0.0) w = -w;  // fix the sign flip of negative eigenvalues
      const double theta_new = w.dot(M_ * w) / inner(w, w);
      const bool settled = (w - v).norm() < 1e-14 ||
                           std::abs(theta_new - theta) < 1e-14 * std::max(1.0, std::abs(theta_new));
      theta = theta_new;
      v = w;
      if (settled && it > 2) break;
    }
    theta = v.dot(M_ * v) / inner(v, v);
    return {theta, v};
  }

  /// Solve L10 x = r (r in function space) restricted to the complement of
  /// span{kernel}: bordered system [M, B k; (B k)^T, 0] [x; mu] = [B r; 0].
  /// The right-hand side must already be orthogonal to the kernel; the caller
  /// checks and reports, nothing is silently projected.
  Eigen::VectorXd solve_orthogonal(const Eigen::VectorXd& r, const Eigen::VectorXd& kernel) const {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < M_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(M_, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value());
    const Eigen::VectorXd bk = B_.asDiagonal() * kernel;
    for (int i = 0; i < n_; ++i) {
      trip.emplace_back(i, n_, bk(i));
      trip.emplace_back(n_, i, bk(i));
    }
    Eigen::SparseMatrix<double> Mb(n_ + 1, n_ + 1);
    Mb.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Mb);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("LinearizedOperator: bordered factorization failed");
    Eigen::VectorXd rhs(n_ + 1);
    rhs.head(n_) = B_.asDiagonal() * r;
    rhs(n_) = 0.0;
    const Eigen::VectorXd x = lu.solve(rhs);
    return x.head(n_);
  }

  /// Shift Lambda0 by the kernel eigenvalue so the located kernel is exact.
  void absorb_shift(double theta) {
    Eigen::SparseMatrix<double> D(n_, n_);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, -theta * B_(i));
    D.setFromTriplets(trip.begin(), trip.end());
    M_ = M_ + D;
    lambda0_ += theta;
  }

  double lambda0() const { return lambda0_; }

 private:
  int n_;
  Eigen::VectorXd B_;
  Eigen::VectorXd phi0_;
  double lambda0_;
  Eigen::SparseMatrix<double> M_;
};

// ---------------------------------------------------------------------------
// Theta quantities
// ---------------------------------------------------------------------------

/// Classification data at a branch point (Lambda0, Phi0) with one-dimensional
/// kernel spanned by the L2-normalized `nullvec`. For the cubic nonlinearity
/// G = 2 Phi^3: G2 = 12 Phi0 (a function), G3 = 12.
///   Theta1 = <Phi0, Y>
///   Theta2 = <G2, Y^3>
///   Theta3 = <1 - G2 * L10^{-1}Phi0, Y^2>
///   Theta4 = <G2 * (L10^{-1}Phi0)^2 - 2 L10^{-1}Phi0, Y>
///   Theta5 = <G3, Y^4> - 3 <G2 Y^2, L10^{-1}(G2 Y^2)>
/// Theta3..Theta5 require inverse applications and are only defined when the
/// corresponding right-hand sides are orthogonal to the kernel; otherwise the
/// fields are NaN and the flags below record why.
struct ThetaSet {
  double theta1 = 0.0, theta2 = 0.0;
  double theta3 = std::numeric_limits<double>::quiet_NaN();
  double theta4 = std::numeric_limits<double>::quiet_NaN();
  double theta5 = std::numeric_limits<double>::quiet_NaN();
  bool theta34_defined = false;  // L10^{-1} Phi0 existed (Theta1 ~ 0)
  bool theta5_defined = false;   // L10^{-1} (G2 Y^2) existed (Theta2 ~ 0)
  double lambda0 = 0.0;
  double kernel_eigenvalue = 0.0;  // residual eigenvalue before the shift
  Eigen::VectorXd nullvec;
  Eigen::VectorXd phi0;
};

struct ComputeThetaOptions {
  double orth_tol = 1e-8;       // orthogonality required of inverse right-hand sides
  double kernel_gap_tol = 1e-4; // eigenvalue gap below this => kernel effectively degenerate
};

inline ThetaSet compute_thetas(const DiscreteSystem& sys, const Eigen::VectorXd& phi0,
                               double lambda0, const ComputeThetaOptions& opt = {}) {
  LinearizedOperator op(sys, phi0, lambda0);

  auto [theta_min, kernel] = op.smallest_eigenpair();
  kernel /= op.norm(kernel);
  // deterministic sign
  int imax = 0;
  kernel.cwiseAbs().maxCoeff(&imax);
  if (kernel(imax) < 0.0) kernel = -kernel;

  // a second eigenvalue within the gap tolerance of the kernel eigenvalue
  // signals a (near-)degenerate pair: the kernel is not one-dimensional
  const auto [theta_second, dummy] = op.smallest_eigenpair(&kernel);
  (void)dummy;
  if (std::abs(theta_second - theta_min) < opt.kernel_gap_tol)
    throw std::invalid_argument("compute_thetas: kernel dimension exceeds one");

  // absorb the residual eigenvalue so the kernel is exact for the solves
  op.absorb_shift(theta_min);

  ThetaSet ts;
  ts.lambda0 = lambda0;
  ts.kernel_eigenvalue = theta_min;
  ts.nullvec = kernel;
  ts.phi0 = phi0;

  const Eigen::VectorXd g2 = 12.0 * phi0;  // second derivative of 2 Phi^3 at Phi0
  const double g3 = 12.0;

  const Eigen::VectorXd k2 = kernel.cwiseProduct(kernel);
  const Eigen::VectorXd k3 = k2.cwiseProduct(kernel);
  const Eigen::VectorXd k4 = k2.cwiseProduct(k2);

  ts.theta1 = op.inner(phi0, kernel);
  ts.theta2 = op.inner(g2, k3);

  const double phi0_scale = std::max(1.0, op.norm(phi0));
  if (std::abs(ts.theta1) <= opt.orth_tol * phi0_scale) {
    const Eigen::VectorXd linv_phi0 = op.solve_orthogonal(phi0, kernel);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.size());
    ts.theta3 = op.inner(ones - g2.cwiseProduct(linv_phi0), k2);
    ts.theta4 = op.inner(
        g2.cwiseProduct(linv_phi0.cwiseProduct(linv_phi0)) - 2.0 * linv_phi0, kernel);
    ts.theta34_defined = true;
  }

  const Eigen::VectorXd g2k2 = g2.cwiseProduct(k2);
  const double rhs_scale = std::max(1.0, op.norm(g2k2));
  if (std::abs(op.inner(g2k2, kernel)) <= opt.orth_tol * rhs_scale) {
    const Eigen::VectorXd linv_g2k2 = op.solve_orthogonal(g2k2, kernel);
    ts.theta5 = g3 * op.inner(k4, Eigen::VectorXd::Ones(sys.size())) -
                3.0 * op.inner(g2k2, linv_g2k2);
    ts.theta5_defined = true;
  }
  return ts;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class BifurcationKind { saddle_node, transcritical, pitchfork, unresolved };
enum class BranchSide { lambda_le, lambda_ge, not_applicable };

inline const char* to_string(BifurcationKind k) {
  switch (k) {
    case BifurcationKind::saddle_node: return "saddle-node";
    case BifurcationKind::transcritical: return "transcritical";
    case BifurcationKind::pitchfork: return "pitchfork";
    case BifurcationKind::unresolved: return "unresolved";
  }
  return "?";
}

inline const char* to_string(BranchSide s) {
  switch (s) {
    case BranchSide::lambda_le: return "lambda<=lambda0";
    case BranchSide::lambda_ge: return "lambda>=lambda0";
    case BranchSide::not_applicable: return "n/a";
  }
  return "?";
}

struct Classification {
  BifurcationKind kind = BifurcationKind::unresolved;
  BranchSide side = BranchSide::not_applicable;
};

/// Case table of the normal-form theorem, with |.| <= zero_tol as "= 0":
///  1. Theta1 != 0, Theta2 != 0            -> saddle-node; the two branches
///     exist for Lambda <= Lambda0 when Theta1*Theta2 > 0, else >=.
///  2. Theta1 = 0, Theta2 != 0, Theta3 != 0, Theta3^2 > Theta2*Theta4
///                                          -> transcritical.
///  3. Theta1 = 0, Theta2 = 0, Theta3 != 0, Theta5 != 0 -> pitchfork; three
///     branches for Lambda <= Lambda0 when Theta3*Theta4 > 0, else >=.
/// Anything else is unresolved.
inline Classification classify(const ThetaSet& t, double zero_tol) {
  Classification c;
  const auto zero = [&](double x) { return std::abs(x) <= zero_tol; };

  if (!zero(t.theta1) && !zero(t.theta2)) {
    c.kind = BifurcationKind::saddle_node;
    c.side = t.theta1 * t.theta2 > 0.0 ? BranchSide::lambda_le : BranchSide::lambda_ge;
    return c;
  }
  if (zero(t.theta1) && !zero(t.theta2)) {
    if (t.theta34_defined && !zero(t.theta3) &&
        t.theta3 * t.theta3 > t.theta2 * t.theta4) {
      c.kind = BifurcationKind::transcritical;
      c.side = BranchSide::not_applicable;
    }
    return c;
  }
  if (zero(t.theta1) && zero(t.theta2)) {
    if (t.theta34_defined && t.theta5_defined && !zero(t.theta3) && !zero(t.theta5)) {
      c.kind = BifurcationKind::pitchfork;
      if (t.theta3 * t.theta4 > zero_tol * zero_tol)
        c.side = BranchSide::lambda_le;
      else if (t.theta3 * t.theta4 < -zero_tol * zero_tol)
        c.side = BranchSide::lambda_ge;
      else
        c.side = BranchSide::not_applicable;
    }
    return c;
  }
  return c;
}

/// Default zero tolerance: 1e-6 scaled by the solution's power.
inline double default_zero_tol(const DiscreteSystem& sys, const Eigen::VectorXd& phi0) {
  return 1e-6 * std::max(1.0, sys.power(phi0));
}

inline Classification classify(const DiscreteSystem& sys, const Eigen::VectorXd& phi0,
                               double lambda0) {
  const ThetaSet t = compute_thetas(sys, phi0, lambda0);
  return classify(t, default_zero_tol(sys, phi0));
}

// ---------------------------------------------------------------------------
// Perturbation-expansion coefficients on the constant branch
// ---------------------------------------------------------------------------

struct PitchforkExpansion {
  double beta2 = 0.0;          // Lambda = Lambda0 + a^2 beta2 + ...
  Eigen::VectorXd phi2;        // second-order profile correction
  Eigen::VectorXd phi_tilde2;  // even-symmetric solution of L10 x = Phi_odd^2
  Eigen::VectorXd phi_odd;     // L2-normalized kernel at the odd crossing
  double lambda0 = 0.0;
};

/// Expansion at the odd crossing gamma = Omega1 of the constant branch:
/// Lambda0 = -Omega1^2/2, Phi0 = Omega1/2, kernel Phi_odd normalized to
/// unit L2 norm; L10 phi_tilde2 = Phi_odd^2 in the even-symmetric complement;
/// beta2 = 9 Omega1^2 int(Phi_odd^2 phi_tilde2); phi2 = phi_tilde2 - beta2/(2 Omega1).
inline PitchforkExpansion pitchfork_coefficients(const DiscreteSystem& sys, double omega_odd) {
  const double lambda0 = -0.5 * omega_odd * omega_odd;
  const Eigen::VectorXd phi0 =
      Eigen::VectorXd::Constant(sys.size(), 0.5 * omega_odd);
  LinearizedOperator op(sys, phi0, lambda0);
  auto [theta, kernel] = op.smallest_eigenpair();
  kernel /= op.norm(kernel);
  op.absorb_shift(theta);

  const Eigen::VectorXd rhs = kernel.cwiseProduct(kernel);
  const double orth = std::abs(op.inner(rhs, kernel));
  if (orth > 1e-8 * std::max(1.0, op.norm(rhs)))
    throw std::runtime_error("pitchfork_coefficients: kernel^2 not orthogonal to kernel "
                             "(crossing is not odd-symmetric)");
  const Eigen::VectorXd phi_t2 = op.solve_orthogonal(rhs, kernel);

  PitchforkExpansion ex;
  ex.lambda0 = lambda0;
  ex.phi_odd = kernel;
  ex.phi_tilde2 = phi_t2;
  ex.beta2 = 9.0 * omega_odd * omega_odd * op.inner(rhs, phi_t2);
  ex.phi2 = phi_t2 - Eigen::VectorXd::Constant(sys.size(), ex.beta2 / (2.0 * omega_odd));
  return ex;
}

struct TranscriticalExpansion {
  double C = 0.0;      // constant shift of the first-order profile
  double beta1 = 0.0;  // Lambda = Lambda0 + a beta1 + a^2 beta2 + ...
  double beta2 = 0.0;
  Eigen::VectorXd phi_tilde2;
  Eigen::VectorXd phi_even;  // L2-normalized kernel at the even crossing
  double lambda0 = 0.0;
};

/// Expansion at the even crossing gamma = omega1 of the constant branch:
/// C = -(3/4) int(Phi_even^3); beta1 = -2 omega1 C;
/// L10 phi_tilde2 = omega1 (4 C Phi_even + 3 Phi_even^2), <phi_tilde2, Phi_even> = 0;
/// beta2 = -4 C^2 + int(Phi_even^4) + (3 omega1/2) int(phi_tilde2 Phi_even^2).
inline TranscriticalExpansion transcritical_coefficients(const DiscreteSystem& sys,
                                                         double omega_even) {
  const double lambda0 = -0.5 * omega_even * omega_even;
  const Eigen::VectorXd phi0 =
      Eigen::VectorXd::Constant(sys.size(), 0.5 * omega_even);
  LinearizedOperator op(sys, phi0, lambda0);
  auto [theta, kernel] = op.smallest_eigenpair();
  kernel /= op.norm(kernel);
  op.absorb_shift(theta);

  const Eigen::VectorXd k2 = kernel.cwiseProduct(kernel);
  const Eigen::VectorXd k3 = k2.cwiseProduct(kernel);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.size());

  TranscriticalExpansion ex;
  ex.lambda0 = lambda0;
  ex.phi_even = kernel;
  ex.C = -0.75 * op.inner(k3, ones);
  ex.beta1 = -2.0 * omega_even * ex.C;

  const Eigen::VectorXd rhs = omega_even * (4.0 * ex.C * kernel + 3.0 * k2);
  const double orth = std::abs(op.inner(rhs, kernel));
  if (orth > 1e-8 * std::max(1.0, op.norm(rhs)))
    throw std::runtime_error("transcritical_coefficients: solvability condition violated");
  ex.phi_tilde2 = op.solve_orthogonal(rhs, kernel);

  ex.beta2 = -4.0 * ex.C * ex.C + op.inner(k2, k2) +
             1.5 * omega_even * op.inner(ex.phi_tilde2, k2);
  return ex;
}

}  // namespace qgraph
