#pragma once
// Newton solver, pseudo-arclength continuation with tangent predictor and
// orthogonal corrector, fold/branch-point detection, and branch switching for
// the discretized stationary NLS.
//
// Test functions along a branch:
//   fold          -- the tangent's Lambda-component changes sign;
//   branch point  -- the determinant of the tangent-bordered Jacobian
//                    [J, F_Lambda; t^T] changes sign (a fold alone does not
//                    flip it).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "qgraph/discretize.hpp"

namespace qgraph {

class NewtonFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distinct from plain non-convergence: signals proximity to a bifurcation.
class SingularJacobian : public NewtonFailure {
 public:
  using NewtonFailure::NewtonFailure;
};

struct NewtonOptions {
  double tol = 1e-10;   // max-norm residual target
  int max_iter = 50;
  bool iterative = false;  // BiCGSTAB instead of the direct sparse factorization
};

namespace detail {

inline Eigen::VectorXd sparse_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs,
                                    bool iterative, const char* who) {
  if (iterative) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> it;
    it.setTolerance(1e-14);
    it.setMaxIterations(20 * A.rows());
    it.compute(A);
    Eigen::VectorXd x = it.solve(rhs);
    if (it.info() != Eigen::Success)
      throw SingularJacobian(std::string(who) + ": iterative solve failed");
    return x;
  }
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success)
    throw SingularJacobian(std::string(who) + ": sparse factorization failed");
  return lu.solve(rhs);
}

}  // namespace detail

/// Newton iteration at fixed Lambda. Throws NewtonFailure on non-convergence
/// and SingularJacobian when the linear solver breaks down.
inline Eigen::VectorXd newton_solve(const DiscreteSystem& sys, Eigen::VectorXd u, double lambda,
                                    const NewtonOptions& opt = {}) {
  if (u.size() != sys.size()) throw std::invalid_argument("newton_solve: size mismatch");
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  for (int it = 0; it < opt.max_iter; ++it) {
    const Eigen::VectorXd r = sys.residual(u, lambda);
    if (r.cwiseAbs().maxCoeff() <= opt.tol) return u;
    const Eigen::VectorXd du =
        detail::sparse_solve(sys.jacobian(u, lambda), r, opt.iterative, "newton_solve");
    if (!du.allFinite() || du.cwiseAbs().maxCoeff() > 1e8 * scale)
      throw SingularJacobian("newton_solve: update blew up (near-singular Jacobian)");
    u -= du;
  }
  throw NewtonFailure("newton_solve: no convergence within the iteration cap");
}

inline GraphFunction newton_solve(const DiscreteSystem& sys, const GraphFunction& guess,
                                  double lambda, const NewtonOptions& opt = {}) {
  return sys.to_function(newton_solve(sys, sys.to_vector(guess), lambda, opt));
}

// ---------------------------------------------------------------------------
// Branch records
// ---------------------------------------------------------------------------

enum class PointTag : std::uint8_t { start = 1, fold = 2, branch_point = 4 };

struct BranchPoint {
  double lambda = 0.0;
  double Q = 0.0;
  double s = 0.0;  // arclength along the branch
  Eigen::VectorXd u;
  std::uint8_t tags = 0;
  // continuation diagnostics used by detect_events
  double tangent_lambda = 0.0;
  int border_det_sign = 0;

  bool has_tag(PointTag t) const { return tags & static_cast<std::uint8_t>(t); }
  void add_tag(PointTag t) { tags |= static_cast<std::uint8_t>(t); }
  std::string tag_string() const {
    std::string s_;
    if (has_tag(PointTag::start)) s_ += "start;";
    if (has_tag(PointTag::fold)) s_ += "fold;";
    if (has_tag(PointTag::branch_point)) s_ += "branch_point;";
    if (!s_.empty()) s_.pop_back();
    return s_;
  }
};

struct Branch {
  std::vector<BranchPoint> points;
  std::string origin;
};

struct ContinuationOptions {
  double ds = 0.01;
  double ds_min = 1e-5;
  double ds_max = 0.1;
  double grow = 1.3;
  int easy_steps_to_grow = 3;
  int easy_iteration_count = 4;
  int max_steps = 20000;
  NewtonOptions newton;
};

namespace detail {

struct BorderedLu {
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_ptr =
      std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  bool ok = false;
  int det_sign = 0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu() { return *lu_ptr; }
};

// (n+1) x (n+1) pseudo-arclength matrix [J, F_Lambda; t_u^T, t_lambda].
inline Eigen::SparseMatrix<double> bordered_matrix(const DiscreteSystem& sys,
                                                   const Eigen::VectorXd& u, double lambda,
                                                   const Eigen::VectorXd& t_u, double t_lambda) {
  const int n = sys.size();
  const Eigen::SparseMatrix<double> J = sys.jacobian(u, lambda);
  const Eigen::VectorXd fl = sys.residual_dlambda(u);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(J.nonZeros() + 3 * n + 1);
  for (int k = 0; k < J.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    if (fl(i) != 0.0) trip.emplace_back(i, n, fl(i));
    if (t_u(i) != 0.0) trip.emplace_back(n, i, t_u(i));
  }
  trip.emplace_back(n, n, t_lambda);
  Eigen::SparseMatrix<double> M(n + 1, n + 1);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

inline BorderedLu factor_bordered(const Eigen::SparseMatrix<double>& M) {
  BorderedLu b;
  b.lu().compute(M);
  b.ok = b.lu().info() == Eigen::Success;
  if (b.ok) {
    const double sd = b.lu().signDeterminant();
    b.det_sign = sd > 0 ? 1 : (sd < 0 ? -1 : 0);
  }
  return b;
}

// Smallest-magnitude eigenvalue of M by inverse iteration (real Rayleigh
// estimate; near a simple branch point the relevant eigenvalue is real).
inline double smallest_eigenvalue_estimate(const Eigen::SparseMatrix<double>& M, int iters = 25) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
  if (lu.info() != Eigen::Success) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(M.rows());
  for (int i = 0; i < M.rows(); ++i) v(i) += 1e-3 * std::sin(1.0 + 3.7 * i);
  v.normalize();
  double theta = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    if (!w.allFinite() || w.norm() == 0.0) break;
    w.normalize();
    theta = w.dot(M * w);
    v = w;
  }
  return theta;
}

struct TangentResult {
  Eigen::VectorXd t_u;
  double t_lambda = 0.0;
  int det_sign = 0;
};

// New unit tangent from the bordered solve M t = e_{n+1}; the border row is
// the previous tangent, so orientation is preserved automatically.
inline TangentResult next_tangent(const DiscreteSystem& sys, const Eigen::VectorXd& u,
                                  double lambda, const Eigen::VectorXd& t_u_prev,
                                  double t_lambda_prev) {
  const int n = sys.size();
  const auto M = bordered_matrix(sys, u, lambda, t_u_prev, t_lambda_prev);
  auto f = factor_bordered(M);
  if (!f.ok) throw SingularJacobian("continuation: bordered factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd t = f.lu().solve(rhs);
  const double nrm = t.norm();
  if (!(nrm > 0.0) || !t.allFinite())
    throw SingularJacobian("continuation: tangent solve failed");
  t /= nrm;
  return {t.head(n), t(n), f.det_sign};
}

}  // namespace detail

/// Pseudo-arclength continuation from a converged seed. `direction` picks the
/// sign of the initial tangent's Lambda-component. Steps adapt: halve on a
/// failed corrector, grow by `grow` after consecutive easy steps, clamp to
/// [ds_min, ds_max]. Terminates when Lambda leaves [window_lo, window_hi],
/// the step underflows, or max_steps is reached.
inline Branch continue_branch(const DiscreteSystem& sys, const Eigen::VectorXd& seed_u,
                              double seed_lambda, int direction, double window_lo,
                              double window_hi, const ContinuationOptions& opt = {},
                              const std::string& origin = "") {
  if (window_lo >= window_hi) throw std::invalid_argument("continue_branch: empty window");
  Branch branch;
  branch.origin = origin;

  Eigen::VectorXd u = newton_solve(sys, seed_u, seed_lambda, opt.newton);  // seed must converge
  double lambda = seed_lambda;

  // Initial tangent from the bordered solve with a Lambda-axis border.
  Eigen::VectorXd t_u = Eigen::VectorXd::Zero(sys.size());
  double t_lambda = direction >= 0 ? 1.0 : -1.0;
  auto tan = detail::next_tangent(sys, u, lambda, t_u, t_lambda);
  t_u = tan.t_u;
  t_lambda = tan.t_lambda;
  if ((direction >= 0 && t_lambda < 0.0) || (direction < 0 && t_lambda > 0.0)) {
    t_u = -t_u;
    t_lambda = -t_lambda;
  }

  BranchPoint start;
  start.lambda = lambda;
  start.Q = sys.power(u);
  start.s = 0.0;
  start.u = u;
  start.add_tag(PointTag::start);
  start.tangent_lambda = t_lambda;
  start.border_det_sign = tan.det_sign;
  branch.points.push_back(start);

  double ds = std::clamp(opt.ds, opt.ds_min, opt.ds_max);
  double s = 0.0;
  int easy = 0;

  for (int step = 0; step < opt.max_steps; ++step) {
    bool accepted = false;
    Eigen::VectorXd u_new;
    double lambda_new = 0.0;
    int iters_used = 0;

    while (!accepted) {
      // predictor
      Eigen::VectorXd up = u + ds * t_u;
      double lp = lambda + ds * t_lambda;
      // corrector: F = 0 together with orthogonality to the tangent
      bool ok = true;
      for (iters_used = 0; iters_used < 12; ++iters_used) {
        const Eigen::VectorXd r = sys.residual(up, lp);
        const double c = t_u.dot(up - u) + t_lambda * (lp - lambda) - ds;
        if (r.cwiseAbs().maxCoeff() <= opt.newton.tol && std::abs(c) <= 1e-12) break;
        Eigen::VectorXd rhs(sys.size() + 1);
        rhs.head(sys.size()) = r;
        rhs(sys.size()) = c;
        auto f = detail::factor_bordered(detail::bordered_matrix(sys, up, lp, t_u, t_lambda));
        if (!f.ok) {
          ok = false;
          break;
        }
        const Eigen::VectorXd d = f.lu().solve(rhs);
        if (!d.allFinite()) {
          ok = false;
          break;
        }
        up -= d.head(sys.size());
        lp -= d(sys.size());
      }
      if (ok && iters_used < 12 &&
          sys.residual(up, lp).cwiseAbs().maxCoeff() <= opt.newton.tol) {
        u_new = up;
        lambda_new = lp;
        accepted = true;
      } else {
        ds *= 0.5;
        easy = 0;
        if (ds < opt.ds_min) return branch;  // step underflow
      }
    }

    // new tangent (border = previous tangent keeps orientation and gives the
    // branch-point determinant test function)
    detail::TangentResult tn;
    try {
      tn = detail::next_tangent(sys, u_new, lambda_new, t_u, t_lambda);
    } catch (const SingularJacobian&) {
      return branch;  // sitting on a singularity: stop cleanly
    }

    s += ds;
    u = u_new;
    lambda = lambda_new;
    t_u = tn.t_u;
    t_lambda = tn.t_lambda;

    BranchPoint p;
    p.lambda = lambda;
    p.Q = sys.power(u);
    p.s = s;
    p.u = u;
    p.tangent_lambda = t_lambda;
    p.border_det_sign = tn.det_sign;
    branch.points.push_back(p);

    if (lambda < window_lo || lambda > window_hi) break;

    if (iters_used <= opt.easy_iteration_count) {
      if (++easy >= opt.easy_steps_to_grow) {
        ds = std::min(ds * opt.grow, opt.ds_max);
        easy = 0;
      }
    } else {
      easy = 0;
    }
  }
  return branch;
}

// ---------------------------------------------------------------------------
// Event detection
// ---------------------------------------------------------------------------

enum class EventKind { fold, branch_point };

struct BranchEvent {
  EventKind kind = EventKind::fold;
  double lambda = 0.0;
  double s = 0.0;
  std::size_t segment = 0;  // index i: event lies between points[i] and points[i+1]
  Eigen::VectorXd u;        // located point (branch points only)
};

namespace detail {

// Re-correct a point at arclength offset `ds` from base point `p` along its
// tangent; returns the corrected (u, lambda).
inline std::optional<std::pair<Eigen::VectorXd, double>> correct_at(
    const DiscreteSystem& sys, const BranchPoint& p, const Eigen::VectorXd& t_u, double t_lambda,
    double ds, double tol) {
  Eigen::VectorXd up = p.u + ds * t_u;
  double lp = p.lambda + ds * t_lambda;
  for (int it = 0; it < 15; ++it) {
    const Eigen::VectorXd r = sys.residual(up, lp);
    const double c = t_u.dot(up - p.u) + t_lambda * (lp - p.lambda) - ds;
    if (r.cwiseAbs().maxCoeff() <= tol && std::abs(c) <= 1e-12)
      return std::make_pair(up, lp);
    Eigen::VectorXd rhs(sys.size() + 1);
    rhs.head(sys.size()) = r;
    rhs(sys.size()) = c;
    auto f = factor_bordered(bordered_matrix(sys, up, lp, t_u, t_lambda));
    if (!f.ok) return std::nullopt;
    const Eigen::VectorXd d = f.lu().solve(rhs);
    if (!d.allFinite()) return std::nullopt;
    up -= d.head(sys.size());
    lp -= d(sys.size());
  }
  return std::nullopt;
}

}  // namespace detail

/// Scan a continued branch for folds (tangent Lambda-component sign change,
/// located by a local quadratic fit of Lambda(s)) and branch points (bordered
/// determinant sign change not explained by a fold, located by bisection in s
/// until the smallest-magnitude eigenvalue of the bordered system is <= 1e-8).
/// Near-coincident events are all reported, folds first within a tie.
inline std::vector<BranchEvent> detect_events(const DiscreteSystem& sys, const Branch& branch,
                                              double newton_tol = 1e-10) {
  std::vector<BranchEvent> events;
  const auto& pts = branch.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[i + 1];

    const bool fold_here = a.tangent_lambda * b.tangent_lambda < 0.0;
    if (fold_here) {
      // quadratic fit of Lambda(s) through up to four surrounding points
      std::vector<std::pair<double, double>> sl;
      if (i >= 1) sl.emplace_back(pts[i - 1].s, pts[i - 1].lambda);
      sl.emplace_back(a.s, a.lambda);
      sl.emplace_back(b.s, b.lambda);
      if (i + 2 < pts.size()) sl.emplace_back(pts[i + 2].s, pts[i + 2].lambda);
      Eigen::MatrixXd V(sl.size(), 3);
      Eigen::VectorXd y(sl.size());
      for (std::size_t r = 0; r < sl.size(); ++r) {
        const double ss = sl[r].first - a.s;
        V(r, 0) = 1.0;
        V(r, 1) = ss;
        V(r, 2) = ss * ss;
        y(r) = sl[r].second;
      }
      const Eigen::Vector3d coef = (V.transpose() * V).ldlt().solve(V.transpose() * y);
      BranchEvent ev;
      ev.kind = EventKind::fold;
      ev.segment = i;
      if (std::abs(coef(2)) > 1e-14) {
        const double ds_star = std::clamp(-coef(1) / (2.0 * coef(2)), 0.0, b.s - a.s);
        ev.s = a.s + ds_star;
        ev.lambda = coef(0) + coef(1) * ds_star + coef(2) * ds_star * ds_star;
      } else {
        ev.s = 0.5 * (a.s + b.s);
        ev.lambda = 0.5 * (a.lambda + b.lambda);
      }
      events.push_back(ev);
    }

    if (a.border_det_sign != 0 && b.border_det_sign != 0 &&
        a.border_det_sign != b.border_det_sign && !fold_here) {
      // A clean local tangent at `a` (bordered by the Lambda axis), oriented
      // toward `b`; det signs for the bisection are all taken with this same
      // border so the bracket is consistent.
      Eigen::VectorXd t_u;
      double t_l;
      try {
        const auto tan_a = detail::next_tangent(sys, a.u, a.lambda,
                                                Eigen::VectorXd::Zero(sys.size()), 1.0);
        t_u = tan_a.t_u;
        t_l = tan_a.t_lambda;
      } catch (const SingularJacobian&) {
        continue;
      }
      if (t_u.dot(b.u - a.u) + t_l * (b.lambda - a.lambda) < 0.0) {
        t_u = -t_u;
        t_l = -t_l;
      }
      const auto sign_at = [&](const Eigen::VectorXd& uu, double ll) {
        return detail::factor_bordered(detail::bordered_matrix(sys, uu, ll, t_u, t_l)).det_sign;
      };
      const int sign_a = sign_at(a.u, a.lambda);
      const int sign_b = sign_at(b.u, b.lambda);
      if (sign_a == 0 || sign_b == 0 || sign_a == sign_b) continue;

      double lo = 0.0, hi = b.s - a.s;
      Eigen::VectorXd u_best = a.u;
      double l_best = a.lambda, s_best = a.s;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto corr = detail::correct_at(sys, a, t_u, t_l, mid, newton_tol);
        if (!corr) break;
        const auto M = detail::bordered_matrix(sys, corr->first, corr->second, t_u, t_l);
        auto f = detail::factor_bordered(M);
        if (!f.ok) break;
        u_best = corr->first;
        l_best = corr->second;
        s_best = a.s + mid;
        const double lam_min = std::abs(detail::smallest_eigenvalue_estimate(M));
        if (lam_min <= 1e-8 || hi - lo < 1e-12) break;
        if (f.det_sign == sign_a) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      BranchEvent ev;
      ev.kind = EventKind::branch_point;
      ev.segment = i;
      ev.lambda = l_best;
      ev.s = s_best;
      ev.u = u_best;
      events.push_back(ev);
    }
  }

  std::sort(events.begin(), events.end(), [](const BranchEvent& x, const BranchEvent& y) {
    if (std::abs(x.lambda - y.lambda) < 1e-4)
      return (x.kind == EventKind::fold) > (y.kind == EventKind::fold);
    return x.s < y.s;
  });
  return events;
}

// ---------------------------------------------------------------------------
// Branch switching
// ---------------------------------------------------------------------------

struct SwitchSeed {
  Eigen::VectorXd u;
  double lambda = 0.0;
};

namespace detail {

// Kernel vector of the plain Jacobian by inverse iteration, plus a
// second-direction estimate used to verify the kernel is one-dimensional.
inline std::pair<Eigen::VectorXd, double> jacobian_kernel(const DiscreteSystem& sys,
                                                          const Eigen::VectorXd& u, double lambda,
                                                          Eigen::VectorXd* second_theta_vec = nullptr,
                                                          double* second_theta = nullptr) {
  const Eigen::SparseMatrix<double> J = sys.jacobian(u, lambda);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
  Eigen::SparseMatrix<double> Js = J;
  if (lu.info() != Eigen::Success) {
    // exactly singular: tiny diagonal shift
    Eigen::SparseMatrix<double> shift(sys.size(), sys.size());
    shift.setIdentity();
    Js = J + 1e-12 * shift;
    lu.compute(Js);
    if (lu.info() != Eigen::Success)
      throw SingularJacobian("switch_branch: cannot factorize near-singular Jacobian");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Ones(sys.size());
  for (int i = 0; i < sys.size(); ++i) v(i) += 1e-2 * std::cos(2.0 + 1.7 * i);
  v.normalize();
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    if (!w.allFinite() || w.norm() == 0.0) break;
    w.normalize();
    if ((w - v).norm() < 1e-14 || (w + v).norm() < 1e-14) {
      v = w;
      break;
    }
    v = w;
  }
  const double theta1 = v.dot(J * v);

  // deflated inverse iteration for the next-smallest eigenvalue estimate
  Eigen::VectorXd w = Eigen::VectorXd::Ones(sys.size());
  for (int i = 0; i < sys.size(); ++i) w(i) += 1e-2 * std::sin(0.5 + 2.3 * i);
  w -= v.dot(w) * v;
  w.normalize();
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd z = lu.solve(w);
    z -= v.dot(z) * v;
    if (!z.allFinite() || z.norm() == 0.0) break;
    z.normalize();
    w = z;
  }
  if (second_theta) *second_theta = w.dot(J * w);
  if (second_theta_vec) *second_theta_vec = w;
  return {v, theta1};
}

}  // namespace detail

/// Seeds for the branches crossing a located branch point: the null direction
/// is added with both signs (size 1e-2 relative to the base solution) and each
/// seed is corrected by Newton with a phase condition pinning its component
/// along the null vector, solving for (u, Lambda) jointly. Refuses when the
/// kernel is not one-dimensional or when the point is regular.
inline std::vector<SwitchSeed> switch_branch(const DiscreteSystem& sys, const Eigen::VectorXd& u0,
                                             double lambda0, const NewtonOptions& opt = {}) {
  double theta2 = 0.0;
  const auto [nullvec, theta1] = detail::jacobian_kernel(sys, u0, lambda0, nullptr, &theta2);
  const double scale = std::max(1.0, u0.cwiseAbs().maxCoeff());
  // the threshold admits O(h^2) location error of the branch point while
  // still refusing genuinely regular points (whose smallest eigenvalue sits
  // at the distance between consecutive linear eigenvalues)
  if (std::abs(theta1) > 1e-3 * scale)
    throw std::invalid_argument("switch_branch: point is regular (no kernel); refusing to switch");
  if (std::abs(theta2 - theta1) < 1e-4 * scale)
    throw std::invalid_argument("switch_branch: kernel dimension exceeds one; refusing to switch");

  // L2-normalize the null direction in the trapezoid inner product
  const Eigen::VectorXd W = sys.trapezoid_weights();
  Eigen::VectorXd ups = nullvec / std::sqrt(nullvec.dot(W.asDiagonal() * nullvec));

  const double base_norm = std::sqrt(u0.dot(W.asDiagonal() * u0));
  const double delta0 = base_norm > 0.0 ? 1e-2 * base_norm : 1e-2;

  std::vector<SwitchSeed> seeds;
  for (const double sign : {+1.0, -1.0}) {
    bool done = false;
    for (double delta = delta0; delta >= delta0 / 8.0 && !done; delta *= 0.5) {
      Eigen::VectorXd u = u0 + sign * delta * ups;
      double lambda = lambda0;
      const Eigen::VectorXd c = W.asDiagonal() * ups;  // phase condition row
      bool ok = true;
      for (int it = 0; it < 30; ++it) {
        const Eigen::VectorXd r = sys.residual(u, lambda);
        const double g = c.dot(u - u0) - sign * delta;
        if (r.cwiseAbs().maxCoeff() <= opt.tol && std::abs(g) <= 1e-12) break;
        auto f = detail::factor_bordered(detail::bordered_matrix(sys, u, lambda, c, 0.0));
        if (!f.ok) {
          ok = false;
          break;
        }
        Eigen::VectorXd rhs(sys.size() + 1);
        rhs.head(sys.size()) = r;
        rhs(sys.size()) = g;
        const Eigen::VectorXd d = f.lu().solve(rhs);
        if (!d.allFinite()) {
          ok = false;
          break;
        }
        u -= d.head(sys.size());
        lambda -= d(sys.size());
      }
      if (ok && sys.residual(u, lambda).cwiseAbs().maxCoeff() <= opt.tol) {
        seeds.push_back({u, lambda});
        done = true;
      }
    }
  }
  return seeds;
}

/// Null direction of the Jacobian at a located branch point (L2-normalized).
inline Eigen::VectorXd null_direction(const DiscreteSystem& sys, const Eigen::VectorXd& u0,
                                      double lambda0) {
  const auto [v, theta] = detail::jacobian_kernel(sys, u0, lambda0);
  (void)theta;
  const Eigen::VectorXd W = sys.trapezoid_weights();
  return v / std::sqrt(v.dot(W.asDiagonal() * v));
}

}  // namespace qgraph
