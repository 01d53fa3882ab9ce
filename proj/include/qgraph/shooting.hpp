#pragma once
// Enumeration of dumbbell standing waves.
//
// Three families, classified by the loop behavior at the vertices:
//  * two incomplete loops -- found by a shooting function f(q, Lambda, L)
//    built from three consecutive initial value problems;
//  * two complete loops -- cataloged by a label triple (n1, m, n3) stitched
//    from quantized elliptic waves;
//  * one of each -- lollipop standing waves (Neumann tip) extended by a
//    quantized loop wherever the tip value fits inside the loop wave's band.
//
// Every produced solution is verified against the finite-difference system:
// projection onto the grid followed by a Newton polish must converge with an
// O(h^2)-sized correction.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/continuation.hpp"
#include "qgraph/discretize.hpp"
#include "qgraph/elliptic.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/ode.hpp"
#include "qgraph/parallel.hpp"

namespace qgraph {

// ---------------------------------------------------------------------------
// Shooting for two incomplete loops
// ---------------------------------------------------------------------------

struct ShotResult {
  double q = 0.0;
  double f = 0.0;  // phi3'(0); the shot hits a standing wave when f = 0
  bool diverged = false;
  int divergence_sign = 0;  // sign of the last finite derivative, when known
  std::shared_ptr<GraphFunction> trajectory;  // dumbbell candidate (loops mirrored)
};

namespace detail {

inline std::vector<int> default_shot_intervals(const DiscreteSystem& sys) {
  auto ns = sys.grid().intervals;
  for (auto& n : ns)
    if (n % 2) ++n;  // loop midpoints must be grid points for the mirroring
  return ns;
}

}  // namespace detail

/// One shot of the two-incomplete-loop construction:
///   1. integrate the edge equation over half of the first loop from
///      (phi, phi') = (q, 0);
///   2. cross to the segment with phi2(-L) = phi1(pi), phi2'(-L) = 2 phi1'(pi);
///   3. cross to the second loop with phi3(-pi) = phi2(L),
///      phi3'(-pi) = phi2'(L)/2, and integrate to its midpoint.
/// Both vertex conditions are imposed exactly by construction. The returned
/// trajectory mirrors the half-loops (exact for roots of f; a labeled
/// candidate otherwise).
inline ShotResult shoot(double q, double lambda, double L, double tol = 1e-12,
                        const std::vector<int>* intervals = nullptr) {
  const double pi = std::numbers::pi;
  std::vector<int> ns = intervals ? *intervals : std::vector<int>{128, 80, 128};
  for (auto& n : ns)
    if (n % 2) ++n;

  ShotResult out;
  out.q = q;

  std::vector<EdgeState> half1, seg, half3;
  // stage 1: half of the first loop
  auto r1 = integrate_edge(lambda, {q, 0.0}, 0.0, pi, tol, 1e6, &half1, ns[0] / 2);
  if (r1.diverged) {
    out.diverged = true;
    out.divergence_sign = (half1.back().dphi > 0) - (half1.back().dphi < 0);
    return out;
  }
  // stage 2: the segment
  auto r2 = integrate_edge(lambda, {r1.y.phi, 2.0 * r1.y.dphi}, -L, L, tol, 1e6, &seg, ns[1]);
  if (r2.diverged) {
    out.diverged = true;
    out.divergence_sign = (seg.back().dphi > 0) - (seg.back().dphi < 0);
    return out;
  }
  // stage 3: half of the second loop
  auto r3 = integrate_edge(lambda, {r2.y.phi, 0.5 * r2.y.dphi}, -pi, 0.0, tol, 1e6, &half3,
                           ns[2] / 2);
  if (r3.diverged) {
    out.diverged = true;
    out.divergence_sign = (half3.back().dphi > 0) - (half3.back().dphi < 0);
    return out;
  }
  out.f = r3.y.dphi;

  // assemble the dumbbell candidate: loops are even about their midpoints
  auto graph = std::make_shared<const MetricGraph>(build_dumbbell(L));
  std::vector<Eigen::VectorXd> vals(3);
  vals[0].resize(ns[0] + 1);
  for (int i = 0; i <= ns[0] / 2; ++i) {
    vals[0](ns[0] / 2 + i) = half1[i].phi;  // x in [0, pi]
    vals[0](ns[0] / 2 - i) = half1[i].phi;  // mirrored onto [-pi, 0]
  }
  vals[1].resize(ns[1] + 1);
  for (int i = 0; i <= ns[1]; ++i) vals[1](i) = seg[i].phi;
  vals[2].resize(ns[2] + 1);
  for (int i = 0; i <= ns[2] / 2; ++i) {
    vals[2](i) = half3[i].phi;                    // x in [-pi, 0]
    vals[2](ns[2] - i) = half3[i].phi;            // mirrored onto [0, pi]
  }
  out.trajectory = std::make_shared<GraphFunction>(graph, std::move(vals), 1e-6);
  return out;
}

/// Verification of a candidate against the FD system: Newton polish from the
/// projected samples must converge to residual <= 1e-10 while moving the
/// samples by no more than an O(h^2)-sized bound.
struct FdVerification {
  bool ok = false;
  double correction = 0.0;
  double residual = 0.0;
  Eigen::VectorXd refined;
};

inline FdVerification verify_on_grid(const DiscreteSystem& sys, const GraphFunction& candidate,
                                     double lambda, double bound_factor = 40.0) {
  FdVerification v;
  Eigen::VectorXd u0;
  try {
    u0 = sys.to_vector(candidate);
  } catch (const std::invalid_argument&) {
    return v;
  }
  try {
    NewtonOptions opt;
    opt.tol = 1e-10;
    v.refined = newton_solve(sys, u0, lambda, opt);
  } catch (const NewtonFailure&) {
    return v;
  }
  v.correction = (v.refined - u0).cwiseAbs().maxCoeff();
  v.residual = sys.residual(v.refined, lambda).cwiseAbs().maxCoeff();
  const double h = sys.max_h();
  const double amp = 1.0 + u0.cwiseAbs().maxCoeff();
  v.ok = v.residual <= 1e-10 && v.correction <= bound_factor * h * h * amp * amp * amp;
  return v;
}

struct StandingWave {
  double q = 0.0;
  double lambda = 0.0;
  double Q = 0.0;  // power of the FD-refined solution
  GraphFunction solution;
  Eigen::VectorXd refined;
};

struct ShootScan {
  std::vector<StandingWave> waves;
  std::vector<std::pair<double, double>> divergent_gaps;  // q-intervals skipped
};

/// All roots of f(q, Lambda, L) on [q_lo, q_hi]: evaluate f on a uniform grid
/// (shots run in parallel), bracket sign changes between finite samples,
/// bisect each bracket to |f| <= 1e-10, and verify every reconstructed
/// solution against the FD system. Divergent-shot q-intervals are reported.
inline ShootScan find_standing_waves(double lambda, double L, double q_lo, double q_hi,
                                     int grid_points = 2000,
                                     const DiscreteSystem* verify_sys = nullptr) {
  if (!(q_hi > q_lo)) throw std::invalid_argument("find_standing_waves: empty q range");
  std::unique_ptr<DiscreteSystem> own_sys;
  if (!verify_sys) {
    own_sys = std::make_unique<DiscreteSystem>(
        std::make_shared<const MetricGraph>(build_dumbbell(L)));
    verify_sys = own_sys.get();
  }
  const auto ns = detail::default_shot_intervals(*verify_sys);

  std::vector<ShotResult> shots(grid_points + 1);
  parallel_for(grid_points + 1, [&](int i) {
    const double q = q_lo + (q_hi - q_lo) * i / grid_points;
    shots[i] = shoot(q, lambda, L, 1e-12, &ns);
  });

  ShootScan scan;
  for (int i = 0; i + 1 <= grid_points; ++i) {
    const auto& a = shots[i];
    const auto& b = shots[i + 1];
    if (a.diverged || b.diverged) {
      if (scan.divergent_gaps.empty() || scan.divergent_gaps.back().second < a.q) {
        scan.divergent_gaps.emplace_back(a.q, b.q);
      } else {
        scan.divergent_gaps.back().second = b.q;
      }
      continue;
    }
    if (a.f == 0.0 && a.q > q_lo) continue;  // exact grid hit handled below
    if (a.f * b.f > 0.0) continue;

    // bisect the bracket
    double lo = a.q, hi = b.q, flo = a.f;
    ShotResult best = std::abs(a.f) < std::abs(b.f) ? a : b;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto s = shoot(mid, lambda, L, 1e-12, &ns);
      if (s.diverged) break;
      if (std::abs(s.f) < std::abs(best.f)) best = s;
      if (std::abs(best.f) <= 1e-10 && hi - lo < 1e-12) break;
      if ((s.f < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = s.f;
      } else {
        hi = mid;
      }
    }
    if (std::abs(best.f) > 1e-10 || !best.trajectory) continue;
    if (!scan.waves.empty() && std::abs(scan.waves.back().q - best.q) < 1e-9) continue;

    const auto ver = verify_on_grid(*verify_sys, *best.trajectory, lambda);
    if (!ver.ok) continue;
    StandingWave w{best.q, lambda, verify_sys->power(ver.refined), *best.trajectory, ver.refined};
    scan.waves.push_back(std::move(w));
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Complete-loop catalog
// ---------------------------------------------------------------------------

/// Label of the solution's restriction to one edge:
///   zero        identically vanishing edge,
///   constant    the edge sits at +-sqrt(-Lambda/2),
///   cn(n)       n full periods (loops) or n half-periods (center) of cn,
///   dn(n)       likewise for dn.
struct EdgeLabel {
  enum class Kind { zero, constant, cn, dn };
  Kind kind = Kind::zero;
  int count = 0;

  static EdgeLabel zero() { return {Kind::zero, 0}; }
  static EdgeLabel constant() { return {Kind::constant, 0}; }
  static EdgeLabel cn(int n) { return {Kind::cn, n}; }
  static EdgeLabel dn(int n) { return {Kind::dn, n}; }

  bool operator==(const EdgeLabel&) const = default;
  bool operator<(const EdgeLabel& o) const {
    // order by the signed-integer convention: dn < 0 ("Lambda") < zero < cn
    const auto key = [](const EdgeLabel& l) {
      switch (l.kind) {
        case Kind::dn: return -100 - l.count;
        case Kind::constant: return -50;
        case Kind::zero: return 0;
        case Kind::cn: return l.count;
      }
      return 0;
    };
    return key(*this) < key(o);
  }

  std::string str() const {
    switch (kind) {
      case Kind::zero: return "0";
      case Kind::constant: return "Lambda";
      case Kind::cn: return std::to_string(count);
      case Kind::dn: return std::to_string(-count);
    }
    return "?";
  }
};

struct SolutionTriple {
  EdgeLabel n1, m, n3;

  bool operator==(const SolutionTriple&) const = default;
  bool operator<(const SolutionTriple& o) const {
    if (!(n1 == o.n1)) return n1 < o.n1;
    if (!(m == o.m)) return m < o.m;
    return n3 < o.n3;
  }
  SolutionTriple mirrored() const { return {n3, m, n1}; }
  std::string str() const { return "(" + n1.str() + "," + m.str() + "," + n3.str() + ")"; }
};

/// Existence inequality of one label at frequency lambda on an edge of the
/// given length (loops quantize full periods; the center edge quantizes
/// half-periods, so its thresholds use Lambda* = (pi/(2L))^2 via len = 2L).
inline bool label_exists(const EdgeLabel& l, double lambda, double len, bool is_loop) {
  switch (l.kind) {
    case EdgeLabel::Kind::zero: return true;
    case EdgeLabel::Kind::constant: return lambda < 0.0;
    case EdgeLabel::Kind::cn: {
      const double k = is_loop ? l.count : std::numbers::pi * l.count / len;
      return lambda < k * k;
    }
    case EdgeLabel::Kind::dn: {
      const double k = is_loop ? l.count : std::numbers::pi * l.count / len;
      return lambda < -0.5 * k * k;
    }
  }
  return false;
}

namespace detail {

struct CenterWave {
  std::function<double(double)> value;  // on the segment coordinate x in (-L, L)
  double v_left = 0.0, v_right = 0.0;   // vertex values
};

// Canonical center-edge profile (derivative vanishes at both ends; leftmost
// extremum nonnegative).
inline std::optional<CenterWave> center_wave(const EdgeLabel& m, double lambda, double L) {
  CenterWave w;
  switch (m.kind) {
    case EdgeLabel::Kind::zero:
      w.value = [](double) { return 0.0; };
      return w;
    case EdgeLabel::Kind::constant: {
      if (!(lambda < 0.0)) return std::nullopt;
      const double c = std::sqrt(-lambda / 2.0);
      w.value = [c](double) { return c; };
      w.v_left = w.v_right = c;
      return w;
    }
    case EdgeLabel::Kind::cn: {
      const auto wave = quantize_segment(lambda, m.count, 2.0 * L, WaveKind::cn);
      if (!wave) return std::nullopt;
      const EllipticWave ew = *wave;
      w.value = [ew, L](double x) { return ew.value(x + L); };
      w.v_left = ew.amplitude;
      w.v_right = (m.count % 2 == 0) ? ew.amplitude : -ew.amplitude;
      return w;
    }
    case EdgeLabel::Kind::dn: {
      const auto wave = quantize_segment(lambda, m.count, 2.0 * L, WaveKind::dn);
      if (!wave) return std::nullopt;
      const EllipticWave ew = *wave;
      w.value = [ew, L](double x) { return ew.value(x + L); };
      w.v_left = ew.amplitude;  // starts at the maximum
      const double kp = std::sqrt((1.0 - ew.modulus) * (1.0 + ew.modulus));
      w.v_right = (m.count % 2 == 0) ? ew.amplitude : ew.amplitude * kp;
      return w;
    }
  }
  return std::nullopt;
}

struct LoopWave {
  std::function<double(double)> value;  // on the loop coordinate x in (-pi, pi)
  bool phase_interior = false;          // attachment phase not at an extremum
};

// Loop profile taking the prescribed vertex value V: an integer number of
// periods with the attachment phase solved from the wave's level set.
inline std::optional<LoopWave> loop_wave(const EdgeLabel& l, double lambda, double V) {
  const double pi = std::numbers::pi;
  LoopWave out;
  switch (l.kind) {
    case EdgeLabel::Kind::zero:
      if (std::abs(V) > 1e-11) return std::nullopt;
      out.value = [](double) { return 0.0; };
      return out;
    case EdgeLabel::Kind::constant: {
      if (!(lambda < 0.0)) return std::nullopt;
      const double c = std::sqrt(-lambda / 2.0);
      if (std::abs(std::abs(V) - c) > 1e-9 * std::max(1.0, c)) return std::nullopt;
      const double s = V >= 0 ? c : -c;
      out.value = [s](double) { return s; };
      return out;
    }
    case EdgeLabel::Kind::cn: {
      const auto wave = quantize_loop(lambda, l.count, WaveKind::cn);
      if (!wave) return std::nullopt;
      const EllipticWave ew = *wave;
      if (std::abs(V) > ew.amplitude * (1.0 + 1e-12)) return std::nullopt;
      // cn decreases monotonically from 1 to -1 over half a period
      const double target = std::clamp(V / ew.amplitude, -1.0, 1.0);
      const double K = ellip_K(ew.modulus);
      double lo = 0.0, hi = 2.0 * K;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (jacobi(mid, ew.modulus).cn > target)
          lo = mid;
        else
          hi = mid;
      }
      const double u0 = 0.5 * (lo + hi);
      out.phase_interior = u0 > 1e-9 && u0 < 2.0 * K - 1e-9;
      out.value = [ew, u0, pi](double x) {
        return ew.amplitude * jacobi(ew.wavenumber * (x + pi) - u0, ew.modulus).cn;
      };
      return out;
    }
    case EdgeLabel::Kind::dn: {
      const auto wave = quantize_loop(lambda, l.count, WaveKind::dn);
      if (!wave) return std::nullopt;
      const EllipticWave ew = *wave;
      if (V == 0.0) return std::nullopt;  // dn never vanishes
      const double sigma = V > 0 ? 1.0 : -1.0;
      const double kp = std::sqrt((1.0 - ew.modulus) * (1.0 + ew.modulus));
      const double va = std::abs(V) / ew.amplitude;
      if (va > 1.0 + 1e-12 || va < kp * (1.0 - 1e-12)) return std::nullopt;
      // dn decreases monotonically from 1 to k' over half its period
      const double K = ellip_K(ew.modulus);
      double lo = 0.0, hi = K;
      const double target = std::clamp(va, kp, 1.0);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (jacobi(mid, ew.modulus).dn > target)
          lo = mid;
        else
          hi = mid;
      }
      const double u0 = 0.5 * (lo + hi);
      out.phase_interior = u0 > 1e-9 && u0 < K - 1e-9;
      out.value = [ew, u0, sigma, pi](double x) {
        return sigma * ew.amplitude * jacobi(ew.wavenumber * (x + pi) - u0, ew.modulus).dn;
      };
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace detail

struct CompleteSolution {
  SolutionTriple triple;
  GraphFunction solution;
  Eigen::VectorXd refined;  // FD-polished samples
  double Q = 0.0;
  int orbit_size = 1;  // group-orbit count under global sign and loop phase
                       // mirrors (the label catalog already folds the loop
                       // exchange into its ordering convention)
};

/// Stitch one labeled triple into a dumbbell profile at frequency lambda, or
/// report that the continuity/band constraints make it infeasible.
inline std::optional<GraphFunction> materialize_triple(const SolutionTriple& t, double lambda,
                                                       double L, const DiscreteSystem& sys,
                                                       int* orbit_size = nullptr) {
  const auto center = detail::center_wave(t.m, lambda, L);
  if (!center) return std::nullopt;
  const auto loop1 = detail::loop_wave(t.n1, lambda, center->v_left);
  if (!loop1) return std::nullopt;
  const auto loop3 = detail::loop_wave(t.n3, lambda, center->v_right);
  if (!loop3) return std::nullopt;

  if (orbit_size) {
    int orbits = 1;
    const bool zero_solution = t.n1.kind == EdgeLabel::Kind::zero &&
                               t.m.kind == EdgeLabel::Kind::zero &&
                               t.n3.kind == EdgeLabel::Kind::zero;
    if (!zero_solution) orbits *= 2;  // global sign flip
    if (loop1->phase_interior) orbits *= 2;
    if (loop3->phase_interior) orbits *= 2;
    *orbit_size = orbits;
  }

  const auto g = sys.graph_ptr();
  return GraphFunction::sample(
      g,
      [&](int edge, double x) {
        if (edge == 0) return loop1->value(x);
        if (edge == 1) return center->value(x);
        return loop3->value(x);
      },
      sys.grid().intervals);
}

/// All labeled triples with loop counts <= n_max and center counts <= m_max
/// that exist and stitch at the given frequency, each verified against the FD
/// system. The catalog lists one representative per loop-exchange pair except
/// for the genuinely asymmetric case (odd dn half-period count on the center
/// with n1 != n3), where both orders are distinct solutions.
inline std::vector<CompleteSolution> enumerate_complete(double lambda, double L, int n_max,
                                                        int m_max, const DiscreteSystem* sys_ext,
                                                        bool verify = true) {
  if (n_max < 1 || m_max < 1)
    throw std::invalid_argument("enumerate_complete: bounds must be >= 1");
  std::unique_ptr<DiscreteSystem> own;
  const DiscreteSystem* sys = sys_ext;
  if (!sys) {
    own = std::make_unique<DiscreteSystem>(std::make_shared<const MetricGraph>(build_dumbbell(L)));
    sys = own.get();
  }

  std::vector<EdgeLabel> loop_labels = {EdgeLabel::zero()};
  std::vector<EdgeLabel> center_labels = {EdgeLabel::zero()};
  if (lambda < 0.0) {
    loop_labels.push_back(EdgeLabel::constant());
    center_labels.push_back(EdgeLabel::constant());
  }
  for (int n = 1; n <= n_max; ++n) {
    if (label_exists(EdgeLabel::cn(n), lambda, 2 * std::numbers::pi, true))
      loop_labels.push_back(EdgeLabel::cn(n));
    if (label_exists(EdgeLabel::dn(n), lambda, 2 * std::numbers::pi, true))
      loop_labels.push_back(EdgeLabel::dn(n));
  }
  for (int m = 1; m <= m_max; ++m) {
    if (label_exists(EdgeLabel::cn(m), lambda, 2 * L, false))
      center_labels.push_back(EdgeLabel::cn(m));
    if (label_exists(EdgeLabel::dn(m), lambda, 2 * L, false))
      center_labels.push_back(EdgeLabel::dn(m));
  }

  std::vector<CompleteSolution> out;
  for (const auto& m : center_labels) {
    const bool both_orders =
        m.kind == EdgeLabel::Kind::dn && m.count % 2 == 1;  // no mirror symmetry
    for (const auto& n1 : loop_labels) {
      for (const auto& n3 : loop_labels) {
        if (!both_orders && n3 < n1) continue;  // canonical representative
        const SolutionTriple t{n1, m, n3};
        int orbit = 1;
        const auto profile = materialize_triple(t, lambda, L, *sys, &orbit);
        if (!profile) continue;
        if (verify) {
          const auto ver = verify_on_grid(*sys, *profile, lambda);
          if (!ver.ok) continue;
          out.push_back({t, *profile, ver.refined, sys->power(ver.refined), orbit});
        } else {
          out.push_back({t, *profile, Eigen::VectorXd(), power(*profile), orbit});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CompleteSolution& a, const CompleteSolution& b) { return a.triple < b.triple; });
  return out;
}

// ---------------------------------------------------------------------------
// Complete-loop bifurcation schedule
// ---------------------------------------------------------------------------

struct ScheduleEvent {
  double lambda = 0.0;
  SolutionTriple parent;
  SolutionTriple child;

  bool operator==(const ScheduleEvent&) const = default;
};

/// The ordered (decreasing Lambda) schedule of complete-loop bifurcations for
/// labels bounded by n_max/m_max:
///   at Lambda = n1^2        (n1,0,n1), (n1,0,0) from (0,0,0); (n1,0,n3) from (0,0,n3), n3 > n1;
///   at Lambda = m^2 L*      (n1,m,n3) from (n1,0,n3) when m < 2 L min(n1,n3)/pi;
///   at Lambda = 0           (L,L,L) from (0,0,0); (n1,L,n3) from (n1,0,n3);
///   at Lambda = -m^2 L*/2   (n1,-m,n3) from (n1,L,n3);
///   at Lambda = -n1^2/2     (-n1,L,-n1), (-n1,L,L) from (L,L,L); (-n1,L,n3) from (L,L,n3).
/// Here L* = (pi/(2L))^2 and "L" in a label slot denotes the constant edge.
/// Every candidate event is kept only if the child actually stitches just
/// below the event frequency.
inline std::vector<ScheduleEvent> complete_bifurcation_schedule(double L, int n_max, int m_max) {
  if (n_max < 1 || m_max < 1)
    throw std::invalid_argument("complete_bifurcation_schedule: bounds must be >= 1");
  const double lam_star = std::pow(std::numbers::pi / (2.0 * L), 2);
  DiscreteSystem sys(std::make_shared<const MetricGraph>(build_dumbbell(L)));

  std::vector<ScheduleEvent> events;
  const auto feasible_below = [&](const SolutionTriple& t, double lambda_evt) {
    const double delta = 1e-3 * std::max(1.0, std::abs(lambda_evt));
    return materialize_triple(t, lambda_evt - delta, L, sys).has_value();
  };
  const auto add = [&](double lambda, SolutionTriple parent, SolutionTriple child) {
    if (!feasible_below(child, lambda)) return;
    if (!feasible_below(parent, lambda)) return;
    const ScheduleEvent ev{lambda, parent, child};
    for (const auto& e : events)
      if (e == ev) return;
    events.push_back(ev);
  };

  const auto Z = EdgeLabel::zero();
  const auto C = EdgeLabel::constant();

  // loop cn births
  for (int n1 = 1; n1 <= n_max; ++n1) {
    const double lam = n1 * n1;
    add(lam, {Z, Z, Z}, {EdgeLabel::cn(n1), Z, EdgeLabel::cn(n1)});
    add(lam, {Z, Z, Z}, {EdgeLabel::cn(n1), Z, Z});
    for (int n3 = n1 + 1; n3 <= n_max; ++n3)
      add(lam, {Z, Z, EdgeLabel::cn(n3)}, {EdgeLabel::cn(n1), Z, EdgeLabel::cn(n3)});
  }

  // center cn births
  for (int m = 1; m <= m_max; ++m) {
    const double lam = m * m * lam_star;
    for (int n1 = 1; n1 <= n_max; ++n1)
      for (int n3 = n1; n3 <= n_max; ++n3)
        if (m < 2.0 * L * std::min(n1, n3) / std::numbers::pi)
          add(lam, {EdgeLabel::cn(n1), Z, EdgeLabel::cn(n3)},
              {EdgeLabel::cn(n1), EdgeLabel::cn(m), EdgeLabel::cn(n3)});
  }

  // constant-center births at Lambda = 0 (evaluated just below)
  add(0.0, {Z, Z, Z}, {C, C, C});
  for (int n1 = 1; n1 <= n_max; ++n1)
    for (int n3 = n1; n3 <= n_max; ++n3)
      add(0.0, {EdgeLabel::cn(n1), Z, EdgeLabel::cn(n3)},
          {EdgeLabel::cn(n1), C, EdgeLabel::cn(n3)});

  // center dn births
  for (int m = 1; m <= m_max; ++m) {
    const double lam = -0.5 * m * m * lam_star;
    std::vector<EdgeLabel> loops;
    for (int n = 1; n <= n_max; ++n) {
      loops.push_back(EdgeLabel::cn(n));
      loops.push_back(EdgeLabel::dn(n));
    }
    const bool both_orders = m % 2 == 1;
    for (const auto& n1 : loops)
      for (const auto& n3 : loops) {
        if (!both_orders && n3 < n1) continue;
        add(lam, {n1, C, n3}, {n1, EdgeLabel::dn(m), n3});
      }
  }

  // loop dn births at Lambda = -n1^2/2
  for (int n1 = 1; n1 <= n_max; ++n1) {
    const double lam = -0.5 * n1 * n1;
    add(lam, {C, C, C}, {EdgeLabel::dn(n1), C, EdgeLabel::dn(n1)});
    add(lam, {C, C, C}, {EdgeLabel::dn(n1), C, C});
    for (int n3 = 1; n3 <= n_max; ++n3)
      add(lam, {C, C, EdgeLabel::cn(n3)}, {EdgeLabel::dn(n1), C, EdgeLabel::cn(n3)});
    for (int n3 = 1; n3 < n1; ++n3)
      add(lam, {C, C, EdgeLabel::dn(n3)}, {EdgeLabel::dn(n1), C, EdgeLabel::dn(n3)});
  }

  std::sort(events.begin(), events.end(), [](const ScheduleEvent& a, const ScheduleEvent& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (!(a.child == b.child)) return b.child < a.child;
    return b.parent < a.parent;
  });
  return events;
}

// ---------------------------------------------------------------------------
// Hybrid solutions: one incomplete and one complete loop
// ---------------------------------------------------------------------------

struct LollipopShot {
  double q = 0.0;
  double g = 0.0;  // phi2'(L); a lollipop standing wave needs g = 0
  bool diverged = false;
  double tip_value = 0.0;  // phi2(L)
};

/// Shooting value for the lollipop subgraph with a Neumann tip.
inline LollipopShot lollipop_shoot(double q, double lambda, double L, double tol = 1e-12) {
  const double pi = std::numbers::pi;
  LollipopShot out;
  out.q = q;
  auto r1 = integrate_edge(lambda, {q, 0.0}, 0.0, pi, tol);
  if (r1.diverged) {
    out.diverged = true;
    return out;
  }
  auto r2 = integrate_edge(lambda, {r1.y.phi, 2.0 * r1.y.dphi}, -L, L, tol);
  if (r2.diverged) {
    out.diverged = true;
    return out;
  }
  out.g = r2.y.dphi;
  out.tip_value = r2.y.phi;
  return out;
}

struct HybridPoint {
  double lambda = 0.0;
  double q = 0.0;          // lollipop shooting parameter
  double tip_value = 0.0;  // phi2 at the Neumann tip
  double Q = 0.0;          // power of the stitched dumbbell solution
  double fd_residual = 0.0;  // max-norm FD residual of the polished stitch
  bool fold = false;       // band-edge crossing: saddle-node of the family
};

struct HybridBranch {
  int loop_n = 0;
  WaveKind loop_kind = WaveKind::cn;
  std::vector<HybridPoint> points;
  std::vector<double> fold_lambdas;
};

struct LollipopBranchPoint {
  double lambda = 0.0, q = 0.0, tip_value = 0.0;
};

struct HybridResult {
  std::vector<std::vector<LollipopBranchPoint>> lollipop_branches;
  std::vector<HybridBranch> hybrids;
};

namespace detail {

// Scalar pseudo-arclength continuation of g(q, Lambda) = 0 for the lollipop
// shooting function.
inline std::vector<LollipopBranchPoint> continue_lollipop(double q0, double lambda0, double L,
                                                          double lam_lo, double lam_hi,
                                                          double ds = 0.02, int max_steps = 4000) {
  const auto g = [&](double q, double lam) { return lollipop_shoot(q, lam, L).g; };
  const auto tip = [&](double q, double lam) { return lollipop_shoot(q, lam, L).tip_value; };

  // polish the seed at fixed lambda
  double q = q0, lam = lambda0;
  for (int it = 0; it < 60; ++it) {
    const double v = g(q, lam);
    if (std::abs(v) <= 1e-10) break;
    const double dq = (g(q + 1e-7, lam) - g(q - 1e-7, lam)) / 2e-7;
    if (dq == 0.0) break;
    q -= v / dq;
  }
  if (std::abs(g(q, lam)) > 1e-9) return {};

  std::vector<LollipopBranchPoint> pts;
  pts.push_back({lam, q, tip(q, lam)});

  // initial tangent toward decreasing lambda
  double tq, tl;
  {
    const double gq = (g(q + 1e-6, lam) - g(q - 1e-6, lam)) / 2e-6;
    const double gl = (g(q, lam + 1e-6) - g(q, lam - 1e-6)) / 2e-6;
    // tangent solves gq*tq + gl*tl = 0
    tq = -gl;
    tl = gq;
    const double nrm = std::hypot(tq, tl);
    if (nrm == 0.0) return pts;
    tq /= nrm;
    tl /= nrm;
    if (tl > 0) {
      tq = -tq;
      tl = -tl;
    }
  }

  double step = ds;
  for (int n = 0; n < max_steps; ++n) {
    double qp = q + step * tq, lp = lam + step * tl;
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      double qq = qp, ll = lp;
      ok = true;
      for (int it = 0; it < 25; ++it) {
        const double v = g(qq, ll);
        const double c = tq * (qq - q) + tl * (ll - lam) - step;
        if (std::abs(v) <= 1e-10 && std::abs(c) <= 1e-12) break;
        const double gq = (g(qq + 1e-6, ll) - g(qq - 1e-6, ll)) / 2e-6;
        const double gl = (g(qq, ll + 1e-6) - g(qq, ll - 1e-6)) / 2e-6;
        const double det = gq * tl - gl * tq;
        if (det == 0.0 || !std::isfinite(v)) {
          ok = false;
          break;
        }
        const double dq = (v * tl - gl * c) / det;
        const double dl = (gq * c - v * tq) / det;
        qq -= dq;
        ll -= dl;
        if (it == 24) ok = false;
      }
      if (ok && std::abs(g(qq, ll)) <= 1e-9) {
        // new tangent
        const double gq = (g(qq + 1e-6, ll) - g(qq - 1e-6, ll)) / 2e-6;
        const double gl = (g(qq, ll + 1e-6) - g(qq, ll - 1e-6)) / 2e-6;
        double ntq = -gl, ntl = gq;
        const double nrm = std::hypot(ntq, ntl);
        if (nrm == 0.0) return pts;
        ntq /= nrm;
        ntl /= nrm;
        if (ntq * tq + ntl * tl < 0) {
          ntq = -ntq;
          ntl = -ntl;
        }
        q = qq;
        lam = ll;
        tq = ntq;
        tl = ntl;
        pts.push_back({lam, q, tip(q, lam)});
        if (step < ds) step = std::min(ds, step * 2.0);
      } else {
        step *= 0.5;
        ok = false;
        if (step < 1e-6) return pts;
        qp = q + step * tq;
        lp = lam + step * tl;
      }
    }
    if (!ok) return pts;
    if (lam < lam_lo || lam > lam_hi) break;
  }
  return pts;
}

}  // namespace detail

/// Standing waves with one incomplete and one complete loop: continue the
/// lollipop (Neumann-tip) branches over the window, then extend each point to
/// the dumbbell wherever the tip value fits inside a quantized loop band
/// (cn: |tip| <= alpha; dn: a k' <= |tip| < a). Band-edge crossings are
/// saddle-nodes of the stitched family and are tagged as folds.
inline HybridResult hybrid_waves(double lam_lo, double lam_hi, double L, int n_max,
                                 double q_lo = 0.05, double q_hi = 2.0, int seed_grid = 400,
                                 const DiscreteSystem* sys_ext = nullptr) {
  if (!(lam_lo < lam_hi)) throw std::invalid_argument("hybrid_waves: empty window");
  std::unique_ptr<DiscreteSystem> own;
  const DiscreteSystem* sys = sys_ext;
  if (!sys) {
    own = std::make_unique<DiscreteSystem>(std::make_shared<const MetricGraph>(build_dumbbell(L)));
    sys = own.get();
  }

  HybridResult result;

  // seed roots of the lollipop shooting function at the window's right edge
  const double lam_seed = lam_hi - 1e-6 * std::max(1.0, std::abs(lam_hi));
  std::vector<LollipopShot> shots(seed_grid + 1);
  parallel_for(seed_grid + 1, [&](int i) {
    shots[i] = lollipop_shoot(q_lo + (q_hi - q_lo) * i / seed_grid, lam_seed, L);
  });
  std::vector<double> seeds;
  for (int i = 0; i + 1 <= seed_grid; ++i) {
    if (shots[i].diverged || shots[i + 1].diverged) continue;
    if (shots[i].g * shots[i + 1].g > 0) continue;
    double lo = shots[i].q, hi = shots[i + 1].q, flo = shots[i].g;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double v = lollipop_shoot(mid, lam_seed, L).g;
      if ((v < 0) == (flo < 0)) {
        lo = mid;
        flo = v;
      } else {
        hi = mid;
      }
    }
    seeds.push_back(0.5 * (lo + hi));
  }

  for (double q0 : seeds) {
    auto branch = detail::continue_lollipop(q0, lam_seed, L, lam_lo, lam_hi);
    if (branch.size() < 3) continue;
    result.lollipop_branches.push_back(branch);
  }

  // extend each lollipop branch through the quantized-loop bands
  for (const auto& branch : result.lollipop_branches) {
    for (int n = 1; n <= n_max; ++n) {
      for (const WaveKind kind : {WaveKind::cn, WaveKind::dn}) {
        HybridBranch hb;
        hb.loop_n = n;
        hb.loop_kind = kind;

        // signed distance to the admissibility band (positive inside)
        const auto band_margin = [&](const LollipopBranchPoint& p) {
          const auto w = quantize_loop(p.lambda, n, kind);
          if (!w) return -1.0;
          const double t = std::abs(p.tip_value);
          if (kind == WaveKind::cn) return w->amplitude - t;
          const double kp = std::sqrt((1.0 - w->modulus) * (1.0 + w->modulus));
          return std::min(w->amplitude - t, t - w->amplitude * kp);
        };

        double prev_margin = band_margin(branch.front());
        for (std::size_t i = 0; i < branch.size(); ++i) {
          const double margin = band_margin(branch[i]);
          const bool crossing = i > 0 && (margin > 0) != (prev_margin > 0);
          if (margin > 0) {
            // stitch: lollipop part sampled onto edges 0/1, quantized loop on 2
            const SolutionTriple label{EdgeLabel::zero(), EdgeLabel::zero(),
                                       kind == WaveKind::cn ? EdgeLabel::cn(n)
                                                            : EdgeLabel::dn(n)};
            const auto loop3 = detail::loop_wave(label.n3, branch[i].lambda, branch[i].tip_value);
            if (loop3) {
              const auto ns = detail::default_shot_intervals(*sys);
              // rebuild the lollipop trajectory on the FD grid
              std::vector<EdgeState> half1, seg;
              auto r1 = integrate_edge(branch[i].lambda, {branch[i].q, 0.0}, 0.0,
                                       std::numbers::pi, 1e-12, 1e6, &half1, ns[0] / 2);
              auto r2 = integrate_edge(branch[i].lambda, {r1.y.phi, 2.0 * r1.y.dphi}, -L, L,
                                       1e-12, 1e6, &seg, ns[1]);
              if (!r1.diverged && !r2.diverged) {
                std::vector<Eigen::VectorXd> vals(3);
                vals[0].resize(ns[0] + 1);
                for (int j = 0; j <= ns[0] / 2; ++j) {
                  vals[0](ns[0] / 2 + j) = half1[j].phi;
                  vals[0](ns[0] / 2 - j) = half1[j].phi;
                }
                vals[1].resize(ns[1] + 1);
                for (int j = 0; j <= ns[1]; ++j) vals[1](j) = seg[j].phi;
                vals[2].resize(ns[2] + 1);
                const auto& e3 = sys->graph().edges[2];
                for (int j = 0; j <= ns[2]; ++j)
                  vals[2](j) = loop3->value(e3.x_min + e3.length * j / ns[2]);
                try {
                  GraphFunction cand(sys->graph_ptr(), std::move(vals), 1e-6);
                  const auto ver = verify_on_grid(*sys, cand, branch[i].lambda);
                  if (ver.ok) {
                    HybridPoint hp;
                    hp.lambda = branch[i].lambda;
                    hp.q = branch[i].q;
                    hp.tip_value = branch[i].tip_value;
                    hp.Q = sys->power(ver.refined);
                    hp.fd_residual = ver.residual;
                    hp.fold = crossing;
                    hb.points.push_back(hp);
                    if (crossing) hb.fold_lambdas.push_back(branch[i].lambda);
                  }
                } catch (const std::invalid_argument&) {
                  // incoherent stitch: tip mismatch beyond tolerance
                }
              }
            }
          } else if (crossing && !hb.points.empty()) {
            hb.fold_lambdas.push_back(branch[i].lambda);
          }
          prev_margin = margin;
        }
        if (!hb.points.empty()) result.hybrids.push_back(std::move(hb));
      }
    }
  }
  return result;
}

}  // namespace qgraph
