#pragma once
// Linear spectrum of the graph Laplacian -d^2/dx^2 with Kirchhoff vertex
// conditions. For the dumbbell the spectrum factors through a secular
// determinant into even, odd and loop-localized families; a finite-difference
// generalized eigenproblem serves as the oracle for arbitrary graphs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/graph.hpp"

namespace qgraph {

enum class ModeFamily { even, odd, loop_localized, constant };

inline const char* to_string(ModeFamily f) {
  switch (f) {
    case ModeFamily::even: return "even";
    case ModeFamily::odd: return "odd";
    case ModeFamily::loop_localized: return "loop";
    case ModeFamily::constant: return "constant";
  }
  return "?";
}

struct LinearMode {
  double k = 0.0;       // wavenumber, eigenvalue is k^2
  double lambda = 0.0;  // k^2
  ModeFamily family = ModeFamily::constant;
  int multiplicity = 1;
  bool resonant = false;  // shares its k with another family (L a multiple of pi/2)
};

/// The three factors of the dumbbell secular determinant at wavenumber k:
///   f_even = sin(k(L-pi)) - 3 sin(k(L+pi))
///   f_odd  = cos(k(L-pi)) - 3 cos(k(L+pi))
///   f_loop = sin^2(k pi)
/// Vanishing of a factor places k^2 in the corresponding eigenfunction family.
/// The factorization holds only for k != 0.
struct SecularFactors {
  double even, odd, loop;
};

inline SecularFactors secular_factors(double k, double L) {
  const double pi = std::numbers::pi;
  const double s = std::sin(k * pi);
  return {std::sin(k * (L - pi)) - 3.0 * std::sin(k * (L + pi)),
          std::cos(k * (L - pi)) - 3.0 * std::cos(k * (L + pi)), s * s};
}

/// Full 6x6 secular determinant det(I - S D(k)) of the dumbbell, built from
/// the bond-scattering matrix and the bond phase matrix (four loop bonds of
/// length 2*pi, two center bonds of length 2L; the phase of a bond is
/// exp(i k l_bond)). Root finding goes through the factored form above
/// (better conditioned); this path is kept as a cross-check that the two
/// zero sets agree.
inline std::complex<double> secular_determinant(double k, double L) {
  using C = std::complex<double>;
  const double pi = std::numbers::pi;
  Eigen::Matrix<double, 6, 6> S;
  S << 2, -1, 0, 2, 0, 0,
      -1, 2, 0, 2, 0, 0,
       2, 2, 0, -1, 0, 0,
       0, 0, -1, 0, 2, 2,
       0, 0, 2, 0, 2, -1,
       0, 0, 2, 0, -1, 2;
  S /= 3.0;
  Eigen::Matrix<C, 6, 1> phases;
  const C i(0.0, 1.0);
  const C loop = std::exp(i * k * 2.0 * pi);
  const C center = std::exp(i * k * 2.0 * L);
  phases << loop, loop, center, center, loop, loop;
  Eigen::Matrix<C, 6, 6> M =
      Eigen::Matrix<C, 6, 6>::Identity() - S.cast<C>() * phases.asDiagonal();
  return M.determinant();
}

namespace detail {

// Bracket sign changes of f on a uniform grid over (k_lo, k_hi], bisect each
// bracket to ~1e-12 in k and polish with a secant step.
inline std::vector<double> bracketed_roots(const std::function<double(double)>& f, double k_lo,
                                           double k_hi, double grid_step) {
  std::vector<double> roots;
  const int n = std::max(2, static_cast<int>(std::ceil((k_hi - k_lo) / grid_step)));
  double prev_k = k_lo;
  double prev_f = f(prev_k);
  for (int i = 1; i <= n; ++i) {
    const double k = k_lo + (k_hi - k_lo) * i / n;
    const double fk = f(k);
    if (prev_f == 0.0) roots.push_back(prev_k);
    if (prev_f * fk < 0.0) {
      double a = prev_k, b = k, fa = prev_f;
      for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      double r = 0.5 * (a + b);
      // secant polish
      for (int it = 0; it < 3; ++it) {
        const double fr = f(r);
        const double dr = (f(r + 1e-7) - f(r - 1e-7)) / 2e-7;
        if (dr != 0.0) {
          const double r2 = r - fr / dr;
          if (r2 > a - 1e-6 && r2 < b + 1e-6) r = r2;
        }
      }
      roots.push_back(r);
    }
    prev_k = k;
    prev_f = fk;
  }
  return roots;
}

}  // namespace detail

/// All linear modes of the dumbbell with wavenumber in (0, k_max], found by
/// sign-change bracketing (grid step 1e-3) and bisection on each secular
/// factor, plus the k=0 constant mode. Loop-localized modes sit at integer k
/// with multiplicity two. At resonant L (integer multiple of pi/2), duplicate
/// roots across families are reported with a resonance flag, not merged.
inline std::vector<LinearMode> find_modes(double L, double k_max, double grid_step = 1e-3) {
  if (!(L > 0.0)) throw std::invalid_argument("find_modes: L must be positive");
  if (!(k_max > 0.0)) throw std::invalid_argument("find_modes: k_max must be positive");

  std::vector<LinearMode> modes;
  modes.push_back({0.0, 0.0, ModeFamily::constant, 1, false});

  const auto add_roots = [&](ModeFamily fam, const std::function<double(double)>& f, int mult) {
    // start slightly above zero: the factorization excludes k = 0
    for (double r : detail::bracketed_roots(f, 1e-6, k_max, grid_step))
      modes.push_back({r, r * r, fam, mult, false});
  };

  add_roots(ModeFamily::even, [&](double k) { return secular_factors(k, L).even; }, 1);
  add_roots(ModeFamily::odd, [&](double k) { return secular_factors(k, L).odd; }, 1);
  // The loop factor is a square; root-find its signed square root sin(k pi).
  add_roots(ModeFamily::loop_localized,
            [&](double k) { return std::sin(k * std::numbers::pi); }, 2);

  std::sort(modes.begin(), modes.end(),
            [](const LinearMode& a, const LinearMode& b) { return a.k < b.k; });

  // flag duplicates across families (de-duplication tolerance 1e-9 in k)
  for (std::size_t i = 0; i + 1 < modes.size(); ++i) {
    if (std::abs(modes[i + 1].k - modes[i].k) < 1e-9 &&
        modes[i + 1].family != modes[i].family) {
      modes[i].resonant = modes[i + 1].resonant = true;
    }
  }
  return modes;
}

// ---------------------------------------------------------------------------
// Finite-difference eigenproblem with Kirchhoff coupling
// ---------------------------------------------------------------------------

/// Uniform per-edge grids sharing one unknown per vertex. The ghost-point
/// closure of the vertex condition (sum the edge equations at the vertex and
/// eliminate the ghosts through the zero-flux condition) yields a symmetric
/// generalized pencil A u = lambda B u with B the trapezoid weights. Both
/// matrices are assembled dense here; the FD oracle targets modest grids.
struct FdGrid {
  std::shared_ptr<const MetricGraph> graph;
  std::vector<int> intervals;      // per edge
  std::vector<double> h;           // per edge
  std::vector<int> interior_base;  // index of first interior unknown per edge
  int vertex_base = 0;             // index of first vertex unknown
  int size = 0;

  FdGrid(std::shared_ptr<const MetricGraph> g, std::vector<int> per_edge_intervals)
      : graph(std::move(g)), intervals(std::move(per_edge_intervals)) {
    if (static_cast<int>(intervals.size()) != graph->edge_count())
      throw std::invalid_argument("FdGrid: one interval count per edge required");
    int base = 0;
    for (int m = 0; m < graph->edge_count(); ++m) {
      if (intervals[m] < 4) throw std::invalid_argument("FdGrid: need >= 4 intervals per edge");
      h.push_back(graph->edges[m].length / intervals[m]);
      interior_base.push_back(base);
      base += intervals[m] - 1;
    }
    vertex_base = base;
    size = base + graph->vertex_count();
  }

  FdGrid(std::shared_ptr<const MetricGraph> g, double target_h, int min_intervals = 16)
      : FdGrid(g, [&] {
          if (!(target_h > 0.0)) throw std::invalid_argument("FdGrid: grid spacing must be positive");
          std::vector<int> ns;
          for (const auto& e : g->edges)
            ns.push_back(std::max(min_intervals,
                                  static_cast<int>(std::ceil(e.length / target_h - 1e-12))));
          return ns;
        }()) {}

  int vertex_index(int v) const { return vertex_base + v; }
  int interior_index(int edge, int i) const { return interior_base[edge] + i - 1; }  // i in 1..n-1

  /// Unknown index of the sample at grid node i (0..n) of an edge; endpoint
  /// nodes resolve to the shared vertex unknown.
  int node_index(int edge, int i) const {
    const auto& e = graph->edges[edge];
    if (i == 0) return vertex_index(e.from);
    if (i == intervals[edge]) return vertex_index(e.to);
    return interior_index(edge, i);
  }

  Eigen::VectorXd trapezoid_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(size);
    for (int m = 0; m < graph->edge_count(); ++m) {
      for (int i = 1; i < intervals[m]; ++i) w(interior_index(m, i)) = h[m];
      w(vertex_index(graph->edges[m].from)) += 0.5 * h[m];
      w(vertex_index(graph->edges[m].to)) += 0.5 * h[m];
    }
    return w;
  }

  GraphFunction to_function(const Eigen::VectorXd& u) const {
    std::vector<Eigen::VectorXd> vals(graph->edge_count());
    for (int m = 0; m < graph->edge_count(); ++m) {
      vals[m].resize(intervals[m] + 1);
      for (int i = 0; i <= intervals[m]; ++i) vals[m](i) = u(node_index(m, i));
    }
    return GraphFunction(graph, std::move(vals));
  }

  Eigen::VectorXd to_vector(const GraphFunction& f) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(size);
    for (int m = 0; m < graph->edge_count(); ++m) {
      if (f.edge_values(m).size() != intervals[m] + 1)
        throw std::invalid_argument("FdGrid::to_vector: sample layout mismatch");
      for (int i = 0; i <= intervals[m]; ++i) u(node_index(m, i)) = f.edge_values(m)(i);
    }
    return u;
  }
};

/// Symmetric stiffness matrix A (ghost closure of -d^2/dx^2 with Kirchhoff
/// conditions) and diagonal mass B for the pencil A u = lambda B u.
inline void assemble_laplace_pencil(const FdGrid& grid, Eigen::MatrixXd& A, Eigen::VectorXd& B) {
  A = Eigen::MatrixXd::Zero(grid.size, grid.size);
  B = grid.trapezoid_weights();
  for (int m = 0; m < grid.graph->edge_count(); ++m) {
    const double inv_h = 1.0 / grid.h[m];
    const int n = grid.intervals[m];
    for (int i = 0; i < n; ++i) {
      const int p = grid.node_index(m, i);
      const int q = grid.node_index(m, i + 1);
      A(p, p) += inv_h;
      A(q, q) += inv_h;
      A(p, q) -= inv_h;
      A(q, p) -= inv_h;
    }
  }
}

struct FdEigenpair {
  double lambda = 0.0;
  GraphFunction mode;
};

namespace detail {

// Rotate near-degenerate pairs so each vector concentrates on a single loop
// (loop-localized eigenspaces come in exact pairs and the dense solver
// returns an arbitrary basis).
inline void localize_degenerate_pairs(const FdGrid& grid, std::vector<double>& lam,
                                      std::vector<Eigen::VectorXd>& vecs) {
  const auto& g = *grid.graph;
  std::vector<int> loops;
  for (int m = 0; m < g.edge_count(); ++m)
    if (g.edges[m].is_loop) loops.push_back(m);
  if (loops.size() < 2) return;

  const Eigen::VectorXd w = grid.trapezoid_weights();
  const auto edge_mass = [&](const Eigen::VectorXd& u, int edge) {
    double s = 0.0;
    for (int i = 1; i < grid.intervals[edge]; ++i) {
      const double v = u(grid.interior_index(edge, i));
      s += v * v * grid.h[edge];
    }
    return s;
  };

  for (std::size_t i = 0; i + 1 < lam.size(); ++i) {
    if (std::abs(lam[i + 1] - lam[i]) > 1e-8 * std::max(1.0, std::abs(lam[i]))) continue;
    // 2x2 rotation maximizing the first loop's share of the first vector
    Eigen::VectorXd&u1 = vecs[i];
    Eigen::VectorXd& u2 = vecs[i + 1];
    const int e0 = loops[0];
    double best_t = 0.0, best_m = -1.0;
    for (int step = 0; step < 180; ++step) {
      const double t = std::numbers::pi * step / 180.0;
      const Eigen::VectorXd cand = std::cos(t) * u1 + std::sin(t) * u2;
      const double mass = edge_mass(cand, e0) / std::max(cand.squaredNorm(), 1e-300);
      if (mass > best_m) {
        best_m = mass;
        best_t = t;
      }
    }
    const Eigen::VectorXd a = std::cos(best_t) * u1 + std::sin(best_t) * u2;
    const Eigen::VectorXd b = -std::sin(best_t) * u1 + std::cos(best_t) * u2;
    u1 = a;
    u2 = b;
  }
}

}  // namespace detail

/// Lowest `count` eigenpairs of the FD-discretized -d^2/dx^2 with Kirchhoff
/// coupling on g, grid spacing <= h (each edge needs >= 16 intervals).
/// Eigenfunctions are L2-normalized with a deterministic sign.
inline std::vector<FdEigenpair> fd_eigenmodes(const MetricGraph& g, double h, int count) {
  auto gp = std::make_shared<const MetricGraph>(g);
  FdGrid grid(gp, h);
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  assemble_laplace_pencil(grid, A, B);

  const Eigen::VectorXd d = B.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd S = d.asDiagonal() * A * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("fd_eigenmodes: eigensolver failed");

  count = std::min<int>(count, grid.size);
  std::vector<double> lam(count);
  std::vector<Eigen::VectorXd> vecs(count);
  for (int j = 0; j < count; ++j) {
    lam[j] = es.eigenvalues()(j);
    vecs[j] = d.asDiagonal() * es.eigenvectors().col(j);
  }
  detail::localize_degenerate_pairs(grid, lam, vecs);

  std::vector<FdEigenpair> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd u = vecs[j];
    const double nrm = std::sqrt(u.dot(B.asDiagonal() * u));
    if (nrm > 0.0) u /= nrm;
    // deterministic sign: largest-|.| entry positive
    int imax = 0;
    u.cwiseAbs().maxCoeff(&imax);
    if (u(imax) < 0.0) u = -u;
    out.push_back({lam[j], grid.to_function(u)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vanishing-loop expansion
// ---------------------------------------------------------------------------

/// Secular factors of the rescaled dumbbell with loop length eps and center
/// length pi (even and odd families only; the loop family escapes to
/// k = 2 n pi / eps).
inline double rescaled_secular_factor(double k, double eps, bool even) {
  if (even) return std::sin(k * (std::numbers::pi - eps) / 2.0) - 3.0 * std::sin(k * (eps + std::numbers::pi) / 2.0);
  return std::cos(k * (std::numbers::pi - eps) / 2.0) - 3.0 * std::cos(k * (eps + std::numbers::pi) / 2.0);
}

struct EpsilonExpansion {
  double k_exact = 0.0;
  double k_series = 0.0;
};

/// Exact rescaled-secular root near the n-th even/odd mode versus its cubic
/// series k0 (1 - 2e/pi + 4e^2/pi^2 - 8e^3/pi^3) + k0^3 e^3/(2 pi) with
/// k0 = 2n (even) or 2n-1 (odd). The gap is O(eps^4).
inline EpsilonExpansion epsilon_expansion_check(int n, bool even, double eps) {
  if (n < 1) throw std::invalid_argument("epsilon_expansion_check: n must be >= 1");
  if (!(eps > 0.0 && eps <= 0.1))
    throw std::invalid_argument("epsilon_expansion_check: eps must lie in (0, 0.1]");
  const double pi = std::numbers::pi;
  const double k0 = even ? 2.0 * n : 2.0 * n - 1.0;
  const double series =
      k0 * (1.0 - 2.0 * eps / pi + 4.0 * eps * eps / (pi * pi) - 8.0 * std::pow(eps, 3) / std::pow(pi, 3)) +
      std::pow(k0, 3) * std::pow(eps, 3) / (2.0 * pi);

  const auto f = [&](double k) { return rescaled_secular_factor(k, eps, even); };
  const auto roots = detail::bracketed_roots(f, std::max(1e-6, series - 0.4), series + 0.4, 1e-4);
  double best = series;
  double dist = 1e300;
  for (double r : roots) {
    if (std::abs(r - series) < dist) {
      dist = std::abs(r - series);
      best = r;
    }
  }
  if (roots.empty()) throw std::runtime_error("epsilon_expansion_check: no root near the series value");
  return {best, series};
}

}  // namespace qgraph
