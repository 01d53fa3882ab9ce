#pragma once
// Finite-difference residual and Jacobian of the stationary cubic NLS on a
// metric graph,
//     -phi'' - Lambda*phi - 2*phi^3 = 0   on every edge,
// with continuity enforced by sharing one unknown per vertex and the zero-flux
// Kirchhoff condition written as a residual row using second-order one-sided
// differences. The flux row at each vertex sums the outgoing derivatives over
// all incident edge-ends; a loop contributes both of its ends.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qgraph/graph.hpp"
#include "qgraph/spectrum.hpp"

namespace qgraph {

inline constexpr double kDefaultGridH = 0.05;
inline constexpr int kDefaultMinIntervals = 64;

/// Immutable FD assembly for one metric graph: grids, unknown layout, and the
/// residual/Jacobian of the stationary equation. Vertex unknowns are stored
/// once and shared by incident edges, so continuity holds by construction and
/// only the flux condition appears as a residual row.
class DiscreteSystem {
 public:
  // Interval counts are rounded up to even so loop midpoints are grid nodes
  // (the shooting construction mirrors half-loops across them).
  explicit DiscreteSystem(std::shared_ptr<const MetricGraph> graph, double target_h = kDefaultGridH,
                          int min_intervals = kDefaultMinIntervals)
      : grid_(graph, [&] {
          std::vector<int> ns;
          for (const auto& e : graph->edges) {
            int n = std::max(min_intervals,
                             static_cast<int>(std::ceil(e.length / target_h - 1e-12)));
            if (n % 2) ++n;
            ns.push_back(n);
          }
          return ns;
        }()),
        weights_(grid_.trapezoid_weights()) {}

  DiscreteSystem(std::shared_ptr<const MetricGraph> graph, std::vector<int> per_edge_intervals)
      : grid_(std::move(graph), std::move(per_edge_intervals)),
        weights_(grid_.trapezoid_weights()) {}

  const FdGrid& grid() const { return grid_; }
  const MetricGraph& graph() const { return *grid_.graph; }
  std::shared_ptr<const MetricGraph> graph_ptr() const { return grid_.graph; }
  int size() const { return grid_.size; }
  const Eigen::VectorXd& trapezoid_weights() const { return weights_; }
  double max_h() const { return *std::max_element(grid_.h.begin(), grid_.h.end()); }

  /// Same graph, every interval count doubled (for convergence studies).
  DiscreteSystem refined() const {
    std::vector<int> ns = grid_.intervals;
    for (int& n : ns) n *= 2;
    return DiscreteSystem(grid_.graph, std::move(ns));
  }

  GraphFunction to_function(const Eigen::VectorXd& u) const { return grid_.to_function(u); }
  Eigen::VectorXd to_vector(const GraphFunction& f) const { return grid_.to_vector(f); }

  /// Interior rows: (2u_i - u_{i-1} - u_{i+1})/h^2 - Lambda u_i - 2 u_i^3.
  /// Vertex rows: sum over incident edge-ends of the outgoing one-sided
  /// derivative (-3v + 4w1 - w2)/(2h).
  Eigen::VectorXd residual(const Eigen::VectorXd& u, double lambda) const {
    if (u.size() != size()) throw std::invalid_argument("residual: size mismatch");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(size());
    const auto& g = graph();
    for (int m = 0; m < g.edge_count(); ++m) {
      const double inv_h2 = 1.0 / (grid_.h[m] * grid_.h[m]);
      const int n = grid_.intervals[m];
      for (int i = 1; i < n; ++i) {
        const double ui = u(grid_.interior_index(m, i));
        r(grid_.interior_index(m, i)) =
            (2.0 * ui - u(grid_.node_index(m, i - 1)) - u(grid_.node_index(m, i + 1))) * inv_h2 -
            lambda * ui - 2.0 * ui * ui * ui;
      }
      const double inv_2h = 0.5 / grid_.h[m];
      // outgoing derivative at the `from` end
      r(grid_.vertex_index(g.edges[m].from)) +=
          (-3.0 * u(grid_.node_index(m, 0)) + 4.0 * u(grid_.node_index(m, 1)) -
           u(grid_.node_index(m, 2))) * inv_2h;
      // outgoing derivative at the `to` end
      r(grid_.vertex_index(g.edges[m].to)) +=
          (-3.0 * u(grid_.node_index(m, n)) + 4.0 * u(grid_.node_index(m, n - 1)) -
           u(grid_.node_index(m, n - 2))) * inv_2h;
    }
    return r;
  }

  /// Derivative of the residual: discretization of -d^2/dx^2 - Lambda - 6 phi^2
  /// on interior rows plus the constant flux rows.
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u, double lambda) const {
    if (u.size() != size()) throw std::invalid_argument("jacobian: size mismatch");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(size()) * 4);
    const auto& g = graph();
    for (int m = 0; m < g.edge_count(); ++m) {
      const double inv_h2 = 1.0 / (grid_.h[m] * grid_.h[m]);
      const int n = grid_.intervals[m];
      for (int i = 1; i < n; ++i) {
        const int row = grid_.interior_index(m, i);
        const double ui = u(row);
        trip.emplace_back(row, row, 2.0 * inv_h2 - lambda - 6.0 * ui * ui);
        trip.emplace_back(row, grid_.node_index(m, i - 1), -inv_h2);
        trip.emplace_back(row, grid_.node_index(m, i + 1), -inv_h2);
      }
      const double inv_2h = 0.5 / grid_.h[m];
      const int row_from = grid_.vertex_index(g.edges[m].from);
      trip.emplace_back(row_from, grid_.node_index(m, 0), -3.0 * inv_2h);
      trip.emplace_back(row_from, grid_.node_index(m, 1), 4.0 * inv_2h);
      trip.emplace_back(row_from, grid_.node_index(m, 2), -inv_2h);
      const int row_to = grid_.vertex_index(g.edges[m].to);
      trip.emplace_back(row_to, grid_.node_index(m, n), -3.0 * inv_2h);
      trip.emplace_back(row_to, grid_.node_index(m, n - 1), 4.0 * inv_2h);
      trip.emplace_back(row_to, grid_.node_index(m, n - 2), -inv_2h);
    }
    Eigen::SparseMatrix<double> J(size(), size());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  /// d(residual)/d(Lambda): -u on interior rows, zero on flux rows.
  Eigen::VectorXd residual_dlambda(const Eigen::VectorXd& u) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(size());
    for (int m = 0; m < graph().edge_count(); ++m)
      for (int i = 1; i < grid_.intervals[m]; ++i)
        r(grid_.interior_index(m, i)) = -u(grid_.interior_index(m, i));
    return r;
  }

  double power(const Eigen::VectorXd& u) const { return u.dot(weights_.asDiagonal() * u); }

 private:
  FdGrid grid_;
  Eigen::VectorXd weights_;
};

/// Power Q = squared L2 norm of the profile, by the trapezoid rule.
inline double power(const GraphFunction& f) { return f.l2_norm_sq(); }

/// Solution snapshot as CSV: edge_id, x, value (one row per sample).
inline void write_solution_csv(const GraphFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_solution_csv: cannot open " + path);
  out << "edge_id,x,value\n";
  out.precision(17);
  for (int m = 0; m < f.edge_count(); ++m) {
    const auto& e = f.graph().edges[m];
    const auto& v = f.edge_values(m);
    for (int i = 0; i < v.size(); ++i) {
      const double x = e.x_min + e.length * i / (v.size() - 1);
      out << m << ',' << x << ',' << v(i) << '\n';
    }
  }
}

inline GraphFunction read_solution_csv(std::shared_ptr<const MetricGraph> g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_solution_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> vals(g->edge_count());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const int m = std::stoi(line.substr(0, c1));
    vals.at(m).push_back(std::stod(line.substr(c2 + 1)));
  }
  std::vector<Eigen::VectorXd> v(vals.size());
  for (std::size_t m = 0; m < vals.size(); ++m)
    v[m] = Eigen::Map<Eigen::VectorXd>(vals[m].data(), vals[m].size());
  return GraphFunction(std::move(g), std::move(v));
}

}  // namespace qgraph
