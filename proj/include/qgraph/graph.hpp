#pragma once
// Graph data model: combinatorial graphs with a weighted Laplacian, metric
// graphs with per-edge coordinates, sampled functions on metric graphs, and
// the reflection symmetries of the dumbbell.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace qgraph {

inline constexpr double kVertexCoherenceTol = 1e-8;

// ---------------------------------------------------------------------------
// Combinatorial graphs
// ---------------------------------------------------------------------------

/// Undirected combinatorial graph with positive edge weights. Self-edges are
/// rejected: the incidence-matrix Laplacian below requires distinct endpoints.
struct CombinatorialGraph {
  struct Edge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
  };

  int vertex_count = 0;
  std::vector<Edge> edges;

  CombinatorialGraph(int n, std::vector<Edge> e)
      : vertex_count(n), edges(std::move(e)) {
    if (n <= 0) throw std::invalid_argument("CombinatorialGraph: empty vertex set");
    for (const auto& ed : edges) {
      if (ed.from < 0 || ed.from >= n || ed.to < 0 || ed.to >= n)
        throw std::invalid_argument("CombinatorialGraph: vertex index out of range");
      if (ed.from == ed.to)
        throw std::invalid_argument("CombinatorialGraph: self-edges are not allowed");
      if (!(ed.weight > 0.0))
        throw std::invalid_argument("CombinatorialGraph: weights must be positive");
    }
  }

  std::vector<int> degree_sequence() const {
    std::vector<int> deg(vertex_count, 0);
    for (const auto& e : edges) {
      ++deg[e.from];
      ++deg[e.to];
    }
    return deg;
  }

  bool adjacent(int i, int j) const {
    for (const auto& e : edges)
      if ((e.from == i && e.to == j) || (e.from == j && e.to == i)) return true;
    return false;
  }
};

/// Weighted graph Laplacian E W E^T (positive semidefinite; row sums vanish).
/// This is the matrix coupling the discrete self-trapping system.
inline Eigen::MatrixXd laplacian(const CombinatorialGraph& g) {
  const int n = g.vertex_count;
  const int m = static_cast<int>(g.edges.size());
  Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(n, m);
  Eigen::VectorXd w(m);
  for (int j = 0; j < m; ++j) {
    incidence(g.edges[j].from, j) = -1.0;
    incidence(g.edges[j].to, j) = 1.0;
    w(j) = g.edges[j].weight;
  }
  return incidence * w.asDiagonal() * incidence.transpose();
}

/// Five vertices joined into a bowtie: two triangles sharing the center
/// vertex (index 2). All weights are one.
inline CombinatorialGraph build_bowtie() {
  return CombinatorialGraph(
      5, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {2, 4, 1.0}, {3, 4, 1.0}});
}

// ---------------------------------------------------------------------------
// Metric graphs
// ---------------------------------------------------------------------------

/// Metric graph: edges carry a length, a fixed coordinate range, and an
/// orientation (the coordinate increases from `from` to `to`). A loop edge has
/// identical endpoints and contributes both of its ends at that vertex.
struct MetricGraph {
  struct Edge {
    int from = 0;
    int to = 0;
    double length = 0.0;
    double x_min = 0.0;  // coordinate at `from`; x_max = x_min + length at `to`
    bool is_loop = false;

    double x_max() const { return x_min + length; }
  };
  struct Vertex {
    bool neumann = false;  // marker for a pendant tip carrying a Neumann condition
  };

  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  bool resonance_warning = false;  // set by build_dumbbell at resonant lengths

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  /// Degree counted in edge-ends: a loop contributes two to its vertex.
  int degree(int v) const {
    int d = 0;
    for (const auto& e : edges) {
      if (e.from == v) ++d;
      if (e.to == v) ++d;
    }
    return d;
  }

  double total_length() const {
    double s = 0.0;
    for (const auto& e : edges) s += e.length;
    return s;
  }

  void validate() const {
    for (const auto& e : edges) {
      if (!(e.length > 0.0)) throw std::invalid_argument("MetricGraph: nonpositive edge length");
      if (e.from < 0 || e.from >= vertex_count() || e.to < 0 || e.to >= vertex_count())
        throw std::invalid_argument("MetricGraph: vertex index out of range");
      if (e.is_loop != (e.from == e.to))
        throw std::invalid_argument("MetricGraph: loop flag inconsistent with endpoints");
    }
  }

  /// True for the dumbbell layout this library's symmetry ops act on:
  /// edge 0 and 2 are loops of equal length at distinct vertices, edge 1 joins them.
  bool is_dumbbell_shaped() const {
    return edge_count() == 3 && vertex_count() == 2 && edges[0].is_loop && edges[2].is_loop &&
           !edges[1].is_loop && edges[0].from != edges[2].from &&
           std::abs(edges[0].length - edges[2].length) < 1e-14;
  }
};

inline bool near_half_pi_multiple(double L, double tol = 1e-9) {
  const double ratio = L / (std::numbers::pi / 2.0);
  return std::abs(ratio - std::round(ratio)) < tol && std::round(ratio) != 0.0;
}

/// Two loops of length 2*pi (coordinates in (-pi, pi)) joined by a segment of
/// length 2L (coordinates in (-L, L)). When L is an integer multiple of pi/2
/// the loop eigenvalues collide with the even/odd families and the graph is
/// flagged resonant.
inline MetricGraph build_dumbbell(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("build_dumbbell: L must be positive");
  const double pi = std::numbers::pi;
  MetricGraph g;
  g.vertices.resize(2);
  g.edges = {{0, 0, 2.0 * pi, -pi, true},
             {0, 1, 2.0 * L, -L, false},
             {1, 1, 2.0 * pi, -pi, true}};
  g.resonance_warning = near_half_pi_multiple(L);
  g.validate();
  return g;
}

/// One loop of length 2*pi plus a pendant edge of length 2L whose tip carries
/// a Neumann marker (the Kirchhoff condition at a leaf reduces to Neumann).
inline MetricGraph build_lollipop(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("build_lollipop: L must be positive");
  const double pi = std::numbers::pi;
  MetricGraph g;
  g.vertices.resize(2);
  g.vertices[1].neumann = true;
  g.edges = {{0, 0, 2.0 * pi, -pi, true}, {0, 1, 2.0 * L, -L, false}};
  g.validate();
  return g;
}

/// Single edge with two Neumann leaves; coordinates in (0, length).
inline MetricGraph build_interval(double length) {
  if (!(length > 0.0)) throw std::invalid_argument("build_interval: length must be positive");
  MetricGraph g;
  g.vertices.resize(2);
  g.vertices[0].neumann = true;
  g.vertices[1].neumann = true;
  g.edges = {{0, 1, length, 0.0, false}};
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Functions sampled on a metric graph
// ---------------------------------------------------------------------------

/// Real field sampled on uniform per-edge grids that include both endpoints.
/// Samples mapped to a shared vertex must agree within the coherence
/// tolerance. Immutable after construction.
class GraphFunction {
 public:
  GraphFunction(std::shared_ptr<const MetricGraph> graph, std::vector<Eigen::VectorXd> values,
                double coherence_tol = kVertexCoherenceTol)
      : graph_(std::move(graph)), values_(std::move(values)) {
    if (!graph_) throw std::invalid_argument("GraphFunction: null graph");
    if (static_cast<int>(values_.size()) != graph_->edge_count())
      throw std::invalid_argument("GraphFunction: one sample array per edge required");
    h_.resize(values_.size());
    for (std::size_t m = 0; m < values_.size(); ++m) {
      if (values_[m].size() < 2)
        throw std::invalid_argument("GraphFunction: each edge needs at least two samples");
      h_[m] = graph_->edges[m].length / static_cast<double>(values_[m].size() - 1);
    }
    if (coherence_error() > coherence_tol)
      throw std::invalid_argument("GraphFunction: vertex samples are not coherent");
  }

  static GraphFunction sample(std::shared_ptr<const MetricGraph> graph,
                              const std::function<double(int, double)>& f,
                              const std::vector<int>& intervals) {
    if (static_cast<int>(intervals.size()) != graph->edge_count())
      throw std::invalid_argument("GraphFunction::sample: interval count mismatch");
    std::vector<Eigen::VectorXd> vals(intervals.size());
    for (std::size_t m = 0; m < intervals.size(); ++m) {
      const int n = intervals[m];
      if (n < 1) throw std::invalid_argument("GraphFunction::sample: need >= 1 interval");
      const auto& e = graph->edges[m];
      vals[m].resize(n + 1);
      for (int i = 0; i <= n; ++i)
        vals[m](i) = f(static_cast<int>(m), e.x_min + e.length * i / n);
    }
    return GraphFunction(std::move(graph), std::move(vals));
  }

  const MetricGraph& graph() const { return *graph_; }
  std::shared_ptr<const MetricGraph> graph_ptr() const { return graph_; }
  int edge_count() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& edge_values(int m) const { return values_[m]; }
  double h(int m) const { return h_[m]; }

  double value_at_from(int m) const { return values_[m](0); }
  double value_at_to(int m) const { return values_[m](values_[m].size() - 1); }

  /// Value at a vertex, taken from the first incident edge-end.
  double vertex_value(int v) const {
    for (int m = 0; m < edge_count(); ++m) {
      if (graph_->edges[m].from == v) return value_at_from(m);
      if (graph_->edges[m].to == v) return value_at_to(m);
    }
    throw std::invalid_argument("GraphFunction::vertex_value: isolated vertex");
  }

  /// Largest mismatch between samples mapped to the same vertex.
  double coherence_error() const {
    double worst = 0.0;
    for (int v = 0; v < graph_->vertex_count(); ++v) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      bool seen = false;
      for (int m = 0; m < edge_count(); ++m) {
        const auto& e = graph_->edges[m];
        if (e.from == v) { lo = std::min(lo, value_at_from(m)); hi = std::max(hi, value_at_from(m)); seen = true; }
        if (e.to == v) { lo = std::min(lo, value_at_to(m)); hi = std::max(hi, value_at_to(m)); seen = true; }
      }
      if (seen) worst = std::max(worst, hi - lo);
    }
    return worst;
  }

  bool is_coherent(double tol = kVertexCoherenceTol) const { return coherence_error() <= tol; }

  /// Trapezoid-rule integral of f(values) over all edges.
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int m = 0; m < edge_count(); ++m) {
      const auto& v = values_[m];
      const int n = static_cast<int>(v.size());
      double acc = 0.5 * (f(v(0)) + f(v(n - 1)));
      for (int i = 1; i < n - 1; ++i) acc += f(v(i));
      s += acc * h_[m];
    }
    return s;
  }

  double l2_norm_sq() const { return integrate([](double x) { return x * x; }); }
  double l2_norm() const { return std::sqrt(l2_norm_sq()); }
  double l4_norm_pow4() const { return integrate([](double x) { return x * x * x * x; }); }

  /// First-difference H1 seminorm squared.
  double h1_seminorm_sq() const {
    double s = 0.0;
    for (int m = 0; m < edge_count(); ++m) {
      const auto& v = values_[m];
      for (int i = 0; i + 1 < v.size(); ++i) {
        const double d = (v(i + 1) - v(i)) / h_[m];
        s += d * d * h_[m];
      }
    }
    return s;
  }

  double inner(const GraphFunction& other) const {
    double s = 0.0;
    for (int m = 0; m < edge_count(); ++m) {
      const auto& a = values_[m];
      const auto& b = other.values_[m];
      if (a.size() != b.size())
        throw std::invalid_argument("GraphFunction::inner: sample layouts differ");
      const int n = static_cast<int>(a.size());
      double acc = 0.5 * (a(0) * b(0) + a(n - 1) * b(n - 1));
      for (int i = 1; i < n - 1; ++i) acc += a(i) * b(i);
      s += acc * h_[m];
    }
    return s;
  }

  GraphFunction with_values(std::vector<Eigen::VectorXd> values) const {
    return GraphFunction(graph_, std::move(values));
  }

  double max_abs() const {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, v.cwiseAbs().maxCoeff());
    return s;
  }

 private:
  std::shared_ptr<const MetricGraph> graph_;
  std::vector<Eigen::VectorXd> values_;
  std::vector<double> h_;
};

// ---------------------------------------------------------------------------
// Symmetries
// ---------------------------------------------------------------------------

/// Reflection symmetries of the dumbbell, or a vertex permutation for
/// combinatorial graphs. Every op is an involution on sample arrays.
///   R1: reverse the direction of the first loop.
///   R2: exchange the two loops (and their vertices) and reverse the segment.
///   R3: reverse the direction of the second loop.
struct SymmetryOp {
  enum class Kind { R1, R2, R3, Permutation };
  Kind kind = Kind::R1;
  std::vector<int> perm;  // only for Kind::Permutation

  static SymmetryOp r1() { return {Kind::R1, {}}; }
  static SymmetryOp r2() { return {Kind::R2, {}}; }
  static SymmetryOp r3() { return {Kind::R3, {}}; }
  static SymmetryOp permutation(std::vector<int> p) { return {Kind::Permutation, std::move(p)}; }
};

inline GraphFunction apply_symmetry(const SymmetryOp& op, const GraphFunction& f) {
  if (op.kind == SymmetryOp::Kind::Permutation)
    throw std::invalid_argument("apply_symmetry: permutation ops act on state vectors");
  if (!f.graph().is_dumbbell_shaped())
    throw std::invalid_argument("apply_symmetry: graph is not dumbbell-shaped");
  std::vector<Eigen::VectorXd> out(3);
  const auto rev = [](const Eigen::VectorXd& v) { return v.reverse().eval(); };
  switch (op.kind) {
    case SymmetryOp::Kind::R1:
      out[0] = rev(f.edge_values(0));
      out[1] = f.edge_values(1);
      out[2] = f.edge_values(2);
      break;
    case SymmetryOp::Kind::R2:
      out[0] = f.edge_values(2);
      out[1] = rev(f.edge_values(1));
      out[2] = f.edge_values(0);
      break;
    case SymmetryOp::Kind::R3:
      out[0] = f.edge_values(0);
      out[1] = f.edge_values(1);
      out[2] = rev(f.edge_values(2));
      break;
    default:
      break;
  }
  return f.with_values(std::move(out));
}

template <class Vec>
Vec apply_symmetry(const SymmetryOp& op, const Vec& state) {
  if (op.kind != SymmetryOp::Kind::Permutation)
    throw std::invalid_argument("apply_symmetry: dumbbell ops act on GraphFunction");
  if (static_cast<int>(op.perm.size()) != state.size())
    throw std::invalid_argument("apply_symmetry: permutation size mismatch");
  Vec out(state.size());
  for (int i = 0; i < state.size(); ++i) out(op.perm[i]) = state(i);
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization of graph topologies
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const MetricGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : g.vertices) j["vertices"].push_back({{"neumann", v.neumann}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back(
        {{"from", e.from}, {"to", e.to}, {"length", e.length}, {"loop", e.is_loop}, {"x0", e.x_min}});
  j["markers"] = {{"resonance_warning", g.resonance_warning}};
  return j;
}

inline MetricGraph metric_graph_from_json(const nlohmann::json& j) {
  MetricGraph g;
  for (const auto& v : j.at("vertices")) {
    MetricGraph::Vertex vert;
    vert.neumann = v.value("neumann", false);
    g.vertices.push_back(vert);
  }
  for (const auto& e : j.at("edges")) {
    MetricGraph::Edge edge;
    edge.from = e.at("from").get<int>();
    edge.to = e.at("to").get<int>();
    edge.length = e.at("length").get<double>();
    edge.is_loop = e.value("loop", edge.from == edge.to);
    edge.x_min = e.value("x0", -edge.length / 2.0);
    g.edges.push_back(edge);
  }
  if (j.contains("markers")) g.resonance_warning = j["markers"].value("resonance_warning", false);
  g.validate();
  return g;
}

}  // namespace qgraph
