#pragma once
// Command-line front end: spectrum, continue, classify, bowtie, enumerate,
// render, rerun. Every run validates its configuration first, writes the
// requested CSV/JSON artifacts plus a manifest recording the effective
// parameters, and returns 0 on success, 2 on an invalid configuration, 3 on
// numerical failure (with a diagnostic file next to the outputs).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qgraph/bowtie.hpp"
#include "qgraph/classify.hpp"
#include "qgraph/continuation.hpp"
#include "qgraph/discretize.hpp"
#include "qgraph/shooting.hpp"
#include "qgraph/spectrum.hpp"
#include "qgraph/svg.hpp"
#include "qgraph/version.hpp"

namespace qgraph::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

inline void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                           const json& args, const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "qgraph";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["args"] = args;
  m["outputs"] = outputs;
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

inline std::pair<double, double> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--lambda-window", "expected lo:hi");
  const double lo = std::stod(s.substr(0, colon));
  const double hi = std::stod(s.substr(colon + 1));
  if (!(lo < hi)) throw CLI::ValidationError("--lambda-window", "window is empty");
  return {lo, hi};
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumConfig {
  std::string graph = "dumbbell";
  std::string graph_json;
  double L = 2.0;
  double k_max = 3.0;
  double h = 0.02;
  std::string out = "spectrum.csv";
};

inline int run_spectrum(const SpectrumConfig& cfg) {
  std::ostringstream csv;
  csv << "k,lambda,family,multiplicity\n";

  if (cfg.graph == "dumbbell") {
    for (const auto& m : find_modes(cfg.L, cfg.k_max)) {
      csv << detail::csv_num(m.k) << ',' << detail::csv_num(m.lambda) << ',' << to_string(m.family)
          << (m.resonant ? "(resonant)" : "") << ',' << m.multiplicity << '\n';
    }
  } else if (cfg.graph == "interval") {
    for (int n = 0;; ++n) {
      const double k = n * std::numbers::pi / cfg.L;
      if (k > cfg.k_max) break;
      csv << detail::csv_num(k) << ',' << detail::csv_num(k * k) << ",neumann,1\n";
    }
  } else {
    MetricGraph g;
    if (cfg.graph == "lollipop") {
      g = build_lollipop(cfg.L);
    } else if (cfg.graph == "custom") {
      std::ifstream in(cfg.graph_json);
      if (!in) throw CLI::ValidationError("--graph-json", "cannot open " + cfg.graph_json);
      json j;
      in >> j;
      g = metric_graph_from_json(j);
    } else {
      throw CLI::ValidationError("--graph", "unknown graph " + cfg.graph);
    }
    int count = 0;
    std::vector<FdEigenpair> pairs = fd_eigenmodes(g, cfg.h, 64);
    for (const auto& p : pairs) {
      const double k = std::sqrt(std::max(0.0, p.lambda));
      if (k > cfg.k_max) break;
      csv << detail::csv_num(k) << ',' << detail::csv_num(p.lambda) << ",fd,1\n";
      ++count;
    }
    (void)count;
  }

  const fs::path out(cfg.out);
  detail::write_text(out, csv.str());
  json args{{"graph", cfg.graph}, {"L", cfg.L},   {"kmax", cfg.k_max},
            {"grid_h", cfg.h},    {"out", cfg.out}};
  if (!cfg.graph_json.empty()) args["graph_json"] = cfg.graph_json;
  detail::write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), "spectrum",
                         args, {cfg.out});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// continue
// ---------------------------------------------------------------------------

struct ContinueConfig {
  bool plot = false;
  std::string graph = "dumbbell";
  double L = 2.0;
  std::string from = "constant";  // constant | zero | file:<solution.csv>
  double lambda_start = std::numeric_limits<double>::quiet_NaN();
  std::string window = "-3:0";
  double ds = 0.01;
  double h = kDefaultGridH;
  int direction = -1;
  bool iterative = false;
  std::string out = "branch.csv";
  std::string dump_solutions;  // directory; empty = no dumps
};

inline void write_branch_csv(const fs::path& path, const Branch& branch) {
  std::ostringstream csv;
  csv << "s,lambda,Q,tags\n";
  for (const auto& p : branch.points)
    csv << detail::csv_num(p.s) << ',' << detail::csv_num(p.lambda) << ','
        << detail::csv_num(p.Q) << ',' << p.tag_string() << '\n';
  detail::write_text(path, csv.str());
}

inline int run_continue(const ContinueConfig& cfg) {
  if (cfg.graph != "dumbbell")
    throw CLI::ValidationError("--graph", "continuation front end covers the dumbbell");
  const auto [lo, hi] = detail::parse_window(cfg.window);

  auto graph = std::make_shared<const MetricGraph>(build_dumbbell(cfg.L));
  DiscreteSystem sys(graph, cfg.h);

  double lambda0 = cfg.lambda_start;
  if (std::isnan(lambda0)) lambda0 = hi - 0.01 * (hi - lo);

  Eigen::VectorXd seed;
  if (cfg.from == "constant") {
    if (!(lambda0 < 0.0))
      throw CLI::ValidationError("--lambda-start",
                                 "the constant branch needs a negative starting frequency");
    seed = Eigen::VectorXd::Constant(sys.size(), std::sqrt(-lambda0 / 2.0));
  } else if (cfg.from == "zero") {
    seed = Eigen::VectorXd::Zero(sys.size());
  } else if (cfg.from.rfind("file:", 0) == 0) {
    const auto f = read_solution_csv(graph, cfg.from.substr(5));
    seed = sys.to_vector(f);
  } else {
    throw CLI::ValidationError("--from", "expected constant, zero or file:<csv>");
  }

  ContinuationOptions opt;
  opt.ds = cfg.ds;
  opt.newton.iterative = cfg.iterative;
  Branch branch = continue_branch(sys, seed, lambda0, cfg.direction, lo, hi, opt, cfg.from);
  const auto events = detect_events(sys, branch);

  // tag the nearest stored points
  for (const auto& e : events) {
    if (e.segment + 1 < branch.points.size()) {
      auto& p = branch.points[e.segment];
      p.add_tag(e.kind == EventKind::fold ? PointTag::fold : PointTag::branch_point);
    }
  }

  const fs::path out(cfg.out);
  write_branch_csv(out, branch);

  json jevents = json::array();
  for (const auto& e : events)
    jevents.push_back({{"kind", e.kind == EventKind::fold ? "fold" : "branch_point"},
                       {"lambda", e.lambda},
                       {"s", e.s}});
  const fs::path events_path = out.parent_path() / (out.stem().string() + ".events.json");
  detail::write_text(events_path, jevents.dump(2) + "\n");

  std::vector<std::string> outputs{cfg.out, events_path.string()};
  if (cfg.plot) {
    DiagramCurve curve;
    curve.label = out.stem().string();
    for (const auto& p : branch.points) curve.points.emplace_back(p.lambda, p.Q);
    std::vector<DiagramMarker> marks;
    for (const auto& e : events)
      marks.push_back({e.kind == EventKind::fold ? DiagramMarker::Kind::fold
                                                 : DiagramMarker::Kind::branch_point,
                       e.lambda, 0.0});
    // place markers on the curve
    for (auto& m : marks) {
      double best = 1e300;
      for (const auto& p : branch.points)
        if (std::abs(p.lambda - m.x) < best) {
          best = std::abs(p.lambda - m.x);
          m.y = p.Q;
        }
    }
    const fs::path svg_path = out.parent_path() / (out.stem().string() + ".svg");
    detail::write_text(svg_path, render_diagram({curve}, marks));
    outputs.push_back(svg_path.string());
  }
  if (!cfg.dump_solutions.empty()) {
    fs::create_directories(cfg.dump_solutions);
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "solution_%06zu.csv", i);
      const fs::path p = fs::path(cfg.dump_solutions) / name;
      write_solution_csv(sys.to_function(branch.points[i].u), p.string());
    }
    outputs.push_back(cfg.dump_solutions);
  }

  json args{{"graph", cfg.graph}, {"L", cfg.L},
            {"from", cfg.from},   {"lambda_start", lambda0},
            {"window", cfg.window}, {"ds", cfg.ds},
            {"grid_h", cfg.h},    {"direction", cfg.direction},
            {"iterative", cfg.iterative}, {"out", cfg.out},
            {"dump_solutions", cfg.dump_solutions}, {"plot", cfg.plot}};
  detail::write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), "continue",
                         args, outputs);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

struct ClassifyConfig {
  std::string graph = "dumbbell";
  double L = 2.0;
  double h = kDefaultGridH;
  std::string branch_csv;
  int index = -1;
  std::string solutions;      // directory with per-point dumps
  bool assume_constant = false;  // reconstruct the constant profile from lambda
  std::string out = "classification.json";
};

inline int run_classify(const ClassifyConfig& cfg) {
  if (cfg.branch_csv.empty()) throw CLI::ValidationError("--branch", "branch CSV required");
  std::ifstream in(cfg.branch_csv);
  if (!in) throw CLI::ValidationError("--branch", "cannot open " + cfg.branch_csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> lambdas;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    lambdas.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  if (cfg.index < 0 || cfg.index >= static_cast<int>(lambdas.size()))
    throw CLI::ValidationError("--index", "point index outside the branch");

  auto graph = std::make_shared<const MetricGraph>(build_dumbbell(cfg.L));
  DiscreteSystem sys(graph, cfg.h);
  const double lambda0 = lambdas[cfg.index];

  Eigen::VectorXd phi0;
  if (cfg.assume_constant) {
    if (!(lambda0 < 0.0))
      throw CLI::ValidationError("--assume-constant", "constant profile needs lambda < 0");
    phi0 = Eigen::VectorXd::Constant(sys.size(), std::sqrt(-lambda0 / 2.0));
  } else {
    if (cfg.solutions.empty())
      throw CLI::ValidationError("--solutions",
                                 "solution dumps required unless --assume-constant");
    char name[64];
    std::snprintf(name, sizeof name, "solution_%06d.csv", cfg.index);
    phi0 = sys.to_vector(read_solution_csv(graph, (fs::path(cfg.solutions) / name).string()));
  }

  const ThetaSet t = compute_thetas(sys, phi0, lambda0);
  const Classification c = classify(t, default_zero_tol(sys, phi0));

  json j;
  j["lambda0"] = lambda0;
  j["thetas"] = {t.theta1, t.theta2, t.theta3, t.theta4, t.theta5};
  j["kind"] = to_string(c.kind);
  j["side"] = to_string(c.side);
  const fs::path out(cfg.out);
  detail::write_text(out, j.dump(2) + "\n");

  json args{{"graph", cfg.graph}, {"L", cfg.L},         {"grid_h", cfg.h},
            {"branch", cfg.branch_csv}, {"index", cfg.index}, {"solutions", cfg.solutions},
            {"assume_constant", cfg.assume_constant},   {"out", cfg.out}};
  detail::write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), "classify",
                         args, {cfg.out});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bowtie
// ---------------------------------------------------------------------------

struct BowtieConfig {
  bool events = false;
  bool plot = false;
  int samples = 400;
  std::string out = "bowtie.csv";
  std::string events_out = "bowtie_events.json";
};

inline int run_bowtie(const BowtieConfig& cfg) {
  std::ostringstream csv;
  csv << "branch_id,theta,omega,Q,a,b,c\n";
  // branches 1-2 sampled in Omega, 3-7 in theta
  for (int id = 1; id <= 2; ++id) {
    for (int i = 0; i <= cfg.samples; ++i) {
      const double w0 = id == 1 ? 0.0 : 1.0;
      const double omega = w0 - 6.0 * i / cfg.samples;
      const auto p = dst_branch_point(id, omega);
      csv << id << ",," << detail::csv_num(p.omega) << ',' << detail::csv_num(p.Q) << ','
          << detail::csv_num(p.a) << ',' << detail::csv_num(p.b) << ',' << detail::csv_num(p.c)
          << '\n';
    }
  }
  for (int id = 3; id <= 7; ++id) {
    const auto [lo, hi] = dst_branch_domain(id);
    const double pad = 0.02 * (hi - lo);
    for (int i = 0; i <= cfg.samples; ++i) {
      const double th = lo + pad + (hi - lo - 2 * pad) * i / cfg.samples;
      const auto p = dst_branch_point(id, th);
      if (p.omega < -8.0) continue;  // clip the divergent tails
      csv << id << ',' << detail::csv_num(th) << ',' << detail::csv_num(p.omega) << ','
          << detail::csv_num(p.Q) << ',' << detail::csv_num(p.a) << ',' << detail::csv_num(p.b)
          << ',' << detail::csv_num(p.c) << '\n';
    }
  }
  const fs::path out(cfg.out);
  detail::write_text(out, csv.str());
  std::vector<std::string> outputs{cfg.out};

  if (cfg.events) {
    json j = json::array();
    for (const auto& e : dst_branch_events())
      j.push_back({{"kind", e.kind},
                   {"branch_a", e.branch_a},
                   {"branch_b", e.branch_b},
                   {"omega", e.omega},
                   {"Q", e.Q},
                   {"theta", e.theta}});
    detail::write_text(cfg.events_out, j.dump(2) + "\n");
    outputs.push_back(cfg.events_out);
  }

  if (cfg.plot) {
    std::vector<DiagramCurve> curves;
    for (int id = 1; id <= 7; ++id) {
      DiagramCurve curve;
      curve.label = "branch " + std::to_string(id);
      if (id <= 2) {
        for (int i = 0; i <= cfg.samples; ++i) {
          const double omega = (id == 1 ? 0.0 : 1.0) - 4.0 * i / cfg.samples;
          const auto p = dst_branch_point(id, omega);
          curve.points.emplace_back(p.omega, p.Q);
        }
      } else {
        const auto [lo, hi] = dst_branch_domain(id);
        const double pad = 0.03 * (hi - lo);
        for (int i = 0; i <= cfg.samples; ++i) {
          const double th = lo + pad + (hi - lo - 2 * pad) * i / cfg.samples;
          const auto p = dst_branch_point(id, th);
          if (p.omega < -4.5 || p.Q > 30.0) continue;
          curve.points.emplace_back(p.omega, p.Q);
        }
      }
      curves.push_back(std::move(curve));
    }
    std::vector<DiagramMarker> marks;
    for (const auto& e : dst_branch_events())
      marks.push_back({e.kind == "fold" || e.kind == "saddle-node"
                           ? DiagramMarker::Kind::fold
                           : DiagramMarker::Kind::branch_point,
                       e.omega, e.Q});
    const fs::path svg_path = fs::path(cfg.out).parent_path() /
                              (fs::path(cfg.out).stem().string() + ".svg");
    detail::write_text(svg_path, render_diagram(curves, marks));
    outputs.push_back(svg_path.string());
  }

  json args{{"events", cfg.events}, {"samples", cfg.samples}, {"plot", cfg.plot},
            {"out", cfg.out},       {"events_out", cfg.events_out}};
  detail::write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), "bowtie",
                         args, outputs);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

struct EnumerateConfig {
  bool plot = false;
  double lambda = -1.0;
  double L = 2.0;
  std::string mode = "shoot";  // shoot | complete | hybrid
  double q_min = 1e-6;
  double q_max = 1.3;
  int grid = 2000;
  int n_max = 2;
  int m_max = 2;
  std::string window = "-1.4:-0.4";
  std::string out = "enumeration";
};

inline int run_enumerate(const EnumerateConfig& cfg) {
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  auto graph = std::make_shared<const MetricGraph>(build_dumbbell(cfg.L));
  DiscreteSystem sys(graph);

  json manifest_extra;
  std::vector<std::string> outputs;

  const auto plot_profile = [&](const GraphFunction& f, const std::string& stem) {
    if (!cfg.plot) return;
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> edges;
    for (int m = 0; m < f.edge_count(); ++m) {
      const auto& e = f.graph().edges[m];
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i < f.edge_values(m).size(); ++i)
        pts.emplace_back(e.x_min + e.length * i / (f.edge_values(m).size() - 1),
                         f.edge_values(m)(i));
      edges.emplace_back("edge " + std::to_string(m), std::move(pts));
    }
    detail::write_text(dir / (stem + ".svg"), render_profile(edges));
    outputs.push_back((dir / (stem + ".svg")).string());
  };

  if (cfg.mode == "shoot") {
    const auto scan = find_standing_waves(cfg.lambda, cfg.L, cfg.q_min, cfg.q_max, cfg.grid, &sys);
    json roots = json::array();
    for (std::size_t i = 0; i < scan.waves.size(); ++i) {
      const auto& w = scan.waves[i];
      char name[64];
      std::snprintf(name, sizeof name, "wave_%03zu.csv", i);
      write_solution_csv(w.solution, (dir / name).string());
      outputs.push_back((dir / name).string());
      std::snprintf(name, sizeof name, "wave_%03zu", i);
      plot_profile(w.solution, name);
      std::snprintf(name, sizeof name, "wave_%03zu.csv", i);
      roots.push_back({{"q", w.q}, {"Q", w.Q}, {"file", name}});
    }
    json gaps = json::array();
    for (const auto& [a, b] : scan.divergent_gaps) gaps.push_back({{"q_lo", a}, {"q_hi", b}});
    manifest_extra["roots"] = roots;
    manifest_extra["divergent_gaps"] = gaps;
  } else if (cfg.mode == "complete") {
    const auto sols = enumerate_complete(cfg.lambda, cfg.L, cfg.n_max, cfg.m_max, &sys);
    json triples = json::array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "triple_%03zu.csv", i);
      write_solution_csv(sols[i].solution, (dir / name).string());
      outputs.push_back((dir / name).string());
      std::snprintf(name, sizeof name, "triple_%03zu", i);
      plot_profile(sols[i].solution, name);
      std::snprintf(name, sizeof name, "triple_%03zu.csv", i);
      triples.push_back({{"triple", sols[i].triple.str()},
                         {"Q", sols[i].Q},
                         {"orbit_size", sols[i].orbit_size},
                         {"file", name}});
    }
    json sched = json::array();
    for (const auto& e : complete_bifurcation_schedule(cfg.L, cfg.n_max, cfg.m_max))
      sched.push_back(
          {{"lambda", e.lambda}, {"parent", e.parent.str()}, {"child", e.child.str()}});
    manifest_extra["triples"] = triples;
    manifest_extra["schedule"] = sched;
  } else if (cfg.mode == "hybrid") {
    const auto [lo, hi] = detail::parse_window(cfg.window);
    const auto res = hybrid_waves(lo, hi, cfg.L, cfg.n_max, cfg.q_min, cfg.q_max,
                                  std::max(50, cfg.grid / 5), &sys);
    json hybrids = json::array();
    for (std::size_t i = 0; i < res.hybrids.size(); ++i) {
      const auto& h = res.hybrids[i];
      char name[64];
      std::snprintf(name, sizeof name, "hybrid_%03zu.csv", i);
      std::ostringstream csv;
      csv << "lambda,q,tip_value,Q,fold\n";
      for (const auto& p : h.points)
        csv << detail::csv_num(p.lambda) << ',' << detail::csv_num(p.q) << ','
            << detail::csv_num(p.tip_value) << ',' << detail::csv_num(p.Q) << ','
            << (p.fold ? 1 : 0) << '\n';
      detail::write_text(dir / name, csv.str());
      outputs.push_back((dir / name).string());
      hybrids.push_back({{"loop_n", h.loop_n},
                         {"loop_kind", h.loop_kind == WaveKind::cn ? "cn" : "dn"},
                         {"points", h.points.size()},
                         {"fold_lambdas", h.fold_lambdas},
                         {"file", name}});
    }
    manifest_extra["hybrids"] = hybrids;
    manifest_extra["lollipop_branches"] = res.lollipop_branches.size();
  } else {
    throw CLI::ValidationError("--mode", "expected shoot, complete or hybrid");
  }

  json args{{"lambda", cfg.lambda}, {"L", cfg.L},       {"mode", cfg.mode},
            {"qmin", cfg.q_min},    {"qmax", cfg.q_max}, {"grid", cfg.grid},
            {"nmax", cfg.n_max},    {"mmax", cfg.m_max}, {"window", cfg.window},
            {"out", cfg.out},       {"plot", cfg.plot}};
  json m;
  m["tool"] = "qgraph";
  m["version"] = kVersion;
  m["subcommand"] = "enumerate";
  m["args"] = args;
  m["outputs"] = outputs;
  m["results"] = manifest_extra;
  detail::write_text(dir / "manifest.json", m.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

struct RenderConfig {
  std::vector<std::string> inputs;
  std::string out = "diagram.svg";
  std::string title;
};

inline int run_render(const RenderConfig& cfg) {
  if (cfg.inputs.empty()) throw CLI::ValidationError("--in", "at least one branch CSV required");
  std::vector<DiagramCurve> curves;
  std::vector<DiagramMarker> markers;
  for (const auto& file : cfg.inputs) {
    std::ifstream in(file);
    if (!in) throw CLI::ValidationError("--in", "cannot open " + file);
    std::string line;
    std::getline(in, line);  // header
    DiagramCurve curve;
    curve.label = fs::path(file).stem().string();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      const auto c3 = line.find(',', c2 + 1);
      const double lambda = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      const double Q = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
      const std::string tags = c3 == std::string::npos ? "" : line.substr(c3 + 1);
      curve.points.emplace_back(lambda, Q);
      if (tags.find("fold") != std::string::npos)
        markers.push_back({DiagramMarker::Kind::fold, lambda, Q});
      if (tags.find("branch_point") != std::string::npos)
        markers.push_back({DiagramMarker::Kind::branch_point, lambda, Q});
    }
    curves.push_back(std::move(curve));
  }
  DiagramStyle style;
  style.title = cfg.title;
  const fs::path out(cfg.out);
  detail::write_text(out, render_diagram(curves, markers, style));

  json args{{"in", cfg.inputs}, {"out", cfg.out}, {"title", cfg.title}};
  detail::write_manifest(out.has_parent_path() ? out.parent_path() : fs::path("."), "render",
                         args, {cfg.out});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline int run_from_manifest(const std::string& path);

inline int run(int argc, const char* const* argv) {
  CLI::App app{"standing waves and bifurcations of the cubic NLS on metric graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SpectrumConfig sc;
  auto* sp = app.add_subcommand("spectrum", "linear modes of a graph Laplacian");
  sp->add_option("--graph", sc.graph, "dumbbell | lollipop | interval | custom");
  sp->add_option("--graph-json", sc.graph_json, "custom graph topology (JSON)");
  sp->add_option("--L", sc.L, "half-length of the segment (or interval length)");
  sp->add_option("--kmax", sc.k_max, "largest wavenumber");
  sp->add_option("--grid-h", sc.h, "FD grid spacing for the oracle path");
  sp->add_option("--out", sc.out, "output CSV");

  ContinueConfig cc;
  auto* co = app.add_subcommand("continue", "pseudo-arclength continuation of standing waves");
  co->add_option("--graph", cc.graph, "graph family");
  co->add_option("--L", cc.L, "half-length of the segment");
  co->add_option("--from", cc.from, "constant | zero | file:<solution.csv>");
  co->add_option("--lambda-start", cc.lambda_start, "starting frequency");
  co->add_option("--lambda-window", cc.window, "lo:hi frequency window");
  co->add_option("--ds", cc.ds, "initial arclength step");
  co->add_option("--grid-h", cc.h, "FD grid spacing");
  co->add_option("--direction", cc.direction, "initial direction of d(lambda)/ds (+1/-1)");
  co->add_flag("--iterative", cc.iterative, "iterative linear solver instead of sparse LU");
  co->add_option("--out", cc.out, "branch CSV");
  co->add_option("--dump-solutions", cc.dump_solutions, "directory for per-point solution CSVs");
  co->add_flag("--plot", cc.plot, "also render the (lambda, Q) diagram as SVG");

  ClassifyConfig cl;
  auto* cf = app.add_subcommand("classify", "normal-form classification at a branch point");
  cf->add_option("--graph", cl.graph, "graph family");
  cf->add_option("--L", cl.L, "half-length of the segment");
  cf->add_option("--grid-h", cl.h, "FD grid spacing");
  cf->add_option("--branch", cl.branch_csv, "branch CSV from `continue`")->required();
  cf->add_option("--index", cl.index, "point index within the branch")->required();
  cf->add_option("--solutions", cl.solutions, "directory with per-point solution dumps");
  cf->add_flag("--assume-constant", cl.assume_constant,
               "reconstruct the constant profile from the point's frequency");
  cf->add_option("--out", cl.out, "output JSON");

  BowtieConfig bc;
  auto* bw = app.add_subcommand("bowtie", "branches and events of the bowtie DST system");
  bw->add_flag("--events", bc.events, "also locate the bifurcation events");
  bw->add_flag("--plot", bc.plot, "render the full branch diagram as SVG");
  bw->add_option("--samples", bc.samples, "points per branch");
  bw->add_option("--out", bc.out, "branch CSV");
  bw->add_option("--events-out", bc.events_out, "events JSON");

  EnumerateConfig ec;
  auto* en = app.add_subcommand("enumerate", "standing-wave families on the dumbbell");
  en->add_option("--lambda", ec.lambda, "frequency");
  en->add_option("--L", ec.L, "half-length of the segment");
  en->add_option("--mode", ec.mode, "shoot | complete | hybrid");
  en->add_option("--qmin", ec.q_min, "lower end of the shooting window");
  en->add_option("--qmax", ec.q_max, "upper end of the shooting window");
  en->add_option("--grid", ec.grid, "shooting grid resolution");
  en->add_option("--nmax", ec.n_max, "largest loop period count");
  en->add_option("--mmax", ec.m_max, "largest center half-period count");
  en->add_option("--window", ec.window, "lo:hi frequency window (hybrid mode)");
  en->add_option("--out", ec.out, "output directory");
  en->add_flag("--plot", ec.plot, "also render per-solution profiles as SVG");

  RenderConfig rc;
  auto* re = app.add_subcommand("render", "render branch CSVs as a deterministic SVG diagram");
  re->add_option("--in", rc.inputs, "branch CSV files")->delimiter(',');
  re->add_option("--out", rc.out, "output SVG");
  re->add_option("--title", rc.title, "diagram title");

  std::string manifest_path;
  auto* rr = app.add_subcommand("rerun", "re-run a recorded manifest");
  rr->add_option("manifest", manifest_path, "manifest.json produced by a previous run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sp->parsed()) return run_spectrum(sc);
    if (co->parsed()) return run_continue(cc);
    if (cf->parsed()) return run_classify(cl);
    if (bw->parsed()) return run_bowtie(bc);
    if (en->parsed()) return run_enumerate(ec);
    if (re->parsed()) return run_render(rc);
    if (rr->parsed()) return run_from_manifest(manifest_path);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    std::ofstream diag("qgraph_diagnostic.txt");
    diag << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

inline int run_from_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("rerun", "cannot open " + path);
  json m;
  in >> m;
  const std::string sub = m.at("subcommand").get<std::string>();
  const json& a = m.at("args");

  std::vector<std::string> argv_s{"qgraph", sub};
  const auto add = [&](const std::string& flag, const json& v) {
    if (v.is_boolean()) {
      if (v.get<bool>()) argv_s.push_back("--" + flag);
      return;
    }
    if (v.is_string() && v.get<std::string>().empty()) return;
    argv_s.push_back("--" + flag);
    if (v.is_string())
      argv_s.push_back(v.get<std::string>());
    else
      argv_s.push_back(v.dump());
  };
  for (const auto& [key, value] : a.items()) {
    if (sub == "render" && key == "in") {
      std::string joined;
      for (const auto& f : value) joined += f.get<std::string>() + ",";
      if (!joined.empty()) joined.pop_back();
      argv_s.push_back("--in");
      argv_s.push_back(joined);
      continue;
    }
    std::string flag = key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    add(flag, value);
  }
  std::vector<const char*> argv;
  for (const auto& s : argv_s) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qgraph::cli
