#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "qgraph/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QGRAPH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qgraph_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("render_diagram is deterministic", "[cli]") {
  std::vector<qgraph::DiagramCurve> curves(1);
  curves[0].label = "constant";
  for (int i = 0; i <= 40; ++i) {
    const double lam = -3.0 + 3.0 * i / 40;
    curves[0].points.emplace_back(lam, -(4 * 3.14159265 + 4.0) * lam / 2);
  }
  std::vector<qgraph::DiagramMarker> marks{{qgraph::DiagramMarker::Kind::fold, -1.0, 8.0}};
  const auto a = qgraph::render_diagram(curves, marks);
  const auto b = qgraph::render_diagram(curves, marks);
  CHECK(a == b);  // byte-identical
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("<circle") != std::string::npos);  // fold marker
}

TEST_CASE("spectrum subcommand writes the loop modes", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "spec.csv";
  REQUIRE(run_cli("spectrum --graph dumbbell --L 2 --kmax 3 --out " + out.string()) == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind("k,lambda,family,multiplicity\n", 0) == 0);  // header row
  CHECK(csv.find("\n1,1,loop,2\n") != std::string::npos);
  CHECK(csv.find("\n2,4,loop,2\n") != std::string::npos);
  CHECK(fs::exists(tmp.path / "manifest.json"));
}

TEST_CASE("spectrum rerun reproduces artifacts bit-identically", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "spec.csv";
  REQUIRE(run_cli("spectrum --graph dumbbell --L 2 --kmax 2.2 --out " + out.string()) == 0);
  const auto first = slurp(out);
  fs::remove(out);
  REQUIRE(run_cli("rerun " + (tmp.path / "manifest.json").string()) == 0);
  CHECK(slurp(out) == first);
}

TEST_CASE("bowtie subcommand emits branches and events", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "bowtie.csv";
  const auto ev = tmp.path / "events.json";
  REQUIRE(run_cli("bowtie --events --samples 60 --out " + out.string() + " --events-out " +
                  ev.string()) == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind("branch_id,theta,omega,Q,a,b,c\n", 0) == 0);

  const auto events = json::parse(slurp(ev));
  bool pf = false, tc = false;
  for (const auto& e : events) {
    if (e["kind"] == "pitchfork" && std::abs(e["omega"].get<double>() + 0.5) < 1e-9) pf = true;
    if (e["kind"] == "transcritical" && std::abs(e["omega"].get<double>() + 2.5) < 1e-9)
      tc = true;
  }
  CHECK(pf);
  CHECK(tc);
}

TEST_CASE("continue + classify + render pipeline", "[cli]") {
  TempDir tmp;
  const auto branch = tmp.path / "branch.csv";
  REQUIRE(run_cli("continue --graph dumbbell --L 2 --from constant --lambda-start -0.005 "
                  "--lambda-window \" -0.1:0\" --ds 0.02 --out " +
                  branch.string()) == 0);
  const auto csv = slurp(branch);
  CHECK(csv.rfind("s,lambda,Q,tags\n", 0) == 0);
  CHECK(csv.find("start") != std::string::npos);
  CHECK(csv.find("branch_point") != std::string::npos);

  // find the tagged row and classify there
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int idx = -1, row = 0;
  while (std::getline(lines, line)) {
    if (line.find("branch_point") != std::string::npos) {
      idx = row;
      break;
    }
    ++row;
  }
  REQUIRE(idx >= 0);

  const auto cls = tmp.path / "cls.json";
  REQUIRE(run_cli("classify --L 2 --branch " + branch.string() + " --index " +
                  std::to_string(idx) + " --assume-constant --out " + cls.string()) == 0);
  const auto j = json::parse(slurp(cls));
  CHECK(j["kind"] == "pitchfork");  // first crossing of the constant branch
  CHECK(j["thetas"].size() == 5);

  const auto svg = tmp.path / "diagram.svg";
  REQUIRE(run_cli("render --in " + branch.string() + " --out " + svg.string()) == 0);
  const auto s1 = slurp(svg);
  CHECK(s1.find("<svg") != std::string::npos);
  CHECK(s1.find("<rect x=") != std::string::npos);  // branch-point marker
  REQUIRE(run_cli("render --in " + branch.string() + " --out " + svg.string()) == 0);
  CHECK(slurp(svg) == s1);  // golden determinism through the CLI as well
}

TEST_CASE("invalid configurations exit with code 2", "[cli]") {
  CHECK(run_cli("unknown-subcommand") == 2);
  CHECK(run_cli("continue --lambda-window \" 3:1\" --out /tmp/x.csv") == 2);   // empty window
  CHECK(run_cli("enumerate --mode nonsense --out /tmp/xdir") == 2);
  CHECK(run_cli("classify --branch /nonexistent.csv --index 0") == 2);
}

TEST_CASE("bowtie diagram reproduces the branch/event topology", "[cli]") {
  TempDir tmp;
  const auto out = tmp.path / "bowtie.csv";
  REQUIRE(run_cli("bowtie --plot --samples 80 --out " + out.string()) == 0);
  const auto svg = slurp(tmp.path / "bowtie.svg");

  // seven branches, five events: two fold-type markers (fold + saddle-node)
  // and three crossing-type markers (pitchfork, transcritical,
  // symmetry-breaking)
  std::size_t polylines = 0, circles = 0, squares = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) { ++polylines; pos += 9; }
  pos = 0;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) { ++circles; pos += 7; }
  pos = 0;
  while ((pos = svg.find("<rect x=\"", pos)) != std::string::npos) { ++squares; pos += 8; }
  CHECK(polylines == 7);
  CHECK(circles == 2);
  // legend swatches are also rects; markers add exactly three more
  CHECK(squares == 7 + 3);
}

TEST_CASE("enumerate subcommand writes a manifest with results", "[cli]") {
  TempDir tmp;
  const auto dir = tmp.path / "enum";
  REQUIRE(run_cli("enumerate --mode complete --lambda 0.5 --L 2 --nmax 1 --mmax 1 --out " +
                  dir.string()) == 0);
  const auto m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["subcommand"] == "enumerate");
  REQUIRE(m["results"].contains("triples"));
  bool found_ring_pair = false;
  for (const auto& t : m["results"]["triples"])
    if (t["triple"] == "(1,0,1)") found_ring_pair = true;
  CHECK(found_ring_pair);
  CHECK(m["results"].contains("schedule"));
}
