#include <catch2/catch.hpp>

#include <cmath>
#include <memory>
#include <numbers>

#include "qgraph/continuation.hpp"

using namespace qgraph;
using std::numbers::pi;

namespace {

DiscreteSystem dumbbell_system(double L = 2.0, double h = kDefaultGridH) {
  return DiscreteSystem(std::make_shared<const MetricGraph>(build_dumbbell(L)), h);
}

Eigen::VectorXd constant_vec(const DiscreteSystem& sys, double lambda) {
  return Eigen::VectorXd::Constant(sys.size(), std::sqrt(-lambda / 2.0));
}

}  // namespace

TEST_CASE("newton on exact seeds", "[continuation]") {
  const auto sys = dumbbell_system();

  // exact constant root converges immediately
  const double lambda = -1.0;
  const auto u = newton_solve(sys, constant_vec(sys, lambda), lambda);
  CHECK((u - constant_vec(sys, lambda)).cwiseAbs().maxCoeff() < 1e-10);

  // zero stays zero
  const auto z = newton_solve(sys, Eigen::VectorXd::Zero(sys.size()), 0.7);
  CHECK(z.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("newton reports non-convergence", "[continuation]") {
  const auto sys = dumbbell_system(2.0, 0.1);
  NewtonOptions opt;
  opt.max_iter = 3;
  Eigen::VectorXd far = Eigen::VectorXd::Constant(sys.size(), 40.0);
  CHECK_THROWS_AS(newton_solve(sys, far, -1.0, opt), NewtonFailure);
}

TEST_CASE("constant branch carries Q = (4 pi + 2L)(-Lambda/2)", "[continuation]") {
  const double L = 2.0;
  const auto sys = dumbbell_system(L, 0.07);
  ContinuationOptions opt;
  opt.ds = 0.05;
  opt.ds_max = 0.1;
  const auto branch = continue_branch(sys, constant_vec(sys, -0.01), -0.01, -1, -3.0, 0.0, opt,
                                      "constant");
  REQUIRE(branch.points.size() > 10);
  CHECK(branch.points.back().lambda < -2.9);
  for (const auto& p : branch.points) {
    CHECK(p.Q == Approx((4 * pi + 2 * L) * (-p.lambda / 2)).margin(1e-8));
    // stored points re-verify the residual bound
    CHECK(sys.residual(p.u, p.lambda).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("constant branch: both bifurcations are detected and classified by location",
          "[continuation]") {
  const double L = 2.0;
  const auto sys = dumbbell_system(L, 0.05);
  ContinuationOptions opt;
  opt.ds = 0.02;
  opt.ds_max = 0.04;
  const auto branch =
      continue_branch(sys, constant_vec(sys, -0.005), -0.005, -1, -0.35, 0.0, opt, "constant");
  const auto events = detect_events(sys, branch);

  // expected: branch points at -Omega1^2/2 and -omega1^2/2
  const double odd_loc = -0.5 * 0.2420137578064 * 0.2420137578064;
  const double even_loc = -0.5 * 0.6555146008015 * 0.6555146008015;

  std::vector<double> bp_lambdas;
  for (const auto& e : events)
    if (e.kind == EventKind::branch_point) bp_lambdas.push_back(e.lambda);
  REQUIRE(bp_lambdas.size() >= 2);

  const double h = sys.max_h();
  double best_odd = 1e300, best_even = 1e300;
  for (double l : bp_lambdas) {
    best_odd = std::min(best_odd, std::abs(l - odd_loc));
    best_even = std::min(best_even, std::abs(l - even_loc));
  }
  CHECK(best_odd < 5 * h * h);
  CHECK(best_even < 5 * h * h);
}

TEST_CASE("switching at the pitchfork yields an R2-conjugate pair", "[continuation]") {
  const double L = 2.0;
  const auto sys = dumbbell_system(L, 0.05);
  ContinuationOptions opt;
  opt.ds = 0.02;
  opt.ds_max = 0.04;
  const auto branch =
      continue_branch(sys, constant_vec(sys, -0.005), -0.005, -1, -0.1, 0.0, opt, "constant");
  const auto events = detect_events(sys, branch);
  REQUIRE(!events.empty());
  const auto& bp = events.front();
  REQUIRE(bp.kind == EventKind::branch_point);

  const auto seeds = switch_branch(sys, bp.u, bp.lambda);
  REQUIRE(seeds.size() == 2);

  // the two seeds are R2-images of each other and carry equal power
  const auto f0 = sys.to_function(seeds[0].u);
  const auto f1 = sys.to_function(seeds[1].u);
  const auto r2f0 = apply_symmetry(SymmetryOp::r2(), f0);
  double mismatch = 0.0;
  for (int m = 0; m < 3; ++m)
    mismatch = std::max(mismatch,
                        (r2f0.edge_values(m) - f1.edge_values(m)).cwiseAbs().maxCoeff());
  CHECK(mismatch < 1e-6);
  CHECK(sys.power(seeds[0].u) == Approx(sys.power(seeds[1].u)).margin(1e-6));
  CHECK(seeds[0].lambda == Approx(seeds[1].lambda).margin(1e-8));
}

TEST_CASE("switching at a regular point is refused", "[continuation]") {
  const auto sys = dumbbell_system(2.0, 0.08);
  const double lambda = -0.1;  // no bifurcation of the constant branch here
  CHECK_THROWS_AS(switch_branch(sys, constant_vec(sys, lambda), lambda), std::invalid_argument);
}

TEST_CASE("continuing the R2 image reproduces the image branch", "[continuation]") {
  const double L = 2.0;
  const auto sys = dumbbell_system(L, 0.07);

  // an asymmetric seed: switch at the pitchfork and walk a few steps
  ContinuationOptions opt;
  opt.ds = 0.02;
  opt.ds_max = 0.03;
  const auto branch =
      continue_branch(sys, constant_vec(sys, -0.005), -0.005, -1, -0.1, 0.0, opt, "constant");
  const auto events = detect_events(sys, branch);
  REQUIRE(!events.empty());
  const auto seeds = switch_branch(sys, events.front().u, events.front().lambda);
  REQUIRE(seeds.size() == 2);

  ContinuationOptions walk;
  walk.ds = 0.02;
  walk.ds_max = 0.02;
  walk.max_steps = 8;
  const auto b1 =
      continue_branch(sys, seeds[0].u, seeds[0].lambda, -1, -3.0, 0.0, walk, "asym");
  const auto r2_seed = sys.to_vector(apply_symmetry(SymmetryOp::r2(), sys.to_function(seeds[0].u)));
  const auto b2 = continue_branch(sys, r2_seed, seeds[0].lambda, -1, -3.0, 0.0, walk, "asym-R2");

  REQUIRE(b1.points.size() == b2.points.size());
  for (std::size_t i = 0; i < b1.points.size(); ++i) {
    const auto img = apply_symmetry(SymmetryOp::r2(), sys.to_function(b1.points[i].u));
    const Eigen::VectorXd img_v = sys.to_vector(img);
    CHECK((img_v - b2.points[i].u).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(b1.points[i].lambda == Approx(b2.points[i].lambda).margin(1e-10));
  }
}

TEST_CASE("stored branch points re-verify their residual after a round trip", "[continuation]") {
  const double L = 2.0;
  const auto sys = dumbbell_system(L, 0.07);
  ContinuationOptions opt;
  opt.ds = 0.05;
  opt.max_steps = 12;
  const auto branch =
      continue_branch(sys, constant_vec(sys, -0.4), -0.4, -1, -2.0, 0.0, opt, "constant");
  for (std::size_t i = 0; i < branch.points.size(); i += 4) {
    const auto& p = branch.points[i];
    const std::string path = "roundtrip_point.csv";
    write_solution_csv(sys.to_function(p.u), path);
    const auto loaded = read_solution_csv(sys.graph_ptr(), path);
    CHECK(sys.residual(sys.to_vector(loaded), p.lambda).cwiseAbs().maxCoeff() < 1e-10);
    std::remove(path.c_str());
  }
}

TEST_CASE("located bifurcation frequencies converge at second order", "[continuation]") {
  // the even crossing of the constant branch against its secular location
  const double L = 2.0;
  const double gamma = 0.6555146008015;
  const double exact = -0.5 * gamma * gamma;

  const auto located = [&](double h) {
    const auto sys = dumbbell_system(L, h);
    ContinuationOptions opt;
    opt.ds = 0.02;
    opt.ds_max = 0.04;
    const auto branch =
        continue_branch(sys, constant_vec(sys, -0.15), -0.15, -1, -0.3, 0.0, opt, "constant");
    const auto events = detect_events(sys, branch);
    for (const auto& e : events)
      if (e.kind == EventKind::branch_point && std::abs(e.lambda - exact) < 0.02)
        return e.lambda;
    FAIL("crossing not located");
    return 0.0;
  };

  const double e1 = std::abs(located(0.05) - exact);
  const double e2 = std::abs(located(0.025) - exact);
  const double ratio = e1 / e2;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.5);
}

TEST_CASE("transcritical switch lands on two crossing half-branches", "[continuation]") {
  const double L = 2.0;
  const auto sys = dumbbell_system(L, 0.05);
  ContinuationOptions opt;
  opt.ds = 0.02;
  opt.ds_max = 0.04;
  const auto branch =
      continue_branch(sys, constant_vec(sys, -0.1), -0.1, -1, -0.35, -0.05, opt, "constant");
  const auto events = detect_events(sys, branch);
  REQUIRE(!events.empty());
  // the even crossing sits near -omega1^2/2 ~ -0.2148
  const BranchEvent* even_bp = nullptr;
  for (const auto& e : events)
    if (e.kind == EventKind::branch_point && std::abs(e.lambda + 0.2148) < 0.02) even_bp = &e;
  REQUIRE(even_bp != nullptr);

  const auto seeds = switch_branch(sys, even_bp->u, even_bp->lambda);
  REQUIRE(seeds.size() == 2);

  // the two seeds sit on opposite sides in Lambda at first order (the
  // crossing branch is transversal in Lambda), and tangency in (Lambda, Q)
  // keeps their Q near the constant branch's value at their own Lambda
  const double dl0 = seeds[0].lambda - even_bp->lambda;
  const double dl1 = seeds[1].lambda - even_bp->lambda;
  CHECK(dl0 * dl1 < 0.0);
  CHECK(std::abs(dl0) > 1e-6);
  for (const auto& s : seeds) {
    const double q_const = (4 * pi + 2 * L) * (-s.lambda / 2);
    const double dq = std::abs(sys.power(s.u) - q_const);
    CHECK(dq < 0.1 * std::abs(s.lambda - even_bp->lambda) * (4 * pi + 2 * L) / 2 + 1e-4);
  }
}
