#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qgraph/bowtie.hpp"

using namespace qgraph;
using std::numbers::pi;

TEST_CASE("hamiltonian basics", "[bowtie]") {
  CHECK(dst_hamiltonian(DstState::Zero()) == 0.0);

  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto rand_state = [&] {
    DstState u;
    for (int i = 0; i < 5; ++i) u(i) = Complex(g(rng), g(rng));
    return u;
  };

  // gauge invariance H(e^{i phi} u) = H(u)
  for (int t = 0; t < 50; ++t) {
    const auto u = rand_state();
    const double phi = g(rng);
    const DstState v = std::exp(Complex(0, phi)) * u;
    CHECK(dst_hamiltonian(v) == Approx(dst_hamiltonian(u)).margin(1e-12));
  }
}

TEST_CASE("vertex and diagonal hamiltonians agree on the invariant subspaces", "[bowtie]") {
  const auto V = bowtie_eigenvectors();
  std::mt19937 rng(11);
  std::normal_distribution<double> g(0.0, 0.8);

  // the reduced two- and three-mode subspaces (z4 = z5 = 0)
  for (int t = 0; t < 200; ++t) {
    DstState z = DstState::Zero();
    z(0) = Complex(g(rng), g(rng));
    z(1) = Complex(g(rng), g(rng));
    if (t % 2) z(2) = Complex(g(rng), g(rng));
    DstState u = DstState::Zero();
    for (int j = 0; j < 5; ++j) u += z(j) * V.col(j).cast<Complex>();
    CHECK(dst_hamiltonian(u) == Approx(dst_hamiltonian_diag(z)).margin(1e-12));
  }
}

TEST_CASE("eigenvector basis diagonalizes the coupling", "[bowtie]") {
  const auto L = bowtie_coupling();
  const auto V = bowtie_eigenvectors();
  const Eigen::Matrix<double, 5, 5> D = V.transpose() * L * V;
  for (int i = 0; i < 5; ++i) {
    CHECK(D(i, i) == Approx(kBowtieEigenvalues[i]).margin(1e-12));
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(std::abs(D(i, j)) < 1e-12);
  }
  CHECK((V.transpose() * V - Eigen::Matrix<double, 5, 5>::Identity()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("the z4/z5 subspace is invariant under the flow", "[bowtie]") {
  const auto V = bowtie_eigenvectors();
  DstState u = DstState::Zero();
  u += Complex(0.3, 0.1) * V.col(3).cast<Complex>();
  u += Complex(-0.2, 0.4) * V.col(4).cast<Complex>();
  const DstState du = dst_velocity(u);
  // velocity has no component along v1, v2, v3
  for (int j : {0, 1, 2}) {
    Complex comp = 0.0;
    for (int i = 0; i < 5; ++i) comp += V(i, j) * du(i);
    CHECK(std::abs(comp) < 1e-14);
  }
}

TEST_CASE("reduced stability thresholds", "[bowtie]") {
  const auto e1 = reduced_stability_eigs(2.5);
  CHECK(std::abs(e1.pair1[0]) == Approx(0.0).margin(1e-12));
  const auto e2 = reduced_stability_eigs(12.5);
  CHECK(std::abs(e2.pair2[0]) == Approx(0.0).margin(1e-12));

  const auto e3 = reduced_stability_eigs(1.0);
  CHECK(e3.pair1[0].real() == Approx(0.0).margin(1e-14));
  CHECK(e3.pair2[0].real() == Approx(0.0).margin(1e-14));
  CHECK(e3.pair1[0].imag() != 0.0);
  CHECK(e3.pair2[0].imag() != 0.0);
}

TEST_CASE("poisson field fixed points and invariants", "[bowtie]") {
  // Y = 0 kills the X and Z components
  for (double R : {1.0, 6.0, 14.0}) {
    const auto f = poisson_field({0.3 * R, 0.0, std::sqrt(R * R - 0.09 * R * R), R});
    CHECK(f[0] == 0.0);
    CHECK(f[2] == 0.0);
  }

  // (X, Z) = (0, R) is a full fixed point for every R
  for (double R : {0.5, 2.0, 10.0, 16.0}) {
    const auto f = poisson_field({0.0, 0.0, R, R});
    CHECK(f[0] == 0.0);
    CHECK(std::abs(f[1]) < 1e-12 * std::max(1.0, 224.0 * R * R));
    CHECK(f[2] == 0.0);
  }

  // Casimir derivative vanishes along the field
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double R = 1.0 + 10.0 * std::abs(u(rng));
    double X = u(rng), Y = u(rng), Z = u(rng);
    const double nrm = std::sqrt(X * X + Y * Y + Z * Z);
    X *= R / nrm;
    Y *= R / nrm;
    Z *= R / nrm;
    const auto f = poisson_field({X, Y, Z, R});
    CHECK(std::abs(X * f[0] + Y * f[1] + Z * f[2]) < 1e-10 * R * R);
  }
}

TEST_CASE("poisson flow conserves the Casimir and the energy", "[bowtie]") {
  const double R = 5.0;
  SphereState s{0.6 * R, 0.48 * R, std::sqrt(1 - 0.36 - 0.2304) * R, R};
  s.require_on_sphere();
  const double H0 = sphere_hamiltonian(s);
  const double C0 = s.X * s.X + s.Y * s.Y + s.Z * s.Z;
  const double dt = 1e-3;
  for (int step = 0; step < 10000; ++step) s = poisson_rk4_step(s, dt);
  CHECK(std::abs(s.X * s.X + s.Y * s.Y + s.Z * s.Z - C0) < 1e-8);
  CHECK(std::abs(sphere_hamiltonian(s) - H0) < 1e-8);
}

TEST_CASE("circle/hyperbola fixed points", "[bowtie]") {
  // (0, R) is always an intersection
  for (double R : {1.0, 5.0, 7.0, 10.0, 16.0}) {
    const auto pts = circle_hyperbola_fixed_points(R);
    bool has_top = false;
    for (const auto& [X, Z] : pts)
      if (std::abs(X) < 1e-9 * R && std::abs(Z - R) < 1e-9 * R) has_top = true;
    CHECK(has_top);
  }

  // counts: 2 below the threshold, 4 above
  CHECK(circle_hyperbola_intersection_count(5.0) == 2);
  CHECK(circle_hyperbola_intersection_count(7.0) == 2);
  CHECK(circle_hyperbola_intersection_count(8.0) == 4);
  CHECK(circle_hyperbola_intersection_count(10.0) == 4);

  // at R = 10 a fixed point sits just left of (0, R); at R = 16 it has moved
  // to the right
  const auto near_top = [](double R) {
    double best_x = 0, best_d = 1e300;
    for (const auto& [X, Z] : circle_hyperbola_fixed_points(R)) {
      if (std::abs(X) < 1e-8 && std::abs(Z - R) < 1e-8) continue;  // skip (0,R) itself
      const double d = std::hypot(X, Z - R);
      if (d < best_d) {
        best_d = d;
        best_x = X;
      }
    }
    return best_x;
  };
  CHECK(near_top(10.0) < 0.0);
  CHECK(near_top(16.0) > 0.0);

  // threshold radius: detected via bisection on the count, compared with the
  // closed form
  double lo = 7.0, hi = 8.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (circle_hyperbola_intersection_count(mid) >= 4)
      hi = mid;
    else
      lo = mid;
  }
  CHECK(0.5 * (lo + hi) == Approx(circle_hyperbola_threshold()).margin(1e-8));
  CHECK(circle_hyperbola_threshold() == Approx(7.566915017862932).epsilon(1e-12));
}

TEST_CASE("branch points satisfy the reduced equations", "[bowtie]") {
  // branches 1 and 2 parameterized by Omega
  for (double w : {-0.1, -1.0, -3.0, -7.0}) {
    const auto p = dst_branch_point(1, w);
    CHECK(p.Q == Approx(-5.0 * w).epsilon(1e-12));  // Omega = -Q/5
    CHECK(dst_reduced_residual(p.a, p.b, p.c, p.omega).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (double w : {0.5, -1.0, -4.0}) {
    const auto p = dst_branch_point(2, w);
    CHECK(p.omega == Approx(1.0 - p.Q / 4.0).epsilon(1e-12));
    CHECK(p.b == 0.0);
    CHECK(p.c == Approx(-p.a));
  }

  // residual check on grids over all parameterized branches
  for (int id : {3, 4, 5, 6, 7}) {
    const auto [lo, hi] = dst_branch_domain(id);
    for (int i = 1; i < 40; ++i) {
      const double th = lo + (hi - lo) * i / 40.0;
      if (th <= lo + 0.02 || th >= hi - 0.02) continue;  // skip the divergent ends
      const auto p = dst_branch_point(id, th);
      const double scale = std::max({1.0, std::abs(p.a), std::abs(p.b), std::abs(p.c)});
      CHECK(dst_reduced_residual(p.a, p.b, p.c, p.omega).cwiseAbs().maxCoeff() <
            1e-10 * scale * scale * scale);
    }
  }

  CHECK_THROWS_AS(dst_branch_point(4, 0.1), std::invalid_argument);   // outside the interval
  CHECK_THROWS_AS(dst_branch_point(1, 0.5), std::invalid_argument);   // Omega must be <= 0
  CHECK_THROWS_AS(dst_branch_point(9, 0.5), std::invalid_argument);
}

TEST_CASE("branch special points", "[bowtie]") {
  // branch 4 at theta = pi/2: a = b = sqrt(5/2), the transcritical contact
  const auto p4 = dst_branch_point(4, pi / 2);
  CHECK(p4.a == Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(p4.b == Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(p4.omega == Approx(-2.5).epsilon(1e-12));

  // branch 6 at theta = pi/2: (1,1,1)/sqrt(2) on the constant family
  const auto p6 = dst_branch_point(6, pi / 2);
  CHECK(p6.a == Approx(1 / std::numbers::sqrt2).epsilon(1e-9));
  CHECK(p6.b == Approx(1 / std::numbers::sqrt2).epsilon(1e-9));
  CHECK(p6.c == Approx(1 / std::numbers::sqrt2).epsilon(1e-9));
  CHECK(p6.omega == Approx(-0.5).epsilon(1e-9));

  // branch 3 limit: (Omega, Q) -> (5, 0)
  const auto [lo3, hi3] = dst_branch_domain(3);
  const auto p3 = dst_branch_point(3, hi3 - 1e-7);
  CHECK(p3.omega == Approx(5.0).margin(1e-4));
  CHECK(p3.Q == Approx(0.0).margin(1e-3));

  // branch 5 touches branch 4 at theta = pi/2 (the point (1, 2, 1))
  const auto p5 = dst_branch_point(5, pi / 2);
  CHECK(p5.a == Approx(1.0).epsilon(1e-12));
  CHECK(p5.b == Approx(2.0).epsilon(1e-12));
  CHECK(p5.c == Approx(1.0).epsilon(1e-12));
  CHECK(p5.omega == Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("branch 6 concentrates as Omega -> -inf", "[bowtie]") {
  const auto [lo, hi] = dst_branch_domain(6);
  // toward the left end the state concentrates on c, toward the right on a;
  // the concentration ratios decay monotonically along the approach
  double prev_lo = 1e300, prev_hi = 1e300;
  for (double off : {1e-2, 1e-3, 1e-4}) {
    const auto pl = dst_branch_point(6, lo + off);
    const double rl = std::max(std::abs(pl.b), std::abs(pl.a)) / std::abs(pl.c);
    CHECK(rl < prev_lo);
    prev_lo = rl;
    const auto ph = dst_branch_point(6, hi - off);
    const double rh = std::max(std::abs(ph.b), std::abs(ph.c)) / std::abs(ph.a);
    CHECK(rh < prev_hi);
    prev_hi = rh;
  }
  CHECK(prev_lo < 2e-2);
  CHECK(prev_hi < 2e-2);
}

TEST_CASE("discarded cubic roots are physically irrelevant", "[bowtie]") {
  for (int id : {6, 7}) {
    const auto [lo, hi] = dst_branch_domain(id);
    for (int i = 1; i < 1000; ++i) {
      const double th = lo + (hi - lo) * i / 1000.0;
      if (th <= lo + 1e-4 || th >= hi - 1e-4) continue;
      int relevant = 0;
      for (const auto& z : detail::cubic_family_roots(th)) {
        const bool real = std::abs(z.imag()) < 1e-8 * std::max(1.0, std::abs(z));
        if (real && z.real() <= 1.0 + 1e-10) ++relevant;
      }
      CHECK(relevant == 1);
    }
  }
}

TEST_CASE("branch events", "[bowtie]") {
  const auto events = dst_branch_events();
  REQUIRE(events.size() == 5);

  const auto find = [&](const std::string& kind) -> const DstEvent& {
    for (const auto& e : events)
      if (e.kind == kind) return e;
    throw std::runtime_error("missing event " + kind);
  };

  const auto& pf = find("pitchfork");
  CHECK(pf.omega == Approx(-0.5).margin(1e-9));
  CHECK(pf.Q == Approx(2.5).margin(1e-9));

  const auto& tc = find("transcritical");
  CHECK(tc.omega == Approx(-2.5).margin(1e-9));
  CHECK(tc.Q == Approx(12.5).margin(1e-9));

  const auto& fold = find("fold");
  CHECK(fold.omega == Approx(-1.9415493209).margin(1e-6));
  CHECK(fold.omega == Approx(-1.94).margin(0.01));

  const auto& sb = find("symmetry-breaking");
  CHECK(sb.omega == Approx(-2.0).margin(1e-9));
  CHECK(sb.theta == Approx(pi / 2).margin(1e-9));

  const auto& sn = find("saddle-node");
  CHECK(sn.omega == Approx(-2.6999412217).margin(1e-6));
  CHECK(sn.omega == Approx(-2.7).margin(0.05));
}
