#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "qgraph/spectrum.hpp"

using namespace qgraph;
using std::numbers::pi;

TEST_CASE("secular factors basics", "[spectrum]") {
  // sin^2(k pi) vanishes at every integer k, independent of L
  CHECK(secular_factors(1.0, 2.0).loop == Approx(0.0).margin(1e-25));
  CHECK(secular_factors(2.0, 0.7).loop == Approx(0.0).margin(1e-24));
  CHECK(secular_factors(1.5, 2.0).loop > 0.0);
}

TEST_CASE("find_modes on the dumbbell L=2", "[spectrum]") {
  const auto modes = find_modes(2.0, 3.0);

  REQUIRE(!modes.empty());
  CHECK(modes.front().family == ModeFamily::constant);
  CHECK(modes.front().k == 0.0);

  // every root makes its factor small
  for (const auto& m : modes) {
    if (m.family == ModeFamily::constant) continue;
    const auto f = secular_factors(m.k, 2.0);
    const double v = m.family == ModeFamily::even  ? f.even
                     : m.family == ModeFamily::odd ? f.odd
                                                   : f.loop;
    CHECK(std::abs(v) < 1e-10);
  }

  // loop modes at k = 1, 2 with multiplicity two
  std::vector<double> loop_ks;
  for (const auto& m : modes)
    if (m.family == ModeFamily::loop_localized) {
      loop_ks.push_back(m.k);
      CHECK(m.multiplicity == 2);
    }
  REQUIRE(loop_ks.size() == 2);
  CHECK(loop_ks[0] == Approx(1.0).margin(1e-11));
  CHECK(loop_ks[1] == Approx(2.0).margin(1e-11));

  // first members of the even and odd families (frozen from bisection and
  // cross-checked against the FD oracle below)
  double omega1 = 0, Omega1 = 0;
  for (const auto& m : modes) {
    if (m.family == ModeFamily::even && omega1 == 0) omega1 = m.k;
    if (m.family == ModeFamily::odd && Omega1 == 0) Omega1 = m.k;
  }
  CHECK(omega1 == Approx(0.6555146008).margin(1e-9));
  CHECK(Omega1 == Approx(0.2420137578).margin(1e-9));

  for (const auto& m : modes) CHECK_FALSE(m.resonant);
}

TEST_CASE("find_modes flags resonance at L = pi/2", "[spectrum]") {
  const auto modes = find_modes(pi / 2, 2.5);
  bool any_resonant = false;
  for (const auto& m : modes) any_resonant |= m.resonant;
  CHECK(any_resonant);

  // the duplicate roots are reported, not merged
  int near_two = 0;
  for (const auto& m : modes)
    if (std::abs(m.k - 2.0) < 1e-6) ++near_two;
  CHECK(near_two >= 2);
}

TEST_CASE("interval FD eigenvalues are n^2", "[spectrum]") {
  const auto g = build_interval(pi);
  const auto pairs = fd_eigenmodes(g, 0.01, 4);
  REQUIRE(pairs.size() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(pairs[n].lambda == Approx(n * n).margin(5e-3 + 1e-10));
    // eigenfunction is cos(n x) up to sign and normalization
    const auto& v = pairs[n].mode.edge_values(0);
    const double scale = v(0);
    for (int i = 0; i < v.size(); i += v.size() / 7) {
      const double x = pi * i / (v.size() - 1);
      CHECK(v(i) == Approx(scale * std::cos(n * x)).margin(2e-3 * std::abs(scale) + 1e-12));
    }
  }
}

namespace {

// eigenvalue list with every mode repeated by its multiplicity, matching the
// FD solver's output ordering
std::vector<double> expanded_lambdas(const std::vector<LinearMode>& modes) {
  std::vector<double> out;
  for (const auto& m : modes)
    for (int r = 0; r < m.multiplicity; ++r) out.push_back(m.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("dumbbell FD spectrum matches the secular roots at second order", "[spectrum]") {
  const double L = 2.0;
  const auto exact = expanded_lambdas(find_modes(L, 2.6));

  const auto lam_err = [&](double h) {
    const auto fd = fd_eigenmodes(build_dumbbell(L), h, static_cast<int>(exact.size()));
    double worst = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i)
      worst = std::max(worst, std::abs(fd[i].lambda - exact[i]));
    return worst;
  };

  const double e1 = lam_err(0.05);
  const double e2 = lam_err(0.025);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);

  // each FD eigenvalue individually within 10 h^2 of its secular partner
  const double h = 0.05;
  const auto fd = fd_eigenmodes(build_dumbbell(L), h, static_cast<int>(exact.size()));
  for (std::size_t i = 0; i < exact.size(); ++i)
    CHECK(std::abs(fd[i].lambda - exact[i]) < 10.0 * h * h);
}

TEST_CASE("FD eigenfunction symmetry families", "[spectrum]") {
  const double L = 2.0;
  std::vector<LinearMode> exact;  // expanded by multiplicity
  for (const auto& m : find_modes(L, 2.2))
    for (int r = 0; r < m.multiplicity; ++r) exact.push_back(m);
  const auto fd = fd_eigenmodes(build_dumbbell(L), 0.03, static_cast<int>(exact.size()));

  for (std::size_t i = 0; i < exact.size(); ++i) {
    const auto& mode = fd[i].mode;
    const auto r2 = apply_symmetry(SymmetryOp::r2(), mode);
    const double plus = [&] {
      double worst = 0;
      for (int m = 0; m < 3; ++m)
        worst = std::max(worst, (r2.edge_values(m) - mode.edge_values(m)).cwiseAbs().maxCoeff());
      return worst;
    }();
    const double minus = [&] {
      double worst = 0;
      for (int m = 0; m < 3; ++m)
        worst = std::max(worst, (r2.edge_values(m) + mode.edge_values(m)).cwiseAbs().maxCoeff());
      return worst;
    }();

    switch (exact[i].family) {
      case ModeFamily::constant:
      case ModeFamily::even:
        CHECK(plus < 1e-6);
        break;
      case ModeFamily::odd:
        CHECK(minus < 1e-6);
        break;
      case ModeFamily::loop_localized: {
        // after the degenerate-pair rotation the mode vanishes on the segment
        CHECK(mode.edge_values(1).cwiseAbs().maxCoeff() < 1e-6);
        break;
      }
    }
  }
}

TEST_CASE("factored form and full determinant share their zero set", "[spectrum]") {
  const double L = 2.0;
  // every factored root annihilates the 6x6 determinant ...
  for (const auto& m : find_modes(L, 2.6)) {
    if (m.family == ModeFamily::constant) continue;
    CHECK(std::abs(secular_determinant(m.k, L)) < 1e-10);
  }
  // ... and 20 random off-root wavenumbers annihilate neither
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.05, 2.6);
  int checked = 0;
  while (checked < 20) {
    const double k = u(rng);
    const auto f = secular_factors(k, L);
    const double fmin =
        std::min({std::abs(f.even), std::abs(f.odd), std::abs(std::sin(k * pi))});
    if (fmin < 0.05) continue;  // too close to a root for a clean comparison
    CHECK(std::abs(secular_determinant(k, L)) > 1e-4);
    ++checked;
  }
}

TEST_CASE("vanishing-loop wavenumber expansion", "[spectrum]") {
  // odd n=1: k -> 1 as eps -> 0
  const auto r = epsilon_expansion_check(1, false, 0.005);
  CHECK(r.k_exact == Approx(1.0).margin(0.01));

  // |k_exact - k_series| = O(eps^4): fitted constant stays bounded across
  // a refinement ladder
  double c_prev = -1.0;
  for (double eps : {0.02, 0.01, 0.005}) {
    const auto e = epsilon_expansion_check(1, true, eps);
    const double c = std::abs(e.k_exact - e.k_series) / std::pow(eps, 4);
    CHECK(c < 50.0);
    if (c_prev > 0) CHECK(c < 3.0 * c_prev + 1.0);
    c_prev = c;
  }

  // log-log slope of the gap over the ladder is ~4
  const auto gap = [](double eps) {
    const auto e = epsilon_expansion_check(1, true, eps);
    return std::abs(e.k_exact - e.k_series);
  };
  const double slope =
      std::log(gap(0.02) / gap(0.005)) / std::log(0.02 / 0.005);
  CHECK(slope > 3.7);

  // the loop family escapes as a boundary layer: rescaled loop factor
  // sin^2(k eps / 2) has its first nonzero root at k = 2 pi / eps
  const double eps = 0.01;
  CHECK(std::sin(2 * pi / eps * eps / 2) == Approx(0.0).margin(1e-12));
}
