#pragma once
// Small dense-polynomial helpers: evaluation, arithmetic, companion-matrix
// roots with Newton polish, and the resultant of two quadratics (used to
// eliminate one variable from the circle/hyperbola fixed-point system).

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qgraph {

/// Coefficients in ascending order: p(x) = c[0] + c[1] x + ... + c[n] x^n.
struct Poly {
  std::vector<double> c;

  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) { trim(); }
  static Poly constant(double v) { return Poly({v}); }

  void trim() {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }

  double operator()(double x) const {
    double v = 0.0;
    for (int i = degree(); i >= 0; --i) v = v * x + c[i];
    return v;
  }

  Poly derivative() const {
    if (c.size() <= 1) return Poly({0.0});
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return Poly(std::move(d));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<double> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<double> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return Poly(std::move(r));
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    std::vector<double> r(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly(std::move(r));
  }
  friend Poly operator*(double s, const Poly& a) {
    std::vector<double> r = a.c;
    for (double& v : r) v *= s;
    return Poly(std::move(r));
  }
};

/// All complex roots by companion-matrix eigenvalues, each polished by a few
/// Newton steps on the polynomial.
inline std::vector<std::complex<double>> poly_roots(const Poly& p) {
  Poly q = p;
  q.trim();
  const int n = q.degree();
  if (n < 1) return {};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) C(i, n - 1) = -q.c[i] / q.c[n];
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw std::runtime_error("poly_roots: eigensolver failed");

  const Poly dq = q.derivative();
  std::vector<std::complex<double>> roots;
  roots.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = es.eigenvalues()(i);
    for (int it = 0; it < 4; ++it) {
      std::complex<double> pv = 0.0, dv = 0.0;
      for (int k = q.degree(); k >= 0; --k) pv = pv * z + q.c[k];
      for (int k = dq.degree(); k >= 0; --k) dv = dv * z + dq.c[k];
      if (std::abs(dv) < 1e-300) break;
      const std::complex<double> step = pv / dv;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

/// Real roots (|Im| below a scale-relative threshold), ascending, deduplicated.
inline std::vector<double> real_roots(const Poly& p, double im_tol = 1e-9, double dedup = 1e-9) {
  std::vector<double> out;
  double scale = 0.0;
  for (const auto& z : poly_roots(p)) scale = std::max(scale, std::abs(z));
  scale = std::max(scale, 1.0);
  for (const auto& z : poly_roots(p))
    if (std::abs(z.imag()) <= im_tol * scale) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [&](double a, double b) { return std::abs(a - b) <= dedup * scale; }),
            out.end());
  return out;
}

/// Resultant in y of two quadratics a2 y^2 + a1 y + a0 and b2 y^2 + b1 y + b0
/// whose coefficients are polynomials in x:
///   Res = (a2 b0 - a0 b2)^2 - (a2 b1 - a1 b2)(a1 b0 - a0 b1).
inline Poly resultant_of_quadratics(const Poly& a2, const Poly& a1, const Poly& a0, const Poly& b2,
                                    const Poly& b1, const Poly& b0) {
  const Poly t1 = a2 * b0 - a0 * b2;
  const Poly t2 = a2 * b1 - a1 * b2;
  const Poly t3 = a1 * b0 - a0 * b1;
  return t1 * t1 - t2 * t3;
}

}  // namespace qgraph
