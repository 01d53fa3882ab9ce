#pragma once
// Jacobi elliptic functions via the arithmetic-geometric mean, the complete
// elliptic integral of the first kind, and the exact cnoidal/dnoidal profiles
// of the stationary edge equation
//
//     phi'' + Lambda*phi + 2*phi^3 = 0.
//
// Convention: every function here takes the modulus k, not the parameter
// m = k^2.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace qgraph {

/// Complete elliptic integral of the first kind K(k), modulus k in [0, 1),
/// via the arithmetic-geometric mean. Relative error ~ machine epsilon.
inline double ellip_K(double k) {
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("ellip_K: modulus must lie in [0,1) (integral diverges at 1)");
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));  // complementary modulus, cancellation-free
  for (int i = 0; i < 64 && std::abs(a - b) > 2e-17 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

struct JacobiTriple {
  double sn, cn, dn;
};

/// Jacobi elliptic functions at argument u and modulus k in [0, 1), by the
/// descending Landen/AGM recursion. The argument is reduced modulo the period
/// 4K(k) first, so accuracy is uniform in u. dn is recovered from
/// dn^2 = k'^2 + k^2 cn^2, which is cancellation-free.
inline JacobiTriple jacobi(double u, double k) {
  if (!(k >= 0.0 && k < 1.0)) throw std::invalid_argument("jacobi: modulus must lie in [0,1)");
  if (k < 1e-14) return {std::sin(u), std::cos(u), 1.0};

  const double K = ellip_K(k);
  u = std::remainder(u, 4.0 * K);

  double a[64], c[64];
  a[0] = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  c[0] = k;
  int n = 0;
  while (std::abs(c[n]) > 1e-17 * a[n] && n < 62) {
    ++n;
    a[n] = 0.5 * (a[n - 1] + b);
    c[n] = 0.5 * (a[n - 1] - b);
    b = std::sqrt(a[n - 1] * b);
  }
  double phi = std::ldexp(1.0, n) * a[n] * u;
  for (int i = n; i >= 1; --i) {
    const double s = c[i] / a[i] * std::sin(phi);
    phi = 0.5 * (phi + std::asin(std::clamp(s, -1.0, 1.0)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double kp2 = (1.0 - k) * (1.0 + k);
  const double dn = std::sqrt(kp2 + k * k * cn * cn);
  return {sn, cn, dn};
}

enum class WaveKind { cn, dn };

/// Exact periodic solution of the stationary edge equation on one edge:
/// amplitude * pq(wavenumber*x - phase, modulus) with pq = cn or dn.
struct EllipticWave {
  WaveKind kind = WaveKind::cn;
  double amplitude = 0.0;   // alpha (cn) or a (dn)
  double wavenumber = 0.0;  // beta (cn) or b (dn), positive
  double modulus = 0.0;     // k
  double phase = 0.0;       // tau
  double period = 0.0;      // T in the edge coordinate
  double lambda = 0.0;      // standing-wave frequency

  double value(double x) const {
    const auto j = jacobi(wavenumber * x - phase, modulus);
    return amplitude * (kind == WaveKind::cn ? j.cn : j.dn);
  }

  double derivative(double x) const {
    const auto j = jacobi(wavenumber * x - phase, modulus);
    if (kind == WaveKind::cn) return -amplitude * wavenumber * j.sn * j.dn;
    return -amplitude * wavenumber * modulus * modulus * j.sn * j.cn;
  }

  /// Max |phi'' + Lambda phi + 2 phi^3| over uniformly spaced samples of one
  /// period, with phi'' taken from the cn/dn second-derivative identities.
  /// This checks the amplitude/wavenumber/modulus relations, not the ODE
  /// identity itself.
  double ode_residual_max(int samples = 100) const {
    const double k2 = modulus * modulus;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double x = phase / std::max(wavenumber, 1e-300) + period * i / samples;
      const auto j = jacobi(wavenumber * x - phase, modulus);
      double phi, d2;  // value and second derivative in x
      if (kind == WaveKind::cn) {
        phi = amplitude * j.cn;
        d2 = amplitude * wavenumber * wavenumber *
             (-(1.0 - 2.0 * k2) * j.cn - 2.0 * k2 * j.cn * j.cn * j.cn);
      } else {
        phi = amplitude * j.dn;
        d2 = amplitude * wavenumber * wavenumber *
             ((2.0 - k2) * j.dn - 2.0 * j.dn * j.dn * j.dn);
      }
      worst = std::max(worst, std::abs(d2 + lambda * phi + 2.0 * phi * phi * phi));
    }
    return worst;
  }

  /// Orbit energy (phi'^2 + Lambda phi^2 + phi^4)/2, constant along the wave.
  double orbit_energy(double x) const {
    const double p = value(x), dp = derivative(x);
    return 0.5 * (dp * dp + lambda * p * p + p * p * p * p);
  }

  double max_value() const { return std::abs(amplitude); }
  /// Smallest |value| on the orbit: 0 for cn, a*sqrt(1-k^2) for dn.
  double min_abs_value() const {
    if (kind == WaveKind::cn) return 0.0;
    return std::abs(amplitude) * std::sqrt((1.0 - modulus) * (1.0 + modulus));
  }
};

/// Cnoidal wave alpha*cn(beta x - tau, kappa) with
///   alpha^2 = kappa^2 Lambda / (1 - 2 kappa^2),
///   beta^2  = Lambda / (1 - 2 kappa^2),
///   T       = 4 K(kappa) sqrt((1 - 2 kappa^2) / Lambda).
/// Valid for (Lambda > 0, kappa < 1/sqrt2) or (Lambda < 0, 1/sqrt2 < kappa < 1);
/// kappa = 1/sqrt2 is singular. kappa is the modulus, not the parameter.
inline EllipticWave cnoidal_wave(double lambda, double kappa, double tau) {
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  if (!(kappa >= 0.0 && kappa < 1.0))
    throw std::invalid_argument("cnoidal_wave: modulus must lie in [0,1)");
  if (std::abs(kappa - inv_sqrt2) < 1e-14)
    throw std::invalid_argument("cnoidal_wave: kappa = 1/sqrt2 is singular");
  const bool small = kappa < inv_sqrt2;
  if (!((lambda > 0.0 && small) || (lambda < 0.0 && !small)))
    throw std::invalid_argument("cnoidal_wave: incompatible (Lambda, kappa) sign pair");
  const double denom = 1.0 - 2.0 * kappa * kappa;
  const double beta = std::sqrt(lambda / denom);
  EllipticWave w;
  w.kind = WaveKind::cn;
  w.amplitude = kappa * beta;
  w.wavenumber = beta;
  w.modulus = kappa;
  w.phase = tau;
  w.period = 4.0 * ellip_K(kappa) / beta;
  w.lambda = lambda;
  return w;
}

/// Dnoidal wave a*dn(b x - tau, k) with a = b = sqrt(Lambda/(k^2-2)) and
/// T = 2 K(k) sqrt((k^2-2)/Lambda). Valid for Lambda < 0, 0 <= k < 1.
/// k is the modulus, not the parameter.
inline EllipticWave dnoidal_wave(double lambda, double k, double tau) {
  if (!(lambda < 0.0)) throw std::invalid_argument("dnoidal_wave: Lambda must be negative");
  if (!(k >= 0.0 && k < 1.0)) throw std::invalid_argument("dnoidal_wave: modulus must lie in [0,1)");
  const double a = std::sqrt(lambda / (k * k - 2.0));
  EllipticWave w;
  w.kind = WaveKind::dn;
  w.amplitude = a;
  w.wavenumber = a;
  w.modulus = k;
  w.phase = tau;
  w.period = 2.0 * ellip_K(k) / a;
  w.lambda = lambda;
  return w;
}

namespace detail {

// Bisect the modulus so the wave period hits `target`. f must be monotone
// enough that the initial bracket has a sign change.
template <class PeriodFn>
std::optional<double> bisect_modulus(PeriodFn&& period_of, double lo, double hi, double target) {
  double flo = period_of(lo) - target;
  double fhi = period_of(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = period_of(mid) - target;
    if (std::abs(fm) <= 1e-12 && hi - lo < 1e-13) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Wave fitting an integer number n of periods on a loop of length 2*pi,
/// i.e. T = 2*pi/n, solved for the modulus by bisection (tolerance 1e-12 on
/// T). Returns nothing outside the existence range: cn requires Lambda < n^2,
/// dn requires Lambda < -n^2/2.
///
/// The modulus is bracketed inside [1e-12, bound - 1e-12] to stay clear of
/// the endpoint singularities; extremely soliton-like waves (very negative
/// Lambda relative to n^2, where the required modulus is within ~1e-12 of 1)
/// fall outside the bracket's resolution and are reported as absent. For the
/// dn family this caps reachable frequencies near Lambda ~ -22 n^2.
inline std::optional<EllipticWave> quantize_loop(double lambda, int n, WaveKind kind) {
  if (n < 1) throw std::invalid_argument("quantize_loop: n must be >= 1");
  const double pi = std::numbers::pi;
  const double target = 2.0 * pi / n;
  const double eps = 1e-12;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  if (kind == WaveKind::cn) {
    if (!(lambda < static_cast<double>(n) * n)) return std::nullopt;
    if (lambda == 0.0) {
      // Degenerate point of the (Lambda, kappa) chart: the wave with
      // phi'' + 2 phi^3 = 0 has modulus exactly 1/sqrt2 and any amplitude;
      // T = 4K/(sqrt2*alpha) picks the amplitude.
      EllipticWave w;
      w.kind = WaveKind::cn;
      w.modulus = inv_sqrt2;
      w.amplitude = 4.0 * ellip_K(inv_sqrt2) / (std::numbers::sqrt2 * target);
      w.wavenumber = std::numbers::sqrt2 * w.amplitude;
      w.phase = 0.0;
      w.period = target;
      w.lambda = 0.0;
      return w;
    }
    const auto period_of = [&](double kap) {
      const double beta = std::sqrt(lambda / (1.0 - 2.0 * kap * kap));
      return 4.0 * ellip_K(kap) / beta;
    };
    const double lo = lambda > 0.0 ? eps : inv_sqrt2 + eps;
    const double hi = lambda > 0.0 ? inv_sqrt2 - eps : 1.0 - eps;
    const auto kap = detail::bisect_modulus(period_of, lo, hi, target);
    if (!kap) return std::nullopt;
    return cnoidal_wave(lambda, *kap, 0.0);
  }

  if (!(lambda < -0.5 * n * n)) return std::nullopt;
  const auto period_of = [&](double k) {
    const double b = std::sqrt(lambda / (k * k - 2.0));
    return 2.0 * ellip_K(k) / b;
  };
  const auto k = detail::bisect_modulus(period_of, eps, 1.0 - eps, target);
  if (!k) return std::nullopt;
  return dnoidal_wave(lambda, *k, 0.0);
}

/// Wave fitting m half-periods on a segment of length `len` (T = 2*len/m),
/// used for the center edge of complete-loop solutions. Existence: cn needs
/// Lambda < (pi*m/len)^2, dn needs Lambda < -(pi*m/len)^2/2.
inline std::optional<EllipticWave> quantize_segment(double lambda, int m, double len,
                                                    WaveKind kind) {
  if (m < 1) throw std::invalid_argument("quantize_segment: m must be >= 1");
  if (!(len > 0.0)) throw std::invalid_argument("quantize_segment: length must be positive");
  const double target = 2.0 * len / m;
  const double eps = 1e-12;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double kmax_sq = std::pow(std::numbers::pi * m / len, 2);

  if (kind == WaveKind::cn) {
    if (!(lambda < kmax_sq)) return std::nullopt;
    if (lambda == 0.0) {
      EllipticWave w;
      w.kind = WaveKind::cn;
      w.modulus = inv_sqrt2;
      w.amplitude = 4.0 * ellip_K(inv_sqrt2) / (std::numbers::sqrt2 * target);
      w.wavenumber = std::numbers::sqrt2 * w.amplitude;
      w.phase = 0.0;
      w.period = target;
      w.lambda = 0.0;
      return w;
    }
    const auto period_of = [&](double kap) {
      return 4.0 * ellip_K(kap) / std::sqrt(lambda / (1.0 - 2.0 * kap * kap));
    };
    const double lo = lambda > 0.0 ? eps : inv_sqrt2 + eps;
    const double hi = lambda > 0.0 ? inv_sqrt2 - eps : 1.0 - eps;
    const auto kap = detail::bisect_modulus(period_of, lo, hi, target);
    if (!kap) return std::nullopt;
    return cnoidal_wave(lambda, *kap, 0.0);
  }

  if (!(lambda < -0.5 * kmax_sq)) return std::nullopt;
  const auto period_of = [&](double k) {
    return 2.0 * ellip_K(k) / std::sqrt(lambda / (k * k - 2.0));
  };
  const auto k = detail::bisect_modulus(period_of, eps, 1.0 - eps, target);
  if (!k) return std::nullopt;
  return dnoidal_wave(lambda, *k, 0.0);
}

}  // namespace qgraph
