#pragma once

// Shifts xi0 in the unit cube Q0 = [-1/2, 1/2]^n that keep the divisors
// P(xi0 + m), m in Z^n, away from zero at a polynomial rate:
//
//   |P(xi0 + m)|^{-1/(p-1)} <= C (1 + |m|)^{n p'},   1/p + 1/p' = 1.
//
// Lattice points are enumerated over the sup-norm window |m|_inf <= M; |m|
// in the bound is the Euclidean norm.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "apsolve/errors.hpp"
#include "apsolve/poly.hpp"
#include "apsolve/quadrature.hpp"
#include "apsolve/weights.hpp"

namespace apsolve {

struct LatticeWindow {
  int M = 50;

  explicit LatticeWindow(int m = 50) : M(m) {
    if (M < 1) throw InvalidArgument("LatticeWindow: M must be >= 1");
  }
  friend bool operator==(const LatticeWindow&, const LatticeWindow&) = default;
};

inline double conjugate_exponent(double p) {
  if (!(p > 1.0)) throw InvalidArgument("exponent p must exceed 1");
  return p / (p - 1.0);
}

/// Calls f(m) for every m in Z^n with |m|_inf <= M.
template <class F>
void for_each_lattice_point(std::size_t n, const LatticeWindow& window, F&& f) {
  std::vector<long> m(n, -window.M);
  while (true) {
    f(static_cast<const std::vector<long>&>(m));
    std::size_t j = n;
    while (true) {
      if (j == 0) return;
      --j;
      if (++m[j] <= window.M) break;
      m[j] = -window.M;
    }
  }
}

inline double euclidean_norm(const std::vector<long>& m) {
  double s = 0.0;
  for (long v : m) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}

struct Eq9Scan {
  double constant = kInfinity;  ///< +infinity when some divisor is exactly 0
  std::vector<long> argmax;  ///< maximizing m, or the first zero-divisor m
  double min_divisor = kInfinity;
};

/// Scans the window once, computing the realized constant, its maximizer and
/// the smallest divisor modulus. The first maximizer in enumeration order wins.
inline Eq9Scan scan_eq9(const Polynomial& poly, double p, const Point& xi0, const LatticeWindow& window) {
  const std::size_t n = poly.dimension();
  require_dim(xi0.size(), n, "scan_eq9");
  const double beta = 1.0 / (p - 1.0);
  const double decay = static_cast<double>(n) * conjugate_exponent(p);
  Eq9Scan out;
  double best_log = -kInfinity;
  bool hit_zero = false;
  Point x(n);
  for_each_lattice_point(n, window, [&](const std::vector<long>& m) {
    if (hit_zero) return;
    for (std::size_t j = 0; j < n; ++j) x[j] = xi0[j] + static_cast<double>(m[j]);
    const double divisor = std::abs(eval(poly, x));
    out.min_divisor = std::min(out.min_divisor, divisor);
    if (divisor == 0.0) {
      hit_zero = true;
      out.argmax = m;
      return;
    }
    const double lv = -beta * std::log(divisor) - decay * std::log1p(euclidean_norm(m));
    if (lv > best_log) {
      best_log = lv;
      out.argmax = m;
    }
  });
  if (!hit_zero) out.constant = std::exp(best_log);
  return out;
}

/// Truncated lattice sum sum_m |P(xi0+m)|^{-1/(p-1)} (1+|xi0+m|)^{-np'};
/// +infinity if a divisor vanishes.
inline double lattice_sum(const Polynomial& poly, double p, const Point& xi0, const LatticeWindow& window) {
  const std::size_t n = poly.dimension();
  require_dim(xi0.size(), n, "lattice_sum");
  const double beta = 1.0 / (p - 1.0);
  const double decay = static_cast<double>(n) * conjugate_exponent(p);
  double sum = 0.0;
  Point x(n);
  for_each_lattice_point(n, window, [&](const std::vector<long>& m) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = xi0[j] + static_cast<double>(m[j]);
      r2 += x[j] * x[j];
    }
    const double divisor = std::abs(eval(poly, x));
    if (divisor == 0.0) {
      sum = kInfinity;
      return;
    }
    sum += std::exp(-beta * std::log(divisor) - decay * std::log1p(std::sqrt(r2)));
  });
  return sum;
}

/// Smallest C with |P(xi0+m)|^{-1/(p-1)} <= C (1+|m|)^{np'} on the window.
inline double eq9_constant(const Polynomial& poly, double p, const Point& xi0, const LatticeWindow& window) {
  conjugate_exponent(p);
  const Eq9Scan s = scan_eq9(poly, p, xi0, window);
  if (s.min_divisor == 0.0) throw ZeroDivisor("eq9_constant: P(xi0 + m) = 0 inside the lattice window");
  return s.constant;
}

struct ShiftCertificate {
  Polynomial poly{1};
  Point xi0;
  double p = 2.0;
  double pprime = 2.0;
  LatticeWindow window{50};
  double C9 = kInfinity;
  std::vector<long> argmax;
  double lattice_sum = kInfinity;
  double min_divisor = 0.0;
  int recheck_M = 0;
  double recheck_C9 = kInfinity;
  bool window_limited = false;

  std::size_t dimension() const noexcept { return poly.dimension(); }
};

struct RecheckResult {
  double C9 = kInfinity;
  bool flagged = false;  ///< constant grew by more than 1e-9 relative
};

/// Re-evaluates the realized constant of `cert` on a larger window.
inline RecheckResult recheck_certificate(const ShiftCertificate& cert, const LatticeWindow& larger) {
  if (larger.M <= cert.window.M) throw InvalidArgument("recheck_certificate: window must grow");
  RecheckResult r;
  r.C9 = eq9_constant(cert.poly, cert.p, cert.xi0, larger);
  r.flagged = r.C9 > cert.C9 * (1.0 + 1e-9);
  return r;
}

/// Builds a certificate at a given shift, including the mandatory recheck
/// on the doubled window.
inline ShiftCertificate certify_shift(const Polynomial& poly, double p, const Point& xi0, const LatticeWindow& window) {
  for (double v : xi0) {
    if (!(v >= -0.5 && v <= 0.5)) throw InvalidArgument("certify_shift: xi0 must lie in [-1/2, 1/2]^n");
  }
  ShiftCertificate cert;
  cert.poly = poly;
  cert.xi0 = xi0;
  cert.p = p;
  cert.pprime = conjugate_exponent(p);
  cert.window = window;
  const Eq9Scan s = scan_eq9(poly, p, xi0, window);
  if (s.min_divisor == 0.0) throw ZeroDivisor("certify_shift: P(xi0 + m) = 0 inside the lattice window");
  cert.C9 = s.constant;
  cert.argmax = s.argmax;
  cert.min_divisor = s.min_divisor;
  cert.lattice_sum = lattice_sum(poly, p, xi0, window);
  const auto re = recheck_certificate(cert, LatticeWindow(2 * window.M));
  cert.recheck_M = 2 * window.M;
  cert.recheck_C9 = re.C9;
  cert.window_limited = re.flagged;
  return cert;
}

struct FindShiftOptions {
  int grid = 64;  ///< intervals per axis; the grid has grid + 1 points per axis
  std::uint64_t seed = 0;
  double jitter = 0.0;  ///< per-point random offset, as a fraction of the grid spacing
};

/// Scans a grid of Q0 and certifies the shift with the smallest realized
/// constant. Ties go to the lexicographically smallest shift.
inline ShiftCertificate find_shift(const Polynomial& poly, double p, const LatticeWindow& window,
                                   const FindShiftOptions& opts = {}) {
  if (opts.grid < 8) throw InvalidArgument("find_shift: grid must be >= 8 per axis");
  conjugate_exponent(p);
  const std::size_t n = poly.dimension();
  const double spacing = 1.0 / opts.grid;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);

  std::optional<Point> best;
  double best_c = kInfinity;
  std::vector<int> k(n, 0);
  Point xi(n);
  while (true) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = -0.5 + k[j] * spacing;
      if (opts.jitter > 0.0) v += opts.jitter * spacing * unit(rng);
      xi[j] = std::clamp(v, -0.5, 0.5);
    }
    const Eq9Scan s = scan_eq9(poly, p, xi, window);
    if (s.min_divisor > 0.0) {
      if (s.constant < best_c || (s.constant == best_c && best && xi < *best)) {
        best_c = s.constant;
        best = xi;
      }
    }
    std::size_t j = n;
    bool done = true;
    while (j > 0) {
      --j;
      if (++k[j] <= opts.grid) {
        done = false;
        break;
      }
      k[j] = 0;
    }
    if (done) break;
  }
  if (!best) throw AllShiftsBad("find_shift: every grid shift meets a zero divisor");
  return certify_shift(poly, p, *best, window);
}

/// Fraction of uniform random shifts in Q0 whose realized constant is at
/// most `threshold`. Shifts meeting an exact zero divisor count as bad.
inline double good_shift_fraction(const Polynomial& poly, double p, const LatticeWindow& window, double threshold,
                                  std::size_t samples, std::uint64_t seed = 0) {
  if (samples < 100) throw InvalidArgument("good_shift_fraction: samples must be >= 100");
  conjugate_exponent(p);
  const std::size_t n = poly.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::size_t good = 0;
  Point xi(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : xi) v = unit(rng);
    const Eq9Scan scan = scan_eq9(poly, p, xi, window);
    if (scan.min_divisor > 0.0 && scan.constant <= threshold) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(samples);
}

}  // namespace apsolve
