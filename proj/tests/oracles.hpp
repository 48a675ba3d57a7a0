#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the quadrature, weight or shift code paths under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "apsolve/poly.hpp"
#include "apsolve/quadrature.hpp"
#include "apsolve/weights.hpp"

namespace oracle {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                       double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of a smooth 1-d integrand.
inline double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson(f, a, b, fa, fm, fb), eps, 50);
}

/// Brute-force minimum over the closed grid -1/2 + k/G of the Eq. (9)
/// constant, in 1-d, using std::pow directly.
struct ShiftOracle {
  double xi0 = 0.0;
  double constant = 0.0;
};

inline ShiftOracle brute_force_shift_1d(const std::function<double(double)>& modulus, double p, int M, int G) {
  const double pprime = p / (p - 1.0);
  ShiftOracle best{0.0, INFINITY};
  for (int k = 0; k <= G; ++k) {
    const double xi0 = -0.5 + static_cast<double>(k) / G;
    double c = 0.0;
    bool zero = false;
    for (int m = -M; m <= M; ++m) {
      const double d = modulus(xi0 + m);
      if (d == 0.0) {
        zero = true;
        break;
      }
      c = std::max(c, std::pow(d, -1.0 / (p - 1.0)) * std::pow(1.0 + std::abs(m), -pprime));
    }
    if (!zero && c < best.constant) best = {xi0, c};
  }
  return best;
}

// -- random generators ---------------------------------------------------------

inline apsolve::Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::normal_distribution<double> g(0.0, 1.0);
  apsolve::Polynomial p(n);
  for (const auto& a : apsolve::multi_indices_up_to(n, deg(rng))) p.add_term(a, {g(rng), g(rng)});
  if (p.is_zero()) p = apsolve::Polynomial::constant(n, 1.0);
  return p;
}

inline apsolve::Weight random_simple_weight(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (kind(rng)) {
    case 0: return apsolve::Weight::power(n, -0.8 + 4.8 * u(rng));
    case 1: return apsolve::Weight::constant(n, 0.1 + 9.9 * u(rng));
    default: return apsolve::Weight::polynomial_modulus(random_polynomial(rng, n, 3));
  }
}

/// Power, constant, polynomial modulus or a product of two of these.
inline apsolve::Weight random_weight(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> coin(0, 3);
  if (coin(rng) == 0) return apsolve::Weight::product({random_simple_weight(rng, n), random_simple_weight(rng, n)});
  return random_simple_weight(rng, n);
}

inline apsolve::Cube random_cube(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> c(-4.0, 4.0);
  std::uniform_real_distribution<double> e(-3.0, 2.0);
  apsolve::Point center(n);
  for (auto& v : center) v = c(rng);
  return apsolve::Cube(std::move(center), std::exp2(e(rng)));
}

inline double random_exponent(std::mt19937_64& rng, double lo = 1.2, double hi = 6.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// All (outer, inner) pairs of the family with inner inside outer.
inline std::vector<std::pair<std::size_t, std::size_t>> nested_pairs(const apsolve::CubeFamily& fam) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = 0; j < fam.size(); ++j) {
      if (fam.cubes[i].contains(fam.cubes[j])) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace oracle
