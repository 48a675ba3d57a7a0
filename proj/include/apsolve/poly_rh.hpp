#pragma once

// Reverse Hoelder constants of polynomial moduli. On the finite-dimensional
// space of polynomials of degree <= d the L^r and L^1 averages over the unit
// cube are equivalent norms; every cube reduces to the unit cube by an affine
// change of variables, so the best constant depends only on (n, d, r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "apsolve/poly.hpp"
#include "apsolve/quadrature.hpp"
#include "apsolve/weights.hpp"

namespace apsolve {

struct RhConstantEstimate {
  double value = 1.0;  ///< best quotient found; a lower bound for C(n, d, r)
  Polynomial maximizer{1};
  /// (candidates evaluated, best so far) at powers of two and at the end.
  std::vector<std::pair<std::size_t, double>> curve;
};

namespace detail {

struct MonomialTable {
  std::vector<MultiIndex> basis;
  std::vector<double> values;  // node-major: values[i * basis.size() + k]
  std::size_t nodes = 0;
};

inline MonomialTable monomial_table(std::size_t n, int d, const Cube& cube, const QuadratureSpec& q) {
  MonomialTable t;
  t.basis = multi_indices_up_to(n, d);
  for_each_node(cube, q, [&](const Point& x) {
    for (const auto& a : t.basis) {
      double v = 1.0;
      for (std::size_t j = 0; j < n; ++j) v *= std::pow(x[j], a[j]);
      t.values.push_back(v);
    }
    ++t.nodes;
  });
  return t;
}

inline double rh_quotient_from_table(const MonomialTable& t, const std::vector<Complex>& coeffs, double r) {
  const std::size_t m = t.basis.size();
  std::vector<double> l(t.nodes);
  for (std::size_t i = 0; i < t.nodes; ++i) {
    Complex acc = 0.0;
    const double* row = t.values.data() + i * m;
    for (std::size_t k = 0; k < m; ++k) acc += coeffs[k] * row[k];
    l[i] = std::log(std::abs(acc));
  }
  const double log_mean = log_mean_exp(l, 1.0);
  if (!std::isfinite(log_mean)) return 0.0;
  return std::exp(log_mean_exp(l, r) / r - log_mean);
}

inline void normalize(std::vector<Complex>& c) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  s = std::sqrt(s);
  for (auto& v : c) v /= s;
}

}  // namespace detail

/// Estimates sup over nonzero polynomials Q of degree <= d in n variables of
/// (avg |Q|^r)^{1/r} / avg |Q| on the cube [-1, 1]^n. Candidates are
/// uniform on the unit sphere of complex coefficient space; the best one is
/// then refined by a shrinking-step random hill climb of `budget` steps.
inline RhConstantEstimate poly_rh_constant(std::size_t n, int d, double r, std::size_t budget, std::uint64_t seed = 0,
                                           std::optional<QuadratureSpec> quadrature = std::nullopt) {
  if (budget < 100) throw InvalidArgument("poly_rh_constant: budget must be >= 100");
  if (!(r > 1.0)) throw InvalidArgument("poly_rh_constant: r must exceed 1");
  if (d < 0) throw InvalidArgument("poly_rh_constant: negative degree");
  const QuadratureSpec q = quadrature.value_or(QuadratureSpec::default_for(n));
  const Cube unit(Point(n, 0.0), 1.0);
  const auto table = detail::monomial_table(n, d, unit, q);
  const std::size_t m = table.basis.size();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_direction = [&] {
    std::vector<Complex> c(m);
    for (auto& v : c) v = Complex(gauss(rng), gauss(rng));
    detail::normalize(c);
    return c;
  };

  RhConstantEstimate est;
  std::vector<Complex> best;
  double best_value = -1.0;
  std::size_t evaluated = 0;
  std::size_t next_mark = 1;
  auto record = [&](const std::vector<Complex>& c, double v) {
    ++evaluated;
    if (v > best_value) {
      best_value = v;
      best = c;
    }
    if (evaluated == next_mark) {
      est.curve.emplace_back(evaluated, best_value);
      next_mark *= 2;
    }
  };

  for (std::size_t i = 0; i < budget; ++i) {
    auto c = random_direction();
    record(c, detail::rh_quotient_from_table(table, c, r));
  }

  double step = 0.25;
  int failures = 0;
  for (std::size_t i = 0; i < budget && step > 1e-8; ++i) {
    std::vector<Complex> c = best;
    for (auto& v : c) v += step * Complex(gauss(rng), gauss(rng));
    detail::normalize(c);
    const double before = best_value;
    record(c, detail::rh_quotient_from_table(table, c, r));
    if (best_value > before) {
      failures = 0;
    } else if (++failures >= 25) {
      step *= 0.5;
      failures = 0;
    }
  }
  if (est.curve.empty() || est.curve.back().first != evaluated) est.curve.emplace_back(evaluated, best_value);

  est.value = best_value;
  Polynomial maximizer(n);
  for (std::size_t k = 0; k < m; ++k) maximizer.add_term(table.basis[k], best[k]);
  est.maximizer = std::move(maximizer);
  return est;
}

struct RhUniformity {
  double max_quotient = 0.0;
  std::optional<Cube> worst_cube;
};

/// Largest reverse Hoelder quotient of |P| over a cube family.
inline RhUniformity check_rh_uniformity(const Polynomial& poly, double r, const CubeFamily& family,
                                        const QuadratureSpec& q) {
  if (family.empty()) throw InvalidArgument("check_rh_uniformity: empty cube family");
  const Weight w = Weight::polynomial_modulus(poly);
  RhUniformity out;
  for (const auto& cube : family.cubes) {
    const double v = reverse_holder_quotient(w, cube, r, q);
    if (v > out.max_quotient) {
      out.max_quotient = v;
      out.worst_cube = cube;
    }
  }
  return out;
}

}  // namespace apsolve
