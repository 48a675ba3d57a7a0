#pragma once

// Weights w(x) >= 0 on R^n and discrete estimators of the Muckenhoupt-type
// quotients built from their cube averages.
//
// All averages are tensor midpoint means. Internally every estimator works
// with log w at the nodes, so quotients of weights spanning hundreds of
// orders of magnitude stay finite and the power-mean inequalities hold up
// to rounding. A quotient of +infinity is an answer ("not in the class on
// this cube"), never an exception.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "apsolve/errors.hpp"
#include "apsolve/poly.hpp"
#include "apsolve/quadrature.hpp"

namespace apsolve {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Quotients above this value are reported as +infinity.
inline constexpr double kBlowUp = 1e8;

class Weight {
 public:
  /// |P(x)|^exponent. exponent = 1 is the symbol modulus itself; other
  /// exponents arise from dual weights.
  struct PolynomialModulus {
    Polynomial poly;
    double exponent = 1.0;
  };
  /// |x|^alpha with the Euclidean norm.
  struct Power {
    double alpha;
  };
  struct Constant {
    double c;
  };
  struct Product {
    std::vector<Weight> factors;
  };
  using Family = std::variant<PolynomialModulus, Power, Constant, Product>;

  static Weight power(std::size_t dim, double alpha) { return Weight(dim, Power{alpha}); }

  static Weight constant(std::size_t dim, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("Constant weight requires c > 0");
    return Weight(dim, Constant{c});
  }

  static Weight polynomial_modulus(Polynomial poly, double exponent = 1.0) {
    const std::size_t dim = poly.dimension();
    return Weight(dim, PolynomialModulus{std::move(poly), exponent});
  }

  static Weight product(std::vector<Weight> factors) {
    if (factors.empty()) throw InvalidArgument("Product weight requires at least one factor");
    const std::size_t dim = factors.front().dimension();
    for (const auto& f : factors) require_dim(f.dimension(), dim, "Weight::product");
    return Weight(dim, Product{std::move(factors)});
  }

  std::size_t dimension() const noexcept { return dim_; }
  const Family& family() const noexcept { return family_; }

  /// log w(x); -inf where w vanishes, +inf at poles, NaN for 0 * inf.
  double log_eval(const Point& x) const {
    require_dim(x.size(), dim_, "Weight::log_eval");
    return std::visit([&](const auto& f) { return log_eval_impl(f, x); }, family_);
  }

  double operator()(const Point& x) const {
    const double l = log_eval(x);
    if (std::isnan(l)) return std::numeric_limits<double>::quiet_NaN();
    return std::exp(l);
  }

 private:
  Weight(std::size_t dim, Family family) : dim_(dim), family_(std::move(family)) {
    if (dim_ == 0) throw InvalidArgument("Weight: dimension must be positive");
  }

  static double scaled_log(double exponent, double log_base) {
    if (exponent == 0.0) return 0.0;  // w^0 = 1, including at zeros and poles
    return exponent * log_base;
  }

  double log_eval_impl(const PolynomialModulus& f, const Point& x) const {
    return scaled_log(f.exponent, std::log(std::abs(eval(f.poly, x))));
  }
  double log_eval_impl(const Power& f, const Point& x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return scaled_log(f.alpha, 0.5 * std::log(r2));
  }
  double log_eval_impl(const Constant& f, const Point&) const { return std::log(f.c); }
  double log_eval_impl(const Product& f, const Point& x) const {
    double s = 0.0;
    for (const auto& w : f.factors) s += w.log_eval(x);
    return s;
  }

  std::size_t dim_;
  Family family_;
};

/// Pointwise w^{-1/(p-1)}. Power(alpha) maps to Power(-alpha/(p-1)) and the
/// other families map to themselves with transformed parameters.
inline Weight dual_weight(const Weight& w, double p) {
  if (!(p > 1.0)) throw InvalidArgument("dual_weight: p must exceed 1");
  const double beta = 1.0 / (p - 1.0);
  struct Visitor {
    std::size_t dim;
    double beta;
    double p;
    Weight operator()(const Weight::PolynomialModulus& f) const {
      return Weight::polynomial_modulus(f.poly, -f.exponent * beta);
    }
    Weight operator()(const Weight::Power& f) const { return Weight::power(dim, -f.alpha / (p - 1.0)); }
    Weight operator()(const Weight::Constant& f) const { return Weight::constant(dim, std::pow(f.c, -beta)); }
    Weight operator()(const Weight::Product& f) const {
      std::vector<Weight> out;
      out.reserve(f.factors.size());
      for (const auto& g : f.factors) out.push_back(dual_weight(g, p));
      return Weight::product(std::move(out));
    }
  };
  return std::visit(Visitor{w.dimension(), beta, p}, w.family());
}

namespace detail {

/// log of the node values of w on a cube.
inline std::vector<double> log_samples(const Weight& w, const Cube& cube, const QuadratureSpec& q) {
  require_dim(cube.dimension(), w.dimension(), "cube/weight");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::pow(q.nodes_per_axis, cube.dimension())));
  for_each_node(cube, q, [&](const Point& x) { out.push_back(w.log_eval(x)); });
  return out;
}

/// log( mean_i exp(scale * l_i) ), stable against overflow. Returns +inf if
/// any term is +inf, -inf if all terms are -inf, NaN on NaN input.
inline double log_mean_exp(const std::vector<double>& l, double scale) {
  double top = -kInfinity;
  for (double v : l) {
    const double s = scale * v;
    if (std::isnan(s)) return std::numeric_limits<double>::quiet_NaN();
    top = std::max(top, s);
  }
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : l) acc += std::exp(scale * v - top);
  return top + std::log(acc / static_cast<double>(l.size()));
}

/// log of (mean w)(mean w^{-1/(p-1)})^{p-1}, written so that the two
/// power means share a common reference level.
inline double log_ap_quotient(const std::vector<double>& l, double p) {
  const double beta = 1.0 / (p - 1.0);
  double lmin = kInfinity;
  double lmax = -kInfinity;
  for (double v : l) {
    if (std::isnan(v)) return kInfinity;
    lmin = std::min(lmin, v);
    lmax = std::max(lmax, v);
  }
  if (lmin == -kInfinity || lmax == kInfinity) return kInfinity;
  double primal = 0.0;
  double dual = 0.0;
  for (double v : l) {
    primal += std::exp(v - lmax);
    dual += std::exp(-beta * (v - lmin));
  }
  const double count = static_cast<double>(l.size());
  return (lmax - lmin) + std::log(primal / count) + (p - 1.0) * std::log(dual / count);
}

inline double finite_or_inf(double v) { return std::isfinite(v) ? v : kInfinity; }

}  // namespace detail

/// Discrete A_p quotient (avg w)(avg w^{-1/(p-1)})^{p-1} on one cube.
/// +infinity when a node hits a zero or pole of w, or on overflow.
inline double ap_quotient(const Weight& w, const Cube& cube, double p, const QuadratureSpec& q) {
  if (!(p > 1.0)) throw InvalidArgument("ap_quotient: p must exceed 1");
  const auto l = detail::log_samples(w, cube, q);
  return detail::finite_or_inf(std::exp(detail::log_ap_quotient(l, p)));
}

/// Discrete A_1 quotient: node mean over node minimum. Values above kBlowUp
/// are reported as +infinity.
inline double a1_quotient(const Weight& w, const Cube& cube, const QuadratureSpec& q) {
  const auto l = detail::log_samples(w, cube, q);
  const double lmin = *std::min_element(l.begin(), l.end());
  if (lmin == -kInfinity) throw ZeroInfimum("a1_quotient: weight vanishes at a quadrature node");
  const double value = std::exp(detail::log_mean_exp(l, 1.0) - lmin);
  return (std::isfinite(value) && value <= kBlowUp) ? value : kInfinity;
}

/// (avg w^r)^{1/r} / avg w.
inline double reverse_holder_quotient(const Weight& w, const Cube& cube, double r, const QuadratureSpec& q) {
  if (!(r > 1.0)) throw InvalidArgument("reverse_holder_quotient: r must exceed 1");
  const auto l = detail::log_samples(w, cube, q);
  const double log_mean = detail::log_mean_exp(l, 1.0);
  if (log_mean == -kInfinity) throw ZeroMass("reverse_holder_quotient: weight has zero mass on cube");
  return detail::finite_or_inf(std::exp(detail::log_mean_exp(l, r) / r - log_mean));
}

/// (int_outer w) / ((s/t)^{np} int_inner w), with s, t the halfwidths.
inline double doubling_quotient(const Weight& w, const Cube& outer, const Cube& inner, double p,
                                const QuadratureSpec& q) {
  if (!outer.contains(inner)) throw NotContained("doubling_quotient: inner cube is not inside outer cube");
  const double n = static_cast<double>(w.dimension());
  const double log_inner = detail::log_mean_exp(detail::log_samples(w, inner, q), 1.0);
  if (log_inner == -kInfinity) throw ZeroMass("doubling_quotient: zero mass on inner cube");
  const double log_outer = detail::log_mean_exp(detail::log_samples(w, outer, q), 1.0);
  const double log_ratio = std::log(outer.halfwidth() / inner.halfwidth());
  // int_B w = |B| * mean, and |outer|/|inner| = (s/t)^n.
  const double value = log_outer - log_inner + n * log_ratio - n * p * log_ratio;
  return detail::finite_or_inf(std::exp(value));
}

/// Integral of w(x)/(1+|x|)^{np} over [-R, R]^n. Each axis is cut into the
/// dyadic pieces [0,1], [1,2], [2,4], ... (and mirrors), every piece carrying
/// q.nodes_per_axis midpoint cells of fixed length; the last piece is
/// truncated at R, keeping the cell lattice, so enlarging R only adds cells.
inline double decay_integral(const Weight& w, double p, double radius, const QuadratureSpec& q) {
  if (!(radius >= 1.0)) throw InvalidArgument("decay_integral: radius must be >= 1");
  q.validate();
  const std::size_t n = w.dimension();
  const int N = q.nodes_per_axis;

  AxisRule axis;
  auto add_cell = [&](double a, double b) {
    axis.nodes.push_back(0.5 * (a + b));
    axis.weights.push_back(b - a);
    axis.nodes.push_back(-0.5 * (a + b));
    axis.weights.push_back(b - a);
  };
  double lo = 0.0;
  double hi = 1.0;
  while (lo < radius) {
    const double cell = (hi - lo) / N;
    for (int k = 0; k < N; ++k) {
      const double a = lo + k * cell;
      if (a >= radius) break;
      add_cell(a, std::min(a + cell, radius));
    }
    lo = hi;
    hi *= 2.0;
  }

  const double np = static_cast<double>(n) * p;
  const std::vector<AxisRule> axes(n, axis);
  return integrate_tensor(axes, [&](const Point& x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::exp(w.log_eval(x) - np * std::log1p(std::sqrt(r2)));
  });
}

// ---------------------------------------------------------------------------
// Refinement checks and suprema over cube families.

/// Thresholds that decide whether a discrete quotient reflects a finite
/// continuum value. The primal and dual means are computed at N, 2N and 4N
/// nodes per axis. A mean converging like C - c N^{-a} has successive
/// increments in ratio 2^{-a} < 1; a divergent one has ratio >= 1.
struct StabilityCriteria {
  double max_increment_ratio = 0.98;
  double converged_increment = 1e-9;
  double blow_up = kBlowUp;
};

struct RefinedQuotient {
  double value = kInfinity;  ///< quotient at the base quadrature
  double refined_value = kInfinity;  ///< quotient at 4x the nodes
  bool stable = false;
};

namespace detail {

/// Increment test on a sequence known by its logs at N, 2N, 4N.
inline bool increments_contract(double l1, double l2, double l3, const StabilityCriteria& crit) {
  if (!std::isfinite(l1) || !std::isfinite(l2) || !std::isfinite(l3)) return false;
  const double e1 = std::expm1(l2 - l1);
  const double e2 = std::expm1(l3 - l2);
  if (std::abs(e2) <= crit.converged_increment) return true;
  if (e1 == 0.0) return false;
  return std::exp(l2 - l1) * std::abs(e2) <= crit.max_increment_ratio * std::abs(e1);
}

}  // namespace detail

/// A_p quotient together with the verdict whether it is finite and stable
/// under node refinement.
inline RefinedQuotient ap_quotient_refined(const Weight& w, const Cube& cube, double p, const QuadratureSpec& q,
                                           const StabilityCriteria& crit = {}) {
  if (!(p > 1.0)) throw InvalidArgument("ap_quotient_refined: p must exceed 1");
  const double beta = 1.0 / (p - 1.0);
  double primal[3];
  double dual[3];
  double quotient[3];
  QuadratureSpec level = q;
  for (int i = 0; i < 3; ++i, level = level.refined()) {
    const auto l = detail::log_samples(w, cube, level);
    primal[i] = detail::log_mean_exp(l, 1.0);
    dual[i] = detail::log_mean_exp(l, -beta);
    quotient[i] = detail::finite_or_inf(std::exp(detail::log_ap_quotient(l, p)));
  }
  RefinedQuotient out;
  out.value = quotient[0];
  out.refined_value = quotient[2];
  out.stable = std::all_of(std::begin(quotient), std::end(quotient), [&](double v) { return v <= crit.blow_up; }) &&
               detail::increments_contract(primal[0], primal[1], primal[2], crit) &&
               detail::increments_contract(dual[0], dual[1], dual[2], crit);
  return out;
}

struct ApReport {
  double p = 2.0;
  double sup_quotient = kInfinity;  ///< +infinity flags "not in A_p on the family"
  std::optional<Cube> worst_cube;
  std::size_t cubes_examined = 0;
  std::size_t unstable_cubes = 0;
  QuadratureSpec quadrature;

  bool finite() const noexcept { return std::isfinite(sup_quotient); }
};

struct SupOptions {
  bool check_refinement = true;
  bool stop_at_first_unstable = false;
  StabilityCriteria criteria{};
};

/// Sampled supremum of the A_p quotient over a cube family. With refinement
/// checking on, any cube whose quotient is not stable makes the supremum
/// +infinity and becomes the reported worst cube. Ties go to the first cube
/// in family order.
inline ApReport sup_ap_quotient(const Weight& w, const CubeFamily& family, double p, const QuadratureSpec& q,
                                const SupOptions& opts = {}) {
  if (family.empty()) throw InvalidArgument("sup_ap_quotient: empty cube family");
  if (!(p > 1.0)) throw InvalidArgument("sup_ap_quotient: p must exceed 1");
  ApReport report;
  report.p = p;
  report.quadrature = q;
  report.sup_quotient = 0.0;
  for (const auto& cube : family.cubes) {
    ++report.cubes_examined;
    double value;
    if (opts.check_refinement) {
      const auto rq = ap_quotient_refined(w, cube, p, q, opts.criteria);
      value = rq.stable ? rq.value : kInfinity;
    } else {
      value = ap_quotient(w, cube, p, q);
    }
    if (!std::isfinite(value)) {
      ++report.unstable_cubes;
      if (std::isfinite(report.sup_quotient)) {
        report.sup_quotient = kInfinity;
        report.worst_cube = cube;
      }
      if (opts.stop_at_first_unstable) break;
    } else if (value > report.sup_quotient) {
      report.sup_quotient = value;
      report.worst_cube = cube;
    }
  }
  return report;
}

struct CriticalExponent {
  double p = kInfinity;  ///< smallest stable exponent found, within tol
  double tol = 0.0;
  int bisection_steps = 0;
  ApReport report;  ///< supremum at p
};

/// Bisection on p in [1, p_max] for the smallest p at which the sampled A_p
/// supremum is finite and refinement-stable. Throws NeverFinite if p_max
/// already fails.
inline CriticalExponent critical_exponent(const Weight& w, const CubeFamily& family, const QuadratureSpec& q,
                                          double tol, double p_max = 64.0, const StabilityCriteria& crit = {}) {
  if (!(tol > 0.0)) throw InvalidArgument("critical_exponent: tol must be positive");
  SupOptions opts{true, true, crit};
  ApReport top = sup_ap_quotient(w, family, p_max, q, opts);
  if (!top.finite()) throw NeverFinite("critical_exponent: quotient unstable even at p = " + std::to_string(p_max));

  CriticalExponent out;
  out.tol = tol;
  double lo = 1.0;
  double hi = p_max;
  out.report = top;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ApReport r = sup_ap_quotient(w, family, mid, q, opts);
    ++out.bisection_steps;
    if (r.finite()) {
      hi = mid;
      out.report = std::move(r);
    } else {
      lo = mid;
    }
  }
  out.p = hi;
  return out;
}

}  // namespace apsolve
