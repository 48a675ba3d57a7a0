#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "apsolve/weights.hpp"
#include "oracles.hpp"

using apsolve::Cube;
using apsolve::CubeFamily;
using apsolve::MultiIndex;
using apsolve::Polynomial;
using apsolve::QuadratureSpec;
using apsolve::Weight;

namespace {

const QuadratureSpec q64{64};

Cube cube1(double c, double h) { return Cube({c}, h); }

Weight xi_squared_modulus() { return Weight::polynomial_modulus(Polynomial::monomial(MultiIndex({2}))); }

// Mean of |x|^a over [c - h, c + h] by adaptive Simpson, split at 0.
double oracle_mean_power(double a, double c, double h) {
  auto f = [a](double x) { return std::pow(std::abs(x), a); };
  const double lo = c - h, hi = c + h;
  double total;
  if (lo < 0.0 && hi > 0.0) {
    total = oracle::integrate(f, lo, 0.0) + oracle::integrate(f, 0.0, hi);
  } else {
    total = oracle::integrate(f, lo, hi);
  }
  return total / (2.0 * h);
}

}  // namespace

// -- Weight ------------------------------------------------------------------

TEST(Weight, Evaluation) {
  EXPECT_DOUBLE_EQ(Weight::power(2, 2.0)({3.0, 4.0}), 25.0);
  EXPECT_DOUBLE_EQ(Weight::constant(3, 2.5)({1.0, 2.0, 3.0}), 2.5);
  EXPECT_DOUBLE_EQ(xi_squared_modulus()({-3.0}), 9.0);
  const auto prod = Weight::product({Weight::power(1, 1.0), Weight::constant(1, 3.0)});
  EXPECT_DOUBLE_EQ(prod({-2.0}), 6.0);
  EXPECT_EQ(Weight::power(1, -1.0)({0.0}), apsolve::kInfinity);
  EXPECT_EQ(Weight::power(1, 1.0)({0.0}), 0.0);
}

TEST(Weight, Validation) {
  EXPECT_THROW(Weight::constant(1, 0.0), apsolve::InvalidArgument);
  EXPECT_THROW(Weight::product({Weight::power(1, 1.0), Weight::power(2, 1.0)}), apsolve::DimensionMismatch);
  EXPECT_THROW(Weight::power(1, 1.0)({1.0, 2.0}), apsolve::DimensionMismatch);
}

TEST(Weight, NonnegativeWhereFinite) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto w = oracle::random_weight(rng, 2);
    const apsolve::Point x{std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
    const double v = w(x);
    if (std::isfinite(v)) EXPECT_GE(v, 0.0);
  }
}

// -- ap_quotient ---------------------------------------------------------------

TEST(ApQuotient, ConstantIsOne) {
  EXPECT_NEAR(apsolve::ap_quotient(Weight::constant(1, 5.0), cube1(3.0, 0.7), 2.0, q64), 1.0, 1e-14);
  EXPECT_NEAR(apsolve::ap_quotient(Weight::constant(2, 5.0), Cube({1.0, -1.0}, 2.0), 7.0, {12}), 1.0, 1e-14);
}

// avg xi^2 = 1/3 and avg |xi|^{-2/3} = 3 on [-1, 1]: the quotient tends to
// 9. The dual mean converges like N^{-1/3}; one Richardson step with that
// rate recovers the limit.
TEST(ApQuotient, PowerTwoCenteredTendsToNine) {
  const Weight w = Weight::power(1, 2.0);
  auto primal_mean = [](int N) {
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      const double x = -1.0 + (2.0 * k + 1.0) / N;
      s += x * x;
    }
    return s / N;
  };
  double previous = 0.0;
  std::vector<double> dual;
  for (int N : {256, 512, 1024, 2048}) {
    const double qN = apsolve::ap_quotient(w, cube1(0.0, 1.0), 4.0, {N});
    EXPECT_GT(qN, previous);
    EXPECT_LT(qN, 9.0);
    previous = qN;
    dual.push_back(std::cbrt(qN / primal_mean(N)));
  }
  const double r = std::cbrt(2.0);
  const double dual_limit = (r * dual[3] - dual[2]) / (r - 1.0);
  EXPECT_NEAR(dual_limit, 3.0, 1e-4);
  EXPECT_NEAR(std::pow(dual_limit, 3.0) / 3.0, 9.0, 1e-3);
}

TEST(ApQuotient, PowerTwoOffCenterMatchesOracle) {
  const double mean = oracle_mean_power(2.0, 4.0, 1.0);
  const double dual = oracle_mean_power(-2.0 / 3.0, 4.0, 1.0);
  const double want = mean * std::pow(dual, 3.0);
  const double got = apsolve::ap_quotient(Weight::power(1, 2.0), cube1(4.0, 1.0), 4.0, {2048});
  EXPECT_NEAR(got / want, 1.0, 1e-6);
}

TEST(ApQuotient, ZeroAtNodeIsInfinite) {
  // Odd node count puts a node at the center, where |x| vanishes.
  EXPECT_EQ(apsolve::ap_quotient(Weight::power(1, 1.0), cube1(0.0, 1.0), 2.0, {3}), apsolve::kInfinity);
  EXPECT_THROW(apsolve::ap_quotient(Weight::power(1, 1.0), cube1(0.0, 1.0), 1.0, q64), apsolve::InvalidArgument);
  EXPECT_THROW(apsolve::ap_quotient(Weight::power(2, 1.0), cube1(0.0, 1.0), 2.0, q64), apsolve::DimensionMismatch);
}

// Discrete Hoelder inequality.
TEST(ApQuotient, LowerBoundProperty) {
  std::mt19937_64 rng(100);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 2;
    const auto w = oracle::random_weight(rng, n);
    const auto c = oracle::random_cube(rng, n);
    const double p = oracle::random_exponent(rng, 1.05, 10.0);
    EXPECT_GE(apsolve::ap_quotient(w, c, p, QuadratureSpec::default_for(n)), 1.0 - 1e-12);
  }
}

TEST(ApQuotient, MonotoneInExponentProperty) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 2;
    const auto w = oracle::random_weight(rng, n);
    const auto c = oracle::random_cube(rng, n);
    double p = oracle::random_exponent(rng);
    double q = oracle::random_exponent(rng);
    if (p > q) std::swap(p, q);
    const auto spec = QuadratureSpec::default_for(n);
    const double at_p = apsolve::ap_quotient(w, c, p, spec);
    const double at_q = apsolve::ap_quotient(w, c, q, spec);
    EXPECT_LE(at_q, at_p * (1.0 + 1e-12));
  }
}

TEST(ApQuotient, DualIdentityProperty) {
  std::mt19937_64 rng(102);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 2;
    const auto w = oracle::random_weight(rng, n);
    const auto c = oracle::random_cube(rng, n);
    const double p = oracle::random_exponent(rng);
    const double pp = p / (p - 1.0);
    const auto spec = QuadratureSpec::default_for(n);
    const double lhs = apsolve::ap_quotient(apsolve::dual_weight(w, p), c, pp, spec);
    const double rhs = std::pow(apsolve::ap_quotient(w, c, p, spec), pp - 1.0);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-10);
  }
}

TEST(ApQuotient, PowerScaleInvarianceProperty) {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + t % 2;
    const double alpha = std::uniform_real_distribution<double>(-0.9, 3.0)(rng);
    const double p = oracle::random_exponent(rng);
    const Weight w = Weight::power(n, alpha);
    const auto spec = QuadratureSpec::default_for(n);
    const double ref = apsolve::ap_quotient(w, Cube(apsolve::Point(n, 0.0), 1.0), p, spec);
    for (int k = -8; k <= 8; ++k) {
      const double v = apsolve::ap_quotient(w, Cube(apsolve::Point(n, 0.0), std::ldexp(1.0, k)), p, spec);
      EXPECT_NEAR(v / ref, 1.0, 1e-10);
    }
  }
}

// -- a1_quotient -------------------------------------------------------------

TEST(A1Quotient, Examples) {
  EXPECT_NEAR(apsolve::a1_quotient(Weight::constant(1, 3.0), cube1(-2.0, 5.0), q64), 1.0, 1e-14);
  // Mean of x over [1, 3] is 2 exactly; the node minimum is 1 + 1/N.
  EXPECT_NEAR(apsolve::a1_quotient(Weight::power(1, 1.0), cube1(2.0, 1.0), q64), 2.0 / (1.0 + 1.0 / 64), 1e-13);
  EXPECT_NEAR(apsolve::a1_quotient(Weight::power(1, 1.0), cube1(2.0, 1.0), {1 << 16}), 2.0, 1e-4);
}

TEST(A1Quotient, DivergesAtZeroOfWeight) {
  // Mean of |x| is 1/2 exactly, the node minimum 1/N: quotient N/2.
  for (int N : {64, 256, 1024}) {
    EXPECT_NEAR(apsolve::a1_quotient(Weight::power(1, 1.0), cube1(0.0, 1.0), {N}), N / 2.0, 1e-9 * N);
  }
  EXPECT_EQ(apsolve::a1_quotient(Weight::power(1, 20.0), cube1(0.0, 1.0), q64), apsolve::kInfinity);
  EXPECT_THROW(apsolve::a1_quotient(Weight::power(1, 1.0), cube1(0.0, 1.0), {3}), apsolve::ZeroInfimum);
}

// -- sup_ap_quotient -----------------------------------------------------------

TEST(SupApQuotient, ConstantIsOne) {
  const auto r = apsolve::sup_ap_quotient(Weight::constant(1, 1.0), CubeFamily::dyadic(1, 4), 2.0, q64);
  EXPECT_NEAR(r.sup_quotient, 1.0, 1e-14);
  EXPECT_EQ(r.cubes_examined, CubeFamily::dyadic(1, 4).size());
  ASSERT_TRUE(r.worst_cube.has_value());
}

TEST(SupApQuotient, PowerTwoCenteredFamily) {
  const Weight w = Weight::power(1, 2.0);
  const auto fam = CubeFamily::centered(1, -8, 8);
  const auto r = apsolve::sup_ap_quotient(w, fam, 4.0, q64);
  ASSERT_TRUE(r.finite());
  EXPECT_EQ(r.unstable_cubes, 0u);
  const double single = apsolve::ap_quotient(w, cube1(0.0, 1.0), 4.0, q64);
  EXPECT_NEAR(r.sup_quotient / single, 1.0, 1e-10);
  EXPECT_GT(r.sup_quotient, 1.0);
  EXPECT_LT(r.sup_quotient, 9.0);

  const auto below = apsolve::sup_ap_quotient(w, fam, 2.5, q64);
  EXPECT_FALSE(below.finite());
  EXPECT_EQ(below.sup_quotient, apsolve::kInfinity);
  EXPECT_GT(below.unstable_cubes, 0u);
}

// At p = 2.5 the dual mean of |x|^{-4/3} grows like N^{1/3}, so each node
// doubling multiplies the quotient by about 2^{1/2}.
TEST(SupApQuotient, DivergentDualGrowsUnderRefinement) {
  const Weight w = Weight::power(1, 2.0);
  double previous = 0.0;
  for (int N : {64, 128, 256, 512}) {
    const double v = apsolve::ap_quotient(w, cube1(0.0, 1.0), 2.5, {N});
    EXPECT_GT(v, 1.35 * previous);
    previous = v;
  }
}

TEST(SupApQuotient, ReportIsAtLeastOne) {
  std::mt19937_64 rng(104);
  const auto fam = CubeFamily::dyadic(1, 3);
  for (int t = 0; t < 10; ++t) {
    const auto r = apsolve::sup_ap_quotient(oracle::random_weight(rng, 1), fam, oracle::random_exponent(rng), q64);
    EXPECT_GE(r.sup_quotient, 1.0 - 1e-12);
  }
  EXPECT_THROW(apsolve::sup_ap_quotient(Weight::constant(1, 1.0), CubeFamily{}, 2.0, q64), apsolve::InvalidArgument);
}

// -- critical_exponent ---------------------------------------------------------

TEST(CriticalExponent, Constant) {
  const auto r = apsolve::critical_exponent(Weight::constant(1, 3.0), CubeFamily::dyadic(1), q64, 0.01);
  EXPECT_GT(r.p, 1.0);
  EXPECT_LE(r.p, 1.01);
  EXPECT_TRUE(r.report.finite());
}

TEST(CriticalExponent, PowerWeights) {
  const auto fam = CubeFamily::dyadic(1);
  EXPECT_NEAR(apsolve::critical_exponent(Weight::power(1, 2.0), fam, q64, 0.01).p, 3.0, 0.3);
  EXPECT_NEAR(apsolve::critical_exponent(Weight::power(1, 1.0), fam, q64, 0.01).p, 2.0, 0.3);
}

TEST(CriticalExponent, NeverFinite) {
  // |x|^{-2} is not locally integrable: the primal mean diverges for every p.
  EXPECT_THROW(apsolve::critical_exponent(Weight::power(1, -2.0), CubeFamily::dyadic(1, 2), q64, 0.01),
               apsolve::NeverFinite);
}

// -- doubling_quotient -------------------------------------------------------

TEST(DoublingQuotient, Examples) {
  const Weight one = Weight::constant(1, 1.0);
  EXPECT_NEAR(apsolve::doubling_quotient(one, cube1(0.0, 1.0), cube1(0.0, 1.0), 3.0, q64), 1.0, 1e-14);
  EXPECT_NEAR(apsolve::doubling_quotient(one, cube1(0.0, 2.0), cube1(1.0, 1.0), 1.0, q64), 1.0, 1e-14);

  // (16/3) / (4^4 * 7/3)
  const double want = (16.0 / 3.0) / (256.0 * 7.0 / 3.0);
  const double got = apsolve::doubling_quotient(Weight::power(1, 2.0), cube1(0.0, 2.0), cube1(1.5, 0.5), 4.0, {1024});
  EXPECT_NEAR(got / want, 1.0, 1e-5);
}

TEST(DoublingQuotient, RequiresContainment) {
  EXPECT_THROW(apsolve::doubling_quotient(Weight::constant(1, 1.0), cube1(0.0, 1.0), cube1(0.5, 1.0), 2.0, q64),
               apsolve::NotContained);
  EXPECT_THROW(apsolve::doubling_quotient(Weight::polynomial_modulus(Polynomial(1)), cube1(0.0, 1.0), cube1(0.0, 0.5),
                                          2.0, q64),
               apsolve::ZeroMass);
}

// A finite sampled A_p constant bounds the doubling quotient of every nested
// pair in the family.
TEST(DoublingQuotient, BoundedBySupProperty) {
  const Weight w = Weight::power(1, 1.0);
  const auto fam = CubeFamily::dyadic(1, 3, 4);
  const auto r = apsolve::sup_ap_quotient(w, fam, 3.0, q64);
  ASSERT_TRUE(r.finite());
  for (const auto& [i, j] : oracle::nested_pairs(fam)) {
    EXPECT_LE(apsolve::doubling_quotient(w, fam.cubes[i], fam.cubes[j], 3.0, q64), r.sup_quotient * (1.0 + 1e-9));
  }
}

// -- reverse_holder_quotient ---------------------------------------------------

TEST(ReverseHolder, Examples) {
  EXPECT_NEAR(apsolve::reverse_holder_quotient(Weight::constant(1, 4.0), cube1(1.0, 3.0), 3.0, q64), 1.0, 1e-14);
  EXPECT_NEAR(apsolve::reverse_holder_quotient(xi_squared_modulus(), cube1(0.0, 1.0), 2.0, {1024}), 3.0 / std::sqrt(5.0),
              1e-5);
}

TEST(ReverseHolder, OffCenterMatchesOracle) {
  const double m2 = oracle_mean_power(2.0, 10.0, 1.0);
  const double m4 = oracle_mean_power(4.0, 10.0, 1.0);
  const double want = std::sqrt(m4) / m2;
  const double got = apsolve::reverse_holder_quotient(xi_squared_modulus(), cube1(10.0, 1.0), 2.0, {1024});
  EXPECT_NEAR(got / want, 1.0, 1e-8);
  EXPECT_LE(got, 3.0 / std::sqrt(5.0));
  EXPECT_GE(got, 1.0);
}

TEST(ReverseHolder, Errors) {
  EXPECT_THROW(apsolve::reverse_holder_quotient(Weight::constant(1, 1.0), cube1(0.0, 1.0), 1.0, q64),
               apsolve::InvalidArgument);
  EXPECT_THROW(
      apsolve::reverse_holder_quotient(Weight::polynomial_modulus(Polynomial(1)), cube1(0.0, 1.0), 2.0, q64),
      apsolve::ZeroMass);
}

// -- dual_weight -------------------------------------------------------------

TEST(DualWeight, Examples) {
  const Weight d = apsolve::dual_weight(Weight::power(1, 2.0), 3.0);
  const auto* pw = std::get_if<Weight::Power>(&d.family());
  ASSERT_NE(pw, nullptr);
  EXPECT_DOUBLE_EQ(pw->alpha, -1.0);

  EXPECT_DOUBLE_EQ(apsolve::dual_weight(Weight::power(1, 2.0), 3.0)({2.0}), 0.5);
  EXPECT_DOUBLE_EQ(apsolve::dual_weight(xi_squared_modulus(), 3.0)({2.0}), 0.5);
  EXPECT_THROW(apsolve::dual_weight(Weight::power(1, 2.0), 1.0), apsolve::InvalidArgument);
}

TEST(DualWeight, InvolutionProperty) {
  std::mt19937_64 rng(105);
  for (int t = 0; t < 200; ++t) {
    const auto w = oracle::random_weight(rng, 2);
    const double p = oracle::random_exponent(rng);
    const Weight dd = apsolve::dual_weight(apsolve::dual_weight(w, p), p / (p - 1.0));
    const apsolve::Point x{std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
    EXPECT_NEAR(dd(x) / w(x), 1.0, 1e-12);
  }
}

// -- decay_integral ------------------------------------------------------------

TEST(DecayIntegral, ConstantClosedForm) {
  const double R = std::ldexp(1.0, 20);
  const double got = apsolve::decay_integral(Weight::constant(1, 1.0), 2.0, R, q64);
  EXPECT_NEAR(got, 2.0 * (1.0 - 1.0 / (1.0 + R)), 1e-4);
  EXPECT_NEAR(got, 2.0, 1e-4);
}

TEST(DecayIntegral, PowerTwoMatchesOracle) {
  const double R = 1024.0;
  auto f = [](double x) { return x * x / std::pow(1.0 + x, 4.0); };
  double want = 0.0;
  for (double a = 0.0, b = 1.0; a < R; a = b, b *= 2.0) want += oracle::integrate(f, a, std::min(b, R));
  want *= 2.0;
  const double got = apsolve::decay_integral(Weight::power(1, 2.0), 4.0, R, q64);
  EXPECT_NEAR(got / want, 1.0, 1e-4);
}

TEST(DecayIntegral, MonotoneInRadiusProperty) {
  std::mt19937_64 rng(106);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 2;
    const auto w = oracle::random_weight(rng, n);
    const double p = oracle::random_exponent(rng);
    const QuadratureSpec q{n == 1 ? 32 : 8};
    double previous = 0.0;
    for (double R : {1.0, 1.5, 2.0, 3.7, 8.0, 20.0, 64.0}) {
      const double v = apsolve::decay_integral(w, p, R, q);
      EXPECT_GE(v, previous);
      previous = v;
    }
  }
  EXPECT_THROW(apsolve::decay_integral(Weight::constant(1, 1.0), 2.0, 0.5, q64), apsolve::InvalidArgument);
}

// Above the critical exponent the tail decays like R^{-1} for |x|^2 at p = 4,
// so successive dyadic increments shrink geometrically.
TEST(DecayIntegral, StabilizesAboveCriticalExponent) {
  const Weight w = Weight::power(1, 2.0);
  std::vector<double> v;
  for (int k = 2; k <= 14; ++k) v.push_back(apsolve::decay_integral(w, 4.0, std::ldexp(1.0, k), q64));
  for (std::size_t i = 2; i < v.size(); ++i) {
    const double inc_prev = (v[i - 1] - v[i - 2]) / v[i - 2];
    const double inc = (v[i] - v[i - 1]) / v[i - 1];
    EXPECT_LE(inc, 0.75 * inc_prev);
  }
}
