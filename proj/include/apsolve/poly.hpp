#pragma once

// Multivariate polynomials with complex coefficients, used as symbols P(xi)
// of constant-coefficient differential operators.

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "apsolve/errors.hpp"

namespace apsolve {

using Complex = std::complex<double>;

/// Exponent vector of a monomial xi_1^{a_1} ... xi_n^{a_n}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
    for (int a : exps_) {
      if (a < 0) throw InvalidArgument("MultiIndex: negative exponent");
    }
  }
  MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  std::size_t size() const noexcept { return exps_.size(); }
  int operator[](std::size_t j) const { return exps_[j]; }
  const std::vector<int>& exponents() const noexcept { return exps_; }

  /// |alpha| = sum of entries.
  int order() const noexcept { return std::accumulate(exps_.begin(), exps_.end(), 0); }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exps_;
};

/// Sum over stored multi-indices of coeff * xi^alpha. Zero coefficients are
/// never stored, so the zero polynomial has no terms and degree 0.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, Complex>;

  explicit Polynomial(std::size_t dim = 1) : dim_(dim) {
    if (dim_ == 0) throw InvalidArgument("Polynomial: dimension must be positive");
  }

  static Polynomial constant(std::size_t dim, Complex c) {
    Polynomial p(dim);
    p.add_term(MultiIndex::zero(dim), c);
    return p;
  }

  static Polynomial monomial(MultiIndex alpha, Complex c = 1.0) {
    Polynomial p(alpha.size());
    p.add_term(std::move(alpha), c);
    return p;
  }

  /// The coordinate function xi_j.
  static Polynomial coordinate(std::size_t dim, std::size_t j) {
    std::vector<int> a(dim, 0);
    a.at(j) = 1;
    return monomial(MultiIndex(std::move(a)));
  }

  /// Adds c * xi^alpha, merging with an existing term.
  void add_term(const MultiIndex& alpha, Complex c) {
    require_dim(alpha.size(), dim_, "Polynomial::add_term");
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }

  std::size_t dimension() const noexcept { return dim_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  int degree() const noexcept {
    int d = 0;
    for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.order());
    return d;
  }

  Complex coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Complex(0.0) : it->second;
  }

  Complex operator()(std::span<const double> xi) const;

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    require_dim(b.dim_, a.dim_, "Polynomial::operator+");
    for (const auto& [alpha, c] : b.terms_) a.add_term(alpha, c);
    return a;
  }

  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    require_dim(b.dim_, a.dim_, "Polynomial::operator-");
    for (const auto& [alpha, c] : b.terms_) a.add_term(alpha, -c);
    return a;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_dim(b.dim_, a.dim_, "Polynomial::operator*");
    Polynomial out(a.dim_);
    std::vector<int> sum(a.dim_);
    for (const auto& [aa, ca] : a.terms_) {
      for (const auto& [ab, cb] : b.terms_) {
        for (std::size_t j = 0; j < a.dim_; ++j) sum[j] = aa[j] + ab[j];
        out.add_term(MultiIndex(sum), ca * cb);
      }
    }
    return out;
  }

  friend Polynomial operator*(Complex s, Polynomial p) {
    Polynomial out(p.dim_);
    for (const auto& [alpha, c] : p.terms_) out.add_term(alpha, s * c);
    return out;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::size_t dim_;
  TermMap terms_;
};

/// Evaluates P at a real point. Monomials are assembled from per-variable
/// power tables, so each variable is raised at most once per degree.
inline Complex eval(const Polynomial& poly, std::span<const double> xi) {
  require_dim(xi.size(), poly.dimension(), "eval");
  if (poly.is_zero()) return 0.0;
  const std::size_t n = poly.dimension();
  const int d = poly.degree();
  std::vector<double> powers(n * static_cast<std::size_t>(d + 1));
  for (std::size_t j = 0; j < n; ++j) {
    double* row = powers.data() + j * static_cast<std::size_t>(d + 1);
    row[0] = 1.0;
    for (int k = 1; k <= d; ++k) row[k] = row[k - 1] * xi[j];
  }
  Complex acc = 0.0;
  for (const auto& [alpha, c] : poly.terms()) {
    double mono = 1.0;
    for (std::size_t j = 0; j < n; ++j) mono *= powers[j * static_cast<std::size_t>(d + 1) + alpha[j]];
    acc += c * mono;
  }
  return acc;
}

inline Complex Polynomial::operator()(std::span<const double> xi) const { return eval(*this, xi); }

inline Complex eval(const Polynomial& poly, std::initializer_list<double> xi) {
  return eval(poly, std::span<const double>(xi.begin(), xi.size()));
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Returns Q with Q(xi) = P(scale * xi + shift). Each factor
/// (scale*xi_j + shift_j)^{a_j} is expanded binomially.
inline Polynomial translate_dilate(const Polynomial& poly, double scale, std::span<const double> shift) {
  const std::size_t n = poly.dimension();
  require_dim(shift.size(), n, "translate_dilate");
  if (!(scale > 0.0)) throw InvalidArgument("translate_dilate: scale must be positive");

  Polynomial out(n);
  std::vector<int> beta(n);
  for (const auto& [alpha, c] : poly.terms()) {
    // Odometer over beta <= alpha componentwise.
    std::fill(beta.begin(), beta.end(), 0);
    while (true) {
      Complex coeff = c;
      for (std::size_t j = 0; j < n; ++j) {
        coeff *= detail::binomial(alpha[j], beta[j]) * std::pow(scale, beta[j]) *
                 std::pow(shift[j], alpha[j] - beta[j]);
      }
      if (coeff != Complex(0.0)) out.add_term(MultiIndex(beta), coeff);

      std::size_t j = 0;
      while (j < n && beta[j] == alpha[j]) beta[j++] = 0;
      if (j == n) break;
      ++beta[j];
    }
  }
  return out;
}

inline Polynomial translate_dilate(const Polynomial& poly, double scale, std::initializer_list<double> shift) {
  return translate_dilate(poly, scale, std::span<const double>(shift.begin(), shift.size()));
}

/// All multi-indices of length n with order <= d, in graded order.
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t n, int d) {
  std::vector<MultiIndex> out;
  std::vector<int> a(n, 0);
  for (int order = 0; order <= d; ++order) {
    // Enumerate compositions of `order` into n nonnegative parts.
    std::fill(a.begin(), a.end(), 0);
    a[0] = order;
    while (true) {
      out.emplace_back(a);
      if (n == 1) break;
      // Next composition in reverse-lex order.
      std::size_t k = n - 1;
      while (k > 0 && a[k - 1] == 0) --k;
      if (k == 0) break;
      --a[k - 1];
      int tail = a[n - 1] + 1;
      a[n - 1] = 0;
      a[k] = tail;
    }
  }
  return out;
}

}  // namespace apsolve
