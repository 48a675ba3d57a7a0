#pragma once

// Periodic grid functions on the n-torus [0, 2pi)^n, Sobolev norms and the
// Fourier-multiplier solve of the conjugated equation
//
//   e^{-i<x,xi0>} P(D) (e^{i<x,xi0>} u) = f   <=>   P(xi0 + m) u^(m) = f^(m).
//
// Fourier coefficients use the series convention f^(m) = (1/N) sum_x f(x)
// e^{-i<m,x>}, so e^{i<m0,x>} has coefficient 1 at m0 and the s = 0
// Sobolev norm equals the root-mean-square of the samples.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "apsolve/errors.hpp"
#include "apsolve/poly.hpp"
#include "apsolve/shift.hpp"

namespace apsolve {

enum class Domain { physical, frequency };

inline const char* to_string(Domain d) { return d == Domain::physical ? "physical" : "frequency"; }

using Mode = std::vector<long>;

/// Complex samples on a uniform grid. Frequency-domain values are stored in
/// FFT order: index k on an axis of size N is the mode k for k < N/2 and
/// k - N otherwise, so the resolved modes are -N/2 <= m_j < N/2.
class GridFunction {
 public:
  GridFunction(std::vector<std::size_t> sizes, std::vector<Complex> values, Domain domain)
      : sizes_(std::move(sizes)), values_(std::move(values)), domain_(domain) {
    if (sizes_.empty()) throw InvalidArgument("GridFunction: dimension must be positive");
    for (std::size_t s : sizes_) {
      if (s < 2 || (s & (s - 1)) != 0) throw InvalidArgument("GridFunction: sizes must be powers of two >= 2");
    }
    if (values_.size() != total(sizes_)) throw DimensionMismatch("GridFunction: value count does not match sizes");
  }

  static GridFunction zeros(std::vector<std::size_t> sizes, Domain domain = Domain::physical) {
    const std::size_t count = total(sizes);
    return GridFunction(std::move(sizes), std::vector<Complex>(count), domain);
  }

  /// Samples f at x_j = 2 pi k_j / N_j.
  static GridFunction sample(std::vector<std::size_t> sizes, const std::function<Complex(const Point&)>& f) {
    GridFunction g = zeros(std::move(sizes));
    const std::size_t n = g.dimension();
    Point x(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::size_t rem = i;
      for (std::size_t j = n; j-- > 0;) {
        x[j] = 2.0 * std::numbers::pi * static_cast<double>(rem % g.sizes_[j]) / static_cast<double>(g.sizes_[j]);
        rem /= g.sizes_[j];
      }
      g.values_[i] = f(x);
    }
    return g;
  }

  std::size_t dimension() const noexcept { return sizes_.size(); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t size() const noexcept { return values_.size(); }
  Domain domain() const noexcept { return domain_; }
  const std::vector<Complex>& values() const noexcept { return values_; }
  std::vector<Complex>& values() noexcept { return values_; }

  /// Lattice mode stored at flat index i (frequency layout).
  Mode mode(std::size_t i) const {
    Mode m(dimension());
    for (std::size_t j = dimension(); j-- > 0;) {
      const std::size_t N = sizes_[j];
      const std::size_t k = i % N;
      m[j] = k < N / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(N);
      i /= N;
    }
    return m;
  }

  /// Flat index of a resolved mode, or size() if m is not resolved.
  std::size_t index_of(const Mode& m) const {
    require_dim(m.size(), dimension(), "GridFunction::index_of");
    std::size_t i = 0;
    for (std::size_t j = 0; j < dimension(); ++j) {
      const long N = static_cast<long>(sizes_[j]);
      if (m[j] < -N / 2 || m[j] >= N / 2) return size();
      i = i * sizes_[j] + static_cast<std::size_t>(m[j] < 0 ? m[j] + N : m[j]);
    }
    return i;
  }

  static std::size_t total(const std::vector<std::size_t>& sizes) {
    return std::accumulate(sizes.begin(), sizes.end(), std::size_t{1}, std::multiplies<>());
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Complex> values_;
  Domain domain_;
};

namespace detail {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};

inline void fft_in_place(std::vector<Complex>& data, const std::vector<std::size_t>& sizes, int sign) {
  std::vector<int> dims(sizes.begin(), sizes.end());
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(
      fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE));
  if (!plan) throw Error("FFTW planning failed");
  fftw_execute(plan.get());
}

}  // namespace detail

/// Physical-domain grid function whose Fourier coefficients are independent
/// complex Gaussians on the modes with |m_j| <= bandwidth and zero elsewhere.
inline GridFunction random_band_limited(std::vector<std::size_t> sizes, long bandwidth, std::uint64_t seed);

/// Fourier coefficients of a physical-domain grid function.
inline GridFunction to_frequency(const GridFunction& f) {
  if (f.domain() != Domain::physical) throw WrongDomainTag("to_frequency: input is not in the physical domain");
  std::vector<Complex> data = f.values();
  detail::fft_in_place(data, f.sizes(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
  return GridFunction(f.sizes(), std::move(data), Domain::frequency);
}

/// Synthesis sum_m f^(m) e^{i<m,x>} at the grid points.
inline GridFunction to_physical(const GridFunction& f) {
  if (f.domain() != Domain::frequency) throw WrongDomainTag("to_physical: input is not in the frequency domain");
  std::vector<Complex> data = f.values();
  detail::fft_in_place(data, f.sizes(), FFTW_BACKWARD);
  return GridFunction(f.sizes(), std::move(data), Domain::physical);
}

inline GridFunction as_frequency(const GridFunction& f) {
  return f.domain() == Domain::frequency ? f : to_frequency(f);
}

inline double mode_norm_squared(const Mode& m) {
  double s = 0.0;
  for (long v : m) s += static_cast<double>(v) * static_cast<double>(v);
  return s;
}

/// (sum_m |f^(m)|^2 (1+|m|^2)^s)^{1/2} over the resolved modes.
inline double sobolev_norm(const GridFunction& f, double s) {
  const GridFunction fh = as_frequency(f);
  double acc = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double a = std::norm(fh.values()[i]);
    if (a == 0.0) continue;
    acc += a * std::pow(1.0 + mode_norm_squared(fh.mode(i)), s);
  }
  return std::sqrt(acc);
}

inline GridFunction random_band_limited(std::vector<std::size_t> sizes, long bandwidth, std::uint64_t seed) {
  GridFunction fh = GridFunction::zeros(std::move(sizes), Domain::frequency);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const Mode m = fh.mode(i);
    const bool inside = std::all_of(m.begin(), m.end(), [&](long v) { return std::abs(v) <= bandwidth; });
    if (inside) fh.values()[i] = Complex(gauss(rng), gauss(rng));
  }
  return to_physical(fh);
}

/// P(xi0 + m) for every stored mode, in frequency layout.
inline std::vector<Complex> symbol_on_grid(const Polynomial& poly, const Point& xi0, const GridFunction& layout) {
  require_dim(poly.dimension(), layout.dimension(), "symbol_on_grid");
  require_dim(xi0.size(), layout.dimension(), "symbol_on_grid");
  std::vector<Complex> out(layout.size());
  Point x(layout.dimension());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const Mode m = layout.mode(i);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = xi0[j] + static_cast<double>(m[j]);
    out[i] = eval(poly, x);
  }
  return out;
}

namespace detail {

inline GridFunction same_domain(GridFunction freq, Domain want) {
  return want == Domain::frequency ? freq : to_physical(freq);
}

}  // namespace detail

/// Applies e^{-i<x,xi0>} P(D) e^{i<x,xi0>} to u. The result is returned in
/// the domain of the input.
inline GridFunction apply_conjugated(const Polynomial& poly, const Point& xi0, const GridFunction& u) {
  GridFunction uh = as_frequency(u);
  const auto symbol = symbol_on_grid(poly, xi0, uh);
  for (std::size_t i = 0; i < uh.size(); ++i) uh.values()[i] *= symbol[i];
  return detail::same_domain(std::move(uh), u.domain());
}

/// Coefficients at or below this fraction of the largest one are treated as
/// absent data when checking divisors.
inline constexpr double kNegligibleCoefficient = 1e-14;

/// Default divisor floor: 1e-12 times the largest |P| over the recheck window.
inline double default_divisor_floor(const ShiftCertificate& cert) {
  double top = 0.0;
  const LatticeWindow window(std::max(cert.recheck_M, cert.window.M));
  Point x(cert.dimension());
  for_each_lattice_point(cert.dimension(), window, [&](const std::vector<long>& m) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = cert.xi0[j] + static_cast<double>(m[j]);
    top = std::max(top, std::abs(eval(cert.poly, x)));
  });
  return 1e-12 * top;
}

/// Solves P(xi0 + m) u^(m) = f^(m) mode by mode. Throws SmallDivisorBreach
/// listing every mode that carries data and has |P(xi0 + m)| < divisor_floor.
inline GridFunction solve_conjugated(const Polynomial& poly, const Point& xi0, const GridFunction& f,
                                     double divisor_floor) {
  GridFunction fh = as_frequency(f);
  const auto symbol = symbol_on_grid(poly, xi0, fh);
  double fmax = 0.0;
  for (const auto& v : fh.values()) fmax = std::max(fmax, std::abs(v));
  const double negligible = kNegligibleCoefficient * fmax;

  std::vector<Mode> breaches;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    Complex& v = fh.values()[i];
    if (std::abs(v) <= negligible) {
      v = 0.0;
      continue;
    }
    if (!(std::abs(symbol[i]) >= divisor_floor) || symbol[i] == Complex(0.0)) {
      breaches.push_back(fh.mode(i));
      continue;
    }
    v /= symbol[i];
  }
  if (!breaches.empty()) {
    std::string msg = "small divisor breach at mode(s)";
    for (const auto& m : breaches) {
      msg += " (";
      for (std::size_t j = 0; j < m.size(); ++j) msg += (j ? "," : "") + std::to_string(m[j]);
      msg += ")";
    }
    throw SmallDivisorBreach(msg, breaches);
  }
  return detail::same_domain(std::move(fh), f.domain());
}

inline GridFunction solve_conjugated(const ShiftCertificate& cert, const GridFunction& f) {
  return solve_conjugated(cert.poly, cert.xi0, f, default_divisor_floor(cert));
}

/// Constant in ||u||_rho <= C ||f||_{rho + np} implied by the certificate.
/// The certified bound gives |P(xi0+m)|^{-1} <= C9^{p-1} (1+|m|)^{np} since
/// p'(p-1) = p, and (1+|m|)^2 <= 2 (1+|m|^2) turns this into
/// C = C9^{p-1} 2^{np/2}.
inline double apriori_constant(const ShiftCertificate& cert) {
  const double np = static_cast<double>(cert.dimension()) * cert.p;
  return std::pow(cert.C9, cert.p - 1.0) * std::pow(2.0, 0.5 * np);
}

struct SolveReport {
  ShiftCertificate certificate;
  double rho = 0.0;
  double loss = 0.0;  ///< s = np
  double norm_u_rho = 0.0;
  double norm_f_rho_plus_s = 0.0;
  double apriori_constant = 0.0;
  double ratio = 0.0;
  std::size_t modes_checked = 0;
  std::size_t modewise_violations = 0;
  double roundtrip_error = 0.0;  ///< relative error of apply(solve(f)) against f
  bool pass = false;
};

/// Solves for u and checks the Sobolev estimate both summed and mode by
/// mode: |u^(m)|^2 (1+|m|^2)^rho <= C^2 (1+|m|^2)^{np+rho} |f^(m)|^2.
inline SolveReport verify_estimate(const ShiftCertificate& cert, const GridFunction& f, double rho,
                                   std::optional<double> divisor_floor = std::nullopt) {
  const double floor = divisor_floor.value_or(default_divisor_floor(cert));
  const GridFunction fh = as_frequency(f);
  const GridFunction uh = solve_conjugated(cert.poly, cert.xi0, fh, floor);

  SolveReport r;
  r.certificate = cert;
  r.rho = rho;
  r.loss = static_cast<double>(cert.dimension()) * cert.p;
  r.apriori_constant = apriori_constant(cert);
  r.norm_u_rho = sobolev_norm(uh, rho);
  r.norm_f_rho_plus_s = sobolev_norm(fh, rho + r.loss);
  r.ratio = r.norm_f_rho_plus_s > 0.0 ? r.norm_u_rho / r.norm_f_rho_plus_s : 0.0;

  const double c2 = r.apriori_constant * r.apriori_constant;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double weight = 1.0 + mode_norm_squared(uh.mode(i));
    const double lhs = std::norm(uh.values()[i]) * std::pow(weight, rho);
    const double rhs = c2 * std::pow(weight, r.loss + rho) * std::norm(fh.values()[i]);
    ++r.modes_checked;
    if (lhs > rhs * (1.0 + 1e-9)) ++r.modewise_violations;
  }

  const GridFunction back = apply_conjugated(cert.poly, cert.xi0, uh);
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    if (uh.values()[i] == Complex(0.0)) continue;  // negligible input modes are dropped by the solve
    err += std::norm(back.values()[i] - fh.values()[i]);
    ref += std::norm(fh.values()[i]);
  }
  r.roundtrip_error = ref > 0.0 ? std::sqrt(err / ref) : 0.0;

  r.pass = r.modewise_violations == 0 && r.ratio <= r.apriori_constant * (1.0 + 1e-9);
  return r;
}

}  // namespace apsolve
