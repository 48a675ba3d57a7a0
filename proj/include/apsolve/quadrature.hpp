#pragma once

// Axis-parallel cubes, cube families and tensor midpoint quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "apsolve/errors.hpp"

namespace apsolve {

using Point = std::vector<double>;

/// Axis-parallel cube {x : |x_j - center_j| <= halfwidth for all j}.
class Cube {
 public:
  Cube(Point center, double halfwidth) : center_(std::move(center)), halfwidth_(halfwidth) {
    if (center_.empty()) throw InvalidArgument("Cube: empty center");
    if (!(halfwidth_ > 0.0) || !std::isfinite(halfwidth_)) {
      throw InvalidArgument("Cube: halfwidth must be positive and finite");
    }
  }

  std::size_t dimension() const noexcept { return center_.size(); }
  const Point& center() const noexcept { return center_; }
  double halfwidth() const noexcept { return halfwidth_; }
  double edge() const noexcept { return 2.0 * halfwidth_; }
  double volume() const { return std::pow(edge(), static_cast<double>(dimension())); }

  /// Componentwise containment, with a relative slack for rounding in the
  /// dyadic constructions.
  bool contains(const Cube& inner) const {
    require_dim(inner.dimension(), dimension(), "Cube::contains");
    const double slack = 1e-12 * std::max(1.0, halfwidth_);
    for (std::size_t j = 0; j < dimension(); ++j) {
      if (inner.center_[j] - inner.halfwidth_ < center_[j] - halfwidth_ - slack) return false;
      if (inner.center_[j] + inner.halfwidth_ > center_[j] + halfwidth_ + slack) return false;
    }
    return true;
  }

  friend bool operator==(const Cube&, const Cube&) = default;

 private:
  Point center_;
  double halfwidth_;
};

enum class QuadratureRule { midpoint };

struct QuadratureSpec {
  int nodes_per_axis = 64;
  QuadratureRule rule = QuadratureRule::midpoint;

  void validate() const {
    if (nodes_per_axis < 2) throw InvalidArgument("QuadratureSpec: nodes_per_axis must be >= 2");
  }

  QuadratureSpec refined(int factor = 2) const { return {nodes_per_axis * factor, rule}; }

  /// 64 nodes per axis in 1-d, 32 in 2-d, 12 in 3-d.
  static QuadratureSpec default_for(std::size_t dim) {
    switch (dim) {
      case 1: return {64};
      case 2: return {32};
      case 3: return {12};
      default: throw InvalidArgument("quadrature analysis supports dimension <= 3");
    }
  }
};

/// Calls f(node) for every node of the tensor midpoint rule on `cube`.
/// Nodes are visited in row-major order (last axis fastest).
template <class F>
void for_each_node(const Cube& cube, const QuadratureSpec& q, F&& f) {
  q.validate();
  const std::size_t n = cube.dimension();
  const int N = q.nodes_per_axis;
  const double h = cube.halfwidth();
  std::vector<double> offsets(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) offsets[k] = h * (-1.0 + (2.0 * k + 1.0) / N);

  std::vector<int> idx(n, 0);
  Point x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = cube.center()[j] + offsets[0];
  while (true) {
    f(static_cast<const Point&>(x));
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (++idx[j] < N) {
        x[j] = cube.center()[j] + offsets[idx[j]];
        break;
      }
      idx[j] = 0;
      x[j] = cube.center()[j] + offsets[0];
      if (j == 0) return;
    }
  }
}

/// One axis of a tensor rule: nodes and their weights (cell lengths).
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Tensor-product integral of f over the product of per-axis rules.
template <class F>
double integrate_tensor(const std::vector<AxisRule>& axes, F&& f) {
  const std::size_t n = axes.size();
  for (const auto& a : axes) {
    if (a.nodes.empty()) return 0.0;
  }
  std::vector<std::size_t> idx(n, 0);
  Point x(n);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = axes[j].nodes[idx[j]];
      w *= axes[j].weights[idx[j]];
    }
    sum += w * f(static_cast<const Point&>(x));
    std::size_t j = n;
    while (true) {
      if (j == 0) return sum;
      --j;
      if (++idx[j] < axes[j].nodes.size()) break;
      idx[j] = 0;
    }
  }
}

/// A finite list of cubes standing in for "all cubes" in a supremum.
struct CubeFamily {
  std::vector<Cube> cubes;

  std::size_t size() const noexcept { return cubes.size(); }
  bool empty() const noexcept { return cubes.empty(); }

  /// Default number of lattice steps from the origin for cube centers.
  static int default_center_radius(std::size_t dim) {
    switch (dim) {
      case 1: return 16;
      case 2: return 6;
      default: return 2;
    }
  }

  /// Dyadic family: halfwidths 2^k for k in [-kmax, kmax]; centers on the
  /// lattice halfwidth * Z^n, at most `center_radius` steps from the origin
  /// per axis and inside the window [-2^kmax, 2^kmax]^n. The origin and the
  /// coordinate hyperplanes (the zero sets of the built-in weights) are lattice
  /// members at every scale.
  static CubeFamily dyadic(std::size_t dim, int kmax = 10, int center_radius = -1) {
    if (dim == 0) throw InvalidArgument("CubeFamily: dimension must be positive");
    if (kmax < 0) throw InvalidArgument("CubeFamily: kmax must be >= 0");
    if (center_radius < 0) center_radius = default_center_radius(dim);
    const double window = std::ldexp(1.0, kmax);
    CubeFamily fam;
    for (int k = -kmax; k <= kmax; ++k) {
      const double h = std::ldexp(1.0, k);
      const int reach = static_cast<int>(std::min<double>(center_radius, std::floor(window / h)));
      std::vector<int> j(dim, -reach);
      while (true) {
        Point c(dim);
        for (std::size_t a = 0; a < dim; ++a) c[a] = j[a] * h;
        fam.cubes.emplace_back(std::move(c), h);
        std::size_t a = dim;
        bool done = true;
        while (a > 0) {
          --a;
          if (++j[a] <= reach) {
            done = false;
            break;
          }
          j[a] = -reach;
        }
        if (done) break;
      }
    }
    return fam;
  }

  /// Origin-centered cubes with halfwidths 2^k, k in [kmin, kmax].
  static CubeFamily centered(std::size_t dim, int kmin, int kmax) {
    CubeFamily fam;
    for (int k = kmin; k <= kmax; ++k) fam.cubes.emplace_back(Point(dim, 0.0), std::ldexp(1.0, k));
    if (fam.empty()) throw InvalidArgument("CubeFamily::centered: empty range");
    return fam;
  }
};

}  // namespace apsolve
