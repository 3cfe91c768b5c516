#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "omo/core.hpp"
#include "omo/rng.hpp"

namespace omo {

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball {
  Vector center;
  double radius;
};

struct Simplex {
  Index dim;
};

/// Closed convex feasible set with an exact Euclidean projection. Immutable;
/// all queries are pure. Projection is the workhorse of everything downstream
/// (gradient steps, fixed-point residuals, feasibility checks), so each shape
/// implements it in closed form:
///   box      - coordinatewise clamp
///   ball     - radial scaling toward the center
///   simplex  - sort-and-threshold (exact, O(d log d))
class Domain {
 public:
  static Domain box(Vector lower, Vector upper) {
    require(lower.size() == upper.size(), "box: bound dimensions differ");
    require(lower.size() > 0, "box: dimension must be positive");
    require_finite(lower, "box lower");
    require_finite(upper, "box upper");
    require((lower.array() <= upper.array()).all(), "box: lower bound exceeds upper bound");
    return Domain(Box{std::move(lower), std::move(upper)});
  }

  /// Axis-aligned cube [lo, hi]^dim.
  static Domain cube(Index dim, double lo, double hi) {
    return box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
  }

  static Domain ball(Vector center, double radius) {
    require(center.size() > 0, "ball: dimension must be positive");
    require_finite(center, "ball center");
    require(std::isfinite(radius) && radius > 0.0, "ball: radius must be positive");
    return Domain(Ball{std::move(center), radius});
  }

  static Domain simplex(Index dim) {
    require(dim >= 1, "simplex: dimension must be positive");
    return Domain(Simplex{dim});
  }

  Index dim() const {
    if (const auto* b = std::get_if<Box>(&shape_)) return b->lower.size();
    if (const auto* b = std::get_if<Ball>(&shape_)) return b->center.size();
    return std::get<Simplex>(shape_).dim;
  }

  Vector project(const Vector& p) const {
    require_dim(dim(), p.size(), "project");
    require_finite(p, "project point");
    if (const auto* b = std::get_if<Box>(&shape_))
      return p.cwiseMax(b->lower).cwiseMin(b->upper);
    if (const auto* b = std::get_if<Ball>(&shape_)) {
      Vector d = p - b->center;
      double n = d.norm();
      if (n <= b->radius) return p;
      return b->center + d * (b->radius / n);
    }
    return project_simplex(p);
  }

  bool contains(const Vector& p, double tol = 1e-12) const {
    require_dim(dim(), p.size(), "contains");
    require(tol >= 0.0, "contains: tolerance must be nonnegative");
    if (!p.allFinite()) return false;
    if (const auto* b = std::get_if<Box>(&shape_))
      return (p - b->upper).maxCoeff() <= tol && (b->lower - p).maxCoeff() <= tol;
    if (const auto* b = std::get_if<Ball>(&shape_))
      return (p - b->center).norm() <= b->radius + tol;
    return p.minCoeff() >= -tol && std::abs(p.sum() - 1.0) <= tol;
  }

  double diameter() const {
    if (const auto* b = std::get_if<Box>(&shape_)) return (b->upper - b->lower).norm();
    if (const auto* b = std::get_if<Ball>(&shape_)) return 2.0 * b->radius;
    return std::get<Simplex>(shape_).dim >= 2 ? std::numbers::sqrt2 : 0.0;
  }

  /// Uniform sample. Box: per-coordinate. Ball: gaussian direction with a
  /// radius correction u^(1/dim). Simplex: normalized exponentials.
  Vector sample(SplitMix64& rng) const {
    const Index d = dim();
    Vector x(d);
    if (const auto* b = std::get_if<Box>(&shape_)) {
      for (Index i = 0; i < d; ++i) x[i] = rng.uniform(b->lower[i], b->upper[i]);
      return x;
    }
    if (const auto* b = std::get_if<Ball>(&shape_)) {
      double n = 0.0;
      do {
        for (Index i = 0; i < d; ++i) x[i] = standard_normal(rng);
        n = x.norm();
      } while (n < 1e-300);
      double r = b->radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
      return b->center + x * (r / n);
    }
    for (Index i = 0; i < d; ++i) x[i] = -std::log1p(-rng.uniform01());
    return x / x.sum();
  }

  /// Deterministic interior-or-central point, used as a solver start.
  Vector center_point() const {
    if (const auto* b = std::get_if<Box>(&shape_)) return 0.5 * (b->lower + b->upper);
    if (const auto* b = std::get_if<Ball>(&shape_)) return b->center;
    const Index d = std::get<Simplex>(shape_).dim;
    return Vector::Constant(d, 1.0 / static_cast<double>(d));
  }

  /// Short human-readable tag for run metadata.
  std::string describe() const {
    if (const auto* b = std::get_if<Box>(&shape_))
      return "box[" + std::to_string(b->lower.minCoeff()) + "," +
             std::to_string(b->upper.maxCoeff()) + "]^" + std::to_string(dim());
    if (const auto* b = std::get_if<Ball>(&shape_))
      return "ball(r=" + std::to_string(b->radius) + ")^" + std::to_string(dim());
    return "simplex^" + std::to_string(dim());
  }

  const std::variant<Box, Ball, Simplex>& shape() const { return shape_; }

 private:
  explicit Domain(std::variant<Box, Ball, Simplex> shape) : shape_(std::move(shape)) {}

  static double standard_normal(SplitMix64& rng) {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    double u = 1.0 - rng.uniform01();
    double v = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  Vector project_simplex(const Vector& p) const {
    const Index n = p.size();
    std::vector<double> u(p.data(), p.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0;
    double lam = 0.0;
    for (Index j = 0; j < n; ++j) {
      cum += u[static_cast<std::size_t>(j)];
      double cand = (1.0 - cum) / static_cast<double>(j + 1);
      if (u[static_cast<std::size_t>(j)] + cand > 0.0) lam = cand;
    }
    return (p.array() + lam).max(0.0).matrix();
  }

  std::variant<Box, Ball, Simplex> shape_;
};

}  // namespace omo
