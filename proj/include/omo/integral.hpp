#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "omo/core.hpp"
#include "omo/domain.hpp"
#include "omo/maps.hpp"

namespace omo {

enum class QuadKind { GaussLegendre, CompositeTrapezoid };

/// Reported quadrature error when the rule is provably exact for the
/// integrand (polynomial of low enough degree): a conservative floor rather
/// than a literal zero.
inline constexpr double kPolynomialQuadTol = 1e-9;

/// One-dimensional quadrature over the unit interval. Gauss-Legendre nodes
/// are computed at construction by Newton iteration on the Legendre
/// recurrence (no tables), then affinely mapped from [-1, 1] to [0, 1];
/// an n-node rule integrates polynomials of degree <= 2n-1 exactly. The
/// composite trapezoid rule is kept as a structurally different cross-check.
class QuadratureRule {
 public:
  static QuadratureRule gauss_legendre(int nodes) {
    require(nodes >= 1, "gauss_legendre: need at least 1 node");
    require(nodes <= 1 << 20, "gauss_legendre: node count out of range");
    QuadratureRule r;
    r.kind_ = QuadKind::GaussLegendre;
    r.build_gauss(nodes);
    return r;
  }

  static QuadratureRule composite_trapezoid(int nodes) {
    require(nodes >= 2, "composite_trapezoid: need at least 2 nodes");
    require(nodes <= 1 << 24, "composite_trapezoid: node count out of range");
    QuadratureRule r;
    r.kind_ = QuadKind::CompositeTrapezoid;
    r.build_trapezoid(nodes);
    return r;
  }

  QuadKind kind() const { return kind_; }
  int node_count() const { return static_cast<int>(points_.size()); }

  /// Nodes and weights on [0, 1]; weights sum to 1.
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Gauss-Legendre weights on the canonical interval [-1, 1] (sum 2).
  /// Empty for the trapezoid rule.
  const std::vector<double>& canonical_weights() const { return canonical_weights_; }

  /// Same rule kind at roughly doubled resolution, for error estimation.
  QuadratureRule refined() const {
    if (kind_ == QuadKind::GaussLegendre) return gauss_legendre(2 * node_count());
    return composite_trapezoid(2 * node_count() - 1);
  }

 private:
  QuadratureRule() = default;

  void build_gauss(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      // Chebyshev-based initial guess, then Newton on P_n.
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p1 = 1.0;
        double p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) <= 1e-15) break;
      }
      x[static_cast<std::size_t>(i)] = -z;
      x[static_cast<std::size_t>(n - 1 - i)] = z;
      double weight = 2.0 / ((1.0 - z * z) * pp * pp);
      w[static_cast<std::size_t>(i)] = weight;
      w[static_cast<std::size_t>(n - 1 - i)] = weight;
    }
    // n = 1 degenerates to the midpoint rule: node 0, weight 2.
    if (n == 1) {
      x[0] = 0.0;
      w[0] = 2.0;
    }
    canonical_weights_ = w;
    points_.resize(x.size());
    weights_.resize(w.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      points_[i] = 0.5 * (x[i] + 1.0);
      weights_[i] = 0.5 * w[i];
    }
  }

  void build_trapezoid(int n) {
    points_.resize(static_cast<std::size_t>(n));
    weights_.resize(static_cast<std::size_t>(n));
    const double h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
      points_[static_cast<std::size_t>(i)] = i * h;
      weights_[static_cast<std::size_t>(i)] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
  }

  QuadKind kind_ = QuadKind::GaussLegendre;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> canonical_weights_;
};

/// Work integral of F along the straight segment from a to b:
/// integral over tau in [0,1] of inner(F(a + tau (b-a)), b-a).
/// Cost is one map evaluation per node. Zero-length segments return 0
/// exactly; swapping the endpoints flips the sign (the node set is symmetric
/// about the midpoint).
inline double line_integral(const MonotoneMap& map, const Vector& a, const Vector& b,
                            const QuadratureRule& rule) {
  require_dim(map.dim(), a.size(), "line_integral start");
  require_dim(map.dim(), b.size(), "line_integral end");
  require_finite(a, "line_integral start");
  require_finite(b, "line_integral end");
  const Vector d = b - a;
  if (d.isZero(0.0)) return 0.0;
  const auto& p = rule.points();
  const auto& w = rule.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += w[i] * map(a + p[i] * d).dot(d);
  return acc;
}

/// A loss round: the map chosen by the environment, the reference point the
/// path starts from, and the loss value at that reference point.
struct LossSpec {
  MonotoneMap map;
  Vector o;
  double f_o = 0.0;
};

/// Path-integral loss f(x) = f_o + work integral from o to x. For monotone F
/// this is the tightest convex-analysis-free surrogate available from a
/// single anchored evaluation path; every regret notion downstream is built
/// from differences of these values.
inline double omo_loss(const LossSpec& spec, const Vector& x, const QuadratureRule& rule) {
  require(std::isfinite(spec.f_o), "omo_loss: reference value must be finite");
  require_dim(spec.map.dim(), spec.o.size(), "omo_loss reference");
  return spec.f_o + line_integral(spec.map, spec.o, x, rule);
}

/// For monotone F the segment integral from a to b is bracketed by the two
/// one-point evaluations: inner(F(a), b-a) <= integral <= inner(F(b), b-a).
/// Returned as (lower, upper); no quadrature involved.
inline std::pair<double, double> sandwich_bounds(const MonotoneMap& map, const Vector& a,
                                                 const Vector& b) {
  require_dim(map.dim(), a.size(), "sandwich_bounds start");
  require_dim(map.dim(), b.size(), "sandwich_bounds end");
  const Vector d = b - a;
  return {map(a).dot(d), map(b).dot(d)};
}

/// Sum of segment integrals along a polyline; exactly additive by
/// construction.
inline double polyline_integral(const MonotoneMap& map, std::span<const Vector> points,
                                const QuadratureRule& rule) {
  require(points.size() >= 2, "polyline_integral: need at least 2 points");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    acc += line_integral(map, points[i], points[i + 1], rule);
  return acc;
}

/// Circulation around the closed triangle a -> b -> c -> a. Vanishes (to
/// quadrature noise) for conservative fields; degenerate triangles integrate
/// to ~0.
inline double triangle_loop(const MonotoneMap& map, const Vector& a, const Vector& b,
                            const Vector& c, const QuadratureRule& rule) {
  const Vector pts[4] = {a, b, c, a};
  return polyline_integral(map, std::span<const Vector>(pts, 4), rule);
}

/// Degree in tau of the polynomial integrand inner(F(a + tau d), d) for the
/// built-in families: 1 for every affine field, 2 for the saddle game.
inline int integrand_degree(const MonotoneMap& map) {
  return map.family() == MapFamily::SaddleGame ? 2 : 1;
}

/// Conservative bound on the quadrature error of line_integral. When the
/// rule is Gauss-Legendre and provably exact for the integrand's degree the
/// configured floor is returned; otherwise the rule is compared against its
/// refinement (node doubling) and the observed difference is reported.
inline double quad_error_estimate(const MonotoneMap& map, const Vector& a, const Vector& b,
                                  const QuadratureRule& rule) {
  const int degree = integrand_degree(map);
  if (rule.kind() == QuadKind::GaussLegendre && 2 * rule.node_count() - 1 >= degree)
    return kPolynomialQuadTol;
  double coarse = line_integral(map, a, b, rule);
  double fine = line_integral(map, a, b, rule.refined());
  return std::abs(coarse - fine) + 1e-12;
}

/// Closed-form loss of an affine field F(x) = Ax + b along the straight path
/// from o to x:
///   f_o + 1/2 [x' A' x + x' (A - A') o - o' A' o] + b' (x - o)
/// (primes denote transpose). The independent reference the quadrature route
/// is tested against.
inline double affine_closed_form_loss(const Matrix& a, const Vector& b, const Vector& o,
                                      double f_o, const Vector& x) {
  require(a.rows() == a.cols(), "affine_closed_form_loss: matrix must be square");
  require_dim(a.rows(), b.size(), "affine_closed_form_loss offset");
  require_dim(a.rows(), o.size(), "affine_closed_form_loss reference");
  require_dim(a.rows(), x.size(), "affine_closed_form_loss point");
  const Matrix at = a.transpose();
  double quad = x.dot(at * x) + x.dot((a - at) * o) - o.dot(at * o);
  return f_o + 0.5 * quad + b.dot(x - o);
}

/// Closed-form loss for the saddle game anchored at o = (1, 1) with
/// reference value 0:
///   r^3/3 - r^2/2 + rc - c^2/2 + c^3/3 - 2/3.
/// Its Hessian [[2r-1, 1], [1, 2c-1]] has nonpositive determinant on the
/// unit square, so the loss is neither convex nor concave there.
inline double saddle_reference_loss(const Vector& x) {
  require_dim(2, x.size(), "saddle_reference_loss");
  const double r = x[0];
  const double c = x[1];
  return r * r * r / 3.0 - r * r / 2.0 + r * c - c * c / 2.0 + c * c * c / 3.0 - 2.0 / 3.0;
}

/// Potential 1/2 x'Qx + c'x whose gradient is the quadratic-gradient map;
/// path-independence checks compare loss differences against differences of
/// this potential.
inline double quadratic_potential(const Matrix& q, const Vector& c, const Vector& x) {
  require_dim(q.rows(), x.size(), "quadratic_potential");
  return 0.5 * x.dot(q * x) + c.dot(x);
}

/// Bound on how far a triangle circulation can drift from zero for a field
/// with curl magnitude controlled by beta (Jacobian scale), L (Lipschitz
/// constant) and gamma (Jacobian variation): 3 sqrt((beta^2 + L gamma)/2)
/// times the product of the two leg lengths.
inline double curl_discrepancy_bound(double beta, double lipschitz, double gamma, double dist_uo,
                                     double dist_xu) {
  require(beta >= 0.0 && lipschitz >= 0.0 && gamma >= 0.0,
          "curl_discrepancy_bound: field constants must be nonnegative");
  require(dist_uo >= 0.0 && dist_xu >= 0.0,
          "curl_discrepancy_bound: distances must be nonnegative");
  return 3.0 * std::sqrt(0.5 * (beta * beta + lipschitz * gamma)) * dist_uo * dist_xu;
}

/// Field constants used by curl_discrepancy_bound. Analytic for the linear
/// families (gamma = 0); the saddle game's are sampled over the domain with a
/// fixed probe seed plus its exact second-derivative bound gamma = 2.
struct CurlBoundParams {
  double beta = 0.0;
  double lipschitz = 0.0;
  double gamma = 0.0;
};

inline CurlBoundParams curl_bound_params(const MonotoneMap& map, const Domain& domain) {
  if (map.is_affine()) {
    double s = spectral_norm(map.linear_part());
    return {s, s, 0.0};
  }
  double l = estimate_lipschitz(map, domain, 2000, 0x9E3779B9ull);
  return {l, l, 2.0};
}

struct ConservativityWitness {
  Vector a;
  Vector b;
  Vector c;
  double loop_value = 0.0;
};

struct ConservativityReport {
  bool consistent = true;
  int loops_tested = 0;
  double max_abs_loop = 0.0;
  std::optional<ConservativityWitness> witness;  // engaged iff a loop exceeded tol
};

/// Integrates random triangles drawn from the domain and reports the worst
/// circulation. `consistent` means "no loop exceeded tol": evidence of
/// conservativity, never proof. Non-conservative fields (rotation, the
/// saddle game off the diagonal) produce a witness quickly.
inline ConservativityReport check_conservative(const MonotoneMap& map, const Domain& domain,
                                               int n_loops, int quad_nodes, double tol,
                                               std::uint64_t seed) {
  require(n_loops >= 1, "check_conservative: need at least 1 loop");
  require(tol >= 0.0, "check_conservative: tolerance must be nonnegative");
  require_dim(map.dim(), domain.dim(), "check_conservative");
  const QuadratureRule rule = QuadratureRule::gauss_legendre(quad_nodes);
  SplitMix64 rng(seed);
  ConservativityReport rep;
  rep.loops_tested = n_loops;
  ConservativityWitness worst;
  for (int k = 0; k < n_loops; ++k) {
    Vector a = domain.sample(rng);
    Vector b = domain.sample(rng);
    Vector c = domain.sample(rng);
    double v = triangle_loop(map, a, b, c, rule);
    if (std::abs(v) > rep.max_abs_loop) {
      rep.max_abs_loop = std::abs(v);
      worst = ConservativityWitness{a, b, c, v};
    }
  }
  rep.consistent = rep.max_abs_loop <= tol;
  if (!rep.consistent) rep.witness = worst;
  return rep;
}

}  // namespace omo
