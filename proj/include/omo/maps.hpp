#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include "omo/core.hpp"
#include "omo/domain.hpp"
#include "omo/rng.hpp"

namespace omo {

enum class MapFamily { QuadraticGradient, AffinePsd, SaddleGame, Rotation2d, NetworkGame };

inline const char* to_string(MapFamily f) {
  switch (f) {
    case MapFamily::QuadraticGradient: return "quadratic_gradient";
    case MapFamily::AffinePsd: return "affine_psd";
    case MapFamily::SaddleGame: return "saddle_game";
    case MapFamily::Rotation2d: return "rotation2d";
    case MapFamily::NetworkGame: return "network_game";
  }
  return "unknown";
}

/// Provenance of a generated network game, carried for run metadata.
struct NetworkMeta {
  std::string family;  // "mln" or "supply_chain"
  int n_firms = 0;
  int controls_per_firm = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
};

/// Constructor-time slack on the smallest eigenvalue of the symmetric part
/// when a family is required to be positive semidefinite.
inline constexpr double kPsdTol = 1e-10;

/// A vector field F : R^d -> R^d from one of five families. Evaluation and
/// the analytic Jacobian are exact; whether an instance is monotone
/// (inner(F(x)-F(y), x-y) >= 0) is a constructor guarantee for every family
/// except the saddle game, whose Jacobian has eigenvalues {0, r+c} but an
/// indefinite symmetric part away from the diagonal r = c.
///
///   quadratic_gradient  F(x) = Qx + c, Q symmetric PSD (gradient of a
///                       convex quadratic; conservative)
///   affine_psd          F(x) = Ax + b, sym(A) PSD (rotational unless A
///                       symmetric)
///   saddle_game         F(r,c) = (P, P) with P = r^2 - rc + c^2; the
///                       simultaneous-gradient field of a two-player game
///                       where both players see the same payoff slope
///   rotation2d          F(x,y) = (-y, x); divergence-free, pure curl
///   network_game        F(x) = Ax + b assembled from per-firm utilities;
///                       sym(A) PSD by construction
class MonotoneMap {
 public:
  static MonotoneMap quadratic_gradient(Matrix q, Vector c) {
    validate_linear(q, c, "quadratic_gradient");
    require(spectral_norm(q - q.transpose()) <= 1e-12 * std::max(1.0, spectral_norm(q)),
            "quadratic_gradient: Q must be symmetric");
    require(min_symmetric_eigenvalue(q) >= -kPsdTol,
            "quadratic_gradient: Q must be positive semidefinite");
    return MonotoneMap(Quad{std::move(q), std::move(c)});
  }

  static MonotoneMap affine_psd(Matrix a, Vector b) {
    validate_linear(a, b, "affine_psd");
    require(min_symmetric_eigenvalue(a) >= -kPsdTol,
            "affine_psd: symmetric part of A must be positive semidefinite");
    return MonotoneMap(Affine{std::move(a), std::move(b), true});
  }

  /// Same shape as affine_psd but skips the PSD gate. Exists so the
  /// self-check suite can inject a non-monotone instance and watch the
  /// monotonicity checker catch it; never used by experiments.
  static MonotoneMap affine_unchecked(Matrix a, Vector b) {
    validate_linear(a, b, "affine_unchecked");
    return MonotoneMap(Affine{std::move(a), std::move(b), false});
  }

  static MonotoneMap saddle_game() { return MonotoneMap(Saddle{}); }

  static MonotoneMap rotation2d() { return MonotoneMap(Rot{}); }

  static MonotoneMap network_game(Matrix a, Vector b, NetworkMeta meta) {
    validate_linear(a, b, "network_game");
    require(min_symmetric_eigenvalue(a) >= -kPsdTol,
            "network_game: symmetric part of A must be positive semidefinite");
    return MonotoneMap(Network{std::move(a), std::move(b), std::move(meta)});
  }

  Index dim() const {
    if (const auto* m = std::get_if<Quad>(&v_)) return m->q.rows();
    if (const auto* m = std::get_if<Affine>(&v_)) return m->a.rows();
    if (const auto* m = std::get_if<Network>(&v_)) return m->a.rows();
    return 2;
  }

  MapFamily family() const {
    if (std::holds_alternative<Quad>(v_)) return MapFamily::QuadraticGradient;
    if (std::holds_alternative<Affine>(v_)) return MapFamily::AffinePsd;
    if (std::holds_alternative<Saddle>(v_)) return MapFamily::SaddleGame;
    if (std::holds_alternative<Rot>(v_)) return MapFamily::Rotation2d;
    return MapFamily::NetworkGame;
  }

  Vector operator()(const Vector& x) const {
    require_dim(dim(), x.size(), "map evaluation");
    require_finite(x, "map evaluation point");
    if (const auto* m = std::get_if<Quad>(&v_)) return m->q * x + m->c;
    if (const auto* m = std::get_if<Affine>(&v_)) return m->a * x + m->b;
    if (const auto* m = std::get_if<Network>(&v_)) return m->a * x + m->b;
    if (std::holds_alternative<Saddle>(v_)) {
      double p = x[0] * x[0] - x[0] * x[1] + x[1] * x[1];
      Vector out(2);
      out << p, p;
      return out;
    }
    Vector out(2);
    out << -x[1], x[0];
    return out;
  }

  Matrix jacobian(const Vector& x) const {
    require_dim(dim(), x.size(), "jacobian");
    require_finite(x, "jacobian point");
    if (const auto* m = std::get_if<Quad>(&v_)) return m->q;
    if (const auto* m = std::get_if<Affine>(&v_)) return m->a;
    if (const auto* m = std::get_if<Network>(&v_)) return m->a;
    if (std::holds_alternative<Saddle>(v_)) {
      Matrix j(2, 2);
      double dr = 2.0 * x[0] - x[1];
      double dc = 2.0 * x[1] - x[0];
      j << dr, dc, dr, dc;
      return j;
    }
    Matrix j(2, 2);
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
  }

  /// True when F(x) = Ax + b for some constant (A, b) (the saddle game is
  /// the only built-in family that is not).
  bool is_affine() const { return !std::holds_alternative<Saddle>(v_); }

  /// A of an affine map. Rotation2d and the quadratic gradient expose their
  /// constant Jacobian here too.
  Matrix linear_part() const {
    require(is_affine(), "linear_part: map is not affine");
    if (const auto* m = std::get_if<Quad>(&v_)) return m->q;
    if (const auto* m = std::get_if<Affine>(&v_)) return m->a;
    if (const auto* m = std::get_if<Network>(&v_)) return m->a;
    Matrix j(2, 2);
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
  }

  Vector offset() const {
    require(is_affine(), "offset: map is not affine");
    if (const auto* m = std::get_if<Quad>(&v_)) return m->c;
    if (const auto* m = std::get_if<Affine>(&v_)) return m->b;
    if (const auto* m = std::get_if<Network>(&v_)) return m->b;
    return Vector::Zero(2);
  }

  /// Monotonicity guaranteed by construction. False for the saddle game and
  /// for affine_unchecked instances.
  bool declared_monotone() const {
    if (std::holds_alternative<Saddle>(v_)) return false;
    if (const auto* m = std::get_if<Affine>(&v_)) return m->checked;
    return true;
  }

  /// True when the field is a gradient (loop integrals vanish identically):
  /// symmetric linear part, or a quadratic gradient. Rotation and the saddle
  /// game are the built-in non-conservative examples.
  bool conservative_analytic() const {
    if (std::holds_alternative<Quad>(v_)) return true;
    if (std::holds_alternative<Saddle>(v_) || std::holds_alternative<Rot>(v_)) return false;
    Matrix a = linear_part();
    return spectral_norm(a - a.transpose()) <= 1e-12 * std::max(1.0, spectral_norm(a));
  }

  const NetworkMeta* network_meta() const {
    const auto* m = std::get_if<Network>(&v_);
    return m ? &m->meta : nullptr;
  }

 private:
  struct Quad {
    Matrix q;
    Vector c;
  };
  struct Affine {
    Matrix a;
    Vector b;
    bool checked;
  };
  struct Saddle {};
  struct Rot {};
  struct Network {
    Matrix a;
    Vector b;
    NetworkMeta meta;
  };

  static void validate_linear(const Matrix& a, const Vector& b, const char* what) {
    require(a.rows() >= 1, std::string(what) + ": empty matrix");
    require(a.rows() == a.cols(), std::string(what) + ": matrix must be square");
    require_dim(a.rows(), b.size(), what);
    require_finite(a, what);
    require_finite(b, what);
  }

  explicit MonotoneMap(std::variant<Quad, Affine, Saddle, Rot, Network> v) : v_(std::move(v)) {}

  std::variant<Quad, Affine, Saddle, Rot, Network> v_;
};

/// Result of the sampled monotonicity audit. `monotone` is the verdict;
/// the witness pair is the worst offender found (meaningful whether or not
/// the verdict passed).
struct MonotonicityReport {
  bool monotone = true;
  int samples = 0;
  double min_pairwise_inner = std::numeric_limits<double>::infinity();
  double min_jacobian_sym_eig = std::numeric_limits<double>::infinity();
  Vector witness_x;
  Vector witness_y;
};

/// Samples point pairs from the domain and checks inner(F(x)-F(y), x-y) >= -tol,
/// plus the smallest symmetric-part eigenvalue of the Jacobian at every
/// sampled point. A sampled audit can only ever certify "no violation found",
/// but it reliably flags the saddle game and injected non-PSD affine maps.
inline MonotonicityReport check_monotone(const MonotoneMap& map, const Domain& domain,
                                         int n_samples, double tol, std::uint64_t seed) {
  require(n_samples >= 2, "check_monotone: need at least 2 samples");
  require(tol >= 0.0, "check_monotone: tolerance must be nonnegative");
  require_dim(map.dim(), domain.dim(), "check_monotone");
  SplitMix64 rng(seed);
  MonotonicityReport rep;
  rep.samples = n_samples;
  for (int k = 0; k < n_samples; ++k) {
    Vector x = domain.sample(rng);
    Vector y = domain.sample(rng);
    double inner = (map(x) - map(y)).dot(x - y);
    if (inner < rep.min_pairwise_inner) {
      rep.min_pairwise_inner = inner;
      rep.witness_x = x;
      rep.witness_y = y;
    }
    rep.min_jacobian_sym_eig = std::min(rep.min_jacobian_sym_eig,
                                        std::min(min_symmetric_eigenvalue(map.jacobian(x)),
                                                 min_symmetric_eigenvalue(map.jacobian(y))));
  }
  rep.monotone = rep.min_pairwise_inner >= -tol && rep.min_jacobian_sym_eig >= -tol;
  return rep;
}

/// Sampled lower bound on the Lipschitz constant: max of |F(x)-F(y)|/|x-y|
/// over random pairs. Exact families should prefer their spectral norm.
inline double estimate_lipschitz(const MonotoneMap& map, const Domain& domain, int n_samples,
                                 std::uint64_t seed) {
  require(n_samples >= 1, "estimate_lipschitz: need at least 1 sample");
  require_dim(map.dim(), domain.dim(), "estimate_lipschitz");
  SplitMix64 rng(seed);
  double best = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    Vector x = domain.sample(rng);
    Vector y = domain.sample(rng);
    double d = (x - y).norm();
    if (d < 1e-12) continue;
    best = std::max(best, (map(x) - map(y)).norm() / d);
  }
  return best;
}

inline constexpr double kFiniteDifferenceStep = 1e-5;

/// Central-difference Jacobian, the independent cross-check for the analytic
/// one (agreement expected to ~1e-6 absolute at the default step).
inline Matrix finite_difference_jacobian(const MonotoneMap& map, const Vector& x,
                                         double h = kFiniteDifferenceStep) {
  require(h > 0.0, "finite_difference_jacobian: step must be positive");
  require_dim(map.dim(), x.size(), "finite_difference_jacobian");
  const Index d = x.size();
  Matrix j(d, d);
  for (Index col = 0; col < d; ++col) {
    Vector hi = x;
    Vector lo = x;
    hi[col] += h;
    lo[col] -= h;
    j.col(col) = (map(hi) - map(lo)) / (2.0 * h);
  }
  return j;
}

}  // namespace omo
