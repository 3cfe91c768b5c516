#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "omo/core.hpp"
#include "omo/domain.hpp"
#include "omo/maps.hpp"

namespace omo {

/// Extragradient configuration. gamma <= 0 selects the automatic step
/// 0.5 / L (half the contraction threshold); an explicit gamma must stay
/// below 1 / L.
struct SolverConfig {
  double gamma = 0.0;
  double tol = 1e-8;
  long max_iter = 1000000;
};

/// Natural-map residual |x - project(x - gamma F(x))|. Zero exactly at
/// solutions of the variational inequality inner(F(x*), x - x*) >= 0 for all
/// feasible x; the standard convergence certificate for projection methods.
inline double vi_residual(const MonotoneMap& map, const Domain& domain, const Vector& x,
                          double gamma) {
  require(gamma > 0.0, "vi_residual: gamma must be positive");
  require_dim(map.dim(), domain.dim(), "vi_residual");
  return (x - domain.project(x - gamma * map(x))).norm();
}

/// Upper bound on the Lipschitz constant: exact spectral norm for the linear
/// families, sampled with a fixed probe seed for the saddle game (fixed so
/// the derived step size is deterministic).
inline double lipschitz_bound(const MonotoneMap& map, const Domain& domain) {
  if (map.is_affine()) return spectral_norm(map.linear_part());
  return estimate_lipschitz(map, domain, 2000, 0x5EEDFACEull);
}

namespace detail {

/// Extragradient on an arbitrary field evaluator. The probe step
/// y = project(x - gamma F(x)) looks ahead one step; the update then uses
/// the field at y, which is what damps the rotation that defeats plain
/// projected iteration on curl-heavy fields.
template <class F>
Vector extragradient_generic(F&& field, const Domain& domain, double lipschitz,
                             const SolverConfig& cfg, const char* what) {
  require(cfg.tol > 0.0, std::string(what) + ": tolerance must be positive");
  require(cfg.max_iter >= 1, std::string(what) + ": iteration budget must be positive");
  double gamma = cfg.gamma;
  if (gamma <= 0.0) {
    gamma = 0.5 / std::max(lipschitz, 1e-12);
  } else if (lipschitz > 0.0) {
    require(gamma < 1.0 / lipschitz,
            std::string(what) + ": step gamma must stay below 1/L for convergence");
  }
  Vector x = domain.center_point();
  Vector best = x;
  double best_res = std::numeric_limits<double>::infinity();
  for (long it = 0; it < cfg.max_iter; ++it) {
    Vector fx = field(x);
    require_finite(fx, what);
    Vector y = domain.project(x - gamma * fx);
    double res = (x - y).norm();
    if (res <= cfg.tol) return x;
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    x = domain.project(x - gamma * field(y));
  }
  throw SolverError(std::string(what) + ": no convergence within " +
                        std::to_string(cfg.max_iter) + " iterations (best residual " +
                        std::to_string(best_res) + ")",
                    std::move(best), best_res, cfg.max_iter);
}

}  // namespace detail

/// Solves the variational inequality for F over the domain. Throws
/// SolverError (carrying the best iterate) when the budget runs out.
inline Vector extragradient_solve(const MonotoneMap& map, const Domain& domain,
                                  const SolverConfig& cfg = {}) {
  require_dim(map.dim(), domain.dim(), "extragradient_solve");
  return detail::extragradient_generic([&map](const Vector& x) { return map(x); }, domain,
                                       lipschitz_bound(map, domain), cfg, "extragradient");
}

/// A solved game: the field and its equilibrium over the pool's domain.
struct VIPoolEntry {
  MonotoneMap map;
  Vector x_star;
};

/// The adversary's arsenal: games sharing one domain, each pre-solved to the
/// pool's residual tolerance.
struct VIPool {
  std::vector<VIPoolEntry> entries;
  Domain domain;
  std::uint64_t seed = 0;
};

struct AdversaryPick {
  std::size_t index = 0;
};

/// Worst-case move: returns the pool entry whose equilibrium lies farthest
/// (Euclidean) from the prediction. Ties keep the lowest index, so the
/// pick is deterministic.
inline AdversaryPick ome_adversary(const VIPool& pool, const Vector& prediction) {
  require(!pool.entries.empty(), "ome_adversary: pool is empty");
  require_dim(pool.domain.dim(), prediction.size(), "ome_adversary prediction");
  require_finite(prediction, "ome_adversary prediction");
  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    double d = (pool.entries[i].x_star - prediction).norm();
    if (d > best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return AdversaryPick{best};
}

}  // namespace omo
