#pragma once

#include <cstdio>
#include <future>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "omo/core.hpp"
#include "omo/domain.hpp"
#include "omo/equilibrium.hpp"
#include "omo/maps.hpp"
#include "omo/rng.hpp"

namespace omo {

enum class GameFamily { MLN, SupplyChain };

inline const char* to_string(GameFamily f) {
  return f == GameFamily::MLN ? "mln" : "supply_chain";
}

/// Uniform ranges for the generator's raw draws.
struct ParamRanges {
  double d_min = -1.0, d_max = 1.0;   // rows of the Gram factor D
  double k_min = -0.5, k_max = 0.5;   // raw skew interaction M
  double b_min = -1.0, b_max = 1.0;   // constant offsets
};

/// Recipe for one generated network game. The two families share the
/// generator and differ in shape defaults and metadata label: mln models
/// firms choosing (quantity, quality) per market, supply_chain firms
/// choosing per-path (flow, frequency) controls.
struct NetworkSpec {
  GameFamily family = GameFamily::MLN;
  int n_firms = 5;
  int controls_per_firm = 2;
  ParamRanges ranges;
  double delta = 0.05;
  std::uint64_t seed = 0;

  Index dim() const { return static_cast<Index>(n_firms) * controls_per_firm; }
};

/// Draws a random network game F(x) = Ax + b with
///   A = D'D + delta I + K,   K = (M - M')/2 with per-firm diagonal blocks
/// zeroed, D and M dense uniform draws. The Gram term plus the delta ridge
/// makes the symmetric part positive definite (so the game is monotone); K
/// carries the rotational between-firm coupling; zeroing K's diagonal blocks
/// keeps each firm's own block symmetric, so block i of F is exactly the
/// negative gradient of firm i's utility in its own controls.
/// Draw order (D row-major, then M row-major, then b) is part of the
/// contract: fixed spec means byte-identical serialization.
inline MonotoneMap gen_network(const NetworkSpec& spec) {
  require(spec.n_firms >= 1, "gen_network: need at least 1 firm");
  require(spec.controls_per_firm >= 1, "gen_network: need at least 1 control per firm");
  require(std::isfinite(spec.delta), "gen_network: delta must be finite");
  const ParamRanges& pr = spec.ranges;
  require(pr.d_min <= pr.d_max && pr.k_min <= pr.k_max && pr.b_min <= pr.b_max,
          "gen_network: empty parameter range");
  const Index n = spec.dim();
  SplitMix64 rng(spec.seed);

  Matrix d(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) d(r, c) = rng.uniform(pr.d_min, pr.d_max);
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = rng.uniform(pr.k_min, pr.k_max);
  Vector b(n);
  for (Index i = 0; i < n; ++i) b[i] = rng.uniform(pr.b_min, pr.b_max);

  Matrix k = 0.5 * (m - m.transpose());
  const Index c = spec.controls_per_firm;
  for (int firm = 0; firm < spec.n_firms; ++firm)
    k.block(firm * c, firm * c, c, c).setZero();
  Matrix a = d.transpose() * d + spec.delta * Matrix::Identity(n, n) + k;

  NetworkMeta meta{to_string(spec.family), spec.n_firms, spec.controls_per_firm, spec.seed,
                   spec.delta};
  // The checked constructor rejects degenerate specs (e.g. delta negative
  // enough to kill the Gram ridge).
  return MonotoneMap::network_game(std::move(a), std::move(b), std::move(meta));
}

/// Generates `count` games from consecutive derived seeds and solves each
/// equilibrium (concurrently; the maps are pure) to the solver tolerance.
inline VIPool gen_pool(const NetworkSpec& spec, int count, const Domain& domain,
                       const SolverConfig& solver = {}) {
  require(count >= 1, "gen_pool: need at least 1 network");
  require_dim(spec.dim(), domain.dim(), "gen_pool");

  std::vector<MonotoneMap> maps;
  maps.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    NetworkSpec s = spec;
    s.seed = SplitMix64::derive(spec.seed, static_cast<std::uint64_t>(i));
    maps.push_back(gen_network(s));
  }

  std::vector<std::future<Vector>> futures;
  futures.reserve(maps.size());
  for (const MonotoneMap& m : maps)
    futures.push_back(std::async(std::launch::async, [&m, &domain, &solver] {
      return extragradient_solve(m, domain, solver);
    }));

  VIPool pool{{}, domain, spec.seed};
  pool.entries.reserve(maps.size());
  for (std::size_t i = 0; i < maps.size(); ++i) {
    // Join the solve before moving its map out from under it.
    Vector x_star = futures[i].get();
    pool.entries.push_back(VIPoolEntry{std::move(maps[i]), std::move(x_star)});
  }
  return pool;
}

/// Pointwise mean of a homogeneous affine pool as one network game.
inline MonotoneMap average_network(const VIPool& pool) {
  require(!pool.entries.empty(), "average_network: pool is empty");
  const Index n = pool.entries.front().map.dim();
  Matrix a = Matrix::Zero(n, n);
  Vector b = Vector::Zero(n);
  const NetworkMeta* first_meta = pool.entries.front().map.network_meta();
  for (const VIPoolEntry& e : pool.entries) {
    require(e.map.is_affine(), "average_network: pool contains a non-affine map");
    require_dim(n, e.map.dim(), "average_network");
    const NetworkMeta* m = e.map.network_meta();
    if (first_meta && m)
      require(m->family == first_meta->family && m->n_firms == first_meta->n_firms &&
                  m->controls_per_firm == first_meta->controls_per_firm,
              "average_network: heterogeneous pool");
    a += e.map.linear_part();
    b += e.map.offset();
  }
  const double count = static_cast<double>(pool.entries.size());
  a /= count;
  b /= count;
  NetworkMeta meta;
  if (first_meta) meta = *first_meta;
  meta.seed = pool.seed;
  return MonotoneMap::network_game(std::move(a), std::move(b), std::move(meta));
}

namespace detail {

inline void write_doubles(std::ostream& os, const double* vals, Index count) {
  char buf[64];
  for (Index i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
    os << buf << (i + 1 < count ? " " : "\n");
  }
}

inline double read_double(std::istream& is, const char* what) {
  double v = 0.0;
  if (!(is >> v)) throw std::runtime_error(std::string(what) + ": truncated or malformed file");
  return v;
}

}  // namespace detail

/// Text serialization of an affine network: dimension line, then A row by
/// row, then b. %.17g everywhere, so writing is deterministic and values
/// round-trip exactly.
inline void write_network(std::ostream& os, const MonotoneMap& map) {
  require(map.is_affine(), "write_network: map is not affine");
  const Matrix a = map.linear_part();
  const Vector b = map.offset();
  os << a.rows() << "\n";
  for (Index r = 0; r < a.rows(); ++r) {
    // Row-major: Eigen stores column-major, so copy the row out.
    Vector row = a.row(r);
    detail::write_doubles(os, row.data(), row.size());
  }
  detail::write_doubles(os, b.data(), b.size());
}

/// Reads a network written by write_network. The monotone-map constructor
/// re-validates the matrix on load, so corrupted files are rejected.
inline MonotoneMap read_network(std::istream& is, NetworkMeta meta = {}) {
  long dim = 0;
  if (!(is >> dim)) throw std::runtime_error("read_network: missing dimension header");
  if (dim < 1 || dim > 100000) throw std::runtime_error("read_network: implausible dimension");
  Matrix a(dim, dim);
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) a(r, c) = detail::read_double(is, "read_network A");
  Vector b(dim);
  for (Index i = 0; i < dim; ++i) b[i] = detail::read_double(is, "read_network b");
  return MonotoneMap::network_game(std::move(a), std::move(b), std::move(meta));
}

/// Pool serialization: entry count, then each network followed by its
/// equilibrium on one line.
inline void write_pool(std::ostream& os, const VIPool& pool) {
  os << pool.entries.size() << "\n";
  for (const VIPoolEntry& e : pool.entries) {
    write_network(os, e.map);
    detail::write_doubles(os, e.x_star.data(), e.x_star.size());
  }
}

/// Reads a pool and re-verifies every stored equilibrium against the given
/// domain and solver settings (residual within twice the solve tolerance);
/// a stale or corrupted equilibrium is an error, not a warning.
inline VIPool read_pool(std::istream& is, const Domain& domain, const SolverConfig& solver = {}) {
  long count = 0;
  if (!(is >> count)) throw std::runtime_error("read_pool: missing entry count");
  if (count < 1 || count > 1000000) throw std::runtime_error("read_pool: implausible entry count");
  VIPool pool{{}, domain, 0};
  pool.entries.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    MonotoneMap map = read_network(is);
    require_dim(domain.dim(), map.dim(), "read_pool entry");
    Vector x(domain.dim());
    for (Index j = 0; j < x.size(); ++j) x[j] = detail::read_double(is, "read_pool equilibrium");
    double gamma = solver.gamma > 0.0
                       ? solver.gamma
                       : 0.5 / std::max(lipschitz_bound(map, domain), 1e-12);
    double res = vi_residual(map, domain, x, gamma);
    if (res > 2.0 * solver.tol)
      throw std::runtime_error("read_pool: entry " + std::to_string(i) +
                               " fails equilibrium re-verification (residual " +
                               std::to_string(res) + ")");
    pool.entries.push_back(VIPoolEntry{std::move(map), std::move(x)});
  }
  return pool;
}

}  // namespace omo
