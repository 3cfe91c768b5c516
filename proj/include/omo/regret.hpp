#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "omo/core.hpp"
#include "omo/equilibrium.hpp"
#include "omo/integral.hpp"

namespace omo {

/// Instantaneous regret against the comparator u along the direct path from
/// u to the prediction: the work the round's field does on that segment.
/// Nonnegative in expectation against equilibria of monotone fields; can dip
/// negative on single rounds.
inline double regret_new_instant(const MonotoneMap& map, const Vector& x_t, const Vector& u,
                                 const QuadratureRule& rule) {
  return line_integral(map, u, x_t, rule);
}

/// Classical loss-difference regret f_t(x_t) - f_t(u) under the round's
/// path-integral loss. Reference value and anchor cancel in the difference
/// only for conservative fields; for rotational fields the two regret
/// notions genuinely differ.
inline double regret_std_instant(const LossSpec& spec, const Vector& x_t, const Vector& u,
                                 const QuadratureRule& rule) {
  return omo_loss(spec, x_t, rule) - omo_loss(spec, u, rule);
}

/// One played round. loss_inf is the round loss at the prediction minus the
/// round loss at the round's own equilibrium: the instantaneous-optimality
/// gap the adversary tries to maximize.
struct RoundRecord {
  long t = 0;
  double regret_n = 0.0;
  double regret_s = 0.0;
  double loss_inf = 0.0;
  Vector x_t;
  Vector x_star_t;
};

/// Append-only per-round log with running sums. Rounds must arrive in order
/// (t = 1, 2, ...); the CSV emitted by write_csv is the plotting contract:
///   t,regret_n,regret_s,loss_inf,cum_regret_n,avg_regret_n
/// with doubles printed at %.17g so files round-trip and identical runs are
/// byte-identical.
class RegretTrace {
 public:
  explicit RegretTrace(Vector u) : u_(std::move(u)) {
    require_finite(u_, "regret trace comparator");
  }

  const Vector& comparator() const { return u_; }
  const std::vector<RoundRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  long rounds() const { return static_cast<long>(records_.size()); }

  void append(RoundRecord rec) {
    const long expected = rounds() + 1;
    if (rec.t != expected)
      throw std::invalid_argument("regret trace: out-of-order round " + std::to_string(rec.t) +
                                  " (expected " + std::to_string(expected) + ")");
    require(std::isfinite(rec.regret_n) && std::isfinite(rec.regret_s) &&
                std::isfinite(rec.loss_inf),
            "regret trace: non-finite round values");
    cum_n_ += rec.regret_n;
    cum_s_ += rec.regret_s;
    cum_inf_ += rec.loss_inf;
    cum_n_series_.push_back(cum_n_);
    records_.push_back(std::move(rec));
  }

  double cum_regret_n() const { return cum_n_; }
  double cum_regret_s() const { return cum_s_; }
  double cum_loss_inf() const { return cum_inf_; }

  /// Cumulative new-notion regret after round index i (0-based).
  double cum_regret_n_at(std::size_t i) const { return cum_n_series_.at(i); }

  double avg_regret_n() const {
    return records_.empty() ? 0.0 : cum_n_ / static_cast<double>(records_.size());
  }

  /// Average over the first k rounds (k clamped to the trace length).
  double avg_regret_n_first(std::size_t k) const {
    if (records_.empty() || k == 0) return 0.0;
    std::size_t idx = std::min(k, records_.size()) - 1;
    return cum_n_series_[idx] / static_cast<double>(idx + 1);
  }

  void write_csv(std::ostream& os) const {
    os << "t,regret_n,regret_s,loss_inf,cum_regret_n,avg_regret_n\n";
    char buf[256];
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const RoundRecord& r = records_[i];
      double cum = cum_n_series_[i];
      double avg = cum / static_cast<double>(i + 1);
      std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.regret_n,
                    r.regret_s, r.loss_inf, cum, avg);
      os << buf;
    }
  }

 private:
  Vector u_;
  std::vector<RoundRecord> records_;
  std::vector<double> cum_n_series_;
  double cum_n_ = 0.0;
  double cum_s_ = 0.0;
  double cum_inf_ = 0.0;
};

/// How the fixed comparator u is chosen from a sequence of rounds.
///   AverageEquilibrium  equilibrium of the pointwise-mean field (exact
///                       matrix averaging when every map is affine); the
///                       surrogate used by the adversarial experiments
///   ConservativeExact   minimizer of the summed path losses, found by
///                       projected descent on the summed field; requires
///                       every map to be conservative
enum class ComparatorMode { AverageEquilibrium, ConservativeExact };

inline Vector approximate_comparator(std::span<const MonotoneMap> maps,
                                     std::span<const Vector> anchors, const Domain& domain,
                                     ComparatorMode mode, const SolverConfig& solver = {}) {
  require(!maps.empty(), "approximate_comparator: empty map list");
  for (const MonotoneMap& m : maps) require_dim(domain.dim(), m.dim(), "approximate_comparator");
  // Anchors pin each round's loss offset, which cancels in both comparator
  // notions; they are validated and otherwise unused.
  for (const Vector& o : anchors) require_dim(domain.dim(), o.size(), "approximate_comparator anchor");
  const double n = static_cast<double>(maps.size());

  if (mode == ComparatorMode::AverageEquilibrium) {
    bool all_affine = true;
    for (const MonotoneMap& m : maps) all_affine = all_affine && m.is_affine();
    if (all_affine) {
      Matrix a_bar = Matrix::Zero(domain.dim(), domain.dim());
      Vector b_bar = Vector::Zero(domain.dim());
      for (const MonotoneMap& m : maps) {
        a_bar += m.linear_part();
        b_bar += m.offset();
      }
      a_bar /= n;
      b_bar /= n;
      // The mean of PSD-symmetric-part matrices keeps the property, so the
      // checked constructor is safe here.
      MonotoneMap mean = MonotoneMap::affine_psd(std::move(a_bar), std::move(b_bar));
      return extragradient_solve(mean, domain, solver);
    }
    auto mean_field = [&maps, n](const Vector& x) {
      Vector acc = Vector::Zero(x.size());
      for (const MonotoneMap& m : maps) acc += m(x);
      return Vector(acc / n);
    };
    double l = 0.0;
    for (const MonotoneMap& m : maps) l += lipschitz_bound(m, domain);
    return detail::extragradient_generic(mean_field, domain, l / n, solver,
                                         "mean-field extragradient");
  }

  for (const MonotoneMap& m : maps)
    require(m.conservative_analytic(),
            "approximate_comparator: exact mode requires conservative maps");
  // Projected descent on the summed potential; the summed field is its
  // gradient and sum of spectral norms bounds its curvature.
  double l_sum = 0.0;
  for (const MonotoneMap& m : maps) l_sum += lipschitz_bound(m, domain);
  SolverConfig descent = solver;
  if (descent.gamma <= 0.0) descent.gamma = 0.9 / std::max(l_sum, 1e-12);
  auto sum_field = [&maps](const Vector& x) {
    Vector acc = Vector::Zero(x.size());
    for (const MonotoneMap& m : maps) acc += m(x);
    return acc;
  };
  Vector u = domain.center_point();
  Vector best = u;
  double best_res = std::numeric_limits<double>::infinity();
  for (long it = 0; it < descent.max_iter; ++it) {
    Vector next = domain.project(u - descent.gamma * sum_field(u));
    double res = (next - u).norm();
    if (res < best_res) {
      best_res = res;
      best = next;
    }
    u = std::move(next);
    if (res <= descent.tol) return u;
  }
  throw SolverError("comparator descent: no convergence within " +
                        std::to_string(descent.max_iter) + " iterations (best residual " +
                        std::to_string(best_res) + ")",
                    std::move(best), best_res, descent.max_iter);
}

/// Computes both regret notions plus the instantaneous-optimality gap for
/// round t and appends them to the trace. spec_t must carry the same map the
/// adversary played.
inline void record_round(RegretTrace& trace, long t, const MonotoneMap& map_t,
                         const LossSpec& spec_t, const Vector& x_t, const Vector& x_star_t,
                         const QuadratureRule& rule) {
  RoundRecord rec;
  rec.t = t;
  rec.regret_n = regret_new_instant(map_t, x_t, trace.comparator(), rule);
  rec.regret_s = regret_std_instant(spec_t, x_t, trace.comparator(), rule);
  rec.loss_inf = omo_loss(spec_t, x_t, rule) - omo_loss(spec_t, x_star_t, rule);
  rec.x_t = x_t;
  rec.x_star_t = x_star_t;
  trace.append(std::move(rec));
}

}  // namespace omo
