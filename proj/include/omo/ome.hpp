#pragma once

#include <utility>
#include <vector>

#include "omo/equilibrium.hpp"
#include "omo/integral.hpp"
#include "omo/learners.hpp"
#include "omo/regret.hpp"

namespace omo {

/// Learner selection for an adversarial run. eta <= 0 means "tune from the
/// domain radius, the pool's Lipschitz bound and the horizon".
struct LearnerConfig {
  Algo algo = Algo::OMoMD;
  double eta = 0.0;
  RegularizerKind regularizer = RegularizerKind::EuclideanHalfSq;
};

struct OmeResult {
  RegretTrace trace;
  Vector comparator;
  double eta = 0.0;
  double lipschitz = 0.0;
  double radius = 0.0;
  /// A-priori worst-case regret at the tuned step size, B L sqrt(2 T).
  double theoretical_bound = 0.0;
  /// Post-hoc certificate from the regularizer telescoping argument,
  /// evaluated at the comparator with the fields actually observed.
  double certificate = 0.0;
};

/// Adversarial equilibration protocol: each round the adversary plays the
/// pooled game whose equilibrium is farthest from the learner's prediction,
/// anchors the round loss at that equilibrium (reference value 0), and the
/// learner updates on the field observed at its prediction. The fixed
/// comparator is the equilibrium of the averaged pool.
inline OmeResult run_ome(const VIPool& pool, const LearnerConfig& lc, long horizon,
                         const QuadratureRule& rule, const SolverConfig& sc = {}) {
  require(horizon >= 1, "run_ome: horizon must be at least 1");
  require(!pool.entries.empty(), "run_ome: pool is empty");

  std::vector<MonotoneMap> maps;
  std::vector<Vector> anchors;
  maps.reserve(pool.entries.size());
  anchors.reserve(pool.entries.size());
  for (const VIPoolEntry& e : pool.entries) {
    maps.push_back(e.map);
    anchors.push_back(e.x_star);
  }

  OmeResult out{RegretTrace(approximate_comparator(maps, anchors, pool.domain,
                                                   ComparatorMode::AverageEquilibrium, sc)),
                Vector(), 0.0, 0.0, 0.0, 0.0, 0.0};
  out.comparator = out.trace.comparator();
  for (const MonotoneMap& m : maps)
    out.lipschitz = std::max(out.lipschitz, lipschitz_bound(m, pool.domain));
  out.radius = 0.5 * pool.domain.diameter();
  const double l_safe = std::max(out.lipschitz, 1e-12);
  out.eta = lc.eta > 0.0 ? lc.eta : tuned_eta(out.radius, l_safe, horizon);
  out.theoretical_bound = ogd_theoretical_bound(out.radius, l_safe, horizon);

  const Regularizer reg = Regularizer::make(lc.regularizer, 1.0 / out.eta);
  LearnerState state = lc.algo == Algo::OMoD ? omod_init(pool.domain, out.eta)
                                             : omomd_init(pool.domain, reg);
  std::vector<double> field_norms;
  field_norms.reserve(static_cast<std::size_t>(horizon));

  for (long t = 1; t <= horizon; ++t) {
    const Vector x_t = state.primal;
    const AdversaryPick pick = ome_adversary(pool, x_t);
    const VIPoolEntry& e = pool.entries[pick.index];
    const LossSpec spec{e.map, e.x_star, 0.0};
    record_round(out.trace, t, e.map, spec, x_t, e.x_star, rule);
    Vector z = e.map(x_t);
    field_norms.push_back(z.norm());
    state = lc.algo == Algo::OMoD ? omod_step(state, z, pool.domain)
                                  : omomd_step(state, z, reg, pool.domain);
  }

  out.certificate = regret_bound(reg, out.comparator, pool.domain, field_norms);
  return out;
}

}  // namespace omo
