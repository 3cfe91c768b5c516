#pragma once

#include <cmath>
#include <span>
#include <variant>

#include "omo/core.hpp"
#include "omo/domain.hpp"

namespace omo {

enum class RegularizerKind { EuclideanHalfSq, NegativeEntropy };

inline const char* to_string(RegularizerKind k) {
  return k == RegularizerKind::EuclideanHalfSq ? "euclidean" : "entropy";
}

/// Strongly convex regularizer R with modulus `strength` (= 1/eta). The dual
/// step of the mirror learner is always unit-weighted; the learning rate
/// enters once, through the link map that turns accumulated duals back into
/// a feasible primal point:
///   euclidean  link(theta) = project(eta * theta)
///   entropy    link(theta) = softmax(eta * theta)   (simplex domains only)
/// This normalization is what makes the two learners below coincide while
/// the projection stays inactive.
class Regularizer {
 public:
  static Regularizer euclidean_half_sq(double strength) {
    require(std::isfinite(strength) && strength > 0.0,
            "regularizer: strength must be positive");
    return Regularizer(RegularizerKind::EuclideanHalfSq, strength);
  }

  static Regularizer negative_entropy(double strength) {
    require(std::isfinite(strength) && strength > 0.0,
            "regularizer: strength must be positive");
    return Regularizer(RegularizerKind::NegativeEntropy, strength);
  }

  static Regularizer make(RegularizerKind kind, double strength) {
    return kind == RegularizerKind::EuclideanHalfSq ? euclidean_half_sq(strength)
                                                    : negative_entropy(strength);
  }

  RegularizerKind kind() const { return kind_; }
  double strength() const { return strength_; }
  double eta() const { return 1.0 / strength_; }

  double value(const Vector& x) const {
    require_finite(x, "regularizer value");
    if (kind_ == RegularizerKind::EuclideanHalfSq) return strength_ * 0.5 * x.squaredNorm();
    require(x.minCoeff() >= 0.0, "negative entropy: point must be nonnegative");
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i)
      if (x[i] > 0.0) acc += x[i] * std::log(x[i]);
    return strength_ * acc;
  }

  /// Minimum of R over the domain, in closed form.
  double min_over(const Domain& domain) const {
    if (kind_ == RegularizerKind::EuclideanHalfSq)
      return value(domain.project(Vector::Zero(domain.dim())));
    require_simplex(domain);
    // Uniform distribution minimizes sum x log x at -log(n).
    return strength_ * -std::log(static_cast<double>(domain.dim()));
  }

  /// argmax over the domain of inner(x, theta) - R(x).
  Vector link(const Vector& theta, const Domain& domain) const {
    require_dim(domain.dim(), theta.size(), "link");
    require_finite(theta, "link dual");
    if (kind_ == RegularizerKind::EuclideanHalfSq) return domain.project(eta() * theta);
    require_simplex(domain);
    Vector scaled = eta() * theta;
    double m = scaled.maxCoeff();
    Vector e = (scaled.array() - m).exp();
    return e / e.sum();
  }

 private:
  Regularizer(RegularizerKind kind, double strength) : kind_(kind), strength_(strength) {}

  void require_simplex(const Domain& domain) const {
    require(std::holds_alternative<Simplex>(domain.shape()),
            "negative entropy pairs only with simplex domains");
  }

  RegularizerKind kind_;
  double strength_;
};

enum class Algo { OMoD, OMoMD };

inline const char* to_string(Algo a) { return a == Algo::OMoD ? "omod" : "omomd"; }

/// Learner state threaded through a run. `primal` is the current prediction;
/// `dual` accumulates observed fields (mirror learner only). States are
/// immutable values: every step returns a new one.
struct LearnerState {
  Algo algo = Algo::OMoD;
  Vector primal;
  Vector dual;
  double eta = 0.0;
  long step_count = 0;
};

/// Projected-step learner: x <- project(x - eta z).
inline LearnerState omod_init(const Domain& domain, double eta) {
  require(std::isfinite(eta) && eta > 0.0, "omod_init: eta must be positive");
  LearnerState s;
  s.algo = Algo::OMoD;
  s.primal = domain.project(Vector::Zero(domain.dim()));
  s.dual = Vector::Zero(domain.dim());
  s.eta = eta;
  return s;
}

inline LearnerState omod_step(const LearnerState& state, const Vector& z, const Domain& domain) {
  require(state.algo == Algo::OMoD, "omod_step: state belongs to the mirror learner");
  require_dim(domain.dim(), z.size(), "omod_step field");
  require_finite(z, "omod_step field");
  LearnerState next = state;
  next.primal = domain.project(state.primal - state.eta * z);
  next.step_count = state.step_count + 1;
  return next;
}

/// Mirror-descent learner: theta <- theta - z (unit dual step), then
/// primal = link(theta). With the euclidean regularizer and an inactive
/// projection this reproduces omod exactly; once constraints bind the two
/// differ (lazy versus greedy projection), which is expected.
inline LearnerState omomd_init(const Domain& domain, const Regularizer& reg) {
  LearnerState s;
  s.algo = Algo::OMoMD;
  s.dual = Vector::Zero(domain.dim());
  s.primal = reg.link(s.dual, domain);
  s.eta = reg.eta();
  return s;
}

inline LearnerState omomd_step(const LearnerState& state, const Vector& z, const Regularizer& reg,
                               const Domain& domain) {
  require(state.algo == Algo::OMoMD, "omomd_step: state belongs to the projected learner");
  require_dim(domain.dim(), z.size(), "omomd_step field");
  require_finite(z, "omomd_step field");
  require(std::abs(reg.eta() - state.eta) <= 1e-12 * std::max(1.0, state.eta),
          "omomd_step: regularizer strength changed mid-run");
  LearnerState next = state;
  next.dual = state.dual - z;
  next.primal = reg.link(next.dual, domain);
  next.step_count = state.step_count + 1;
  return next;
}

/// Post-hoc regret certificate for a comparator u: R(u) - min R over the
/// domain, plus eta times the sum of squared observed field norms. Valid for
/// any comparator in the domain; infeasible comparators are rejected.
inline double regret_bound(const Regularizer& reg, const Vector& u, const Domain& domain,
                           std::span<const double> field_norms) {
  require(domain.contains(u, 1e-9), "regret_bound: comparator is infeasible");
  double acc = 0.0;
  for (double n : field_norms) {
    require(std::isfinite(n) && n >= 0.0, "regret_bound: field norms must be nonnegative");
    acc += n * n;
  }
  return reg.value(u) - reg.min_over(domain) + reg.eta() * acc;
}

/// A-priori worst-case bound B L sqrt(2 T) for a domain of radius B and
/// fields bounded by L, at the tuned step size eta = B / (L sqrt(2 T)).
inline double ogd_theoretical_bound(double b, double l, long t) {
  require(b > 0.0 && l > 0.0, "ogd_theoretical_bound: B and L must be positive");
  require(t >= 1, "ogd_theoretical_bound: horizon must be at least 1");
  return b * l * std::sqrt(2.0 * static_cast<double>(t));
}

/// Tuned step size matching ogd_theoretical_bound.
inline double tuned_eta(double b, double l, long t) {
  require(b > 0.0 && l > 0.0, "tuned_eta: B and L must be positive");
  require(t >= 1, "tuned_eta: horizon must be at least 1");
  return b / (l * std::sqrt(2.0 * static_cast<double>(t)));
}

}  // namespace omo
