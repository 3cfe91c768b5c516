#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace omo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a configuration file fails to parse or validate.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver exhausts its budget. Carries the best
/// iterate seen so callers can report how close the run got.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, Vector best_iterate, double residual, long iterations)
      : std::runtime_error(what),
        best_iterate(std::move(best_iterate)),
        residual(residual),
        iterations(iterations) {}

  Vector best_iterate;
  double residual;
  long iterations;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

inline void require_dim(Index expected, Index got, const char* what) {
  if (expected != got)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " + std::to_string(got) + ")");
}

/// Largest singular value.
inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Smallest eigenvalue of the symmetric part (A + A^T)/2.
inline double min_symmetric_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace omo
