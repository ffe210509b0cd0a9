#pragma once

#include <Eigen/Dense>

#include <cstdint>

// Minimization of the scale-invariant quotient
//
//   f(g) = 4 (g^T A g)(g^T B g) / (g^T g)^2
//
// over nonzero g, for symmetric A and B. f is invariant under g -> c g, so
// the search lives on the unit sphere.

namespace cvsq {

class RayleighProductProblem {
 public:
  // Both matrices must be square, of equal size, and symmetric.
  RayleighProductProblem(Eigen::MatrixXd a, Eigen::MatrixXd b);

  int dim() const { return static_cast<int>(a_.rows()); }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
};

double objective(const RayleighProductProblem& problem, const Eigen::VectorXd& g);

Eigen::VectorXd objective_gradient(const RayleighProductProblem& problem,
                                   const Eigen::VectorXd& g);

struct OptimizerConfig {
  std::uint64_t seed = 42;
  int random_starts = 16;
  // termination: max - min objective value across the simplex
  double spread_tolerance = 1e-12;
  int max_iterations = 10000;
};

struct OptimizationResult {
  Eigen::VectorXd g_opt;  // unit norm
  double value = 0.0;
  int n_starts_used = 0;
  bool converged = false;
};

// Nelder-Mead restricted to the sphere: every trial point is renormalized
// before evaluation, which blocks radial collapse of the simplex along the
// objective's scale invariance.
OptimizationResult minimize_from(const RayleighProductProblem& problem,
                                 const Eigen::VectorXd& start,
                                 const OptimizerConfig& config = {},
                                 double initial_step = 0.05);

// Multi-start search: the eigenvectors of B, the eigenvectors of A, then
// config.random_starts seeded random directions, then a polish run from the
// incumbent. Deterministic for a fixed config; the returned g_opt has its
// largest-magnitude component positive.
OptimizationResult minimize(const RayleighProductProblem& problem,
                            const OptimizerConfig& config = {});

}  // namespace cvsq
