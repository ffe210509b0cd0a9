#pragma once

#include "cvsq/optimizer.hpp"
#include "cvsq/phase_space.hpp"

#include <Eigen/Dense>

// Entanglement criteria evaluated on covariance matrices.
//
// The central quantity for covariance gamma and partition P is
//
//   xi^2_g = 4 (g^T Omega^T gamma_P Omega g)(g^T gamma g) / (g^T g)^2
//
// with gamma_P = remove_correlations(gamma, P). States separable across P
// satisfy min_g xi^2_g >= 1, so a minimum below 1 witnesses entanglement
// between the blocks of P. The singleton partition detects any
// inseparability.

namespace cvsq {

struct SqueezingVerdict {
  double xi_squared;
  Eigen::VectorXd g_opt;  // unit norm, largest-magnitude component positive
  Partition partition;
  bool entangled;  // xi_squared < 1 - tol::verdict_margin
  double margin;   // 1 - xi_squared
  bool converged;
};

// A = Omega^T gamma_P Omega, B = gamma, packaged for the optimizer.
RayleighProductProblem squeezing_problem(const CovarianceMatrix& gamma,
                                         const Partition& partition);

// xi^2_g for one direction, no optimization. Scale invariant in g.
double xi_squared_at(const CovarianceMatrix& gamma, const Partition& partition,
                     const Eigen::VectorXd& g);

SqueezingVerdict xi_squared(const CovarianceMatrix& gamma,
                            const Partition& partition,
                            const OptimizerConfig& config = {});

// Separability bound for A = sum_i alpha_i x_i against B = sum_i beta_i p_i:
//
//   Var(A) Var(B) >= (sum_i |alpha_i beta_i|)^2 / 4.
//
// Stronger than the plain uncertainty product because the magnitudes sit
// inside the sum over modes.
BoundCheck modewise_product_bound(const CovarianceMatrix& gamma,
                                  const Eigen::VectorXd& alpha,
                                  const Eigen::VectorXd& beta);

// Two-direction form of the partitioned criterion: separable states obey
//
//   Var_P(M(h)) Var(M(g)) >= (h^T Omega g)^2 / 4
//
// where Var_P uses the correlation-removed matrix. Choosing h = Omega g
// makes the pair maximally non-commuting and turns violation into the
// xi^2_g < 1 test.
BoundCheck partitioned_variance_bound(const CovarianceMatrix& gamma,
                                      const Partition& partition,
                                      const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& g);

// Specialization to X_n = sum_i n_i x_i and P_m = sum_i m_i p_i. The
// correlation-removed variance is the momentum one; rhs = (n . m)^2 / 4.
BoundCheck multidim_xp_bound(const CovarianceMatrix& gamma,
                             const Eigen::VectorXd& n, const Eigen::VectorXd& m,
                             const Partition& partition);
BoundCheck multidim_xp_bound(const CovarianceMatrix& gamma,
                             const Eigen::VectorXd& n, const Eigen::VectorXd& m);

}  // namespace cvsq
