#include "cvsq/witness.hpp"

#include <stdexcept>

namespace cvsq {

namespace {

bool bound_violated(double lhs, double rhs) {
  return lhs < rhs - tol::bound_margin;
}

}  // namespace

RayleighProductProblem squeezing_problem(const CovarianceMatrix& gamma,
                                         const Partition& partition) {
  const Eigen::MatrixXd omega = symplectic_form(gamma.n_modes());
  const Eigen::MatrixXd removed = remove_correlations(gamma, partition).matrix();
  return RayleighProductProblem(omega.transpose() * removed * omega,
                                gamma.matrix());
}

double xi_squared_at(const CovarianceMatrix& gamma, const Partition& partition,
                     const Eigen::VectorXd& g) {
  return objective(squeezing_problem(gamma, partition), g);
}

SqueezingVerdict xi_squared(const CovarianceMatrix& gamma,
                            const Partition& partition,
                            const OptimizerConfig& config) {
  const OptimizationResult result =
      minimize(squeezing_problem(gamma, partition), config);
  return SqueezingVerdict{result.value,
                          result.g_opt,
                          partition,
                          result.value < 1.0 - tol::verdict_margin,
                          1.0 - result.value,
                          result.converged};
}

BoundCheck modewise_product_bound(const CovarianceMatrix& gamma,
                                  const Eigen::VectorXd& alpha,
                                  const Eigen::VectorXd& beta) {
  const int n = gamma.n_modes();
  if (alpha.size() != n || beta.size() != n) {
    throw std::invalid_argument("coefficient vectors need one entry per mode");
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    a[2 * i] = alpha[i];
    b[2 * i + 1] = beta[i];
  }
  BoundCheck check;
  check.lhs = quadratic_variance(gamma, a) * quadratic_variance(gamma, b);
  const double sum = alpha.cwiseProduct(beta).cwiseAbs().sum();
  check.rhs = sum * sum / 4.0;
  check.violated = bound_violated(check.lhs, check.rhs);
  return check;
}

BoundCheck partitioned_variance_bound(const CovarianceMatrix& gamma,
                                      const Partition& partition,
                                      const Eigen::VectorXd& h,
                                      const Eigen::VectorXd& g) {
  const CovarianceMatrix removed = remove_correlations(gamma, partition);
  BoundCheck check;
  check.lhs = quadratic_variance(removed, h) * quadratic_variance(gamma, g);
  const double c = commutator_form(h, g);
  check.rhs = c * c / 4.0;
  check.violated = bound_violated(check.lhs, check.rhs);
  return check;
}

BoundCheck multidim_xp_bound(const CovarianceMatrix& gamma,
                             const Eigen::VectorXd& n, const Eigen::VectorXd& m,
                             const Partition& partition) {
  const int modes = gamma.n_modes();
  if (n.size() != modes || m.size() != modes) {
    throw std::invalid_argument("coefficient vectors need one entry per mode");
  }
  Eigen::VectorXd h = Eigen::VectorXd::Zero(2 * modes);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * modes);
  for (int i = 0; i < modes; ++i) {
    h[2 * i + 1] = m[i];
    g[2 * i] = n[i];
  }
  return partitioned_variance_bound(gamma, partition, h, g);
}

BoundCheck multidim_xp_bound(const CovarianceMatrix& gamma,
                             const Eigen::VectorXd& n, const Eigen::VectorXd& m) {
  return multidim_xp_bound(gamma, n, m, Partition::singleton(gamma.n_modes()));
}

}  // namespace cvsq
