#include "cvsq/optimizer.hpp"

#include "cvsq/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cvsq {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(name) + " matrix is not square");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::symmetry) {
    throw std::invalid_argument(std::string(name) + " matrix is not symmetric");
  }
}

// Unit vector along v; falls back when v is numerically zero, which can
// happen when a reflected or shrunk vertex lands on the origin.
Eigen::VectorXd unit(const Eigen::VectorXd& v, const Eigen::VectorXd& fallback) {
  const double n = v.norm();
  if (n < 1e-14) return fallback;
  return v / n;
}

void canonicalize_sign(Eigen::VectorXd& g) {
  int lead = 0;
  g.cwiseAbs().maxCoeff(&lead);
  if (g[lead] < 0) g = -g;
}

// Strict weak order on component magnitudes, used only to break exact value
// ties between starts so the multi-start result is order-independent.
bool abs_lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    const double da = std::abs(a[i]);
    const double db = std::abs(b[i]);
    if (da != db) return da < db;
  }
  return false;
}

}  // namespace

RayleighProductProblem::RayleighProductProblem(Eigen::MatrixXd a, Eigen::MatrixXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  require_symmetric(a_, "first");
  require_symmetric(b_, "second");
  if (a_.rows() != b_.rows()) {
    throw std::invalid_argument("matrix sizes disagree");
  }
  a_ = ((a_ + a_.transpose()) / 2).eval();
  b_ = ((b_ + b_.transpose()) / 2).eval();
}

double objective(const RayleighProductProblem& problem, const Eigen::VectorXd& g) {
  const double q = g.squaredNorm();
  if (q == 0.0) throw std::invalid_argument("objective is undefined at g = 0");
  const double alpha = g.dot(problem.a() * g);
  const double beta = g.dot(problem.b() * g);
  return 4.0 * alpha * beta / (q * q);
}

Eigen::VectorXd objective_gradient(const RayleighProductProblem& problem,
                                   const Eigen::VectorXd& g) {
  const double q = g.squaredNorm();
  if (q == 0.0) throw std::invalid_argument("gradient is undefined at g = 0");
  const Eigen::VectorXd ag = problem.a() * g;
  const Eigen::VectorXd bg = problem.b() * g;
  const double alpha = g.dot(ag);
  const double beta = g.dot(bg);
  return 8.0 * (beta * ag + alpha * bg) / (q * q) -
         16.0 * alpha * beta / (q * q * q) * g;
}

OptimizationResult minimize_from(const RayleighProductProblem& problem,
                                 const Eigen::VectorXd& start,
                                 const OptimizerConfig& config,
                                 double initial_step) {
  const int n = problem.dim();
  if (start.size() != n) throw std::invalid_argument("start has wrong dimension");
  if (start.norm() < 1e-14) throw std::invalid_argument("start is numerically zero");

  std::vector<Eigen::VectorXd> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(start.normalized());
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = simplex[0];
    v[i] += initial_step;
    simplex.push_back(unit(v, simplex[0]));
  }

  std::vector<double> values(n + 1);
  for (int i = 0; i <= n; ++i) values[i] = objective(problem, simplex[i]);

  std::vector<int> order(n + 1);
  bool converged = false;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return values[i] < values[j]; });
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1];

    if (values[worst] - values[best] <= config.spread_tolerance) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= n;

    const Eigen::VectorXd direction = centroid - simplex[worst];
    const Eigen::VectorXd reflected = unit(centroid + direction, simplex[best]);
    const double f_reflected = objective(problem, reflected);

    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded =
          unit(centroid + 2.0 * direction, simplex[best]);
      const double f_expanded = objective(problem, expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        unit(centroid + (outside ? 0.5 : -0.5) * direction, simplex[best]);
    const double f_contracted = objective(problem, contracted);
    const double bar = outside ? f_reflected : values[worst];
    if (f_contracted < bar) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = unit(simplex[best] + 0.5 * (simplex[i] - simplex[best]),
                        simplex[best]);
      values[i] = objective(problem, simplex[i]);
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (values[i] < values[best]) best = i;
  }

  OptimizationResult result;
  result.g_opt = simplex[best];
  result.value = values[best];
  result.n_starts_used = 1;
  result.converged = converged;
  return result;
}

OptimizationResult minimize(const RayleighProductProblem& problem,
                            const OptimizerConfig& config) {
  const int n = problem.dim();

  std::vector<Eigen::VectorXd> starts;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_b(problem.b());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_a(problem.a());
  for (int i = 0; i < n; ++i) starts.push_back(eig_b.eigenvectors().col(i));
  for (int i = 0; i < n; ++i) starts.push_back(eig_a.eigenvectors().col(i));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < config.random_starts; ++k) {
    Eigen::VectorXd v(n);
    do {
      for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    } while (v.norm() < 1e-14);
    starts.push_back(v.normalized());
  }

  // Exact ties between starts are broken toward the magnitude-lexicographic
  // smallest optimum, so reordering the start list cannot change the answer.
  constexpr double tie = 1e-15;
  OptimizationResult best;
  bool have_best = false;
  for (const Eigen::VectorXd& start : starts) {
    OptimizationResult run = minimize_from(problem, start, config);
    if (!have_best || run.value < best.value - tie ||
        (std::abs(run.value - best.value) <= tie &&
         abs_lex_less(run.g_opt, best.g_opt))) {
      best = std::move(run);
      have_best = true;
    }
  }

  OptimizationResult polished = minimize_from(problem, best.g_opt, config, 0.01);
  if (polished.value < best.value - tie ||
      (std::abs(polished.value - best.value) <= tie &&
       abs_lex_less(polished.g_opt, best.g_opt))) {
    best = std::move(polished);
  }

  best.n_starts_used = static_cast<int>(starts.size());
  canonicalize_sign(best.g_opt);
  return best;
}

}  // namespace cvsq
