#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core phase-space algebra for N bosonic modes.
//
// Conventions (fixed throughout): hbar = 1, x = (a + a^dag)/sqrt(2),
// p = i(a^dag - a)/sqrt(2), vacuum variance 1/2 per quadrature, components
// interleaved as r = (x_1, p_1, ..., x_N, p_N). Mode indices are 0-based in
// code; file formats and the CLI use 1-based indices.

namespace cvsq {

namespace tol {
// absolute, on max |gamma - gamma^T| entry; inputs within it are symmetrized
inline constexpr double symmetry = 1e-10;
// on the minimum eigenvalue, both for PSD and for gamma + (i/2) Omega
inline constexpr double psd = 1e-9;
// an "entangled" verdict requires xi^2 < 1 - verdict_margin
inline constexpr double verdict_margin = 1e-9;
// strict-inequality slack for bound-violation verdicts
inline constexpr double bound_margin = 1e-12;
// below these, criteria are inapplicable instead of unstable ratios
inline constexpr double commutator_floor = 1e-12;
inline constexpr double variance_floor = 1e-12;
// Fock-state population allowed in the top guard levels of each mode
inline constexpr double leakage = 1e-8;
// expectation drift allowed between cutoff d and d+4 for a converged result
inline constexpr double convergence_delta = 1e-6;
}  // namespace tol

// Structurally valid input whose numeric content fails validation.
struct invalid_data : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Result of a separability-bound evaluation: violation witnesses entanglement.
struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;  // lhs < rhs - tol::bound_margin
};

// 2N x 2N symplectic form, block diagonal with 2x2 blocks [[0,1],[-1,0]].
// Satisfies Omega^T = -Omega and Omega Omega = -I.
Eigen::MatrixXd symplectic_form(int n_modes);

// h^T Omega g. The collective quadratures obey [M(h), M(g)] = i (h^T Omega g).
double commutator_form(const Eigen::VectorXd& h, const Eigen::VectorXd& g);

// Disjoint non-empty blocks covering modes 0..N-1. Defines which inter-mode
// correlations the removal map keeps.
class Partition {
 public:
  Partition(int n_modes, std::vector<std::vector<int>> blocks);

  static Partition singleton(int n_modes);  // {{0},{1},...}
  static Partition trivial(int n_modes);    // {{0,...,N-1}}
  // Grammar: blocks separated by '|', 1-based mode indices separated by ','.
  // "1,2|3" over three modes keeps the 1-2 correlations only.
  static Partition parse(const std::string& text, int n_modes);

  int n_modes() const { return n_modes_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  bool same_block(int mode_a, int mode_b) const;
  bool is_singleton() const;
  bool is_trivial() const;
  std::string to_string() const;  // canonical 1-based grammar

 private:
  int n_modes_ = 0;
  std::vector<std::vector<int>> blocks_;  // sorted within, ordered by first element
  std::vector<int> block_of_;
};

// Symmetric PSD matrix of quadrature second moments.
class CovarianceMatrix {
 public:
  // Validates: square of even dimension >= 2, symmetric within tol::symmetry
  // (then symmetrized), eigenvalues >= -tol::psd. The optional mean holds
  // first moments and plays no role in the criteria.
  explicit CovarianceMatrix(Eigen::MatrixXd gamma,
                            std::optional<Eigen::VectorXd> mean = std::nullopt);

  int n_modes() const { return static_cast<int>(matrix_.rows()) / 2; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::optional<Eigen::VectorXd>& mean() const { return mean_; }

  // gamma + (i/2) Omega >= 0 within tol::psd: compatibility with an actual
  // quantum state. PSD-but-unphysical matrices are accepted by the
  // constructor; callers decide whether physicality is required.
  bool is_physical() const;
  double min_physicality_eigenvalue() const;

 private:
  Eigen::MatrixXd matrix_;
  std::optional<Eigen::VectorXd> mean_;
};

// Var(M(g)) = g^T gamma g.
double quadratic_variance(const CovarianceMatrix& gamma, const Eigen::VectorXd& g);

// Zeroes every 2x2 mode block that couples two modes from different partition
// blocks; intra-block entries are untouched. The singleton partition yields
// the fully correlation-removed matrix.
CovarianceMatrix remove_correlations(const CovarianceMatrix& gamma,
                                     const Partition& partition);

}  // namespace cvsq
