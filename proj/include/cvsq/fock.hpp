#pragma once

#include "cvsq/phase_space.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Truncated Fock-space engine for the non-Gaussian criteria: state
// preparation by exponentiating sparse generators, expectation values of
// arbitrary Hermitian observables, the correlation-removal map as a tensor
// product of reduced density matrices, and the coefficients built from them.
//
// Truncation convention: an operator product is the product of the truncated
// factors, so squares are squares of the truncated matrix. Everything that
// feeds a reported number is guarded twice: per-state leakage into the top
// fock_guard levels of any mode, and a cutoff d vs d+4 drift check on the
// final quantity.

namespace cvsq {

// Criterion denominator vanishes; no verdict can be extracted.
struct inapplicable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int fock_guard = 2;
inline constexpr std::size_t default_memory_budget = std::size_t(2) << 30;

// Tensor product of n_modes single-mode spaces, each truncated to Fock
// levels 0..cutoff-1. The basis index runs with mode 0 most significant:
// index = n_1 d^{N-1} + ... + n_N.
class FockSpace {
 public:
  FockSpace(int n_modes, int cutoff,
            std::size_t memory_budget = default_memory_budget);

  // Whether six dense complex dim^2 work matrices fit the budget, the
  // worst-case footprint of a coefficient evaluation.
  static bool fits(int n_modes, int cutoff,
                   std::size_t memory_budget = default_memory_budget);

  int n_modes() const { return n_modes_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return dim_; }

  Eigen::Index index_of(const std::vector<int>& occupations) const;
  std::vector<int> occupations_of(Eigen::Index index) const;

  // Single-mode cutoff x cutoff factors.
  Eigen::MatrixXcd single_mode_annihilation() const;
  Eigen::MatrixXcd single_mode_position() const;
  Eigen::MatrixXcd single_mode_momentum() const;

  // Tensor product with identities on every other mode.
  Eigen::MatrixXcd embed(const Eigen::MatrixXcd& local, int mode) const;
  Eigen::MatrixXcd annihilation(int mode) const;
  Eigen::MatrixXcd position(int mode) const;
  Eigen::MatrixXcd momentum(int mode) const;

  friend bool operator==(const FockSpace& a, const FockSpace& b) {
    return a.n_modes_ == b.n_modes_ && a.cutoff_ == b.cutoff_;
  }

 private:
  int n_modes_ = 0;
  int cutoff_ = 0;
  Eigen::Index dim_ = 0;
};

// A state is either an ensemble sum_k w_k |psi_k><psi_k| (the cheap path:
// every expectation reduces to matrix-vector work) or a dense density
// matrix (general mixed states, e.g. partial_trace_product output).
class FockState {
 public:
  // Amplitude vector normalized within 1e-10, then renormalized exactly.
  static FockState pure(FockSpace space, Eigen::VectorXcd amplitudes);
  static FockState basis(FockSpace space, const std::vector<int>& occupations);
  // Positive weights summing to 1 within 1e-10; zero weights are dropped.
  static FockState mixture(FockSpace space, std::vector<double> weights,
                           std::vector<Eigen::VectorXcd> members);
  // Hermitian within 1e-10, trace 1 within 1e-10, eigenvalues >= -tol::psd.
  static FockState density(FockSpace space, Eigen::MatrixXcd rho);

  const FockSpace& space() const { return space_; }
  bool has_ensemble() const { return !members_.empty(); }
  bool is_pure() const { return members_.size() == 1; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXcd>& members() const { return members_; }
  Eigen::MatrixXcd density_matrix() const;

  // Total population on basis states where any mode occupies one of its top
  // fock_guard levels. High leakage means the truncation clipped the state.
  double leakage() const { return leakage_; }
  bool converged() const { return leakage_ <= tol::leakage; }
  double purity() const;

 private:
  explicit FockState(FockSpace space) : space_(std::move(space)) {}

  FockSpace space_;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXcd> members_;
  Eigen::MatrixXcd rho_;  // used only when members_ is empty
  double leakage_ = 0.0;
};

struct ObservableMatrix {
  Eigen::MatrixXcd matrix;  // Hermitian, full-space
  std::string label;
};

// Hermitian operator on a single mode, kept in the cutoff x cutoff factor.
struct LocalObservable {
  int mode;
  Eigen::MatrixXcd op;
};

// exp(generator) v by scaled truncated Taylor series: the generator is split
// into 2^s segments with s chosen from its Frobenius norm, and each segment
// sums terms until they fall below 1e-16 of the accumulated norm.
Eigen::VectorXcd apply_exponential(
    const Eigen::SparseMatrix<std::complex<double>>& generator,
    const Eigen::VectorXcd& v);

// exp(G)|0,0> with G = (r/2)(a1^dag^2 a2^dag^2 - a1^2 a2^2). Supported on
// the |2k,2k> pairs only.
FockState prepare_fourth_order_state(const FockSpace& space, double r);

// exp(r(a1^dag a2^dag - a1 a2))|0,0>.
FockState prepare_two_mode_squeezed(const FockSpace& space, double r);

// (|psi><psi| + s |0...0><0...0|) / (1 + s) for s >= 0.
FockState mix_with_vacuum(const FockState& psi, double s);

// D(mu) = mu1 (a1^2 + a1^dag^2) + mu2 i (a1^dag^2 - a1^2)
//       + mu3 (a2^2 + a2^dag^2) + mu4 i (a2^dag^2 - a2^2); two modes only.
ObservableMatrix nonlinear_observable(const FockSpace& space,
                                      const Eigen::Vector4d& mu);
// The same operator split into its per-mode terms.
std::vector<LocalObservable> nonlinear_locals(const FockSpace& space,
                                              const Eigen::Vector4d& mu);

// Per-mode g_{2m} x_m + g_{2m+1} p_m for a phase-space direction g.
std::vector<LocalObservable> quadrature_locals(const FockSpace& space,
                                               const Eigen::VectorXd& g);

// Full-space sum of embedded locals.
ObservableMatrix combine_locals(const FockSpace& space,
                                const std::vector<LocalObservable>& locals,
                                std::string label);

double expectation(const FockState& state, const Eigen::MatrixXcd& observable);
double variance(const FockState& state, const Eigen::MatrixXcd& observable);
std::complex<double> commutator_expectation(const FockState& state,
                                            const Eigen::MatrixXcd& a,
                                            const Eigen::MatrixXcd& b);

// Reduced density matrix on the given modes (ascending slot order).
Eigen::MatrixXcd reduced_density(const FockState& state,
                                 const std::vector<int>& block);

// The correlation-removal map: tensor product of the reduced density
// matrices over the partition blocks, on the original mode ordering.
FockState partial_trace_product(const FockState& state,
                                const Partition& partition);

// 4 Var(A)_{P(rho)} Var(B)_rho / |<[A,B]>_rho|^2 for A = sum of locals.
// The removed-correlation variance is assembled block by block from reduced
// density matrices; the full product state is never materialized.
double general_xi_squared(const FockState& state,
                          const std::vector<LocalObservable>& a_locals,
                          const ObservableMatrix& b, const Partition& partition);

// general_xi_squared specialized to A = D(nu), B = D(mu), singleton
// partition. Below 1 witnesses inseparability.
double chi_coefficient(const FockState& state, const Eigen::Vector4d& mu,
                       const Eigen::Vector4d& nu);

// Separability bound with per-mode commutators inside the sum:
//   Var(sum alpha_i A_i) Var(sum beta_i B_i) >=
//   (sum_i |alpha_i beta_i <[A_i,B_i]>|)^2 / 4.
// Both lists need exactly one local per mode.
BoundCheck modewise_product_bound(const FockState& state,
                                  const std::vector<LocalObservable>& a_locals,
                                  const std::vector<LocalObservable>& b_locals,
                                  const Eigen::VectorXd& alpha,
                                  const Eigen::VectorXd& beta);

// Var(A)_psi / Var(A)_{P(psi)} for a pure state; above 1 witnesses
// inseparability across the partition.
double fisher_density_pure(const FockState& state,
                           const std::vector<LocalObservable>& a_locals,
                           const Partition& partition);

// Max absolute deviation of the first and second quadrature moments of the
// state from the given covariance data (absent mean compared against zero).
double gaussian_crosscheck(const FockState& state,
                           const CovarianceMatrix& expected);

struct ChiPoint {
  double r = 0.0;
  double s = 0.0;
  double chi = 0.0;  // NaN when not applicable or never evaluated
  bool converged = false;
  bool applicable = true;
  int cutoff_used = 0;  // 0 when the budget blocked every evaluation
};

// chi at (r, s) with automatic cutoff escalation: evaluate at d and d+4,
// accept when the drift is below tol::convergence_delta and both states kept
// their leakage in check, otherwise double d while the budget allows. The
// reported value is the d+4 one; cutoff_used records d.
ChiPoint chi_converged(double r, double s, const Eigen::Vector4d& mu,
                       const Eigen::Vector4d& nu, int initial_cutoff = 20,
                       std::size_t memory_budget = default_memory_budget);

}  // namespace cvsq
