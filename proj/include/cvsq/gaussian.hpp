#pragma once

#include "cvsq/phase_space.hpp"

#include <string>
#include <vector>

// Covariance matrices of named Gaussian state families and of circuits built
// from squeezers and beam splitters.

namespace cvsq {

// Heisenberg action on quadratures (fixed by requiring the compiled
// three-mode circuit to reproduce the closed-form covariance):
//   squeezer(i, r):             x_i -> e^r x_i,  p_i -> e^-r p_i
//   two_mode_squeezer(i, j, r): x_i -> x_i ch + x_j sh, p_i -> p_i ch - p_j sh
//                               (and symmetrically for j), ch = cosh r, sh = sinh r
//   beam_splitter(i, j, th):    a_i -> a_i cos th - a_j sin th,
//                               a_j -> a_i sin th + a_j cos th
struct GaussianGate {
  enum class Kind { squeezer, two_mode_squeezer, beam_splitter };
  Kind kind = Kind::squeezer;
  int mode_a = 0;
  int mode_b = -1;     // unused for single-mode gates
  double param = 0.0;  // r or theta

  static GaussianGate squeezer(int mode, double r);
  static GaussianGate two_mode_squeezer(int mode_a, int mode_b, double r);
  static GaussianGate beam_splitter(int mode_a, int mode_b, double theta);
};

struct SymplecticCircuit {
  int n_modes = 0;
  std::vector<GaussianGate> gates;  // applied in listed (time) order
};

// S = S_k ... S_2 S_1 for k listed gates; satisfies S Omega S^T = Omega.
Eigen::MatrixXd compile_symplectic(const SymplecticCircuit& circuit);

// (1/2) I_{2N}.
CovarianceMatrix vacuum_covariance(int n_modes);

// gamma -> S gamma S^T (and mean -> S mean).
CovarianceMatrix evolve_covariance(const CovarianceMatrix& gamma,
                                   const SymplecticCircuit& circuit);

// Closed-form covariances, written out directly rather than via circuit
// compilation so the two paths cross-check each other.
//   "tms2":   two-mode squeezed vacuum, entries cosh/sinh(2r) over 2
//   "tms3":   symmetric three-mode squeezed state
//   "vacuum": (1/2) I, n_modes required
CovarianceMatrix named_state(const std::string& family, double r, int n_modes = 0);

// The standard preparations behind the named families.
SymplecticCircuit two_mode_circuit(double r);
// S_1[-r], S_2[r], S_3[r], B_12[arccos(1/sqrt 3)], B_23[pi/4].
SymplecticCircuit three_mode_circuit(double r);

}  // namespace cvsq
