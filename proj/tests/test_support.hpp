#pragma once

#include "cvsq/gaussian.hpp"
#include "cvsq/phase_space.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

// Generators for property tests. Everything draws from a caller-provided
// engine so a failure reproduces from its seed.

namespace test_support {

inline Eigen::VectorXd random_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

// Block-diagonal covariance of independent modes, each a rotated squeezed
// thermal state: nu R(phi) diag(e^{2r}, e^{-2r}) R(phi)^T with nu >= 1/2.
inline cvsq::CovarianceMatrix random_product_covariance(std::mt19937_64& rng,
                                                        int n_modes) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> squeeze(-0.9, 0.9);
  std::uniform_real_distribution<double> thermal(0.0, 1.0);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    const double phi = phase(rng);
    const double r = squeeze(rng);
    const double nu = 0.5 + thermal(rng);
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const Eigen::Vector2d diag(nu * std::exp(2.0 * r), nu * std::exp(-2.0 * r));
    gamma.block<2, 2>(2 * m, 2 * m) = rot * diag.asDiagonal() * rot.transpose();
  }
  return cvsq::CovarianceMatrix(gamma);
}

inline cvsq::SymplecticCircuit random_circuit(std::mt19937_64& rng, int n_modes) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> squeeze(-0.8, 0.8);
  std::uniform_int_distribution<int> pick(0, n_modes - 1);
  cvsq::SymplecticCircuit circuit;
  circuit.n_modes = n_modes;
  for (int layer = 0; layer < 2; ++layer) {
    for (int m = 0; m < n_modes; ++m) {
      circuit.gates.push_back(cvsq::GaussianGate::squeezer(m, squeeze(rng)));
    }
    for (int m = 0; m + 1 < n_modes; ++m) {
      circuit.gates.push_back(
          cvsq::GaussianGate::beam_splitter(m, m + 1, phase(rng)));
    }
    if (n_modes >= 2) {
      const int a = pick(rng);
      const int b = pick(rng);
      if (a != b) {
        circuit.gates.push_back(
            cvsq::GaussianGate::two_mode_squeezer(a, b, 0.5 * squeeze(rng)));
      }
    }
  }
  return circuit;
}

// Random circuit applied to a thermal (or vacuum) diagonal input; physical
// by construction.
inline cvsq::CovarianceMatrix random_physical_covariance(std::mt19937_64& rng,
                                                         int n_modes,
                                                         bool pure = false) {
  std::uniform_real_distribution<double> thermal(0.0, 0.8);
  Eigen::VectorXd input(2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    const double nu = pure ? 0.5 : 0.5 + thermal(rng);
    input[2 * m] = nu;
    input[2 * m + 1] = nu;
  }
  const Eigen::MatrixXd s =
      cvsq::compile_symplectic(random_circuit(rng, n_modes));
  const Eigen::MatrixXd gamma = s * input.asDiagonal() * s.transpose();
  return cvsq::CovarianceMatrix(0.5 * (gamma + gamma.transpose()));
}

}  // namespace test_support
