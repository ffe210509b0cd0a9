#include "cvsq/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace cvsq {

GaussianGate GaussianGate::squeezer(int mode, double r) {
  return {Kind::squeezer, mode, -1, r};
}

GaussianGate GaussianGate::two_mode_squeezer(int mode_a, int mode_b, double r) {
  return {Kind::two_mode_squeezer, mode_a, mode_b, r};
}

GaussianGate GaussianGate::beam_splitter(int mode_a, int mode_b, double theta) {
  return {Kind::beam_splitter, mode_a, mode_b, theta};
}

namespace {

void check_modes(const GaussianGate& gate, int n_modes) {
  const bool two_mode = gate.kind != GaussianGate::Kind::squeezer;
  if (gate.mode_a < 0 || gate.mode_a >= n_modes)
    throw std::invalid_argument("gate mode index out of range");
  if (two_mode) {
    if (gate.mode_b < 0 || gate.mode_b >= n_modes)
      throw std::invalid_argument("gate mode index out of range");
    if (gate.mode_a == gate.mode_b)
      throw std::invalid_argument("two-mode gate needs distinct modes");
  }
}

Eigen::MatrixXd gate_matrix(const GaussianGate& gate, int n_modes) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  const int xa = 2 * gate.mode_a, pa = xa + 1;
  switch (gate.kind) {
    case GaussianGate::Kind::squeezer:
      s(xa, xa) = std::exp(gate.param);
      s(pa, pa) = std::exp(-gate.param);
      break;
    case GaussianGate::Kind::two_mode_squeezer: {
      const int xb = 2 * gate.mode_b, pb = xb + 1;
      const double ch = std::cosh(gate.param), sh = std::sinh(gate.param);
      s(xa, xa) = ch; s(xa, xb) = sh;
      s(pa, pa) = ch; s(pa, pb) = -sh;
      s(xb, xa) = sh; s(xb, xb) = ch;
      s(pb, pa) = -sh; s(pb, pb) = ch;
      break;
    }
    case GaussianGate::Kind::beam_splitter: {
      const int xb = 2 * gate.mode_b, pb = xb + 1;
      const double c = std::cos(gate.param), sn = std::sin(gate.param);
      s(xa, xa) = c; s(xa, xb) = -sn;
      s(pa, pa) = c; s(pa, pb) = -sn;
      s(xb, xa) = sn; s(xb, xb) = c;
      s(pb, pa) = sn; s(pb, pb) = c;
      break;
    }
  }
  return s;
}

}  // namespace

Eigen::MatrixXd compile_symplectic(const SymplecticCircuit& circuit) {
  if (circuit.n_modes < 1)
    throw std::invalid_argument("compile_symplectic: n_modes must be >= 1");
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * circuit.n_modes, 2 * circuit.n_modes);
  for (const auto& gate : circuit.gates) {
    check_modes(gate, circuit.n_modes);
    s = (gate_matrix(gate, circuit.n_modes) * s).eval();
  }
  return s;
}

CovarianceMatrix vacuum_covariance(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum_covariance: n_modes must be >= 1");
  return CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& gamma,
                                   const SymplecticCircuit& circuit) {
  if (circuit.n_modes != gamma.n_modes())
    throw std::invalid_argument("evolve_covariance: mode count mismatch");
  const Eigen::MatrixXd s = compile_symplectic(circuit);
  std::optional<Eigen::VectorXd> mean;
  if (gamma.mean()) mean = s * (*gamma.mean());
  return CovarianceMatrix(s * gamma.matrix() * s.transpose(), std::move(mean));
}

CovarianceMatrix named_state(const std::string& family, double r, int n_modes) {
  if (family == "vacuum") {
    if (n_modes < 1)
      throw std::invalid_argument("named_state: vacuum needs n_modes >= 1");
    return vacuum_covariance(n_modes);
  }
  if (family == "tms2") {
    const double rr = std::cosh(2 * r), ss = std::sinh(2 * r);
    Eigen::MatrixXd g(4, 4);
    g << rr, 0, ss, 0,
         0, rr, 0, -ss,
         ss, 0, rr, 0,
         0, -ss, 0, rr;
    return CovarianceMatrix(g / 2.0);
  }
  if (family == "tms3") {
    const double rp = std::cosh(2 * r) + std::sinh(2 * r) / 3.0;
    const double rm = std::cosh(2 * r) - std::sinh(2 * r) / 3.0;
    const double ss = -2.0 / 3.0 * std::sinh(2 * r);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
      g(2 * i, 2 * i) = rp;
      g(2 * i + 1, 2 * i + 1) = rm;
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        g(2 * i, 2 * j) = ss;
        g(2 * i + 1, 2 * j + 1) = -ss;
      }
    }
    return CovarianceMatrix(g / 2.0);
  }
  throw std::invalid_argument("named_state: unknown family '" + family + "'");
}

SymplecticCircuit two_mode_circuit(double r) {
  return {2, {GaussianGate::two_mode_squeezer(0, 1, r)}};
}

SymplecticCircuit three_mode_circuit(double r) {
  return {3,
          {GaussianGate::squeezer(0, -r),
           GaussianGate::squeezer(1, r),
           GaussianGate::squeezer(2, r),
           GaussianGate::beam_splitter(0, 1, std::acos(1.0 / std::sqrt(3.0))),
           GaussianGate::beam_splitter(1, 2, std::numbers::pi / 4)}};
}

}  // namespace cvsq
