#pragma once

#include "cvsq/fock.hpp"
#include "cvsq/gaussian.hpp"
#include "cvsq/phase_space.hpp"
#include "cvsq/witness.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// File formats. Covariance (JSON):
//   { "modes": N, "ordering": "xpxp", "hbar": 1,
//     "matrix": [[...], ...], "mean": [...] }
// matrix is row-major 2N x 2N; ordering "xxpp" is converted on read, any
// other value is rejected; "hbar" and "mean" are optional, hbar must be 1
// when present. Circuit (JSON):
//   { "modes": N, "gates": [ {"op":"sq","mode":1,"r":0.5},
//     {"op":"tms","modes":[1,2],"r":0.5},
//     {"op":"bs","modes":[2,3],"theta":0.785} ] }
// Mode indices in files are 1-based.

namespace cvsq {

// Malformed file or text: unreadable, bad JSON, missing or mistyped fields.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structural covariance payload before numeric validation, so a validator
// can report symmetry and positivity separately instead of failing on read.
struct RawCovariance {
  Eigen::MatrixXd matrix;
  std::optional<Eigen::VectorXd> mean;
};

RawCovariance raw_covariance_from_json(const std::string& text);
CovarianceMatrix covariance_from_json(const std::string& text);
std::string covariance_to_json(const CovarianceMatrix& gamma);

RawCovariance read_raw_covariance(const std::string& path);
CovarianceMatrix read_covariance(const std::string& path);
void write_covariance(const std::string& path, const CovarianceMatrix& gamma);

SymplecticCircuit circuit_from_json(const std::string& text);
SymplecticCircuit read_circuit(const std::string& path);

std::string verdict_to_json(const SqueezingVerdict& verdict);

// { "type": "second_order", "mu": [c1,c2,c3,c4] } -> D(mu) split per mode;
// { "type": "quadrature", "v": [[re,im],...] } -> per mode re x + im p.
std::vector<LocalObservable> observable_from_json(const FockSpace& space,
                                                  const std::string& text);

// "start:stop:step" (inclusive of stop within half a step) or a comma list.
std::vector<double> parse_grid(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cvsq
