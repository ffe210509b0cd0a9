#include "cvsq/phase_space.hpp"

#include <algorithm>
#include <sstream>

namespace cvsq {

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

double commutator_form(const Eigen::VectorXd& h, const Eigen::VectorXd& g) {
  if (h.size() != g.size() || h.size() % 2 != 0 || h.size() == 0)
    throw std::invalid_argument("commutator_form: dimension mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < h.size(); i += 2)
    sum += h[i] * g[i + 1] - h[i + 1] * g[i];
  return sum;
}

Partition::Partition(int n_modes, std::vector<std::vector<int>> blocks)
    : n_modes_(n_modes), blocks_(std::move(blocks)), block_of_(n_modes, -1) {
  if (n_modes_ < 1) throw std::invalid_argument("Partition: n_modes must be >= 1");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    auto& block = blocks_[b];
    if (block.empty()) throw std::invalid_argument("Partition: empty block");
    std::sort(block.begin(), block.end());
    for (int mode : block) {
      if (mode < 0 || mode >= n_modes_)
        throw std::invalid_argument("Partition: mode index out of range");
      if (block_of_[mode] != -1)
        throw std::invalid_argument("Partition: blocks are not disjoint");
      block_of_[mode] = static_cast<int>(b);
    }
  }
  for (int mode = 0; mode < n_modes_; ++mode)
    if (block_of_[mode] == -1)
      throw std::invalid_argument("Partition: blocks do not cover all modes");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (int mode : blocks_[b]) block_of_[mode] = static_cast<int>(b);
}

Partition Partition::singleton(int n_modes) {
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n_modes; ++i) blocks.push_back({i});
  return Partition(n_modes, std::move(blocks));
}

Partition Partition::trivial(int n_modes) {
  std::vector<int> all(n_modes);
  for (int i = 0; i < n_modes; ++i) all[i] = i;
  return Partition(n_modes, {all});
}

Partition Partition::parse(const std::string& text, int n_modes) {
  std::vector<std::vector<int>> blocks;
  std::stringstream outer(text);
  std::string block_text;
  while (std::getline(outer, block_text, '|')) {
    std::vector<int> block;
    std::stringstream inner(block_text);
    std::string token;
    while (std::getline(inner, token, ',')) {
      token.erase(std::remove_if(token.begin(), token.end(),
                                 [](unsigned char c) { return std::isspace(c); }),
                  token.end());
      if (token.empty()) throw std::invalid_argument("Partition: empty mode index in '" + text + "'");
      std::size_t used = 0;
      int mode = 0;
      try {
        mode = std::stoi(token, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("Partition: bad mode index '" + token + "'");
      }
      if (used != token.size())
        throw std::invalid_argument("Partition: bad mode index '" + token + "'");
      block.push_back(mode - 1);  // 1-based on the wire
    }
    if (block.empty()) throw std::invalid_argument("Partition: empty block in '" + text + "'");
    blocks.push_back(std::move(block));
  }
  if (blocks.empty()) throw std::invalid_argument("Partition: empty spec");
  return Partition(n_modes, std::move(blocks));
}

bool Partition::same_block(int mode_a, int mode_b) const {
  if (mode_a < 0 || mode_a >= n_modes_ || mode_b < 0 || mode_b >= n_modes_)
    throw std::invalid_argument("Partition: mode index out of range");
  return block_of_[mode_a] == block_of_[mode_b];
}

bool Partition::is_singleton() const {
  return static_cast<int>(blocks_.size()) == n_modes_;
}

bool Partition::is_trivial() const { return blocks_.size() == 1; }

std::string Partition::to_string() const {
  std::ostringstream out;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b) out << '|';
    for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) out << ',';
      out << blocks_[b][i] + 1;
    }
  }
  return out.str();
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd gamma,
                                   std::optional<Eigen::VectorXd> mean)
    : matrix_(std::move(gamma)), mean_(std::move(mean)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2 || matrix_.rows() % 2 != 0)
    throw invalid_data("covariance matrix must be square with even dimension >= 2");
  const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol::symmetry)
    throw invalid_data("covariance matrix asymmetric beyond tolerance");
  matrix_ = ((matrix_ + matrix_.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol::psd)
    throw invalid_data("covariance matrix is not positive semidefinite");
  if (mean_ && mean_->size() != matrix_.rows())
    throw invalid_data("mean vector dimension does not match covariance matrix");
}

double CovarianceMatrix::min_physicality_eigenvalue() const {
  Eigen::MatrixXcd m = matrix_.cast<std::complex<double>>();
  m += std::complex<double>(0.0, 0.5) *
       symplectic_form(n_modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool CovarianceMatrix::is_physical() const {
  return min_physicality_eigenvalue() >= -tol::psd;
}

double quadratic_variance(const CovarianceMatrix& gamma, const Eigen::VectorXd& g) {
  if (g.size() != gamma.dim())
    throw std::invalid_argument("quadratic_variance: dimension mismatch");
  return g.dot(gamma.matrix() * g);
}

CovarianceMatrix remove_correlations(const CovarianceMatrix& gamma,
                                     const Partition& partition) {
  if (partition.n_modes() != gamma.n_modes())
    throw std::invalid_argument("remove_correlations: partition mode count mismatch");
  Eigen::MatrixXd out = gamma.matrix();
  const int n = gamma.n_modes();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !partition.same_block(i, j))
        out.block<2, 2>(2 * i, 2 * j).setZero();
  return CovarianceMatrix(std::move(out), gamma.mean());
}

}  // namespace cvsq
