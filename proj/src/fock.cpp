#include "cvsq/fock.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace cvsq {

namespace {

using Complex = std::complex<double>;
using SparseCd = Eigen::SparseMatrix<Complex>;

constexpr Complex kImaginary{0.0, 1.0};

// Hermitian observables have real expectations; the slack is rounding noise,
// relative once the value exceeds 1.
double real_part(Complex value, const char* context) {
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw invalid_data(std::string(context) + ": expectation has a nonreal part");
  }
  return value.real();
}

void require_observable(const FockState& state, const Eigen::MatrixXcd& o,
                        const char* what) {
  if (o.rows() != state.space().dim() || o.cols() != state.space().dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

Eigen::MatrixXcd embed_at(const Eigen::MatrixXcd& op, int slot, int n_slots) {
  const Eigen::MatrixXcd eye =
      Eigen::MatrixXcd::Identity(op.rows(), op.cols());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int m = 0; m < n_slots; ++m) {
    out = Eigen::kroneckerProduct(out, m == slot ? op : eye).eval();
  }
  return out;
}

// mask[index] = 1 when any mode occupies one of its top fock_guard levels
std::vector<char> guard_mask(const FockSpace& space) {
  std::vector<char> mask(space.dim(), 0);
  const int floor_level = space.cutoff() - fock_guard;
  for (Eigen::Index idx = 0; idx < space.dim(); ++idx) {
    for (int n : space.occupations_of(idx)) {
      if (n >= floor_level) {
        mask[idx] = 1;
        break;
      }
    }
  }
  return mask;
}

double trace_product(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& o,
                     const char* context) {
  // trace(w o) without forming the product
  return real_part(w.transpose().cwiseProduct(o).sum(), context);
}

Eigen::MatrixXcd second_order_local(const FockSpace& space, double c_re,
                                    double c_im) {
  const Eigen::MatrixXcd a = space.single_mode_annihilation();
  const Eigen::MatrixXcd a2 = a * a;
  const Eigen::MatrixXcd ad2 = a2.adjoint();
  return c_re * (a2 + ad2) + c_im * kImaginary * (ad2 - a2);
}

// variance of a Hermitian operator against a density matrix, with the
// second moment taken as the square of the truncated operator
double density_variance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& o) {
  const Eigen::MatrixXcd w = rho * o;
  const double mean = real_part(w.trace(), "observable");
  const double second = trace_product(w, o, "observable square");
  return std::max(0.0, second - mean * mean);
}

std::vector<int> checked_block(const FockSpace& space,
                               const std::vector<int>& block) {
  if (block.empty()) throw std::invalid_argument("mode block is empty");
  std::vector<int> sorted = block;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("mode block repeats a mode");
  }
  if (sorted.front() < 0 || sorted.back() >= space.n_modes()) {
    throw std::invalid_argument("mode block out of range");
  }
  return sorted;
}

// index of the block-local basis state obtained by reading the occupations
// of the listed modes, most significant first
std::vector<Eigen::Index> sub_indices(const FockSpace& space,
                                      const std::vector<int>& modes) {
  std::vector<Eigen::Index> sub(space.dim());
  for (Eigen::Index idx = 0; idx < space.dim(); ++idx) {
    const std::vector<int> occ = space.occupations_of(idx);
    Eigen::Index value = 0;
    for (int m : modes) value = value * space.cutoff() + occ[m];
    sub[idx] = value;
  }
  return sub;
}

// Var(sum of in-block locals) under the block's reduced density matrix
double block_variance(const FockState& state, const std::vector<int>& block,
                      const std::vector<LocalObservable>& locals) {
  const FockSpace& space = state.space();
  const int d = space.cutoff();
  const Eigen::MatrixXcd rho_block = reduced_density(state, block);
  Eigen::MatrixXcd op =
      Eigen::MatrixXcd::Zero(rho_block.rows(), rho_block.cols());
  for (const LocalObservable& local : locals) {
    const auto slot = std::find(block.begin(), block.end(), local.mode);
    if (slot == block.end()) continue;
    if (local.op.rows() != d || local.op.cols() != d) {
      throw std::invalid_argument("local observable has wrong dimension");
    }
    op += embed_at(local.op, static_cast<int>(slot - block.begin()),
                   static_cast<int>(block.size()));
  }
  return density_variance(rho_block, op);
}

// Var(A)_{P(rho)} = sum over blocks of the reduced-state variances; cross
// terms vanish because the removed state is a product over blocks.
double removed_variance(const FockState& state, const Partition& partition,
                        const std::vector<LocalObservable>& locals) {
  double total = 0.0;
  for (const std::vector<int>& block : partition.blocks()) {
    total += block_variance(state, block, locals);
  }
  return total;
}

}  // namespace

FockSpace::FockSpace(int n_modes, int cutoff, std::size_t memory_budget)
    : n_modes_(n_modes), cutoff_(cutoff) {
  if (n_modes < 1) throw std::invalid_argument("need at least one mode");
  if (cutoff < 2) throw std::invalid_argument("cutoff must be at least 2");
  if (!fits(n_modes, cutoff, memory_budget)) {
    throw std::invalid_argument(
        "Fock dimension exceeds the memory budget; lower the cutoff or raise "
        "the budget");
  }
  dim_ = 1;
  for (int m = 0; m < n_modes; ++m) dim_ *= cutoff;
}

bool FockSpace::fits(int n_modes, int cutoff, std::size_t memory_budget) {
  if (n_modes < 1 || cutoff < 2) return false;
  long double dim = 1.0L;
  for (int m = 0; m < n_modes; ++m) dim *= cutoff;
  return 96.0L * dim * dim <= static_cast<long double>(memory_budget);
}

Eigen::Index FockSpace::index_of(const std::vector<int>& occupations) const {
  if (static_cast<int>(occupations.size()) != n_modes_) {
    throw std::invalid_argument("occupation list length mismatch");
  }
  Eigen::Index index = 0;
  for (int n : occupations) {
    if (n < 0 || n >= cutoff_) {
      throw std::invalid_argument("occupation outside the cutoff");
    }
    index = index * cutoff_ + n;
  }
  return index;
}

std::vector<int> FockSpace::occupations_of(Eigen::Index index) const {
  if (index < 0 || index >= dim_) {
    throw std::invalid_argument("basis index out of range");
  }
  std::vector<int> occ(n_modes_);
  for (int m = n_modes_ - 1; m >= 0; --m) {
    occ[m] = static_cast<int>(index % cutoff_);
    index /= cutoff_;
  }
  return occ;
}

Eigen::MatrixXcd FockSpace::single_mode_annihilation() const {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff_, cutoff_);
  for (int n = 1; n < cutoff_; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Eigen::MatrixXcd FockSpace::single_mode_position() const {
  const Eigen::MatrixXcd a = single_mode_annihilation();
  return (a + a.adjoint()) / std::sqrt(2.0);
}

Eigen::MatrixXcd FockSpace::single_mode_momentum() const {
  const Eigen::MatrixXcd a = single_mode_annihilation();
  return kImaginary * (a.adjoint() - a) / std::sqrt(2.0);
}

Eigen::MatrixXcd FockSpace::embed(const Eigen::MatrixXcd& local, int mode) const {
  if (mode < 0 || mode >= n_modes_) throw std::invalid_argument("mode out of range");
  if (local.rows() != cutoff_ || local.cols() != cutoff_) {
    throw std::invalid_argument("single-mode operator has wrong dimension");
  }
  return embed_at(local, mode, n_modes_);
}

Eigen::MatrixXcd FockSpace::annihilation(int mode) const {
  return embed(single_mode_annihilation(), mode);
}

Eigen::MatrixXcd FockSpace::position(int mode) const {
  return embed(single_mode_position(), mode);
}

Eigen::MatrixXcd FockSpace::momentum(int mode) const {
  return embed(single_mode_momentum(), mode);
}

FockState FockState::pure(FockSpace space, Eigen::VectorXcd amplitudes) {
  if (amplitudes.size() != space.dim()) {
    throw std::invalid_argument("amplitude vector length mismatch");
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw invalid_data("pure state vector is not normalized");
  }
  FockState state(std::move(space));
  state.weights_ = {1.0};
  state.members_ = {amplitudes / norm};
  const std::vector<char> mask = guard_mask(state.space_);
  double leak = 0.0;
  for (Eigen::Index idx = 0; idx < state.space_.dim(); ++idx) {
    if (mask[idx]) leak += std::norm(state.members_[0][idx]);
  }
  state.leakage_ = leak;
  return state;
}

FockState FockState::basis(FockSpace space, const std::vector<int>& occupations) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(space.dim());
  v[space.index_of(occupations)] = 1.0;
  return pure(std::move(space), std::move(v));
}

FockState FockState::mixture(FockSpace space, std::vector<double> weights,
                             std::vector<Eigen::VectorXcd> members) {
  if (weights.size() != members.size() || weights.empty()) {
    throw std::invalid_argument("mixture needs matching weights and members");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw invalid_data("mixture weight is negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw invalid_data("mixture weights do not sum to 1");
  }
  FockState state(std::move(space));
  const std::vector<char> mask = guard_mask(state.space_);
  double leak = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    if (members[k].size() != state.space_.dim()) {
      throw std::invalid_argument("member vector length mismatch");
    }
    const double norm = members[k].norm();
    if (std::abs(norm - 1.0) > 1e-10) {
      throw invalid_data("mixture member is not normalized");
    }
    state.weights_.push_back(weights[k] / total);
    state.members_.push_back(members[k] / norm);
    for (Eigen::Index idx = 0; idx < state.space_.dim(); ++idx) {
      if (mask[idx]) leak += (weights[k] / total) * std::norm(members[k][idx]);
    }
  }
  if (state.members_.empty()) throw invalid_data("mixture has no support");
  state.leakage_ = leak;
  return state;
}

FockState FockState::density(FockSpace space, Eigen::MatrixXcd rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw std::invalid_argument("density matrix dimension mismatch");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw invalid_data("density matrix is not Hermitian");
  }
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) {
    throw invalid_data("density matrix trace is not 1");
  }
  rho /= trace;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
      rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol::psd) {
    throw invalid_data("density matrix is not positive semidefinite");
  }
  FockState state(std::move(space));
  const std::vector<char> mask = guard_mask(state.space_);
  double leak = 0.0;
  for (Eigen::Index idx = 0; idx < state.space_.dim(); ++idx) {
    if (mask[idx]) leak += rho(idx, idx).real();
  }
  state.rho_ = std::move(rho);
  state.leakage_ = leak;
  return state;
}

Eigen::MatrixXcd FockState::density_matrix() const {
  if (!has_ensemble()) return rho_;
  Eigen::MatrixXcd rho =
      Eigen::MatrixXcd::Zero(space_.dim(), space_.dim());
  for (std::size_t k = 0; k < members_.size(); ++k) {
    rho.noalias() += weights_[k] * (members_[k] * members_[k].adjoint());
  }
  return rho;
}

double FockState::purity() const {
  if (!has_ensemble()) return rho_.squaredNorm();
  double total = 0.0;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    for (std::size_t l = 0; l < members_.size(); ++l) {
      total += weights_[k] * weights_[l] * std::norm(members_[k].dot(members_[l]));
    }
  }
  return total;
}

Eigen::VectorXcd apply_exponential(const SparseCd& generator,
                                   const Eigen::VectorXcd& v) {
  if (generator.rows() != generator.cols() || generator.rows() != v.size()) {
    throw std::invalid_argument("generator and vector dimensions disagree");
  }
  const double scale = generator.norm();
  int log_segments = 0;
  if (scale > 1.0) log_segments = static_cast<int>(std::ceil(std::log2(scale)));
  if (log_segments > 30) {
    throw std::invalid_argument("generator norm is too large to exponentiate");
  }
  const int segments = 1 << log_segments;
  const SparseCd scaled = generator / double(segments);
  Eigen::VectorXcd w = v;
  Eigen::VectorXcd term(v.size());
  Eigen::VectorXcd acc(v.size());
  for (int seg = 0; seg < segments; ++seg) {
    term = w;
    acc = w;
    for (int k = 1; k <= 1000; ++k) {
      term = (scaled * term) / double(k);
      acc += term;
      if (term.norm() <= 1e-16 * acc.norm()) break;
    }
    w = acc;
  }
  return w;
}

FockState prepare_fourth_order_state(const FockSpace& space, double r) {
  if (space.n_modes() != 2) {
    throw std::invalid_argument("fourth-order squeezing acts on two modes");
  }
  const int d = space.cutoff();
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int n1 = 0; n1 + 2 < d; ++n1) {
    for (int n2 = 0; n2 + 2 < d; ++n2) {
      const double amp =
          0.5 * r *
          std::sqrt(double(n1 + 1) * (n1 + 2) * (n2 + 1) * (n2 + 2));
      const Eigen::Index from = space.index_of({n1, n2});
      const Eigen::Index to = space.index_of({n1 + 2, n2 + 2});
      entries.emplace_back(to, from, Complex(amp, 0.0));
      entries.emplace_back(from, to, Complex(-amp, 0.0));
    }
  }
  SparseCd generator(space.dim(), space.dim());
  generator.setFromTriplets(entries.begin(), entries.end());
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(space.dim());
  v0[space.index_of({0, 0})] = 1.0;
  Eigen::VectorXcd psi = apply_exponential(generator, v0);
  psi.normalize();
  return FockState::pure(space, std::move(psi));
}

FockState prepare_two_mode_squeezed(const FockSpace& space, double r) {
  if (space.n_modes() != 2) {
    throw std::invalid_argument("two-mode squeezing acts on two modes");
  }
  const int d = space.cutoff();
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int n1 = 0; n1 + 1 < d; ++n1) {
    for (int n2 = 0; n2 + 1 < d; ++n2) {
      const double amp = r * std::sqrt(double(n1 + 1) * (n2 + 1));
      const Eigen::Index from = space.index_of({n1, n2});
      const Eigen::Index to = space.index_of({n1 + 1, n2 + 1});
      entries.emplace_back(to, from, Complex(amp, 0.0));
      entries.emplace_back(from, to, Complex(-amp, 0.0));
    }
  }
  SparseCd generator(space.dim(), space.dim());
  generator.setFromTriplets(entries.begin(), entries.end());
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(space.dim());
  v0[space.index_of({0, 0})] = 1.0;
  Eigen::VectorXcd psi = apply_exponential(generator, v0);
  psi.normalize();
  return FockState::pure(space, std::move(psi));
}

FockState mix_with_vacuum(const FockState& psi, double s) {
  if (!psi.is_pure()) {
    throw invalid_data("vacuum admixture needs a pure input state");
  }
  if (s < 0.0) throw invalid_data("vacuum admixture weight is negative");
  const FockSpace& space = psi.space();
  Eigen::VectorXcd vacuum = Eigen::VectorXcd::Zero(space.dim());
  vacuum[space.index_of(std::vector<int>(space.n_modes(), 0))] = 1.0;
  return FockState::mixture(space, {1.0 / (1.0 + s), s / (1.0 + s)},
                            {psi.members()[0], std::move(vacuum)});
}

std::vector<LocalObservable> nonlinear_locals(const FockSpace& space,
                                              const Eigen::Vector4d& mu) {
  if (space.n_modes() != 2) {
    throw std::invalid_argument("second-order observable is defined for two modes");
  }
  return {{0, second_order_local(space, mu[0], mu[1])},
          {1, second_order_local(space, mu[2], mu[3])}};
}

ObservableMatrix nonlinear_observable(const FockSpace& space,
                                      const Eigen::Vector4d& mu) {
  std::ostringstream label;
  label << "D(" << mu[0] << ", " << mu[1] << ", " << mu[2] << ", " << mu[3]
        << ")";
  return combine_locals(space, nonlinear_locals(space, mu), label.str());
}

std::vector<LocalObservable> quadrature_locals(const FockSpace& space,
                                               const Eigen::VectorXd& g) {
  if (g.size() != 2 * space.n_modes()) {
    throw std::invalid_argument("phase-space direction length mismatch");
  }
  const Eigen::MatrixXcd x = space.single_mode_position();
  const Eigen::MatrixXcd p = space.single_mode_momentum();
  std::vector<LocalObservable> locals;
  locals.reserve(space.n_modes());
  for (int m = 0; m < space.n_modes(); ++m) {
    locals.push_back({m, g[2 * m] * x + g[2 * m + 1] * p});
  }
  return locals;
}

ObservableMatrix combine_locals(const FockSpace& space,
                                const std::vector<LocalObservable>& locals,
                                std::string label) {
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (const LocalObservable& local : locals) {
    total += space.embed(local.op, local.mode);
  }
  if ((total - total.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw invalid_data("observable is not Hermitian");
  }
  return {std::move(total), std::move(label)};
}

double expectation(const FockState& state, const Eigen::MatrixXcd& observable) {
  require_observable(state, observable, "observable");
  if (state.has_ensemble()) {
    Complex total = 0.0;
    for (std::size_t k = 0; k < state.members().size(); ++k) {
      const Eigen::VectorXcd& psi = state.members()[k];
      total += state.weights()[k] * psi.dot(observable * psi);
    }
    return real_part(total, "observable");
  }
  return real_part((state.density_matrix() * observable).trace(), "observable");
}

double variance(const FockState& state, const Eigen::MatrixXcd& observable) {
  require_observable(state, observable, "observable");
  if (state.has_ensemble()) {
    double second = 0.0;
    Complex first = 0.0;
    for (std::size_t k = 0; k < state.members().size(); ++k) {
      const Eigen::VectorXcd& psi = state.members()[k];
      const Eigen::VectorXcd u = observable * psi;
      second += state.weights()[k] * u.squaredNorm();
      first += state.weights()[k] * psi.dot(u);
    }
    const double mean = real_part(first, "observable");
    return std::max(0.0, second - mean * mean);
  }
  return density_variance(state.density_matrix(), observable);
}

std::complex<double> commutator_expectation(const FockState& state,
                                            const Eigen::MatrixXcd& a,
                                            const Eigen::MatrixXcd& b) {
  require_observable(state, a, "first observable");
  require_observable(state, b, "second observable");
  if (state.has_ensemble()) {
    double imag = 0.0;
    for (std::size_t k = 0; k < state.members().size(); ++k) {
      const Eigen::VectorXcd& psi = state.members()[k];
      const Eigen::VectorXcd u = a * psi;
      const Eigen::VectorXcd w = b * psi;
      imag += state.weights()[k] * 2.0 * u.dot(w).imag();
    }
    return Complex(0.0, imag);
  }
  const Eigen::MatrixXcd rho = state.density_matrix();
  const Eigen::MatrixXcd wa = rho * a;
  const Eigen::MatrixXcd wb = rho * b;
  return wa.transpose().cwiseProduct(b).sum() -
         wb.transpose().cwiseProduct(a).sum();
}

Eigen::MatrixXcd reduced_density(const FockState& state,
                                 const std::vector<int>& block) {
  const FockSpace& space = state.space();
  const std::vector<int> kept = checked_block(space, block);
  std::vector<int> rest;
  for (int m = 0; m < space.n_modes(); ++m) {
    if (std::find(kept.begin(), kept.end(), m) == kept.end()) rest.push_back(m);
  }
  Eigen::Index kept_dim = 1;
  for (std::size_t i = 0; i < kept.size(); ++i) kept_dim *= space.cutoff();
  Eigen::Index rest_dim = 1;
  for (std::size_t i = 0; i < rest.size(); ++i) rest_dim *= space.cutoff();

  const std::vector<Eigen::Index> kept_idx = sub_indices(space, kept);
  const std::vector<Eigen::Index> rest_idx = sub_indices(space, rest);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kept_dim, kept_dim);
  if (state.has_ensemble()) {
    Eigen::MatrixXcd slice(kept_dim, rest_dim);
    for (std::size_t k = 0; k < state.members().size(); ++k) {
      const Eigen::VectorXcd& psi = state.members()[k];
      for (Eigen::Index idx = 0; idx < space.dim(); ++idx) {
        slice(kept_idx[idx], rest_idx[idx]) = psi[idx];
      }
      out.noalias() += state.weights()[k] * (slice * slice.adjoint());
    }
    return out;
  }
  const Eigen::MatrixXcd rho = state.density_matrix();
  for (Eigen::Index row = 0; row < space.dim(); ++row) {
    for (Eigen::Index col = 0; col < space.dim(); ++col) {
      if (rest_idx[row] == rest_idx[col]) {
        out(kept_idx[row], kept_idx[col]) += rho(row, col);
      }
    }
  }
  return out;
}

FockState partial_trace_product(const FockState& state,
                                const Partition& partition) {
  const FockSpace& space = state.space();
  if (partition.n_modes() != space.n_modes()) {
    throw std::invalid_argument("partition and state mode counts disagree");
  }
  if (partition.is_trivial()) return state;

  const std::size_t n_blocks = partition.blocks().size();
  std::vector<Eigen::MatrixXcd> reduced;
  std::vector<std::vector<Eigen::Index>> sub;
  reduced.reserve(n_blocks);
  sub.reserve(n_blocks);
  for (const std::vector<int>& block : partition.blocks()) {
    reduced.push_back(reduced_density(state, block));
    sub.push_back(sub_indices(space, block));
  }

  Eigen::MatrixXcd pi(space.dim(), space.dim());
  for (Eigen::Index row = 0; row < space.dim(); ++row) {
    for (Eigen::Index col = 0; col < space.dim(); ++col) {
      Complex value = 1.0;
      for (std::size_t b = 0; b < n_blocks; ++b) {
        value *= reduced[b](sub[b][row], sub[b][col]);
      }
      pi(row, col) = value;
    }
  }
  return FockState::density(space, std::move(pi));
}

double general_xi_squared(const FockState& state,
                          const std::vector<LocalObservable>& a_locals,
                          const ObservableMatrix& b,
                          const Partition& partition) {
  const FockSpace& space = state.space();
  if (partition.n_modes() != space.n_modes()) {
    throw std::invalid_argument("partition and state mode counts disagree");
  }
  const ObservableMatrix a = combine_locals(space, a_locals, "A");
  const Complex comm = commutator_expectation(state, a.matrix, b.matrix);
  if (std::abs(comm) < tol::commutator_floor) {
    throw inapplicable_error(
        "commutator expectation vanishes; criterion inapplicable for this "
        "operator pair");
  }
  const double var_removed = removed_variance(state, partition, a_locals);
  const double var_b = variance(state, b.matrix);
  return 4.0 * var_removed * var_b / std::norm(comm);
}

double chi_coefficient(const FockState& state, const Eigen::Vector4d& mu,
                       const Eigen::Vector4d& nu) {
  const FockSpace& space = state.space();
  return general_xi_squared(state, nonlinear_locals(space, nu),
                            nonlinear_observable(space, mu),
                            Partition::singleton(space.n_modes()));
}

BoundCheck modewise_product_bound(const FockState& state,
                                  const std::vector<LocalObservable>& a_locals,
                                  const std::vector<LocalObservable>& b_locals,
                                  const Eigen::VectorXd& alpha,
                                  const Eigen::VectorXd& beta) {
  const FockSpace& space = state.space();
  const int n = space.n_modes();
  if (alpha.size() != n || beta.size() != n) {
    throw std::invalid_argument("coefficient vectors need one entry per mode");
  }
  const auto by_mode = [&](const std::vector<LocalObservable>& locals) {
    std::vector<Eigen::MatrixXcd> ops(n);
    std::vector<bool> seen(n, false);
    for (const LocalObservable& local : locals) {
      if (local.mode < 0 || local.mode >= n || seen[local.mode]) {
        throw std::invalid_argument(
            "local observables must cover each mode exactly once");
      }
      if (local.op.rows() != space.cutoff() || local.op.cols() != space.cutoff()) {
        throw std::invalid_argument("local observable has wrong dimension");
      }
      seen[local.mode] = true;
      ops[local.mode] = local.op;
    }
    for (bool covered : seen) {
      if (!covered) {
        throw std::invalid_argument(
            "local observables must cover each mode exactly once");
      }
    }
    return ops;
  };
  const std::vector<Eigen::MatrixXcd> a_ops = by_mode(a_locals);
  const std::vector<Eigen::MatrixXcd> b_ops = by_mode(b_locals);

  std::vector<LocalObservable> weighted_a;
  std::vector<LocalObservable> weighted_b;
  for (int i = 0; i < n; ++i) {
    weighted_a.push_back({i, alpha[i] * a_ops[i]});
    weighted_b.push_back({i, beta[i] * b_ops[i]});
  }
  const ObservableMatrix a_total = combine_locals(space, weighted_a, "A(alpha)");
  const ObservableMatrix b_total = combine_locals(space, weighted_b, "B(beta)");

  BoundCheck check;
  check.lhs = variance(state, a_total.matrix) * variance(state, b_total.matrix);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXcd rho_i = reduced_density(state, {i});
    const Eigen::MatrixXcd comm = a_ops[i] * b_ops[i] - b_ops[i] * a_ops[i];
    sum += std::abs(alpha[i] * beta[i]) * std::abs((rho_i * comm).trace());
  }
  check.rhs = sum * sum / 4.0;
  check.violated = check.lhs < check.rhs - tol::bound_margin;
  return check;
}

double fisher_density_pure(const FockState& state,
                           const std::vector<LocalObservable>& a_locals,
                           const Partition& partition) {
  if (!state.is_pure()) {
    throw invalid_data("Fisher density ratio is defined for pure states");
  }
  if (partition.n_modes() != state.space().n_modes()) {
    throw std::invalid_argument("partition and state mode counts disagree");
  }
  const ObservableMatrix a = combine_locals(state.space(), a_locals, "A");
  const double var_full = variance(state, a.matrix);
  const double var_removed = removed_variance(state, partition, a_locals);
  if (var_removed < tol::variance_floor) {
    throw inapplicable_error(
        "removed-correlation variance vanishes; density ratio inapplicable");
  }
  return var_full / var_removed;
}

double gaussian_crosscheck(const FockState& state,
                           const CovarianceMatrix& expected) {
  const FockSpace& space = state.space();
  if (expected.n_modes() != space.n_modes()) {
    throw std::invalid_argument("covariance and state mode counts disagree");
  }
  const int n = 2 * space.n_modes();
  std::vector<Eigen::MatrixXcd> quads;
  quads.reserve(n);
  for (int m = 0; m < space.n_modes(); ++m) {
    quads.push_back(space.position(m));
    quads.push_back(space.momentum(m));
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  if (state.has_ensemble()) {
    std::vector<Eigen::VectorXcd> u(n);
    for (std::size_t k = 0; k < state.members().size(); ++k) {
      const Eigen::VectorXcd& psi = state.members()[k];
      const double w = state.weights()[k];
      for (int i = 0; i < n; ++i) u[i] = quads[i] * psi;
      for (int i = 0; i < n; ++i) {
        mean[i] += w * real_part(psi.dot(u[i]), "quadrature");
        for (int j = i; j < n; ++j) {
          // symmetrized second moment: <R_i R_j + R_j R_i>/2 = Re(u_i^dag u_j)
          second(i, j) += w * u[i].dot(u[j]).real();
        }
      }
    }
  } else {
    const Eigen::MatrixXcd rho = state.density_matrix();
    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXcd w = rho * quads[i];
      mean[i] = real_part(w.trace(), "quadrature");
      for (int j = i; j < n; ++j) {
        second(i, j) = w.transpose().cwiseProduct(quads[j]).sum().real();
      }
    }
  }

  const Eigen::VectorXd expected_mean =
      expected.mean() ? *expected.mean() : Eigen::VectorXd::Zero(n);
  double deviation = 0.0;
  for (int i = 0; i < n; ++i) {
    deviation = std::max(deviation, std::abs(mean[i] - expected_mean[i]));
    for (int j = i; j < n; ++j) {
      const double numeric = second(i, j) - mean[i] * mean[j];
      deviation =
          std::max(deviation, std::abs(numeric - expected.matrix()(i, j)));
    }
  }
  return deviation;
}

ChiPoint chi_converged(double r, double s, const Eigen::Vector4d& mu,
                       const Eigen::Vector4d& nu, int initial_cutoff,
                       std::size_t memory_budget) {
  if (initial_cutoff < 2) throw std::invalid_argument("cutoff must be at least 2");
  ChiPoint point;
  point.r = r;
  point.s = s;
  point.chi = std::numeric_limits<double>::quiet_NaN();

  const auto eval = [&](int cutoff, double& chi_out, bool& state_ok) {
    const FockSpace space(2, cutoff, memory_budget);
    const FockState state = mix_with_vacuum(prepare_fourth_order_state(space, r), s);
    chi_out = chi_coefficient(state, mu, nu);
    state_ok = state.converged();
  };

  for (int d = initial_cutoff; FockSpace::fits(2, d + 4, memory_budget); d *= 2) {
    double chi_low = 0.0;
    double chi_high = 0.0;
    bool ok_low = false;
    bool ok_high = false;
    try {
      eval(d, chi_low, ok_low);
      eval(d + 4, chi_high, ok_high);
    } catch (const inapplicable_error&) {
      point.applicable = false;
      point.chi = std::numeric_limits<double>::quiet_NaN();
      point.converged = false;
      point.cutoff_used = d;
      return point;
    }
    point.chi = chi_high;
    point.cutoff_used = d;
    point.converged =
        ok_low && ok_high && std::abs(chi_high - chi_low) < tol::convergence_delta;
    if (point.converged) return point;
  }
  return point;
}

}  // namespace cvsq
