#include "cvsq/fock.hpp"
#include "cvsq/gaussian.hpp"
#include "cvsq/io.hpp"
#include "cvsq/optimizer.hpp"
#include "cvsq/phase_space.hpp"
#include "cvsq/witness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

// Exit codes: 0 success (a "not entangled" verdict is success), 1 I/O or
// parse error, 2 invalid input data, 3 unconverged numerics under --strict.

namespace {

using namespace cvsq;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

// Empty path means stdout.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_text_file(out_path, content);
  }
}

Partition partition_for(const std::string& spec, int n_modes) {
  if (spec.empty()) return Partition::singleton(n_modes);
  return Partition::parse(spec, n_modes);
}

struct OptimizerFlags {
  std::uint64_t seed = 42;
  int restarts = 16;
  double tolerance = 1e-12;
  int max_iterations = 10000;

  void attach(CLI::App* command) {
    command->add_option("--seed", seed, "random-start seed");
    command->add_option("--restarts", restarts, "number of random starts")
        ->check(CLI::NonNegativeNumber);
    command->add_option("--tol", tolerance, "simplex spread at convergence")
        ->check(CLI::PositiveNumber);
    command->add_option("--max-iter", max_iterations, "iteration cap per start")
        ->check(CLI::PositiveNumber);
  }

  OptimizerConfig config() const {
    OptimizerConfig out;
    out.seed = seed;
    out.random_starts = restarts;
    out.spread_tolerance = tolerance;
    out.max_iterations = max_iterations;
    return out;
  }
};

int cmd_state(const std::string& family, const std::string& circuit_path,
              double r, int modes, const std::string& out) {
  if (family.empty() && circuit_path.empty()) {
    throw std::invalid_argument("state needs --family or --circuit");
  }
  CovarianceMatrix gamma = [&]() {
    if (!circuit_path.empty()) {
      const SymplecticCircuit circuit = read_circuit(circuit_path);
      return evolve_covariance(vacuum_covariance(circuit.n_modes), circuit);
    }
    return named_state(family, r, modes);
  }();
  emit(out, covariance_to_json(gamma));
  return 0;
}

int cmd_xi(const std::string& input, const std::string& partition_spec,
           const OptimizerFlags& flags, bool strict, const std::string& out) {
  const CovarianceMatrix gamma = read_covariance(input);
  const Partition partition = partition_for(partition_spec, gamma.n_modes());
  const SqueezingVerdict verdict = xi_squared(gamma, partition, flags.config());
  const std::string json_text = verdict_to_json(verdict);

  std::ostringstream summary;
  summary << "xi^2      = " << format_double(verdict.xi_squared) << "\n"
          << "g_opt     = " << format_vector(verdict.g_opt) << "\n"
          << "partition = " << partition.to_string() << "\n"
          << "entangled = " << (verdict.entangled ? "true" : "false") << "\n"
          << "converged = " << (verdict.converged ? "true" : "false") << "\n";

  if (out.empty()) {
    std::cout << json_text;
  } else {
    write_text_file(out, json_text);
  }
  std::cout << summary.str();
  return (strict && !verdict.converged) ? 3 : 0;
}

int cmd_sweep(const std::string& family, const std::string& r_grid,
              const std::string& partition_spec, const OptimizerFlags& flags,
              bool strict, const std::string& out) {
  const std::vector<double> grid = parse_grid(r_grid);
  const int n_modes = family == "tms2" ? 2 : 3;
  const Partition partition = partition_for(partition_spec, n_modes);
  // The closed forms describe the minimum over the singleton partition only.
  const bool have_analytic = partition.is_singleton();

  std::ostringstream csv;
  csv << "r,xi2_numeric,xi2_analytic,inverse_xi2,converged\n";
  bool all_converged = true;
  for (double r : grid) {
    const SqueezingVerdict verdict =
        xi_squared(named_state(family, r), partition, flags.config());
    double analytic = std::numeric_limits<double>::quiet_NaN();
    if (have_analytic) {
      analytic = family == "tms2" ? (1.0 + std::exp(-4.0 * r)) / 2.0
                                  : (1.0 + 2.0 * std::exp(-4.0 * r)) / 3.0;
    }
    csv << format_double(r) << ',' << format_double(verdict.xi_squared) << ','
        << format_double(analytic) << ','
        << format_double(1.0 / verdict.xi_squared) << ','
        << (verdict.converged ? "true" : "false") << '\n';
    all_converged = all_converged && verdict.converged;
  }
  emit(out, csv.str());
  return (strict && !all_converged) ? 3 : 0;
}

int cmd_chi_sweep(const std::string& r_grid, const std::string& s_grid,
                  int cutoff, bool strict, const std::string& out) {
  const std::vector<double> r_values = parse_grid(r_grid);
  const std::vector<double> s_values = parse_grid(s_grid);
  const Eigen::Vector4d mu(1.0, 1.0, -1.0, 1.0);
  const Eigen::Vector4d nu(1.0, -1.0, 1.0, 1.0);

  std::ostringstream csv;
  csv << "r,s,chi,converged,cutoff_used\n";
  bool all_converged = true;
  for (double r : r_values) {
    for (double s : s_values) {
      const ChiPoint point = chi_converged(r, s, mu, nu, cutoff);
      csv << format_double(point.r) << ',' << format_double(point.s) << ','
          << format_double(point.chi) << ','
          << (point.converged ? "true" : "false") << ',' << point.cutoff_used
          << '\n';
      // An inapplicable point (vanishing commutator) is a result, not a
      // convergence failure.
      all_converged = all_converged && (point.converged || !point.applicable);
    }
  }
  emit(out, csv.str());
  return (strict && !all_converged) ? 3 : 0;
}

int cmd_check(const std::string& input, std::uint64_t seed) {
  const RawCovariance raw = read_raw_covariance(input);
  const Eigen::MatrixXd& m = raw.matrix;
  const int dim = static_cast<int>(m.rows());

  const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  const bool symmetric = asymmetry <= tol::symmetry;
  std::cout << "symmetry:    max |gamma - gamma^T| = " << format_double(asymmetry)
            << (symmetric ? "  pass" : "  FAIL") << "\n";

  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const double min_eig = es.eigenvalues().minCoeff();
  const bool psd = min_eig >= -tol::psd;
  std::cout << "psd:         min eigenvalue = " << format_double(min_eig)
            << (psd ? "  pass" : "  FAIL") << "\n";

  const std::complex<double> half_i(0.0, 0.5);
  Eigen::MatrixXcd physical_form =
      sym.cast<std::complex<double>>() + half_i * symplectic_form(dim / 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esc(physical_form);
  const double phys_eig = esc.eigenvalues().minCoeff();
  const bool physical = phys_eig >= -tol::psd;
  std::cout << "physicality: min eigenvalue of gamma + (i/2) Omega = "
            << format_double(phys_eig) << (physical ? "  pass" : "  FAIL")
            << "\n";

  // Heisenberg-Robertson on random direction pairs:
  //   Var(M(h)) Var(M(g)) >= (h^T Omega g)^2 / 4.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n_pairs = 32;
  int hr_failures = 0;
  for (int trial = 0; trial < n_pairs; ++trial) {
    Eigen::VectorXd h(dim), g(dim);
    for (int i = 0; i < dim; ++i) h[i] = gauss(rng);
    for (int i = 0; i < dim; ++i) g[i] = gauss(rng);
    const double lhs = h.dot(sym * h) * g.dot(sym * g);
    const double c = commutator_form(h, g);
    if (lhs < c * c / 4.0 - tol::bound_margin) ++hr_failures;
  }
  std::cout << "uncertainty: " << (n_pairs - hr_failures) << "/" << n_pairs
            << " random direction pairs pass"
            << (hr_failures == 0 ? "  pass" : "  FAIL") << "\n";

  return (symmetric && psd && physical && hr_failures == 0) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mode-entanglement witnesses for Gaussian and truncated Fock states"};
  app.require_subcommand(1);

  std::string state_family;
  std::string state_circuit;
  double state_r = 0.5;
  int state_modes = 1;
  std::string state_out;
  CLI::App* state = app.add_subcommand(
      "state", "write the covariance of a named family or a compiled circuit");
  CLI::Option* family_opt =
      state->add_option("--family", state_family, "tms2, tms3, or vacuum")
          ->check(CLI::IsMember({"tms2", "tms3", "vacuum"}));
  CLI::Option* circuit_opt =
      state->add_option("--circuit", state_circuit, "circuit JSON file");
  family_opt->excludes(circuit_opt);
  circuit_opt->excludes(family_opt);
  state->add_option("--r", state_r, "squeezing parameter for family states");
  state->add_option("--modes", state_modes, "mode count for the vacuum family")
      ->check(CLI::PositiveNumber);
  state->add_option("--out", state_out, "output path (stdout when omitted)");

  std::string xi_input;
  std::string xi_partition;
  std::string xi_out;
  bool xi_strict = false;
  OptimizerFlags xi_flags;
  CLI::App* xi = app.add_subcommand(
      "xi", "minimize xi^2 over collective quadratures and report a verdict");
  xi->add_option("input", xi_input, "covariance JSON file")->required();
  xi->add_option("--partition", xi_partition,
                 "mode partition, e.g. \"1,2|3\" (default: all singletons)");
  xi_flags.attach(xi);
  xi->add_flag("--strict", xi_strict, "exit 3 if the optimizer did not converge");
  xi->add_option("--out", xi_out, "verdict JSON path (stdout when omitted)");

  std::string sweep_family;
  std::string sweep_r_grid = "0:2:0.1";
  std::string sweep_partition;
  std::string sweep_out;
  bool sweep_strict = false;
  OptimizerFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "xi^2 versus r for a named family, as CSV");
  sweep->add_option("--family", sweep_family, "tms2 or tms3")
      ->check(CLI::IsMember({"tms2", "tms3"}))
      ->required();
  sweep->add_option("--r-grid", sweep_r_grid,
                    "grid \"start:stop:step\" or comma list");
  sweep->add_option("--partition", sweep_partition,
                    "mode partition (default: all singletons)");
  sweep_flags.attach(sweep);
  sweep->add_flag("--strict", sweep_strict,
                  "exit 3 if any row did not converge");
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  std::string chi_r_grid = "0:0.3:0.02";
  std::string chi_s_grid = "0,0.5,1";
  int chi_cutoff = 20;
  std::string chi_out;
  bool chi_strict = false;
  CLI::App* chi = app.add_subcommand(
      "chi-sweep",
      "fourth-order chi for the non-Gaussian family over (r, s), as CSV");
  chi->add_option("--r-grid", chi_r_grid, "grid \"start:stop:step\" or comma list");
  chi->add_option("--s-grid", chi_s_grid, "vacuum mixing weights");
  chi->add_option("--cutoff", chi_cutoff, "initial Fock cutoff per mode");
  chi->add_flag("--strict", chi_strict, "exit 3 if any row did not converge");
  chi->add_option("--out", chi_out, "CSV path (stdout when omitted)");

  std::string check_input;
  std::uint64_t check_seed = 42;
  CLI::App* check = app.add_subcommand(
      "check", "validate a covariance file: symmetry, PSD, physicality");
  check->add_option("input", check_input, "covariance JSON file")->required();
  check->add_option("--seed", check_seed, "seed for random direction pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (state->parsed()) {
      return cmd_state(state_family, state_circuit, state_r, state_modes,
                       state_out);
    }
    if (xi->parsed()) {
      return cmd_xi(xi_input, xi_partition, xi_flags, xi_strict, xi_out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_family, sweep_r_grid, sweep_partition, sweep_flags,
                       sweep_strict, sweep_out);
    }
    if (chi->parsed()) {
      return cmd_chi_sweep(chi_r_grid, chi_s_grid, chi_cutoff, chi_strict,
                           chi_out);
    }
    if (check->parsed()) {
      return cmd_check(check_input, check_seed);
    }
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const invalid_data& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const inapplicable_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
