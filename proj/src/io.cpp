#include "cvsq/io.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

namespace cvsq {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw parse_error("malformed JSON");
  return root;
}

// Re-label nlohmann's exceptions (missing fields, wrong types) so callers
// only ever see parse_error for structural problems.
template <typename F>
auto with_json_errors(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw parse_error(std::string("malformed document: ") + e.what());
  }
}

std::string trimmed(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

double parse_double(const std::string& token) {
  const std::string t = trimmed(token);
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw parse_error("not a number: '" + token + "'");
  }
  if (pos != t.size()) throw parse_error("not a number: '" + token + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == separator) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

int checked_mode(const json& value, int n_modes) {
  const int mode = value.get<int>();
  if (mode < 1 || mode > n_modes) {
    throw parse_error("gate mode index out of range (file indices are 1-based)");
  }
  return mode - 1;
}

}  // namespace

RawCovariance raw_covariance_from_json(const std::string& text) {
  return with_json_errors([&]() -> RawCovariance {
    const json root = parse_json(text);
    const json& rows = root.at("matrix");
    if (!rows.is_array() || rows.empty()) {
      throw parse_error("matrix must be a nonempty array of rows");
    }
    const int dim = static_cast<int>(rows.size());
    if (dim < 2 || dim % 2 != 0) {
      throw parse_error("matrix dimension must be even and at least 2");
    }
    Eigen::MatrixXd matrix(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const json& row = rows[i];
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw parse_error("matrix must be square");
      }
      for (int j = 0; j < dim; ++j) matrix(i, j) = row[j].get<double>();
    }

    if (root.contains("modes") && root.at("modes").get<int>() * 2 != dim) {
      throw parse_error("modes field disagrees with the matrix size");
    }
    if (root.contains("hbar") && root.at("hbar").get<double>() != 1.0) {
      throw parse_error("unsupported hbar convention (must be 1)");
    }

    std::optional<Eigen::VectorXd> mean;
    if (root.contains("mean")) {
      const json& values = root.at("mean");
      if (!values.is_array() || static_cast<int>(values.size()) != dim) {
        throw parse_error("mean length disagrees with the matrix size");
      }
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = values[i].get<double>();
      mean = std::move(v);
    }

    const std::string ordering = root.value("ordering", std::string("xpxp"));
    if (ordering == "xxpp") {
      const int n = dim / 2;
      std::vector<int> perm(dim);
      for (int i = 0; i < n; ++i) {
        perm[2 * i] = i;
        perm[2 * i + 1] = n + i;
      }
      Eigen::MatrixXd reordered(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) reordered(i, j) = matrix(perm[i], perm[j]);
      }
      matrix = std::move(reordered);
      if (mean) {
        Eigen::VectorXd m(dim);
        for (int i = 0; i < dim; ++i) m[i] = (*mean)[perm[i]];
        mean = std::move(m);
      }
    } else if (ordering != "xpxp") {
      throw parse_error("unknown ordering value: '" + ordering + "'");
    }

    return RawCovariance{std::move(matrix), std::move(mean)};
  });
}

CovarianceMatrix covariance_from_json(const std::string& text) {
  RawCovariance raw = raw_covariance_from_json(text);
  return CovarianceMatrix(std::move(raw.matrix), std::move(raw.mean));
}

std::string covariance_to_json(const CovarianceMatrix& gamma) {
  json root;
  root["modes"] = gamma.n_modes();
  root["ordering"] = "xpxp";
  root["hbar"] = 1;
  json rows = json::array();
  for (int i = 0; i < gamma.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < gamma.dim(); ++j) row.push_back(gamma.matrix()(i, j));
    rows.push_back(std::move(row));
  }
  root["matrix"] = std::move(rows);
  if (gamma.mean()) {
    json mean = json::array();
    for (int i = 0; i < gamma.dim(); ++i) mean.push_back((*gamma.mean())[i]);
    root["mean"] = std::move(mean);
  }
  return root.dump(2) + "\n";
}

RawCovariance read_raw_covariance(const std::string& path) {
  return raw_covariance_from_json(read_text_file(path));
}

CovarianceMatrix read_covariance(const std::string& path) {
  return covariance_from_json(read_text_file(path));
}

void write_covariance(const std::string& path, const CovarianceMatrix& gamma) {
  write_text_file(path, covariance_to_json(gamma));
}

SymplecticCircuit circuit_from_json(const std::string& text) {
  return with_json_errors([&]() -> SymplecticCircuit {
    const json root = parse_json(text);
    SymplecticCircuit circuit;
    circuit.n_modes = root.at("modes").get<int>();
    if (circuit.n_modes < 1) throw parse_error("circuit needs at least one mode");
    for (const json& gate : root.at("gates")) {
      const std::string op = gate.at("op").get<std::string>();
      if (op == "sq") {
        const int mode = checked_mode(gate.at("mode"), circuit.n_modes);
        circuit.gates.push_back(
            GaussianGate::squeezer(mode, gate.at("r").get<double>()));
        continue;
      }
      if (op != "tms" && op != "bs") {
        throw parse_error("unknown gate op: '" + op + "'");
      }
      const json& modes = gate.at("modes");
      if (!modes.is_array() || modes.size() != 2) {
        throw parse_error("two-mode gate needs a modes pair");
      }
      const int mode_a = checked_mode(modes[0], circuit.n_modes);
      const int mode_b = checked_mode(modes[1], circuit.n_modes);
      if (mode_a == mode_b) {
        throw parse_error("two-mode gate modes must be distinct");
      }
      if (op == "tms") {
        circuit.gates.push_back(GaussianGate::two_mode_squeezer(
            mode_a, mode_b, gate.at("r").get<double>()));
      } else {
        circuit.gates.push_back(GaussianGate::beam_splitter(
            mode_a, mode_b, gate.at("theta").get<double>()));
      }
    }
    return circuit;
  });
}

SymplecticCircuit read_circuit(const std::string& path) {
  return circuit_from_json(read_text_file(path));
}

std::string verdict_to_json(const SqueezingVerdict& verdict) {
  json root;
  root["xi2"] = verdict.xi_squared;
  json g = json::array();
  for (Eigen::Index i = 0; i < verdict.g_opt.size(); ++i) {
    g.push_back(verdict.g_opt[i]);
  }
  root["g_opt"] = std::move(g);
  json partition = json::array();
  for (const std::vector<int>& block : verdict.partition.blocks()) {
    json modes = json::array();
    for (int mode : block) modes.push_back(mode + 1);
    partition.push_back(std::move(modes));
  }
  root["partition"] = std::move(partition);
  root["entangled"] = verdict.entangled;
  return root.dump(2) + "\n";
}

std::vector<LocalObservable> observable_from_json(const FockSpace& space,
                                                  const std::string& text) {
  struct Parsed {
    bool second_order = false;
    Eigen::Vector4d mu = Eigen::Vector4d::Zero();
    Eigen::VectorXd g;
  };
  const Parsed parsed = with_json_errors([&]() -> Parsed {
    const json root = parse_json(text);
    const std::string type = root.at("type").get<std::string>();
    Parsed out;
    if (type == "second_order") {
      const json& mu = root.at("mu");
      if (!mu.is_array() || mu.size() != 4) {
        throw parse_error("second_order observable needs four mu coefficients");
      }
      out.second_order = true;
      for (int i = 0; i < 4; ++i) out.mu[i] = mu[i].get<double>();
      return out;
    }
    if (type != "quadrature") {
      throw parse_error("unknown observable type: '" + type + "'");
    }
    const json& v = root.at("v");
    if (!v.is_array() || static_cast<int>(v.size()) != space.n_modes()) {
      throw parse_error("quadrature observable needs one [re, im] pair per mode");
    }
    out.g = Eigen::VectorXd::Zero(2 * space.n_modes());
    for (int m = 0; m < space.n_modes(); ++m) {
      const json& pair = v[m];
      if (!pair.is_array() || pair.size() != 2) {
        throw parse_error("quadrature observable needs one [re, im] pair per mode");
      }
      out.g[2 * m] = pair[0].get<double>();
      out.g[2 * m + 1] = pair[1].get<double>();
    }
    return out;
  });
  if (parsed.second_order) return nonlinear_locals(space, parsed.mu);
  return quadrature_locals(space, parsed.g);
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trimmed(text);
  if (t.empty()) throw parse_error("empty grid");
  std::vector<double> grid;
  if (t.find(':') != std::string::npos) {
    const std::vector<std::string> parts = split(t, ':');
    if (parts.size() != 3) throw parse_error("range grid must be start:stop:step");
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (step <= 0.0 || stop < start) throw parse_error("grid is not monotone");
    for (int k = 0;; ++k) {
      const double value = start + k * step;
      if (value > stop + step * 0.5) break;
      grid.push_back(value);
    }
    return grid;
  }
  for (const std::string& token : split(t, ',')) {
    grid.push_back(parse_double(token));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw parse_error("grid is not monotone");
  }
  return grid;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw parse_error("cannot read file: " + path);
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write file: " + path);
  out << content;
  out.flush();
  if (!out) throw parse_error("cannot write file: " + path);
}

}  // namespace cvsq
