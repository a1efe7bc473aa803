#include "qcsim/circuit_io.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qcsim {

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    tokens.push_back(Token{line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

double parse_double(const std::string& s, bool* ok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    *ok = used == s.size();
    return v;
  } catch (const std::exception&) {
    *ok = false;
    return 0.0;
  }
}

long parse_int(const std::string& s, bool* ok) {
  long value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  *ok = res.ec == std::errc() && res.ptr == s.data() + s.size();
  return value;
}

std::vector<int> parse_qubit_list(const std::string& s, bool* ok) {
  std::vector<int> qubits;
  std::stringstream ss(s);
  std::string item;
  *ok = true;
  while (std::getline(ss, item, ',')) {
    bool item_ok = false;
    const long q = parse_int(item, &item_ok);
    if (!item_ok || q < 0) {
      *ok = false;
      return qubits;
    }
    qubits.push_back(static_cast<int>(q));
  }
  if (qubits.empty()) *ok = false;
  return qubits;
}

// Splits "NAME" or "NAME(args)" into name and the raw argument string.
bool split_label(const std::string& label, std::string* name, std::string* args) {
  const std::size_t open = label.find('(');
  if (open == std::string::npos) {
    *name = label;
    args->clear();
    return true;
  }
  if (label.back() != ')') return false;
  *name = label.substr(0, open);
  *args = label.substr(open + 1, label.size() - open - 2);
  return true;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Shared by circuit files and standalone noise files. `fail` builds a
// ParseError carrying the current line.
template <typename Fail>
NoiseOp parse_noise_op(const std::vector<Token>& tokens, int n_qubits, const Fail& fail) {
  if (tokens.size() < 3) {
    throw fail(tokens[0].column, "usage: noise <kind> p=<v> qubits=<all|list> [placement=...]");
  }
  NoiseOp op;
  const std::string& kind = tokens[1].text;
  if (kind == "bitflip") {
    op.kind = NoiseOp::Kind::bit_flip;
  } else if (kind == "phaseflip") {
    op.kind = NoiseOp::Kind::phase_flip;
  } else if (kind == "depolarizing") {
    op.kind = NoiseOp::Kind::depolarizing;
  } else {
    throw fail(tokens[1].column, "unknown noise kind '" + kind + "'");
  }
  bool have_p = false;
  for (std::size_t t = 2; t < tokens.size(); ++t) {
    const std::string& kv = tokens[t].text;
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw fail(tokens[t].column, "expected key=value");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "p") {
      bool ok = false;
      op.p = parse_double(value, &ok);
      if (!ok || op.p < 0.0 || op.p > 1.0) {
        throw fail(tokens[t].column, "p must be a number in [0, 1]");
      }
      have_p = true;
    } else if (key == "qubits") {
      if (value == "all") {
        op.qubits.clear();
        for (int q = 0; q < n_qubits; ++q) op.qubits.push_back(q);
      } else {
        bool ok = false;
        op.qubits = parse_qubit_list(value, &ok);
        if (!ok) throw fail(tokens[t].column, "qubits must be 'all' or a comma separated list");
        for (int q : op.qubits) {
          if (q >= n_qubits) {
            throw fail(tokens[t].column, "noise qubit " + std::to_string(q) + " out of range");
          }
        }
      }
    } else if (key == "placement") {
      if (value == "gates") {
        op.final_placement = false;
      } else if (value == "final") {
        op.final_placement = true;
      } else {
        throw fail(tokens[t].column, "placement must be 'gates' or 'final'");
      }
    } else {
      throw fail(tokens[t].column, "unknown noise option '" + key + "'");
    }
  }
  if (!have_p) throw fail(tokens[0].column, "noise directive needs p=<value>");
  if (op.qubits.empty()) {
    for (int q = 0; q < n_qubits; ++q) op.qubits.push_back(q);
  }
  return op;
}

template <typename Fail>
double parse_cce_epsilon(const std::vector<Token>& tokens, const Fail& fail) {
  if (tokens.size() != 2 || tokens[1].text.rfind("epsilon=", 0) != 0) {
    throw fail(tokens[0].column, "usage: cce epsilon=<value>");
  }
  bool ok = false;
  const double epsilon = parse_double(tokens[1].text.substr(8), &ok);
  if (!ok) throw fail(tokens[1].column, "epsilon must be a number");
  return epsilon;
}

}  // namespace

ParseError::ParseError(std::string file, int line, int column, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

Gate gate_from_label(const std::string& label) {
  std::string name;
  std::string args;
  if (!split_label(label, &name, &args)) {
    throw std::invalid_argument("malformed gate label '" + label + "'");
  }
  const std::string uname = upper(name);

  if (uname == "CU") {
    if (args.empty()) throw std::invalid_argument("CU needs an inner gate label");
    return controlled(gate_from_label(args));
  }

  if (uname == "RX" || uname == "RY" || uname == "RZ" || uname == "P") {
    bool ok = false;
    const double theta = parse_double(args, &ok);
    if (!ok) {
      throw std::invalid_argument("gate '" + name + "' needs one numeric argument");
    }
    if (uname == "RX") return rotation(Axis::x, theta);
    if (uname == "RY") return rotation(Axis::y, theta);
    if (uname == "RZ") return rotation(Axis::z, theta);
    return phase_gate(theta);
  }

  if (!args.empty()) {
    throw std::invalid_argument("gate '" + name + "' takes no arguments");
  }
  if (uname == "X") return pauli(Axis::x);
  if (uname == "Y") return pauli(Axis::y);
  if (uname == "Z") return pauli(Axis::z);
  if (uname == "H") return hadamard();
  if (uname == "S") return phase_s();
  if (uname == "T") return phase_t();
  if (uname == "CNOT") return cnot();
  if (uname == "SWAP") return swap_gate();
  throw std::invalid_argument("unknown gate '" + name + "'");
}

Matrix load_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  nlohmann::json doc;
  in >> doc;
  const nlohmann::json& rows = doc.is_object() ? doc.at("matrix") : doc;
  if (!rows.is_array() || rows.empty()) {
    throw std::runtime_error("matrix file '" + path + "' must hold a nonempty array of rows");
  }
  const std::size_t n = rows.size();
  Matrix m(static_cast<std::int64_t>(n), static_cast<std::int64_t>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) {
      throw std::runtime_error("matrix file '" + path + "' must be square");
    }
    for (std::size_t c = 0; c < n; ++c) {
      const nlohmann::json& cell = rows[r][c];
      if (cell.is_number()) {
        m(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) = cell.get<double>();
      } else if (cell.is_array() && cell.size() == 2) {
        m(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) =
            Complex(cell[0].get<double>(), cell[1].get<double>());
      } else {
        throw std::runtime_error("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Observable load_observable_file(const std::string& path) {
  return Observable::spectral(load_matrix_json(path));
}

ParsedCircuit parse_circuit_file(const std::string& text, const std::string& filename,
                                 const std::string& base_dir) {
  std::optional<Circuit> circuit;
  NoiseSpec noise;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](int column, const std::string& message) -> ParseError {
    return ParseError(filename, line_no, column, message);
  };

  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    const std::string head = tokens[0].text;

    if (head == "qubits") {
      if (circuit) throw fail(tokens[0].column, "duplicate qubits directive");
      if (tokens.size() != 2) throw fail(tokens[0].column, "usage: qubits N");
      bool ok = false;
      const long n = parse_int(tokens[1].text, &ok);
      if (!ok || n < 1) throw fail(tokens[1].column, "qubit count must be a positive integer");
      if (n > max_state_qubits()) {
        throw fail(tokens[1].column, "qubit count exceeds the register cap of " +
                                         std::to_string(max_state_qubits()));
      }
      circuit.emplace(static_cast<int>(n));
      continue;
    }

    if (!circuit) throw fail(tokens[0].column, "the first directive must be 'qubits N'");

    if (head == "observable") {
      if (tokens.size() != 2) throw fail(tokens[0].column, "usage: observable <zn|matrix-file>");
      const std::string& what = tokens[1].text;
      if (what == "zn") {
        circuit->set_observable(Observable::z_all(circuit->n_qubits()));
      } else {
        std::filesystem::path p(what);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        try {
          Observable obs = load_observable_file(p.string());
          if (obs.n_qubits() != circuit->n_qubits()) {
            throw std::runtime_error("observable size does not match the register");
          }
          circuit->set_observable(std::move(obs));
        } catch (const std::exception& e) {
          throw fail(tokens[1].column, e.what());
        }
      }
      continue;
    }

    if (head == "noise") {
      noise.ops.push_back(parse_noise_op(tokens, circuit->n_qubits(), fail));
      continue;
    }

    if (head == "cce") {
      noise.cce_epsilon = parse_cce_epsilon(tokens, fail);
      continue;
    }

    // Gate application line.
    Gate gate = [&] {
      try {
        return gate_from_label(head);
      } catch (const std::exception& e) {
        throw fail(tokens[0].column, e.what());
      }
    }();
    if (tokens.size() < 2) throw fail(tokens[0].column, "gate line needs target qubits");
    std::string target_text;
    for (std::size_t t = 1; t < tokens.size(); ++t) target_text += tokens[t].text;
    bool ok = false;
    const std::vector<int> targets = parse_qubit_list(target_text, &ok);
    if (!ok) throw fail(tokens[1].column, "targets must be a comma separated qubit list");
    try {
      circuit->add(std::move(gate), targets);
    } catch (const std::exception& e) {
      throw fail(tokens[1].column, e.what());
    }
  }

  if (!circuit) {
    throw ParseError(filename, line_no == 0 ? 1 : line_no, 1, "missing 'qubits N' directive");
  }
  return ParsedCircuit{std::move(*circuit), std::move(noise)};
}

ParsedCircuit load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_circuit_file(buffer.str(), path, base);
}

NoiseSpec parse_noise_file(const std::string& text, int n_qubits, const std::string& filename) {
  NoiseSpec noise;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](int column, const std::string& message) -> ParseError {
    return ParseError(filename, line_no, column, message);
  };

  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    if (tokens[0].text == "noise") {
      noise.ops.push_back(parse_noise_op(tokens, n_qubits, fail));
    } else if (tokens[0].text == "cce") {
      noise.cce_epsilon = parse_cce_epsilon(tokens, fail);
    } else {
      throw fail(tokens[0].column, "noise files accept only 'noise' and 'cce' directives");
    }
  }
  return noise;
}

NoiseSpec load_noise_file(const std::string& path, int n_qubits) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open noise file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_noise_file(buffer.str(), n_qubits, path);
}

}  // namespace qcsim
