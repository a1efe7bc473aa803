#pragma once

#include <optional>
#include <string>

#include "qcsim/circuit.hpp"
#include "qcsim/noise.hpp"

namespace qcsim {

// Parse failure with a position; what() reads "file:line:column: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int column, const std::string& message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string file_;
  int line_;
  int column_;
};

struct ParsedCircuit {
  Circuit circuit;
  NoiseSpec noise;
};

// Text format, one directive per line, '#' starts a comment:
//   qubits N
//   observable zn            (or a path to a JSON matrix file)
//   H 0
//   RX(0.5) 1
//   CU(S) 1,0
//   noise bitflip p=0.95 qubits=all [placement=gates|final]
//   cce epsilon=0.1
ParsedCircuit parse_circuit_file(const std::string& text, const std::string& filename = "<input>",
                                 const std::string& base_dir = "");
ParsedCircuit load_circuit_file(const std::string& path);

// Standalone noise description: only `noise` and `cce` lines are allowed.
// `n_qubits` resolves `qubits=all` and range-checks explicit lists.
NoiseSpec parse_noise_file(const std::string& text, int n_qubits,
                           const std::string& filename = "<input>");
NoiseSpec load_noise_file(const std::string& path, int n_qubits);

// Builds a gate from its circuit-file label, e.g. "H", "RX(0.5)", "CU(T)".
Gate gate_from_label(const std::string& label);

// Hermitian observable from a JSON file {"matrix": [[[re, im], ...], ...]}.
Observable load_observable_file(const std::string& path);
Matrix load_matrix_json(const std::string& path);

}  // namespace qcsim
