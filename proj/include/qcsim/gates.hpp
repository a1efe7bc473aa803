#pragma once

#include <string>
#include <vector>

#include "qcsim/common.hpp"
#include "qcsim/state.hpp"

namespace qcsim {

// A unitary on `arity` qubits. Construction verifies unitarity to 1e-10.
class Gate {
 public:
  Gate(std::string label, Matrix matrix);

  const std::string& label() const { return label_; }
  int arity() const { return arity_; }
  const Matrix& matrix() const { return matrix_; }
  std::int64_t dim() const { return matrix_.rows(); }

 private:
  std::string label_;
  int arity_;
  Matrix matrix_;
};

enum class Axis { x, y, z };

Gate pauli(Axis axis);
Gate rotation(Axis axis, double theta);  // exp(-i theta P/2)
Gate hadamard();
Gate phase_s();
Gate phase_t();
Gate phase_gate(double phi);  // diag(1, e^{i phi})
Gate cnot();                  // control = first (most significant) qubit
Gate swap_gate();
Gate controlled(const Gate& u);  // prepends a control qubit

// exp(-i t h) for Hermitian h, computed by eigendecomposition.
Gate from_generator(const Matrix& h, double t = 1.0, const std::string& label = "");

// Dense operator acting as u on `targets` and as identity elsewhere.
// targets[0] corresponds to u's most significant qubit. Built by index
// arithmetic on basis states.
Matrix embed(const Matrix& u, const std::vector<int>& targets, int n_qubits);
Gate embed(const Gate& u, const std::vector<int>& targets, int n_qubits);

// U |psi> for a gate on the full register.
StateVector apply(const Gate& u, const StateVector& psi);

// Applies u to the listed qubits without materializing the embedded matrix.
StateVector apply(const Gate& u, const std::vector<int>& targets, const StateVector& psi);
Vector apply_to_amplitudes(const Matrix& u, const std::vector<int>& targets, const Vector& amps,
                           int n_qubits);

Matrix kron(const Matrix& a, const Matrix& b);

void check_targets(const std::vector<int>& targets, int arity, int n_qubits);

}  // namespace qcsim
