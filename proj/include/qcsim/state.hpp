#pragma once

#include <cstdint>
#include <string>

#include "qcsim/common.hpp"

namespace qcsim {

// Pure state of an n-qubit register. Amplitudes are indexed by basis state,
// with qubit 0 stored as the most significant bit of the index (so |q0 q1 ...>
// reads left to right). The vector is kept normalized: construction repairs a
// norm drift of up to 1e-8 and rejects anything larger.
class StateVector {
 public:
  StateVector(int n_qubits, Vector amplitudes);

  static StateVector basis(int n_qubits, std::uint64_t index);
  static StateVector zero(int n_qubits) { return basis(n_qubits, 0); }

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::uint64_t index) const;
  double probability(std::uint64_t index) const;
  double norm() const { return amplitudes_.norm(); }

 private:
  int n_qubits_;
  Vector amplitudes_;
};

// Kronecker product; `a` supplies the high-order qubits of the result.
StateVector tensor(const StateVector& a, const StateVector& b);

Complex inner_product(const StateVector& a, const StateVector& b);

// True when a and b describe the same physical state, i.e. equal up to a
// global phase.
bool global_phase_equal(const StateVector& a, const StateVector& b, double tol = kTol);

// Bloch sphere angles of a single-qubit state: psi = cos(theta/2)|0> +
// e^{i phi} sin(theta/2)|1>, theta in [0, pi], phi in [0, 2 pi). Both poles
// report phi = 0.
struct BlochAngles {
  double theta;
  double phi;
};
BlochAngles bloch_angles(const StateVector& psi);
StateVector from_bloch(double theta, double phi);

enum class Bell { phi_plus, phi_minus, psi_plus, psi_minus };
StateVector bell_state(Bell which);

}  // namespace qcsim
