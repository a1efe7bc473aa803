#include "qcsim/state.hpp"

#include <cmath>

namespace qcsim {

namespace {
void check_qubit_count(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("state needs at least one qubit");
  if (n_qubits > max_state_qubits()) {
    throw std::invalid_argument("state of " + std::to_string(n_qubits) +
                                " qubits exceeds the register cap of " +
                                std::to_string(max_state_qubits()));
  }
}
}  // namespace

StateVector::StateVector(int n_qubits, Vector amplitudes) : n_qubits_(n_qubits) {
  check_qubit_count(n_qubits);
  const std::int64_t expected = std::int64_t{1} << n_qubits;
  if (amplitudes.size() != expected) {
    throw std::invalid_argument("amplitude vector has dimension " +
                                std::to_string(amplitudes.size()) + ", expected " +
                                std::to_string(expected));
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kNormRepairTol) {
    throw std::invalid_argument("state vector norm " + std::to_string(norm) +
                                " deviates from 1 by more than 1e-8");
  }
  amplitudes_ = amplitudes / norm;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  check_qubit_count(n_qubits);
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  if (index >= static_cast<std::uint64_t>(dim)) {
    throw std::out_of_range("basis index " + std::to_string(index) +
                            " out of range for " + std::to_string(n_qubits) + " qubits");
  }
  Vector amps = Vector::Zero(dim);
  amps(static_cast<std::int64_t>(index)) = Complex(1.0, 0.0);
  return StateVector(n_qubits, std::move(amps));
}

Complex StateVector::amplitude(std::uint64_t index) const {
  if (index >= static_cast<std::uint64_t>(dim())) {
    throw std::out_of_range("basis index out of range");
  }
  return amplitudes_(static_cast<std::int64_t>(index));
}

double StateVector::probability(std::uint64_t index) const {
  return std::norm(amplitude(index));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  const int n = a.n_qubits() + b.n_qubits();
  check_qubit_count(n);
  Vector out(a.dim() * b.dim());
  for (std::int64_t i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
  }
  return StateVector(n, std::move(out));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("inner product requires equal register sizes");
  }
  return a.amplitudes().dot(b.amplitudes());
}

bool global_phase_equal(const StateVector& a, const StateVector& b, double tol) {
  if (a.n_qubits() != b.n_qubits()) return false;
  return std::abs(std::abs(inner_product(a, b)) - 1.0) <= tol;
}

BlochAngles bloch_angles(const StateVector& psi) {
  if (psi.n_qubits() != 1) {
    throw std::invalid_argument("Bloch angles are defined for single-qubit states");
  }
  const Complex alpha = psi.amplitude(0);
  const Complex beta = psi.amplitude(1);
  const double theta = 2.0 * std::atan2(std::abs(beta), std::abs(alpha));
  // Remove the global phase so the |0> amplitude is real and nonnegative,
  // then read the relative phase off the |1> amplitude.
  double phi = 0.0;
  if (std::abs(alpha) > kProbFloor && std::abs(beta) > kProbFloor) {
    phi = std::arg(beta) - std::arg(alpha);
    const double two_pi = 2.0 * M_PI;
    phi = std::fmod(phi, two_pi);
    if (phi < 0) phi += two_pi;
    if (two_pi - phi < 1e-12) phi = 0.0;
  }
  return {theta, phi};
}

StateVector from_bloch(double theta, double phi) {
  Vector amps(2);
  amps(0) = Complex(std::cos(theta / 2.0), 0.0);
  amps(1) = std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
  return StateVector(1, std::move(amps));
}

StateVector bell_state(Bell which) {
  Vector amps = Vector::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  switch (which) {
    case Bell::phi_plus:
      amps(0) = r;
      amps(3) = r;
      break;
    case Bell::phi_minus:
      amps(0) = r;
      amps(3) = -r;
      break;
    case Bell::psi_plus:
      amps(1) = r;
      amps(2) = r;
      break;
    case Bell::psi_minus:
      amps(1) = r;
      amps(2) = -r;
      break;
  }
  return StateVector(2, std::move(amps));
}

}  // namespace qcsim
