#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcsim/common.hpp"
#include "qcsim/gates.hpp"
#include "qcsim/measure.hpp"
#include "qcsim/state.hpp"

namespace qcsim {

struct CircuitOp {
  Gate gate;
  std::vector<int> targets;
};

// Ordered list of gate applications on a fixed-size register, plus the
// observable read out at the end (Z on every qubit unless set explicitly).
class Circuit {
 public:
  explicit Circuit(int n_qubits);

  Circuit& add(Gate gate, std::vector<int> targets);

  int n_qubits() const { return n_qubits_; }
  const std::vector<CircuitOp>& ops() const { return ops_; }

  void set_observable(Observable obs);
  const Observable& observable() const;
  bool has_explicit_observable() const { return observable_.has_value(); }

 private:
  int n_qubits_;
  std::vector<CircuitOp> ops_;
  std::optional<Observable> observable_;
  mutable std::optional<Observable> default_observable_;
};

StateVector run_statevector(const Circuit& c, const StateVector& initial);
StateVector run_statevector(const Circuit& c);  // starts from |0...0>

enum class Readout { observable, bitstring };

struct ShotResult {
  std::map<std::string, std::uint64_t> histogram;
  std::optional<ShotEstimate> estimate;  // present for observable readout
};

ShotResult run_and_measure(const Circuit& c, const StateVector& initial, std::uint64_t shots,
                           RandomStream& rng, Readout readout = Readout::observable);

// Dense unitary of the whole circuit; practical for small registers.
Matrix unitary_of(const Circuit& c);

// Fourier transform circuit: Hadamards with controlled phase gates
// (S, T, then finer), followed by the reversing swaps. Matches the transform
// |j> -> 2^{-n/2} sum_k exp(2 pi i jk / 2^n) |k>.
Circuit qft(int n_qubits);

// Reference transform matrix for tests and checks.
Matrix dft_matrix(int n_qubits);

std::string format_eigenvalue(double value);

}  // namespace qcsim
