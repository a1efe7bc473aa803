#pragma once

#include <vector>

#include "qcsim/common.hpp"
#include "qcsim/gates.hpp"
#include "qcsim/measure.hpp"
#include "qcsim/state.hpp"

namespace qcsim {

// Mixed state of an n-qubit register. Hermiticity and unit trace are enforced
// on construction (drift up to 1e-8 is repaired); positive semidefiniteness is
// checked by is_valid(), which costs an eigendecomposition.
class DensityMatrix {
 public:
  DensityMatrix(int n_qubits, Matrix rho);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix from_ensemble(const std::vector<double>& probabilities,
                                     const std::vector<StateVector>& states);
  static DensityMatrix maximally_mixed(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }

  double purity() const;  // tr(rho^2), in [2^-n, 1]
  bool is_valid(double tol = 1e-8) const;

 private:
  int n_qubits_;
  Matrix rho_;
};

DensityMatrix apply_gate(const Gate& u, const DensityMatrix& rho);
DensityMatrix apply_gate(const Gate& u, const std::vector<int>& targets, const DensityMatrix& rho);

std::vector<double> outcome_probabilities(const Observable& obs, const DensityMatrix& rho);
double expectation(const Observable& obs, const DensityMatrix& rho);
DensityMatrix collapse(const Observable& obs, const DensityMatrix& rho, int outcome);
ShotEstimate estimate_expectation(const Observable& obs, const DensityMatrix& rho,
                                  std::uint64_t shots, RandomStream& rng);

// Traces out the listed qubits; remaining qubits keep their relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& traced);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qcsim
