#pragma once

#include <string>
#include <vector>

#include "qcsim/common.hpp"
#include "qcsim/density.hpp"
#include "qcsim/gates.hpp"

namespace qcsim {

// Completely positive trace-preserving map given by Kraus operators
// {E_j}: rho -> sum_j E_j rho E_j^dag. Completeness sum_j E_j^dag E_j = I is
// verified to 1e-10 on construction.
class KrausChannel {
 public:
  KrausChannel(std::string label, std::vector<Matrix> operators);

  const std::string& label() const { return label_; }
  int arity() const { return arity_; }
  const std::vector<Matrix>& operators() const { return operators_; }

 private:
  std::string label_;
  int arity_;
  std::vector<Matrix> operators_;
};

// Channel conventions follow the usual single-qubit models:
//   bit_flip(p):   state kept with probability p, X applied with 1-p
//   phase_flip(p): state kept with probability p, Z applied with 1-p
//   depolarizing(p): state kept with probability 1-p, replaced by I/2 with p
KrausChannel bit_flip(double p);
KrausChannel phase_flip(double p);
KrausChannel depolarizing(double p);

// Applies the channel to the listed qubits. A single-qubit channel with
// several listed qubits acts independently on each of them.
DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho,
                            const std::vector<int>& targets);

// Coherent control error: the intended U = exp(-i h) executes as
// exp(-i (1 + epsilon) h).
Gate perturbed_gate(const Matrix& h, double epsilon, const std::string& label = "");

// Worst-case overlap guarantee |<psi_err|psi>| >= 1 - |h|^2 eps^2 / 2 for the
// over-rotated gate above (spectral norm).
double fidelity_lower_bound(const Matrix& h, double epsilon);

double spectral_norm(const Matrix& m);

// Declarative noise attached to a circuit file. `qubits` empty means all
// qubits; `final_placement` selects one trailing layer instead of a channel
// application after every gate.
struct NoiseOp {
  enum class Kind { bit_flip, phase_flip, depolarizing };
  Kind kind;
  double p;
  std::vector<int> qubits;
  bool final_placement = false;
};

struct NoiseSpec {
  std::vector<NoiseOp> ops;
  double cce_epsilon = 0.0;  // over-rotation attached to every rotation gate

  bool empty() const { return ops.empty() && cce_epsilon == 0.0; }
};

// Channel for `op` with its error probability amplified by `lambda`
// (lambda = 1 reproduces the nominal channel). Probabilities that leave [0,1]
// are clamped; a note is appended to `warnings` when that happens.
KrausChannel scaled_channel(const NoiseOp& op, double lambda,
                            std::vector<std::string>* warnings = nullptr);

const char* noise_kind_name(NoiseOp::Kind kind);

}  // namespace qcsim
