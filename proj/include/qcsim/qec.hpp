#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcsim/circuit.hpp"
#include "qcsim/measure.hpp"
#include "qcsim/state.hpp"

namespace qcsim {

// Stabilizer-style code with staged syndrome measurement. Each stage is a
// complete orthogonal projector set; stages are measured in listing order
// (for the nine-qubit code: the three bit-flip blocks first, then the phase
// stage across blocks).
struct SyndromeStage {
  std::string name;  // empty for single-stage codes
  ProjectorSet projectors;
};

class CodeInstance {
 public:
  // name: bitflip3 | phaseflip3 | shor9
  static CodeInstance make(const std::string& name);

  const std::string& name() const { return name_; }
  int n_physical() const { return n_physical_; }
  const std::vector<SyndromeStage>& stages() const { return stages_; }
  // Projectors of the only stage; throws for multi-stage codes.
  const ProjectorSet& syndrome_projectors() const;
  const Circuit& encoder() const { return encoder_; }

 private:
  CodeInstance(std::string name, int n_physical, Circuit encoder,
               std::vector<SyndromeStage> stages);

  std::string name_;
  int n_physical_;
  Circuit encoder_;
  std::vector<SyndromeStage> stages_;
};

// alpha |0_L> + beta |1_L>; (alpha, beta) must be normalized within 1e-8.
StateVector qec_encode(const CodeInstance& code, Complex alpha, Complex beta);

struct SyndromeResult {
  std::string label;  // stage outcomes joined by ';'
  StateVector post_state;
  std::vector<ProjectiveRecord> stage_records;
};

SyndromeResult measure_syndrome(const CodeInstance& code, const StateVector& psi,
                                RandomStream& rng);

// Probability of every joint syndrome label without sampling.
std::map<std::string, double> syndrome_distribution(const CodeInstance& code,
                                                    const StateVector& psi);

// Applies the Pauli corrections named by a syndrome label.
StateVector qec_correct(const CodeInstance& code, const std::string& syndrome_label,
                        const StateVector& psi);

// Inverse of the encoder; requires the state to be inside the code space
// (ancilla weight below 1e-9) and returns the logical qubit.
StateVector qec_decode(const CodeInstance& code, const StateVector& psi);

}  // namespace qcsim
