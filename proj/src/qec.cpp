#include "qcsim/qec.hpp"

#include <cmath>
#include <sstream>

#include "qcsim/gates.hpp"

namespace qcsim {

namespace {

// Flip class of three bits: 0 none, k = lone bit at position k-1.
int flip_class(int b0, int b1, int b2) {
  if (b0 == b1 && b1 == b2) return 0;
  if (b0 != b1 && b0 != b2) return 1;
  if (b1 != b0 && b1 != b2) return 2;
  return 3;
}

// Diagonal projectors classifying the flip pattern of three chosen qubits.
std::vector<Matrix> block_flip_projectors(int n_qubits, int q0, int q1, int q2) {
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  std::vector<Matrix> projs(4, Matrix::Zero(dim, dim));
  for (std::int64_t x = 0; x < dim; ++x) {
    const int cls = flip_class(qubit_bit(static_cast<std::uint64_t>(x), q0, n_qubits),
                               qubit_bit(static_cast<std::uint64_t>(x), q1, n_qubits),
                               qubit_bit(static_cast<std::uint64_t>(x), q2, n_qubits));
    projs[static_cast<std::size_t>(cls)](x, x) = 1.0;
  }
  return projs;
}

// Permutation matrix |x ^ mask><x|.
Matrix xor_matrix(std::int64_t dim, std::uint64_t mask) {
  Matrix m = Matrix::Zero(dim, dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    m(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) ^ mask), x) = 1.0;
  }
  return m;
}

std::vector<std::string> plain_labels() { return {"P0", "P1", "P2", "P3"}; }
std::vector<std::string> primed_labels() { return {"P0'", "P1'", "P2'", "P3'"}; }

Circuit bitflip_encoder() {
  Circuit c(3);
  c.add(cnot(), {0, 1});
  c.add(swap_gate(), {1, 2});
  c.add(cnot(), {0, 1});
  return c;
}

Circuit phaseflip_encoder() {
  Circuit c = bitflip_encoder();
  c.add(hadamard(), {0});
  c.add(hadamard(), {1});
  c.add(hadamard(), {2});
  return c;
}

Circuit shor_encoder() {
  Circuit c(9);
  // Phase-flip pattern across the block leaders, then a bit-flip code inside
  // each block.
  c.add(cnot(), {0, 3});
  c.add(swap_gate(), {3, 6});
  c.add(cnot(), {0, 3});
  c.add(hadamard(), {0});
  c.add(hadamard(), {3});
  c.add(hadamard(), {6});
  for (int block = 0; block < 3; ++block) {
    const int base = 3 * block;
    c.add(cnot(), {base, base + 1});
    c.add(swap_gate(), {base + 1, base + 2});
    c.add(cnot(), {base, base + 1});
  }
  return c;
}

std::vector<SyndromeStage> bitflip_stages() {
  std::vector<SyndromeStage> stages;
  stages.push_back(SyndromeStage{"", ProjectorSet(plain_labels(), block_flip_projectors(3, 0, 1, 2))});
  return stages;
}

std::vector<SyndromeStage> phaseflip_stages() {
  Matrix h3 = Matrix::Identity(1, 1);
  for (int i = 0; i < 3; ++i) h3 = kron(h3, hadamard().matrix());
  std::vector<Matrix> projs = block_flip_projectors(3, 0, 1, 2);
  for (Matrix& p : projs) p = h3 * p * h3;
  std::vector<SyndromeStage> stages;
  stages.push_back(SyndromeStage{"", ProjectorSet(primed_labels(), std::move(projs))});
  return stages;
}

std::vector<SyndromeStage> shor_stages() {
  std::vector<SyndromeStage> stages;
  for (int block = 0; block < 3; ++block) {
    const int base = 3 * block;
    stages.push_back(SyndromeStage{
        "B" + std::to_string(block + 1),
        ProjectorSet(plain_labels(), block_flip_projectors(9, base, base + 1, base + 2))});
  }

  // Phase stage: eigenspaces of the X-string pair over blocks (1,2) and
  // (2,3). Sign pattern (s1, s2) identifies the block with the flipped sign.
  const std::int64_t dim = 512;
  auto mask_of = [](int first, int count) {
    std::uint64_t mask = 0;
    for (int q = first; q < first + count; ++q) mask |= 1ULL << (8 - q);
    return mask;
  };
  const Matrix a1 = xor_matrix(dim, mask_of(0, 6));
  const Matrix a2 = xor_matrix(dim, mask_of(3, 6));
  const Matrix a12 = xor_matrix(dim, mask_of(0, 3) | mask_of(6, 3));
  const Matrix id = Matrix::Identity(dim, dim);

  auto phase_projector = [&](int s1, int s2) {
    return Matrix(0.25 * (id + static_cast<double>(s1) * a1 + static_cast<double>(s2) * a2 +
                          static_cast<double>(s1 * s2) * a12));
  };
  std::vector<Matrix> projs;
  projs.push_back(phase_projector(+1, +1));  // no phase flip
  projs.push_back(phase_projector(-1, +1));  // block 1
  projs.push_back(phase_projector(-1, -1));  // block 2
  projs.push_back(phase_projector(+1, -1));  // block 3
  stages.push_back(SyndromeStage{"O", ProjectorSet(primed_labels(), std::move(projs))});
  return stages;
}

}  // namespace

CodeInstance::CodeInstance(std::string name, int n_physical, Circuit encoder,
                           std::vector<SyndromeStage> stages)
    : name_(std::move(name)),
      n_physical_(n_physical),
      encoder_(std::move(encoder)),
      stages_(std::move(stages)) {}

CodeInstance CodeInstance::make(const std::string& name) {
  if (name == "bitflip3") return CodeInstance(name, 3, bitflip_encoder(), bitflip_stages());
  if (name == "phaseflip3") return CodeInstance(name, 3, phaseflip_encoder(), phaseflip_stages());
  if (name == "shor9") return CodeInstance(name, 9, shor_encoder(), shor_stages());
  throw std::invalid_argument("unknown code '" + name + "' (expected bitflip3, phaseflip3, shor9)");
}

const ProjectorSet& CodeInstance::syndrome_projectors() const {
  if (stages_.size() != 1) {
    throw std::logic_error("code '" + name_ + "' measures syndromes in " +
                           std::to_string(stages_.size()) + " stages; use stages()");
  }
  return stages_.front().projectors;
}

StateVector qec_encode(const CodeInstance& code, Complex alpha, Complex beta) {
  const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (std::abs(norm - 1.0) > kNormRepairTol) {
    throw std::invalid_argument("logical amplitudes must be normalized within 1e-8");
  }
  Vector amps(2);
  amps << alpha / norm, beta / norm;
  StateVector logical(1, std::move(amps));
  StateVector full =
      code.n_physical() == 1 ? logical : tensor(logical, StateVector::zero(code.n_physical() - 1));
  return run_statevector(code.encoder(), full);
}

SyndromeResult measure_syndrome(const CodeInstance& code, const StateVector& psi,
                                RandomStream& rng) {
  if (psi.n_qubits() != code.n_physical()) {
    throw std::invalid_argument("state size does not match the code");
  }
  StateVector current = psi;
  std::vector<ProjectiveRecord> records;
  std::string label;
  for (const SyndromeStage& stage : code.stages()) {
    ProjectiveRecord rec = measure_once(stage.projectors, current, rng);
    current = rec.post_state;
    if (!label.empty()) label += ";";
    label += stage.name.empty() ? rec.label : stage.name + ":" + rec.label;
    records.push_back(std::move(rec));
  }
  return SyndromeResult{std::move(label), std::move(current), std::move(records)};
}

std::map<std::string, double> syndrome_distribution(const CodeInstance& code,
                                                    const StateVector& psi) {
  if (psi.n_qubits() != code.n_physical()) {
    throw std::invalid_argument("state size does not match the code");
  }
  std::map<std::string, double> dist;
  struct Branch {
    std::string label;
    double probability;
    StateVector state;
  };
  std::vector<Branch> branches{{"", 1.0, psi}};
  for (const SyndromeStage& stage : code.stages()) {
    std::vector<Branch> next;
    for (const Branch& br : branches) {
      const auto probs = stage.projectors.probabilities(br.state);
      for (int i = 0; i < stage.projectors.size(); ++i) {
        const double p = probs[static_cast<std::size_t>(i)];
        if (p <= 0.0) continue;
        std::string label = br.label;
        if (!label.empty()) label += ";";
        label += stage.name.empty() ? stage.projectors.label(i)
                                    : stage.name + ":" + stage.projectors.label(i);
        next.push_back(Branch{std::move(label), br.probability * p,
                              stage.projectors.collapse(br.state, i)});
      }
    }
    branches = std::move(next);
  }
  for (const Branch& br : branches) dist[br.label] += br.probability;
  return dist;
}

namespace {
int parse_projector_index(const std::string& text, bool primed) {
  const std::string suffix = primed ? "'" : "";
  for (int k = 0; k < 4; ++k) {
    if (text == "P" + std::to_string(k) + suffix) return k;
  }
  throw std::invalid_argument("malformed syndrome label part '" + text + "'");
}
}  // namespace

StateVector qec_correct(const CodeInstance& code, const std::string& syndrome_label,
                        const StateVector& psi) {
  if (psi.n_qubits() != code.n_physical()) {
    throw std::invalid_argument("state size does not match the code");
  }
  StateVector current = psi;
  std::stringstream parts(syndrome_label);
  std::string part;
  while (std::getline(parts, part, ';')) {
    std::string stage_name;
    std::string outcome = part;
    const std::size_t colon = part.find(':');
    if (colon != std::string::npos) {
      stage_name = part.substr(0, colon);
      outcome = part.substr(colon + 1);
    }
    if (code.name() == "bitflip3") {
      const int k = parse_projector_index(outcome, false);
      if (k > 0) current = apply(pauli(Axis::x), {k - 1}, current);
    } else if (code.name() == "phaseflip3") {
      const int k = parse_projector_index(outcome, true);
      if (k > 0) current = apply(pauli(Axis::z), {k - 1}, current);
    } else if (code.name() == "shor9") {
      if (stage_name == "O") {
        const int k = parse_projector_index(outcome, true);
        if (k > 0) current = apply(pauli(Axis::z), {3 * (k - 1)}, current);
      } else if (stage_name.size() == 2 && stage_name[0] == 'B') {
        const int block = stage_name[1] - '1';
        if (block < 0 || block > 2) {
          throw std::invalid_argument("malformed syndrome stage '" + stage_name + "'");
        }
        const int k = parse_projector_index(outcome, false);
        if (k > 0) current = apply(pauli(Axis::x), {3 * block + (k - 1)}, current);
      } else {
        throw std::invalid_argument("malformed syndrome stage '" + stage_name + "'");
      }
    } else {
      throw std::logic_error("unknown code");
    }
  }
  return current;
}

StateVector qec_decode(const CodeInstance& code, const StateVector& psi) {
  if (psi.n_qubits() != code.n_physical()) {
    throw std::invalid_argument("state size does not match the code");
  }
  // Encoder gates are self-inverse, so the decoder is the reversed list.
  Vector amps = psi.amplitudes();
  const auto& ops = code.encoder().ops();
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    amps = apply_to_amplitudes(it->gate.matrix(), it->targets, amps, code.n_physical());
  }
  const std::int64_t one_index = std::int64_t{1} << (code.n_physical() - 1);
  double outside = 0.0;
  for (std::int64_t x = 0; x < amps.size(); ++x) {
    if (x != 0 && x != one_index) outside += std::norm(amps(x));
  }
  if (outside > 1e-9) {
    throw std::runtime_error("state lies outside the code space (ancilla weight " +
                             std::to_string(outside) + ")");
  }
  Vector logical(2);
  logical << amps(0), amps(one_index);
  return StateVector(1, logical / logical.norm());
}

}  // namespace qcsim
