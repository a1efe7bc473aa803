#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Numerical contracts shared across the library.
inline constexpr double kTol = 1e-10;          // default comparison tolerance
inline constexpr double kNormRepairTol = 1e-8; // norm drift repaired silently up to here
inline constexpr double kDegeneracyTol = 1e-8; // eigenvalue grouping threshold
inline constexpr double kProbFloor = 1e-14;    // probabilities below this clamp to zero

inline constexpr int kDefaultMaxStateQubits = 20;
inline constexpr int kDefaultMaxDensityQubits = 10;

// Register-size caps, adjustable at runtime for small experiments on bigger
// machines. Reads are cheap; these are not meant to be toggled concurrently.
int max_state_qubits();
void set_max_state_qubits(int n);
int max_density_qubits();
void set_max_density_qubits(int n);

// Bit of `qubit` inside basis index `index`. Qubit 0 is the leftmost tensor
// factor, i.e. the most significant bit of the index.
inline int qubit_bit(std::uint64_t index, int qubit, int n_qubits) {
  return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1ULL);
}

inline std::uint64_t with_qubit_bit(std::uint64_t index, int qubit, int n_qubits, int bit) {
  const std::uint64_t mask = 1ULL << (n_qubits - 1 - qubit);
  return bit ? (index | mask) : (index & ~mask);
}

std::string to_bitstring(std::uint64_t index, int n_qubits);
std::uint64_t from_bitstring(const std::string& bits);

bool is_hermitian(const Matrix& m, double tol = kTol);
bool is_unitary(const Matrix& m, double tol = kTol);

// Deterministic stream of pseudo-random numbers. Doubles are derived from raw
// 64-bit draws so results do not depend on the standard library's
// distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n);

  // Standard normal deviate (Box-Muller; two uniform draws per call).
  double normal();

  // Derives an independent stream; depends only on (seed, stream_id), not on
  // how much of this stream has been consumed.
  RandomStream fork(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qcsim
