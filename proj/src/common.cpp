#include "qcsim/common.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

namespace qcsim {

namespace {
std::atomic<int> g_max_state_qubits{kDefaultMaxStateQubits};
std::atomic<int> g_max_density_qubits{kDefaultMaxDensityQubits};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

int max_state_qubits() { return g_max_state_qubits.load(); }

void set_max_state_qubits(int n) {
  if (n < 1) throw std::invalid_argument("max_state_qubits must be at least 1");
  g_max_state_qubits.store(n);
}

int max_density_qubits() { return g_max_density_qubits.load(); }

void set_max_density_qubits(int n) {
  if (n < 1) throw std::invalid_argument("max_density_qubits must be at least 1");
  g_max_density_qubits.store(n);
}

std::string to_bitstring(std::uint64_t index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q) {
    if (qubit_bit(index, q, n_qubits)) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

std::uint64_t from_bitstring(const std::string& bits) {
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0/1");
    index = (index << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return index;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0) is undefined");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % n;
}

double RandomStream::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream RandomStream::fork(std::uint64_t stream_id) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(stream_id + 1)));
}

}  // namespace qcsim
