#include "qcsim/gates.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace qcsim {

namespace {
int arity_of_dim(std::int64_t dim) {
  int arity = 0;
  while ((std::int64_t{1} << arity) < dim) ++arity;
  if ((std::int64_t{1} << arity) != dim) {
    throw std::invalid_argument("gate dimension must be a power of two");
  }
  return arity;
}

std::string format_angle(double theta) {
  std::ostringstream os;
  os.precision(12);
  os << theta;
  return os.str();
}
}  // namespace

Gate::Gate(std::string label, Matrix matrix) : label_(std::move(label)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
    throw std::invalid_argument("gate matrix must be square with dimension >= 2");
  }
  arity_ = arity_of_dim(matrix_.rows());
  if (!is_unitary(matrix_, kTol)) {
    throw std::invalid_argument("gate '" + label_ + "' is not unitary within 1e-10");
  }
}

Gate pauli(Axis axis) {
  Matrix m(2, 2);
  switch (axis) {
    case Axis::x:
      m << 0, 1, 1, 0;
      return Gate("X", m);
    case Axis::y:
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      return Gate("Y", m);
    case Axis::z:
      m << 1, 0, 0, -1;
      return Gate("Z", m);
  }
  throw std::invalid_argument("unknown axis");
}

Gate rotation(Axis axis, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Matrix m(2, 2);
  std::string name;
  switch (axis) {
    case Axis::x:
      m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
      name = "RX";
      break;
    case Axis::y:
      m << Complex(c, 0), Complex(-s, 0), Complex(s, 0), Complex(c, 0);
      name = "RY";
      break;
    case Axis::z:
      m << std::exp(Complex(0, -theta / 2.0)), Complex(0, 0), Complex(0, 0),
          std::exp(Complex(0, theta / 2.0));
      name = "RZ";
      break;
  }
  return Gate(name + "(" + format_angle(theta) + ")", m);
}

Gate hadamard() {
  Matrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return Gate("H", m);
}

Gate phase_s() {
  Matrix m(2, 2);
  m << 1, 0, 0, Complex(0, 1);
  return Gate("S", m);
}

Gate phase_t() {
  Matrix m(2, 2);
  m << 1, 0, 0, std::exp(Complex(0, M_PI / 4.0));
  return Gate("T", m);
}

Gate phase_gate(double phi) {
  Matrix m(2, 2);
  m << 1, 0, 0, std::exp(Complex(0, phi));
  return Gate("P(" + format_angle(phi) + ")", m);
}

Gate cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return Gate("CNOT", m);
}

Gate swap_gate() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return Gate("SWAP", m);
}

Gate controlled(const Gate& u) {
  const std::int64_t d = u.dim();
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = Matrix::Identity(d, d);
  m.bottomRightCorner(d, d) = u.matrix();
  return Gate("CU(" + u.label() + ")", m);
}

Gate from_generator(const Matrix& h, double t, const std::string& label) {
  if (h.rows() != h.cols()) throw std::invalid_argument("generator must be square");
  if (!is_hermitian(h, kTol)) {
    throw std::invalid_argument("generator must be Hermitian within 1e-10");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXd evals = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  Vector phases(evals.size());
  for (std::int64_t i = 0; i < evals.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, -t * evals(i)));
  }
  Matrix u = v * phases.asDiagonal() * v.adjoint();
  return Gate(label.empty() ? "expgen" : label, std::move(u));
}

void check_targets(const std::vector<int>& targets, int arity, int n_qubits) {
  if (static_cast<int>(targets.size()) != arity) {
    throw std::invalid_argument("expected " + std::to_string(arity) + " target qubits, got " +
                                std::to_string(targets.size()));
  }
  std::set<int> seen;
  for (int q : targets) {
    if (q < 0 || q >= n_qubits) {
      throw std::out_of_range("target qubit " + std::to_string(q) + " out of range for " +
                              std::to_string(n_qubits) + " qubits");
    }
    if (!seen.insert(q).second) {
      throw std::invalid_argument("target qubits must be distinct");
    }
  }
}

Matrix embed(const Matrix& u, const std::vector<int>& targets, int n_qubits) {
  const int k = arity_of_dim(u.rows());
  check_targets(targets, k, n_qubits);
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  const std::int64_t local_dim = std::int64_t{1} << k;
  Matrix out = Matrix::Zero(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    std::int64_t local_col = 0;
    for (int j = 0; j < k; ++j) {
      local_col = (local_col << 1) | qubit_bit(static_cast<std::uint64_t>(col), targets[j], n_qubits);
    }
    for (std::int64_t local_row = 0; local_row < local_dim; ++local_row) {
      const Complex entry = u(local_row, local_col);
      if (entry == Complex(0.0, 0.0)) continue;
      std::uint64_t row = static_cast<std::uint64_t>(col);
      for (int j = 0; j < k; ++j) {
        row = with_qubit_bit(row, targets[j], n_qubits, (local_row >> (k - 1 - j)) & 1);
      }
      out(static_cast<std::int64_t>(row), col) += entry;
    }
  }
  return out;
}

Gate embed(const Gate& u, const std::vector<int>& targets, int n_qubits) {
  return Gate(u.label(), embed(u.matrix(), targets, n_qubits));
}

Vector apply_to_amplitudes(const Matrix& u, const std::vector<int>& targets, const Vector& amps,
                           int n_qubits) {
  const int k = arity_of_dim(u.rows());
  check_targets(targets, k, n_qubits);
  const std::int64_t dim = amps.size();
  const std::int64_t local_dim = std::int64_t{1} << k;

  Vector out = amps;
  // Enumerate every assignment of the non-target qubits once, then mix the
  // 2^k amplitudes addressed by the target qubits through u.
  std::vector<std::int64_t> strides(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    strides[static_cast<std::size_t>(j)] = std::int64_t{1} << (n_qubits - 1 - targets[j]);
  }
  std::uint64_t target_mask = 0;
  for (int q : targets) target_mask |= 1ULL << (n_qubits - 1 - q);

  Vector gathered(local_dim);
  for (std::int64_t base = 0; base < dim; ++base) {
    if (static_cast<std::uint64_t>(base) & target_mask) continue;
    for (std::int64_t l = 0; l < local_dim; ++l) {
      std::int64_t idx = base;
      for (int j = 0; j < k; ++j) {
        if ((l >> (k - 1 - j)) & 1) idx |= strides[static_cast<std::size_t>(j)];
      }
      gathered(l) = amps(idx);
    }
    Vector mixed = u * gathered;
    for (std::int64_t l = 0; l < local_dim; ++l) {
      std::int64_t idx = base;
      for (int j = 0; j < k; ++j) {
        if ((l >> (k - 1 - j)) & 1) idx |= strides[static_cast<std::size_t>(j)];
      }
      out(idx) = mixed(l);
    }
  }
  return out;
}

StateVector apply(const Gate& u, const StateVector& psi) {
  if (u.dim() != psi.dim()) {
    throw std::invalid_argument("gate and state dimensions do not match");
  }
  return StateVector(psi.n_qubits(), u.matrix() * psi.amplitudes());
}

StateVector apply(const Gate& u, const std::vector<int>& targets, const StateVector& psi) {
  return StateVector(psi.n_qubits(),
                     apply_to_amplitudes(u.matrix(), targets, psi.amplitudes(), psi.n_qubits()));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (std::int64_t j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace qcsim
