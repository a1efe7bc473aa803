#include "qcsim/density.hpp"

#include <algorithm>
#include <cmath>

namespace qcsim {

namespace {
void check_density_qubits(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("density matrix needs at least one qubit");
  if (n_qubits > max_density_qubits()) {
    throw std::invalid_argument("density matrix of " + std::to_string(n_qubits) +
                                " qubits exceeds the cap of " +
                                std::to_string(max_density_qubits()));
  }
}

// Positive square root of a PSD matrix; tiny negative eigenvalues are clamped.
Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Eigen::VectorXd evals = es.eigenvalues();
  for (std::int64_t i = 0; i < evals.size(); ++i) evals(i) = std::sqrt(std::max(0.0, evals(i)));
  return es.eigenvectors() * evals.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace

DensityMatrix::DensityMatrix(int n_qubits, Matrix rho) : n_qubits_(n_qubits) {
  check_density_qubits(n_qubits);
  const std::int64_t expected = std::int64_t{1} << n_qubits;
  if (rho.rows() != expected || rho.cols() != expected) {
    throw std::invalid_argument("density matrix must be " + std::to_string(expected) + "x" +
                                std::to_string(expected));
  }
  const double herm_dev = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > kNormRepairTol) {
    throw std::invalid_argument("density matrix deviates from Hermitian by more than 1e-8");
  }
  rho = (rho + rho.adjoint()) / 2.0;
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > kNormRepairTol) {
    throw std::invalid_argument("density matrix trace " + std::to_string(trace) +
                                " deviates from 1 by more than 1e-8");
  }
  rho_ = rho / trace;
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  check_density_qubits(psi.n_qubits());
  Matrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityMatrix(psi.n_qubits(), std::move(rho));
}

DensityMatrix DensityMatrix::from_ensemble(const std::vector<double>& probabilities,
                                           const std::vector<StateVector>& states) {
  if (probabilities.empty() || probabilities.size() != states.size()) {
    throw std::invalid_argument("ensemble needs one probability per state");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) throw std::invalid_argument("ensemble probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("ensemble probabilities must sum to 1 within 1e-9");
  }
  const int n = states.front().n_qubits();
  Matrix rho = Matrix::Zero(states.front().dim(), states.front().dim());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].n_qubits() != n) {
      throw std::invalid_argument("ensemble states must share one register size");
    }
    rho += (probabilities[i] / total) *
           (states[i].amplitudes() * states[i].amplitudes().adjoint());
  }
  return DensityMatrix(n, std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  check_density_qubits(n_qubits);
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  return DensityMatrix(n_qubits,
                       Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

bool DensityMatrix::is_valid(double tol) const {
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho_.trace().real() - 1.0) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_);
  return es.eigenvalues().minCoeff() > -tol;
}

DensityMatrix apply_gate(const Gate& u, const DensityMatrix& rho) {
  if (u.dim() != rho.dim()) throw std::invalid_argument("gate and density dimensions differ");
  return DensityMatrix(rho.n_qubits(), u.matrix() * rho.matrix() * u.matrix().adjoint());
}

DensityMatrix apply_gate(const Gate& u, const std::vector<int>& targets, const DensityMatrix& rho) {
  const Matrix full = embed(u.matrix(), targets, rho.n_qubits());
  return DensityMatrix(rho.n_qubits(), full * rho.matrix() * full.adjoint());
}

std::vector<double> outcome_probabilities(const Observable& obs, const DensityMatrix& rho) {
  return obs.probabilities_density(rho.matrix());
}

double expectation(const Observable& obs, const DensityMatrix& rho) {
  return obs.expectation_density(rho.matrix());
}

DensityMatrix collapse(const Observable& obs, const DensityMatrix& rho, int outcome) {
  return DensityMatrix(rho.n_qubits(), obs.collapse_density(rho.matrix(), outcome));
}

ShotEstimate estimate_expectation(const Observable& obs, const DensityMatrix& rho,
                                  std::uint64_t shots, RandomStream& rng) {
  if (shots == 0) throw std::invalid_argument("shot estimation needs at least one shot");
  const auto probs = outcome_probabilities(obs, rho);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t t = 0; t < shots; ++t) {
    counts[static_cast<std::size_t>(sample_outcome(probs, rng))]++;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    mean += obs.eigenvalue(static_cast<int>(i)) * static_cast<double>(counts[i]);
  }
  mean /= static_cast<double>(shots);
  double ssq = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double dev = obs.eigenvalue(static_cast<int>(i)) - mean;
    ssq += dev * dev * static_cast<double>(counts[i]);
  }
  double std_error = 0.0;
  if (shots > 1) {
    std_error = std::sqrt(ssq / static_cast<double>(shots - 1) / static_cast<double>(shots));
  }
  return ShotEstimate{mean, std_error, shots};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& traced) {
  const int n = rho.n_qubits();
  std::vector<bool> is_traced(static_cast<std::size_t>(n), false);
  for (int q : traced) {
    if (q < 0 || q >= n) throw std::out_of_range("traced qubit out of range");
    if (is_traced[static_cast<std::size_t>(q)]) {
      throw std::invalid_argument("traced qubits must be distinct");
    }
    is_traced[static_cast<std::size_t>(q)] = true;
  }
  std::vector<int> kept;
  for (int q = 0; q < n; ++q) {
    if (!is_traced[static_cast<std::size_t>(q)]) kept.push_back(q);
  }
  if (kept.empty()) throw std::invalid_argument("cannot trace out every qubit");

  const int nk = static_cast<int>(kept.size());
  const int nt = n - nk;
  const std::int64_t kdim = std::int64_t{1} << nk;
  const std::int64_t tdim = std::int64_t{1} << nt;

  auto compose = [&](std::int64_t kept_idx, std::int64_t traced_idx) {
    std::uint64_t full = 0;
    for (int j = 0; j < nk; ++j) {
      full = with_qubit_bit(full, kept[static_cast<std::size_t>(j)], n,
                            static_cast<int>((kept_idx >> (nk - 1 - j)) & 1));
    }
    int t = 0;
    for (int q = 0; q < n; ++q) {
      if (!is_traced[static_cast<std::size_t>(q)]) continue;
      full = with_qubit_bit(full, q, n, static_cast<int>((traced_idx >> (nt - 1 - t)) & 1));
      ++t;
    }
    return static_cast<std::int64_t>(full);
  };

  Matrix out = Matrix::Zero(kdim, kdim);
  for (std::int64_t a = 0; a < kdim; ++a) {
    for (std::int64_t b = 0; b < kdim; ++b) {
      Complex acc(0.0, 0.0);
      for (std::int64_t t = 0; t < tdim; ++t) {
        acc += rho.matrix()(compose(a, t), compose(b, t));
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix(nk, std::move(out));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix() - b.matrix());
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  const Matrix sb = psd_sqrt(b.matrix());
  const Matrix inner = sb * a.matrix() * sb;
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner);
  double f = 0.0;
  for (std::int64_t i = 0; i < es.eigenvalues().size(); ++i) {
    f += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  }
  return std::min(1.0, f);
}

}  // namespace qcsim
