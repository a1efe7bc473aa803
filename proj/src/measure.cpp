#include "qcsim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcsim {

namespace {
int qubits_of_dim(std::int64_t dim) {
  int n = 0;
  while ((std::int64_t{1} << n) < dim) ++n;
  if ((std::int64_t{1} << n) != dim) {
    throw std::invalid_argument("dimension must be a power of two");
  }
  return n;
}

// Clusters sorted values whose neighbors differ by at most 1e-8.
std::vector<std::vector<std::int64_t>> group_sorted(const Eigen::VectorXd& sorted_values,
                                                    const std::vector<std::int64_t>& order) {
  std::vector<std::vector<std::int64_t>> groups;
  for (std::int64_t pos = 0; pos < sorted_values.size(); ++pos) {
    if (groups.empty() ||
        std::abs(sorted_values(pos) - sorted_values(pos - 1)) > kDegeneracyTol) {
      groups.emplace_back();
    }
    groups.back().push_back(order[static_cast<std::size_t>(pos)]);
  }
  return groups;
}
}  // namespace

Observable Observable::spectral(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("observable must be square");
  if (!is_hermitian(m, kTol)) {
    throw std::invalid_argument("observable must be Hermitian within 1e-10");
  }

  // A numerically diagonal input keeps the cheap representation.
  Matrix off = m;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() <= kTol && m.rows() > 2) {
    return diagonal(m.diagonal().real(), "diagonal");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXd evals = es.eigenvalues();  // ascending
  const Matrix& vecs = es.eigenvectors();

  std::vector<std::int64_t> order(static_cast<std::size_t>(evals.size()));
  std::iota(order.begin(), order.end(), 0);
  auto groups = group_sorted(evals, order);
  std::reverse(groups.begin(), groups.end());  // by descending eigenvalue

  Observable obs;
  obs.n_qubits_ = qubits_of_dim(m.rows());
  obs.label_ = "spectral";
  obs.dense_ = m;
  for (const auto& group : groups) {
    double mean = 0.0;
    Matrix p = Matrix::Zero(m.rows(), m.cols());
    for (std::int64_t idx : group) {
      mean += evals(idx);
      p += vecs.col(idx) * vecs.col(idx).adjoint();
    }
    obs.eigenvalues_.push_back(mean / static_cast<double>(group.size()));
    obs.projectors_.push_back(std::move(p));
  }
  return obs;
}

Observable Observable::diagonal(const Eigen::VectorXd& values, std::string label) {
  Observable obs;
  obs.n_qubits_ = qubits_of_dim(values.size());
  obs.label_ = std::move(label);
  obs.diag_ = values;

  std::vector<std::int64_t> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::int64_t a, std::int64_t b) { return values(a) < values(b); });
  Eigen::VectorXd sorted(values.size());
  for (std::int64_t i = 0; i < values.size(); ++i) sorted(i) = values(order[static_cast<std::size_t>(i)]);

  auto groups = group_sorted(sorted, order);
  std::reverse(groups.begin(), groups.end());
  for (auto& group : groups) {
    double mean = 0.0;
    for (std::int64_t idx : group) mean += values(idx);
    obs.eigenvalues_.push_back(mean / static_cast<double>(group.size()));
    std::sort(group.begin(), group.end());
    obs.outcome_indices_.push_back(std::move(group));
  }
  return obs;
}

Observable Observable::z_all(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("z_all needs at least one qubit");
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  Eigen::VectorXd d(dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    const int ones = __builtin_popcountll(static_cast<unsigned long long>(x));
    d(x) = (ones % 2 == 0) ? 1.0 : -1.0;
  }
  Observable obs = diagonal(d, "Z^" + std::to_string(n_qubits));
  return obs;
}

Matrix Observable::matrix() const {
  if (!stored_diagonal()) return dense_;
  Matrix m = Matrix::Zero(dim(), dim());
  m.diagonal() = diag_.cast<Complex>();
  return m;
}

Matrix Observable::projector(int outcome) const {
  if (outcome < 0 || outcome >= num_outcomes()) throw std::out_of_range("outcome out of range");
  if (!stored_diagonal()) return projectors_[static_cast<std::size_t>(outcome)];
  Matrix p = Matrix::Zero(dim(), dim());
  for (std::int64_t idx : outcome_indices_[static_cast<std::size_t>(outcome)]) p(idx, idx) = 1.0;
  return p;
}

std::vector<double> Observable::probabilities(const StateVector& psi) const {
  if (psi.dim() != dim()) throw std::invalid_argument("observable and state dimensions differ");
  std::vector<double> probs(static_cast<std::size_t>(num_outcomes()), 0.0);
  if (stored_diagonal()) {
    for (int i = 0; i < num_outcomes(); ++i) {
      double p = 0.0;
      for (std::int64_t idx : outcome_indices_[static_cast<std::size_t>(i)]) {
        p += std::norm(psi.amplitudes()(idx));
      }
      probs[static_cast<std::size_t>(i)] = p;
    }
  } else {
    for (int i = 0; i < num_outcomes(); ++i) {
      const Complex val =
          psi.amplitudes().dot(projectors_[static_cast<std::size_t>(i)] * psi.amplitudes());
      probs[static_cast<std::size_t>(i)] = std::max(0.0, val.real());
    }
  }
  for (double& p : probs) {
    if (p < kProbFloor) p = 0.0;
  }
  return probs;
}

double Observable::expectation(const StateVector& psi) const {
  if (psi.dim() != dim()) throw std::invalid_argument("observable and state dimensions differ");
  if (stored_diagonal()) {
    double acc = 0.0;
    for (std::int64_t idx = 0; idx < psi.dim(); ++idx) {
      acc += diag_(idx) * std::norm(psi.amplitudes()(idx));
    }
    return acc;
  }
  return psi.amplitudes().dot(dense_ * psi.amplitudes()).real();
}

StateVector Observable::collapse(const StateVector& psi, int outcome) const {
  if (outcome < 0 || outcome >= num_outcomes()) throw std::out_of_range("outcome out of range");
  Vector projected;
  if (stored_diagonal()) {
    projected = Vector::Zero(psi.dim());
    for (std::int64_t idx : outcome_indices_[static_cast<std::size_t>(outcome)]) {
      projected(idx) = psi.amplitudes()(idx);
    }
  } else {
    projected = projectors_[static_cast<std::size_t>(outcome)] * psi.amplitudes();
  }
  const double norm = projected.norm();
  if (norm * norm <= kProbFloor) {
    throw std::runtime_error("cannot collapse onto an outcome of zero probability");
  }
  return StateVector(psi.n_qubits(), projected / norm);
}

std::vector<double> Observable::probabilities_density(const Matrix& rho) const {
  if (rho.rows() != dim()) throw std::invalid_argument("observable and density dimensions differ");
  std::vector<double> probs(static_cast<std::size_t>(num_outcomes()), 0.0);
  for (int i = 0; i < num_outcomes(); ++i) {
    double p = 0.0;
    if (stored_diagonal()) {
      for (std::int64_t idx : outcome_indices_[static_cast<std::size_t>(i)]) {
        p += rho(idx, idx).real();
      }
    } else {
      p = (projectors_[static_cast<std::size_t>(i)] * rho).trace().real();
    }
    probs[static_cast<std::size_t>(i)] = (p < kProbFloor) ? 0.0 : p;
  }
  return probs;
}

double Observable::expectation_density(const Matrix& rho) const {
  if (rho.rows() != dim()) throw std::invalid_argument("observable and density dimensions differ");
  if (stored_diagonal()) {
    double acc = 0.0;
    for (std::int64_t idx = 0; idx < rho.rows(); ++idx) acc += diag_(idx) * rho(idx, idx).real();
    return acc;
  }
  return (dense_ * rho).trace().real();
}

Matrix Observable::collapse_density(const Matrix& rho, int outcome) const {
  if (outcome < 0 || outcome >= num_outcomes()) throw std::out_of_range("outcome out of range");
  const Matrix p = projector(outcome);
  Matrix projected = p * rho * p;
  const double weight = projected.trace().real();
  if (weight <= kProbFloor) {
    throw std::runtime_error("cannot collapse onto an outcome of zero probability");
  }
  return projected / weight;
}

int sample_outcome(const std::vector<double>& probabilities, RandomStream& rng) {
  double total = 0.0;
  for (double p : probabilities) total += (p < kProbFloor ? 0.0 : p);
  if (total <= 0.0) throw std::runtime_error("no outcome has positive probability");
  const double draw = rng.uniform01() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i] < kProbFloor ? 0.0 : probabilities[i];
    if (p <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += p;
    if (draw < acc) return static_cast<int>(i);
  }
  return last_positive;
}

MeasurementRecord measure_once(const Observable& obs, const StateVector& psi, RandomStream& rng) {
  const auto probs = obs.probabilities(psi);
  const int outcome = sample_outcome(probs, rng);
  return MeasurementRecord{outcome, obs.eigenvalue(outcome), probs[static_cast<std::size_t>(outcome)],
                           obs.collapse(psi, outcome)};
}

double expectation(const Observable& obs, const StateVector& psi) { return obs.expectation(psi); }

ShotEstimate estimate_expectation(const Observable& obs, const StateVector& psi,
                                  std::uint64_t shots, RandomStream& rng) {
  if (shots == 0) throw std::invalid_argument("shot estimation needs at least one shot");
  const auto probs = obs.probabilities(psi);
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
    const double sample_var = ssq / static_cast<double>(shots - 1);
    std_error = std::sqrt(sample_var / static_cast<double>(shots));
  }
  return ShotEstimate{mean, std_error, shots};
}

ProjectorSet::ProjectorSet(std::vector<std::string> labels, std::vector<Matrix> projectors)
    : labels_(std::move(labels)), projectors_(std::move(projectors)) {
  if (projectors_.empty()) throw std::invalid_argument("projector set must not be empty");
  if (labels_.size() != projectors_.size()) {
    throw std::invalid_argument("each projector needs a label");
  }
  const std::int64_t d = projectors_.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& p : projectors_) {
    if (p.rows() != d || p.cols() != d) {
      throw std::invalid_argument("projectors must share one dimension");
    }
    sum += p;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("projectors must sum to the identity within 1e-9");
  }
}

void ProjectorSet::validate(double tol) const {
  const std::int64_t d = dim();
  if (d <= 64) {
    for (int i = 0; i < size(); ++i) {
      const Matrix& p = projector(i);
      if ((p * p - p).cwiseAbs().maxCoeff() > tol) {
        throw std::runtime_error("projector '" + label(i) + "' is not idempotent");
      }
      if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw std::runtime_error("projector '" + label(i) + "' is not Hermitian");
      }
      for (int j = i + 1; j < size(); ++j) {
        if ((p * projector(j)).cwiseAbs().maxCoeff() > tol) {
          throw std::runtime_error("projectors '" + label(i) + "' and '" + label(j) +
                                   "' are not orthogonal");
        }
      }
    }
    return;
  }
  // Large sets are probed with random vectors instead of full products.
  RandomStream rng(0x9e3779b9u);
  for (int probe = 0; probe < 8; ++probe) {
    Vector v(d);
    for (std::int64_t idx = 0; idx < d; ++idx) {
      v(idx) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
    v.normalize();
    for (int i = 0; i < size(); ++i) {
      const Vector pv = projector(i) * v;
      if ((projector(i) * pv - pv).cwiseAbs().maxCoeff() > tol * 10) {
        throw std::runtime_error("projector '" + label(i) + "' failed an idempotence probe");
      }
      for (int j = i + 1; j < size(); ++j) {
        if ((projector(j) * pv).cwiseAbs().maxCoeff() > tol * 10) {
          throw std::runtime_error("projectors '" + label(i) + "' and '" + label(j) +
                                   "' failed an orthogonality probe");
        }
      }
    }
  }
}

std::vector<double> ProjectorSet::probabilities(const StateVector& psi) const {
  if (psi.dim() != dim()) throw std::invalid_argument("projector and state dimensions differ");
  std::vector<double> probs(static_cast<std::size_t>(size()), 0.0);
  for (int i = 0; i < size(); ++i) {
    const Complex val = psi.amplitudes().dot(projectors_[static_cast<std::size_t>(i)] * psi.amplitudes());
    probs[static_cast<std::size_t>(i)] = std::max(0.0, val.real());
    if (probs[static_cast<std::size_t>(i)] < kProbFloor) probs[static_cast<std::size_t>(i)] = 0.0;
  }
  return probs;
}

StateVector ProjectorSet::collapse(const StateVector& psi, int outcome) const {
  if (outcome < 0 || outcome >= size()) throw std::out_of_range("outcome out of range");
  Vector projected = projectors_[static_cast<std::size_t>(outcome)] * psi.amplitudes();
  const double norm = projected.norm();
  if (norm * norm <= kProbFloor) {
    throw std::runtime_error("cannot collapse onto an outcome of zero probability");
  }
  return StateVector(psi.n_qubits(), projected / norm);
}

ProjectiveRecord measure_once(const ProjectorSet& set, const StateVector& psi, RandomStream& rng) {
  const auto probs = set.probabilities(psi);
  const int outcome = sample_outcome(probs, rng);
  return ProjectiveRecord{outcome, set.label(outcome), probs[static_cast<std::size_t>(outcome)],
                          set.collapse(psi, outcome)};
}

}  // namespace qcsim
