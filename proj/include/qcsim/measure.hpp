#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsim/common.hpp"
#include "qcsim/state.hpp"

namespace qcsim {

// Hermitian observable with its spectral decomposition M = sum_i lambda_i P_i.
// Eigenvalues closer than 1e-8 are merged into one outcome. Outcomes are
// ordered by descending eigenvalue.
//
// Two storage forms share the same interface: a dense form (matrix plus
// projectors) and a diagonal form that only keeps the 2^n diagonal and the
// index sets of each outcome. The diagonal form exists so large diagonal
// observables (cost Hamiltonians, Z on every qubit) stay cheap; dense
// matrices and projectors are materialized on demand.
class Observable {
 public:
  static Observable spectral(const Matrix& m);
  static Observable diagonal(const Eigen::VectorXd& values, std::string label = "diagonal");
  static Observable z_all(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return std::int64_t{1} << n_qubits_; }
  const std::string& label() const { return label_; }
  bool stored_diagonal() const { return dense_.size() == 0; }

  int num_outcomes() const { return static_cast<int>(eigenvalues_.size()); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int outcome) const { return eigenvalues_.at(static_cast<std::size_t>(outcome)); }

  Matrix matrix() const;
  Matrix projector(int outcome) const;

  std::vector<double> probabilities(const StateVector& psi) const;
  double expectation(const StateVector& psi) const;
  StateVector collapse(const StateVector& psi, int outcome) const;

  // Density-matrix counterparts; rho is the raw matrix.
  std::vector<double> probabilities_density(const Matrix& rho) const;
  double expectation_density(const Matrix& rho) const;
  Matrix collapse_density(const Matrix& rho, int outcome) const;

 private:
  Observable() = default;

  int n_qubits_ = 0;
  std::string label_;
  std::vector<double> eigenvalues_;
  // dense form
  Matrix dense_;
  std::vector<Matrix> projectors_;
  // diagonal form
  Eigen::VectorXd diag_;
  std::vector<std::vector<std::int64_t>> outcome_indices_;
};

struct MeasurementRecord {
  int outcome;
  double eigenvalue;
  double probability;
  StateVector post_state;
};

MeasurementRecord measure_once(const Observable& obs, const StateVector& psi, RandomStream& rng);

double expectation(const Observable& obs, const StateVector& psi);

struct ShotEstimate {
  double estimate;
  double std_error;  // sample standard deviation / sqrt(shots)
  std::uint64_t shots;
};

ShotEstimate estimate_expectation(const Observable& obs, const StateVector& psi,
                                  std::uint64_t shots, RandomStream& rng);

// Labeled complete set of orthogonal projectors (syndrome measurements).
// Completeness (sum = I within 1e-9) is checked on construction; idempotence
// and orthogonality can be verified separately via validate().
class ProjectorSet {
 public:
  ProjectorSet(std::vector<std::string> labels, std::vector<Matrix> projectors);

  int size() const { return static_cast<int>(projectors_.size()); }
  std::int64_t dim() const { return projectors_.front().rows(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }
  const Matrix& projector(int i) const { return projectors_.at(static_cast<std::size_t>(i)); }

  std::vector<double> probabilities(const StateVector& psi) const;
  StateVector collapse(const StateVector& psi, int outcome) const;
  void validate(double tol = 1e-9) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Matrix> projectors_;
};

struct ProjectiveRecord {
  int outcome;
  std::string label;
  double probability;
  StateVector post_state;
};

ProjectiveRecord measure_once(const ProjectorSet& set, const StateVector& psi, RandomStream& rng);

// Shared helper: draws an index from a probability vector (entries below
// 1e-14 are treated as zero).
int sample_outcome(const std::vector<double>& probabilities, RandomStream& rng);

}  // namespace qcsim
