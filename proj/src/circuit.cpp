#include "qcsim/circuit.hpp"

#include <cmath>
#include <sstream>

namespace qcsim {

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
  if (n_qubits > max_state_qubits()) {
    throw std::invalid_argument("circuit register exceeds the qubit cap");
  }
}

Circuit& Circuit::add(Gate gate, std::vector<int> targets) {
  check_targets(targets, gate.arity(), n_qubits_);
  ops_.push_back(CircuitOp{std::move(gate), std::move(targets)});
  return *this;
}

void Circuit::set_observable(Observable obs) {
  if (obs.n_qubits() != n_qubits_) {
    throw std::invalid_argument("observable register size does not match the circuit");
  }
  observable_ = std::move(obs);
}

const Observable& Circuit::observable() const {
  if (observable_) return *observable_;
  if (!default_observable_) default_observable_ = Observable::z_all(n_qubits_);
  return *default_observable_;
}

StateVector run_statevector(const Circuit& c, const StateVector& initial) {
  if (initial.n_qubits() != c.n_qubits()) {
    throw std::invalid_argument("initial state does not match the circuit register");
  }
  Vector amps = initial.amplitudes();
  for (const CircuitOp& op : c.ops()) {
    amps = apply_to_amplitudes(op.gate.matrix(), op.targets, amps, c.n_qubits());
  }
  return StateVector(c.n_qubits(), std::move(amps));
}

StateVector run_statevector(const Circuit& c) {
  return run_statevector(c, StateVector::zero(c.n_qubits()));
}

std::string format_eigenvalue(double value) {
  std::ostringstream os;
  os.precision(12);
  os << value;
  return os.str();
}

ShotResult run_and_measure(const Circuit& c, const StateVector& initial, std::uint64_t shots,
                           RandomStream& rng, Readout readout) {
  if (shots == 0) throw std::invalid_argument("run_and_measure needs at least one shot");
  // Evolution is deterministic and the measurement is terminal, so the
  // pre-measurement state is computed once and every shot samples from it.
  const StateVector psi = run_statevector(c, initial);

  ShotResult result;
  if (readout == Readout::bitstring) {
    std::vector<double> probs(static_cast<std::size_t>(psi.dim()));
    for (std::int64_t i = 0; i < psi.dim(); ++i) {
      probs[static_cast<std::size_t>(i)] = std::norm(psi.amplitudes()(i));
    }
    for (std::uint64_t t = 0; t < shots; ++t) {
      const int idx = sample_outcome(probs, rng);
      result.histogram[to_bitstring(static_cast<std::uint64_t>(idx), c.n_qubits())]++;
    }
    return result;
  }

  const Observable& obs = c.observable();
  const auto probs = obs.probabilities(psi);
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t t = 0; t < shots; ++t) {
    counts[static_cast<std::size_t>(sample_outcome(probs, rng))]++;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) {
      result.histogram[format_eigenvalue(obs.eigenvalue(static_cast<int>(i)))] = counts[i];
    }
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
  result.estimate = ShotEstimate{mean, std_error, shots};
  return result;
}

Matrix unitary_of(const Circuit& c) {
  if (c.n_qubits() > max_density_qubits()) {
    throw std::invalid_argument("dense circuit unitary is limited to small registers");
  }
  const std::int64_t dim = std::int64_t{1} << c.n_qubits();
  Matrix u = Matrix::Identity(dim, dim);
  for (const CircuitOp& op : c.ops()) {
    u = embed(op.gate.matrix(), op.targets, c.n_qubits()) * u;
  }
  return u;
}

Circuit qft(int n_qubits) {
  Circuit c(n_qubits);
  for (int q = 0; q < n_qubits; ++q) {
    c.add(hadamard(), {q});
    for (int k = 2; k <= n_qubits - q; ++k) {
      const int control = q + k - 1;
      if (k == 2) {
        c.add(controlled(phase_s()), {control, q});
      } else if (k == 3) {
        c.add(controlled(phase_t()), {control, q});
      } else {
        c.add(controlled(phase_gate(2.0 * M_PI / std::pow(2.0, k))), {control, q});
      }
    }
  }
  for (int q = 0; q < n_qubits / 2; ++q) {
    c.add(swap_gate(), {q, n_qubits - 1 - q});
  }
  return c;
}

Matrix dft_matrix(int n_qubits) {
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  Matrix f(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::int64_t k = 0; k < dim; ++k) {
    for (std::int64_t j = 0; j < dim; ++j) {
      const double angle = 2.0 * M_PI * static_cast<double>(j) * static_cast<double>(k) /
                           static_cast<double>(dim);
      f(k, j) = norm * std::exp(Complex(0.0, angle));
    }
  }
  return f;
}

}  // namespace qcsim
