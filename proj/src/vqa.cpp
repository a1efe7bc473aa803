#include "qcsim/vqa.hpp"

#include <algorithm>
#include <cmath>

#include "qcsim/gates.hpp"

namespace qcsim {

namespace {
constexpr double kTwoValuedTol = 1e-9;
constexpr double kGammaFloor = 1e-15;
}  // namespace

ParameterizedCircuit::ParameterizedCircuit(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("ansatz needs at least one qubit");
  if (n_qubits > max_state_qubits()) {
    throw std::invalid_argument("ansatz register exceeds the qubit cap");
  }
}

void ParameterizedCircuit::register_slot(const Slot& slot) {
  switch (slot.kind) {
    case Slot::Kind::trainable:
      if (slot.index != num_trainable_) {
        throw std::invalid_argument("trainable indices must be added as 0, 1, 2, ... (got " +
                                    std::to_string(slot.index) + ", expected " +
                                    std::to_string(num_trainable_) + ")");
      }
      trainable_layer_of_.push_back(static_cast<int>(layers_.size()));
      ++num_trainable_;
      break;
    case Slot::Kind::data:
      if (slot.index != num_data_) {
        throw std::invalid_argument("data indices must be added as 0, 1, 2, ...");
      }
      ++num_data_;
      break;
    case Slot::Kind::fixed:
      break;
  }
}

ParameterizedCircuit& ParameterizedCircuit::add_rotation(Axis axis, int qubit, Slot slot) {
  return add_generator(0.5 * pauli(axis).matrix(), {qubit}, slot,
                       std::string("R") + (axis == Axis::x ? "X" : axis == Axis::y ? "Y" : "Z"));
}

ParameterizedCircuit& ParameterizedCircuit::add_generator(const Matrix& h, std::vector<int> targets,
                                                          Slot slot, std::string label) {
  if (!is_hermitian(h, kTol)) {
    throw std::invalid_argument("layer generator must be Hermitian within 1e-10");
  }
  check_targets(targets, [&] {
    int a = 0;
    while ((std::int64_t{1} << a) < h.rows()) ++a;
    return a;
  }(), n_qubits_);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  Layer layer;
  layer.kind = Layer::Kind::dense;
  layer.slot = slot;
  layer.targets = std::move(targets);
  layer.evecs = es.eigenvectors();
  layer.evals = es.eigenvalues();
  layer.label = label.empty() ? "gen" : std::move(label);
  register_slot(slot);
  layers_.push_back(std::move(layer));
  return *this;
}

ParameterizedCircuit& ParameterizedCircuit::add_diagonal_generator(const Eigen::VectorXd& diag,
                                                                   Slot slot, std::string label) {
  if (diag.size() != (std::int64_t{1} << n_qubits_)) {
    throw std::invalid_argument("diagonal generator must cover the full register");
  }
  Layer layer;
  layer.kind = Layer::Kind::diagonal;
  layer.slot = slot;
  layer.diag = diag;
  layer.label = label.empty() ? "diag" : std::move(label);
  register_slot(slot);
  layers_.push_back(std::move(layer));
  return *this;
}

ParameterizedCircuit& ParameterizedCircuit::add_x_mixer(Slot slot) {
  Layer layer;
  layer.kind = Layer::Kind::mixer;
  layer.slot = slot;
  layer.label = "mixer";
  register_slot(slot);
  layers_.push_back(std::move(layer));
  return *this;
}

ParameterizedCircuit& ParameterizedCircuit::add_gate(const Gate& gate, std::vector<int> targets) {
  check_targets(targets, gate.arity(), n_qubits_);
  Layer layer;
  layer.kind = Layer::Kind::gate;
  layer.slot = Slot::fixed(0.0);
  layer.targets = std::move(targets);
  layer.gate_matrix = gate.matrix();
  layer.label = gate.label();
  layers_.push_back(std::move(layer));
  return *this;
}

void ParameterizedCircuit::set_observable(Observable obs) {
  if (obs.n_qubits() != n_qubits_) {
    throw std::invalid_argument("observable register size does not match the ansatz");
  }
  observable_ = std::move(obs);
}

const Observable& ParameterizedCircuit::observable() const {
  if (!observable_) throw std::logic_error("no observable set on the ansatz");
  return *observable_;
}

void ParameterizedCircuit::set_initial_state(StateVector psi0) {
  if (psi0.n_qubits() != n_qubits_) {
    throw std::invalid_argument("initial state does not match the ansatz register");
  }
  psi0_ = std::move(psi0);
}

const StateVector& ParameterizedCircuit::initial_state() const {
  if (!psi0_) {
    const_cast<ParameterizedCircuit*>(this)->psi0_ = StateVector::zero(n_qubits_);
  }
  return *psi0_;
}

StateVector ParameterizedCircuit::prepare(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& x) const {
  if (theta.size() != num_trainable_) {
    throw std::invalid_argument("theta has " + std::to_string(theta.size()) + " entries, ansatz has " +
                                std::to_string(num_trainable_) + " trainable parameters");
  }
  if (x.size() != num_data_) {
    throw std::invalid_argument("x has " + std::to_string(x.size()) + " entries, ansatz has " +
                                std::to_string(num_data_) + " data parameters");
  }

  Vector amps = initial_state().amplitudes();
  for (const Layer& layer : layers_) {
    double angle = 0.0;
    switch (layer.slot.kind) {
      case Slot::Kind::trainable:
        angle = theta(layer.slot.index);
        break;
      case Slot::Kind::data:
        angle = x(layer.slot.index);
        break;
      case Slot::Kind::fixed:
        angle = layer.slot.value;
        break;
    }
    switch (layer.kind) {
      case Layer::Kind::dense: {
        Vector phases(layer.evals.size());
        for (std::int64_t i = 0; i < layer.evals.size(); ++i) {
          phases(i) = std::exp(Complex(0.0, -angle * layer.evals(i)));
        }
        const Matrix u = layer.evecs * phases.asDiagonal() * layer.evecs.adjoint();
        amps = apply_to_amplitudes(u, layer.targets, amps, n_qubits_);
        break;
      }
      case Layer::Kind::diagonal: {
        for (std::int64_t i = 0; i < amps.size(); ++i) {
          amps(i) *= std::exp(Complex(0.0, -angle * layer.diag(i)));
        }
        break;
      }
      case Layer::Kind::mixer: {
        const Matrix rx = rotation(Axis::x, 2.0 * angle).matrix();
        for (int q = 0; q < n_qubits_; ++q) {
          amps = apply_to_amplitudes(rx, {q}, amps, n_qubits_);
        }
        break;
      }
      case Layer::Kind::gate: {
        amps = apply_to_amplitudes(layer.gate_matrix, layer.targets, amps, n_qubits_);
        break;
      }
    }
  }
  return StateVector(n_qubits_, std::move(amps));
}

const ParameterizedCircuit::Layer& ParameterizedCircuit::trainable_layer(int index) const {
  if (index < 0 || index >= num_trainable_) {
    throw std::out_of_range("trainable index out of range");
  }
  return layers_[static_cast<std::size_t>(trainable_layer_of_[static_cast<std::size_t>(index)])];
}

double ParameterizedCircuit::shift_constant(int trainable_index) const {
  const Layer& layer = trainable_layer(trainable_index);
  std::vector<double> values;
  switch (layer.kind) {
    case Layer::Kind::dense:
      for (std::int64_t i = 0; i < layer.evals.size(); ++i) values.push_back(layer.evals(i));
      break;
    case Layer::Kind::diagonal:
      for (std::int64_t i = 0; i < layer.diag.size(); ++i) values.push_back(layer.diag(i));
      break;
    case Layer::Kind::mixer: {
      // sum_j X_j on n qubits has eigenvalues n - 2k, k = 0..n.
      for (int k = 0; k <= n_qubits_; ++k) values.push_back(n_qubits_ - 2 * k);
      break;
    }
    case Layer::Kind::gate:
      throw std::logic_error("fixed gate layers carry no parameter");
  }
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  for (double v : values) {
    if (distinct.empty() || std::abs(v - distinct.back()) > kTwoValuedTol) distinct.push_back(v);
  }
  if (distinct.size() != 2 || std::abs(distinct[0] + distinct[1]) > kTwoValuedTol) {
    throw std::invalid_argument(
        "parameter-shift rule needs a generator spectrum {-r, +r}; layer '" + layer.label +
        "' does not qualify");
  }
  return distinct[1];
}

double evaluate_cost(const ParameterizedCircuit& pc, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& x, const EvalMode& mode, RandomStream* rng) {
  const StateVector psi = pc.prepare(theta, x);
  if (mode.is_exact()) return pc.observable().expectation(psi);
  if (rng == nullptr) throw std::invalid_argument("shot-based evaluation needs a random stream");
  if (mode.shots == 0) throw std::invalid_argument("shot-based evaluation needs shots >= 1");
  return estimate_expectation(pc.observable(), psi, mode.shots, *rng).estimate;
}

Eigen::VectorXd parameter_shift_gradient(const ParameterizedCircuit& pc,
                                         const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
                                         const EvalMode& mode, RandomStream* rng) {
  Eigen::VectorXd grad(pc.num_trainable());
  for (int j = 0; j < pc.num_trainable(); ++j) {
    const double r = pc.shift_constant(j);
    const double s = M_PI / (4.0 * r);
    Eigen::VectorXd plus = theta;
    Eigen::VectorXd minus = theta;
    plus(j) += s;
    minus(j) -= s;
    grad(j) = r * (evaluate_cost(pc, plus, x, mode, rng) - evaluate_cost(pc, minus, x, mode, rng));
  }
  return grad;
}

Eigen::VectorXd finite_difference_gradient(const ParameterizedCircuit& pc,
                                           const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
                                           double step, const EvalMode& mode, RandomStream* rng) {
  if (step <= 0.0) throw std::invalid_argument("finite difference step must be positive");
  Eigen::VectorXd grad(pc.num_trainable());
  for (int j = 0; j < pc.num_trainable(); ++j) {
    Eigen::VectorXd plus = theta;
    Eigen::VectorXd minus = theta;
    plus(j) += step;
    minus(j) -= step;
    grad(j) = (evaluate_cost(pc, plus, x, mode, rng) - evaluate_cost(pc, minus, x, mode, rng)) /
              (2.0 * step);
  }
  return grad;
}

GdResult gradient_descent(const CostFn& cost, const GradFn& grad, Eigen::VectorXd theta0,
                          const GdOptions& options) {
  if (options.gamma <= 0.0) throw std::invalid_argument("step size must be positive");
  if (options.max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");

  GdResult result;
  result.final_gamma = options.gamma;
  Eigen::VectorXd theta = std::move(theta0);
  double current = cost(theta);
  result.history.push_back(GdStep{theta, current});

  double gamma = options.gamma;
  for (int k = 0; k < options.max_iters; ++k) {
    const Eigen::VectorXd g = grad(theta);
    if (g.norm() <= options.tol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd next = theta - gamma * g;
    double next_cost = cost(next);
    if (options.backtracking) {
      while (next_cost > current && gamma > kGammaFloor) {
        gamma /= 2.0;
        next = theta - gamma * g;
        next_cost = cost(next);
      }
      if (next_cost > current) break;  // stalled at the step-size floor
    }
    theta = std::move(next);
    current = next_cost;
    ++result.iterations;
    result.history.push_back(GdStep{theta, current});
  }
  if (!result.converged && result.iterations == options.max_iters && options.max_iters > 0) {
    // ran the full budget; leave converged=false
  }
  result.theta = std::move(theta);
  result.cost = current;
  result.final_gamma = gamma;
  return result;
}

namespace {
Eigen::VectorXd random_theta(int n, RandomStream& rng) {
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) theta(i) = rng.uniform(0.0, 2.0 * M_PI);
  return theta;
}

GdResult optimize_multistart(const ParameterizedCircuit& pc, const Eigen::VectorXd& x,
                             const MultiStartOptions& options, RandomStream& rng,
                             std::vector<double>* restart_costs, int* best_restart) {
  if (options.restarts < 1) throw std::invalid_argument("need at least one restart");
  GdOptions gd = options.gd;
  if (!options.mode.is_exact()) gd.backtracking = false;

  std::optional<GdResult> best;
  for (int r = 0; r < options.restarts; ++r) {
    RandomStream init_rng = rng.fork(2 * static_cast<std::uint64_t>(r));
    RandomStream eval_rng = rng.fork(2 * static_cast<std::uint64_t>(r) + 1);
    const Eigen::VectorXd theta0 = random_theta(pc.num_trainable(), init_rng);

    auto cost = [&](const Eigen::VectorXd& t) {
      return evaluate_cost(pc, t, x, options.mode, &eval_rng);
    };
    auto grad = [&](const Eigen::VectorXd& t) {
      return options.gradient == GradientMethod::parameter_shift
                 ? parameter_shift_gradient(pc, t, x, options.mode, &eval_rng)
                 : finite_difference_gradient(pc, t, x, 1e-5, options.mode, &eval_rng);
    };
    GdResult run = gradient_descent(cost, grad, theta0, gd);
    if (restart_costs) restart_costs->push_back(run.cost);
    if (!best || run.cost < best->cost) {
      if (best_restart) *best_restart = r;
      best = std::move(run);
    }
  }
  return *best;
}
}  // namespace

VqeResult vqe(const Observable& h, ParameterizedCircuit ansatz, const MultiStartOptions& options,
              RandomStream& rng) {
  ansatz.set_observable(h);
  if (ansatz.num_data() != 0) {
    throw std::invalid_argument("a VQE ansatz must not have data slots");
  }
  VqeResult result;
  result.best = optimize_multistart(ansatz, Eigen::VectorXd(), options, rng,
                                    &result.restart_costs, &result.best_restart);
  result.theta = result.best.theta;
  // Report the exact expectation at the optimum so the variational bound is
  // meaningful even when the optimizer ran on sampled costs.
  if (options.mode.is_exact()) {
    result.energy = result.best.cost;
  } else {
    result.energy = evaluate_cost(ansatz, result.theta, Eigen::VectorXd(), EvalMode::exact());
  }
  return result;
}

ParameterizedCircuit hardware_ansatz(int n_qubits, int layers) {
  if (layers < 1) throw std::invalid_argument("ansatz needs at least one layer");
  ParameterizedCircuit pc(n_qubits);
  int next = 0;
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n_qubits; ++q) pc.add_rotation(Axis::y, q, Slot::train(next++));
    for (int q = 0; q < n_qubits; ++q) pc.add_rotation(Axis::z, q, Slot::train(next++));
    for (int q = 0; q + 1 < n_qubits; ++q) pc.add_gate(cnot(), {q, q + 1});
  }
  for (int q = 0; q < n_qubits; ++q) pc.add_rotation(Axis::z, q, Slot::train(next++));
  for (int q = 0; q < n_qubits; ++q) pc.add_rotation(Axis::y, q, Slot::train(next++));
  for (int q = 0; q < n_qubits; ++q) pc.add_rotation(Axis::z, q, Slot::train(next++));
  return pc;
}

Observable build_cost_hamiltonian(int n_qubits, const std::function<double(std::uint64_t)>& q) {
  if (n_qubits < 1 || n_qubits > 12) {
    throw std::invalid_argument("cost Hamiltonians are materialized for 1..12 qubits");
  }
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  Eigen::VectorXd values(dim);
  for (std::int64_t x = 0; x < dim; ++x) values(x) = q(static_cast<std::uint64_t>(x));
  return Observable::diagonal(values, "cost");
}

Eigen::VectorXd max_cut_values(int n_nodes, const std::vector<std::pair<int, int>>& edges) {
  if (n_nodes < 1 || n_nodes > 12) throw std::invalid_argument("supported graph sizes: 1..12 nodes");
  const std::int64_t dim = std::int64_t{1} << n_nodes;
  Eigen::VectorXd values = Eigen::VectorXd::Zero(dim);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n_nodes || b < 0 || b >= n_nodes || a == b) {
      throw std::invalid_argument("edge endpoints must be distinct nodes");
    }
    for (std::int64_t x = 0; x < dim; ++x) {
      const int bit_a = qubit_bit(static_cast<std::uint64_t>(x), a, n_nodes);
      const int bit_b = qubit_bit(static_cast<std::uint64_t>(x), b, n_nodes);
      if (bit_a != bit_b) values(x) -= 1.0;
    }
  }
  return values;
}

QaoaResult qaoa(const Eigen::VectorXd& cost_values, const QaoaOptions& options, RandomStream& rng) {
  if (options.p < 1) throw std::invalid_argument("qaoa needs p >= 1");
  int n_qubits = 0;
  while ((std::int64_t{1} << n_qubits) < cost_values.size()) ++n_qubits;
  if ((std::int64_t{1} << n_qubits) != cost_values.size()) {
    throw std::invalid_argument("cost vector length must be a power of two");
  }

  ParameterizedCircuit pc(n_qubits);
  // theta = (beta_1, gamma_1, ..., beta_p, gamma_p); the factor with gamma_p
  // acts first, as in the alternating product ... exp(-i beta_p B) exp(-i gamma_p C).
  // Indices are registered in add order, so build a remap: the j-th added
  // trainable slot is gamma_p, beta_p, gamma_{p-1}, ...
  // To keep theta in the documented layout we add layers with explicit index
  // bookkeeping below.
  //
  // add order k = 0..2p-1 maps to parameter index:
  //   k even  -> gamma_{p - k/2}     -> theta index 2(p - k/2) - 1
  //   k odd   -> beta_{p - (k-1)/2}  -> theta index 2(p - (k+1)/2)
  // Contiguity of added indices is enforced by the builder, so instead of a
  // remap the circuit is built with internal indices and theta is permuted at
  // the interface.
  for (int k = 0; k < options.p; ++k) {
    pc.add_diagonal_generator(cost_values, Slot::train(2 * k), "cost");
    pc.add_x_mixer(Slot::train(2 * k + 1));
  }
  pc.set_observable(Observable::diagonal(cost_values, "cost"));

  const std::int64_t dim = cost_values.size();
  Vector plus = Vector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  pc.set_initial_state(StateVector(n_qubits, std::move(plus)));

  // internal index 2k   = gamma_{p-k}  = documented index 2(p-k)-1
  // internal index 2k+1 = beta_{p-k}   = documented index 2(p-k)-2
  const int n_params = 2 * options.p;
  std::vector<int> doc_of_internal(static_cast<std::size_t>(n_params));
  for (int k = 0; k < options.p; ++k) {
    doc_of_internal[static_cast<std::size_t>(2 * k)] = 2 * (options.p - k) - 1;
    doc_of_internal[static_cast<std::size_t>(2 * k + 1)] = 2 * (options.p - k) - 2;
  }

  MultiStartOptions opt = options.optimizer;
  QaoaResult result;
  std::vector<double> restart_costs;
  int best_restart = 0;
  GdResult best = optimize_multistart(pc, Eigen::VectorXd(), opt, rng, &restart_costs, &best_restart);

  // Translate histories and the optimum into the documented layout.
  auto to_doc = [&](const Eigen::VectorXd& internal) {
    Eigen::VectorXd doc(n_params);
    for (int i = 0; i < n_params; ++i) doc(doc_of_internal[static_cast<std::size_t>(i)]) = internal(i);
    return doc;
  };
  result.theta = to_doc(best.theta);
  result.expectation = evaluate_cost(pc, best.theta, Eigen::VectorXd(), EvalMode::exact());
  result.restart_costs = std::move(restart_costs);

  const StateVector psi = pc.prepare(best.theta, Eigen::VectorXd());
  std::vector<double> probs(static_cast<std::size_t>(psi.dim()));
  for (std::int64_t i = 0; i < psi.dim(); ++i) {
    probs[static_cast<std::size_t>(i)] = std::norm(psi.amplitudes()(i));
  }
  RandomStream sample_rng = rng.fork(0xabcdef);
  std::optional<std::int64_t> best_sample;
  for (std::uint64_t t = 0; t < options.final_samples; ++t) {
    const int idx = sample_outcome(probs, sample_rng);
    result.samples[to_bitstring(static_cast<std::uint64_t>(idx), n_qubits)]++;
    if (!best_sample || cost_values(idx) < cost_values(*best_sample)) best_sample = idx;
  }
  if (best_sample) {
    result.best_bitstring = to_bitstring(static_cast<std::uint64_t>(*best_sample), n_qubits);
    result.best_value = cost_values(*best_sample);
  }
  for (GdStep& step : best.history) step.theta = to_doc(step.theta);
  best.theta = result.theta;
  result.best = std::move(best);
  return result;
}

QmlResult qml_fit(const ParameterizedCircuit& pc, const Eigen::MatrixXd& xs,
                  const Eigen::VectorXd& ys, const MultiStartOptions& options, RandomStream& rng) {
  if (xs.rows() != ys.size() || xs.rows() == 0) {
    throw std::invalid_argument("dataset needs one label per sample row");
  }
  if (xs.cols() != pc.num_data()) {
    throw std::invalid_argument("sample dimension does not match the ansatz data slots");
  }
  GdOptions gd = options.gd;
  if (!options.mode.is_exact()) gd.backtracking = false;

  std::optional<GdResult> best;
  for (int r = 0; r < options.restarts; ++r) {
    RandomStream init_rng = rng.fork(2 * static_cast<std::uint64_t>(r));
    RandomStream eval_rng = rng.fork(2 * static_cast<std::uint64_t>(r) + 1);
    Eigen::VectorXd theta0(pc.num_trainable());
    for (int i = 0; i < theta0.size(); ++i) theta0(i) = init_rng.uniform(0.0, 2.0 * M_PI);

    auto residuals = [&](const Eigen::VectorXd& t) {
      Eigen::VectorXd res(xs.rows());
      for (std::int64_t i = 0; i < xs.rows(); ++i) {
        res(i) = evaluate_cost(pc, t, xs.row(i), options.mode, &eval_rng) - ys(i);
      }
      return res;
    };
    auto cost = [&](const Eigen::VectorXd& t) { return residuals(t).squaredNorm(); };
    auto grad = [&](const Eigen::VectorXd& t) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(pc.num_trainable());
      for (std::int64_t i = 0; i < xs.rows(); ++i) {
        const double res = evaluate_cost(pc, t, xs.row(i), options.mode, &eval_rng) - ys(i);
        const Eigen::VectorXd gi =
            options.gradient == GradientMethod::parameter_shift
                ? parameter_shift_gradient(pc, t, xs.row(i), options.mode, &eval_rng)
                : finite_difference_gradient(pc, t, xs.row(i), 1e-5, options.mode, &eval_rng);
        g += 2.0 * res * gi;
      }
      return g;
    };
    GdResult run = gradient_descent(cost, grad, theta0, gd);
    if (!best || run.cost < best->cost) best = std::move(run);
  }

  QmlResult result;
  result.theta = best->theta;
  result.loss = best->cost;
  for (const GdStep& step : best->history) result.loss_history.push_back(step.cost);
  result.best = std::move(*best);
  return result;
}

double qml_predict(const ParameterizedCircuit& pc, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& x) {
  return evaluate_cost(pc, theta, x, EvalMode::exact());
}

}  // namespace qcsim
