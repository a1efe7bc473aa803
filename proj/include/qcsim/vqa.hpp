#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcsim/circuit.hpp"
#include "qcsim/measure.hpp"
#include "qcsim/state.hpp"

namespace qcsim {

// Parameter slot of one circuit layer: a trainable angle theta[index], a data
// value x[index], or a fixed constant.
struct Slot {
  enum class Kind { trainable, data, fixed };
  Kind kind = Kind::fixed;
  int index = 0;
  double value = 0.0;

  static Slot train(int index) { return Slot{Kind::trainable, index, 0.0}; }
  static Slot data(int index) { return Slot{Kind::data, index, 0.0}; }
  static Slot fixed(double value) { return Slot{Kind::fixed, 0, value}; }
};

// Sequence of unitary factors exp(-i angle H), stored and executed in
// application order (the first layer added acts on the state first). Layers
// may also be plain fixed gates (entanglers). Trainable indices must cover
// 0..N-1 exactly once each; likewise data indices.
class ParameterizedCircuit {
 public:
  explicit ParameterizedCircuit(int n_qubits);

  // exp(-i angle P/2) on one qubit
  ParameterizedCircuit& add_rotation(Axis axis, int qubit, Slot slot);
  // exp(-i angle h) with h Hermitian on the listed qubits
  ParameterizedCircuit& add_generator(const Matrix& h, std::vector<int> targets, Slot slot,
                                      std::string label = "");
  // exp(-i angle D) with D diagonal over the full register
  ParameterizedCircuit& add_diagonal_generator(const Eigen::VectorXd& diag, Slot slot,
                                               std::string label = "");
  // exp(-i angle sum_j X_j) over the full register
  ParameterizedCircuit& add_x_mixer(Slot slot);
  // non-parameterized gate
  ParameterizedCircuit& add_gate(const Gate& gate, std::vector<int> targets);

  void set_observable(Observable obs);
  const Observable& observable() const;
  void set_initial_state(StateVector psi0);
  const StateVector& initial_state() const;

  int n_qubits() const { return n_qubits_; }
  int num_trainable() const { return num_trainable_; }
  int num_data() const { return num_data_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }

  StateVector prepare(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) const;

  // Half-spread r of a two-valued trainable generator spectrum {-r, +r};
  // throws for any other spectrum.
  double shift_constant(int trainable_index) const;

 private:
  struct Layer {
    enum class Kind { dense, diagonal, mixer, gate };
    Kind kind;
    Slot slot;
    std::vector<int> targets;
    Matrix evecs;
    Eigen::VectorXd evals;
    Eigen::VectorXd diag;
    Matrix gate_matrix;
    std::string label;
  };

  void register_slot(const Slot& slot);
  const Layer& trainable_layer(int index) const;

  int n_qubits_;
  std::vector<Layer> layers_;
  std::vector<int> trainable_layer_of_;
  int num_trainable_ = 0;
  int num_data_ = 0;
  std::optional<Observable> observable_;
  std::optional<StateVector> psi0_;
};

struct EvalMode {
  enum class Kind { exact, shots };
  Kind kind = Kind::exact;
  std::uint64_t shots = 0;

  static EvalMode exact() { return EvalMode{Kind::exact, 0}; }
  static EvalMode sampled(std::uint64_t shots) { return EvalMode{Kind::shots, shots}; }
  bool is_exact() const { return kind == Kind::exact; }
};

double evaluate_cost(const ParameterizedCircuit& pc, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& x, const EvalMode& mode, RandomStream* rng = nullptr);

// Exact two-point rule r [f(theta + s e_j) - f(theta - s e_j)], s = pi/(4r),
// valid because every trainable generator is required to have spectrum
// {-r, +r}. For standard rotations (r = 1/2) this reads
// [f(theta_j + pi/2) - f(theta_j - pi/2)] / 2.
Eigen::VectorXd parameter_shift_gradient(const ParameterizedCircuit& pc,
                                         const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
                                         const EvalMode& mode = EvalMode::exact(),
                                         RandomStream* rng = nullptr);

Eigen::VectorXd finite_difference_gradient(const ParameterizedCircuit& pc,
                                           const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
                                           double step = 1e-5,
                                           const EvalMode& mode = EvalMode::exact(),
                                           RandomStream* rng = nullptr);

enum class GradientMethod { parameter_shift, finite_difference };

using CostFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GdOptions {
  double gamma = 0.1;
  double tol = 1e-6;
  int max_iters = 1000;
  bool backtracking = true;  // halve gamma when the cost increases
};

struct GdStep {
  Eigen::VectorXd theta;
  double cost;
};

struct GdResult {
  Eigen::VectorXd theta;
  double cost;
  std::vector<GdStep> history;  // k iterations leave k+1 entries
  int iterations = 0;
  bool converged = false;
  double final_gamma = 0.0;
};

// Plain gradient descent theta <- theta - gamma grad(theta). The optimizer
// sees the circuit only through the two callables, i.e. it closes the loop
// over (theta, cost) alone.
GdResult gradient_descent(const CostFn& cost, const GradFn& grad, Eigen::VectorXd theta0,
                          const GdOptions& options = {});

struct MultiStartOptions {
  int restarts = 5;
  GdOptions gd;
  EvalMode mode = EvalMode::exact();
  GradientMethod gradient = GradientMethod::parameter_shift;
};

struct VqeResult {
  double energy;
  Eigen::VectorXd theta;
  GdResult best;
  std::vector<double> restart_costs;
  int best_restart = 0;
};

// Minimizes <psi(theta)| h |psi(theta)> over the ansatz; restart seeds are
// drawn uniformly from [0, 2 pi)^N.
VqeResult vqe(const Observable& h, ParameterizedCircuit ansatz, const MultiStartOptions& options,
              RandomStream& rng);

// Hardware-style ansatz: per layer RY then RZ on every qubit followed by a
// CNOT chain, and a final RZ-RY-RZ block per qubit.
ParameterizedCircuit hardware_ansatz(int n_qubits, int layers);

// Diagonal cost operator C |x> = q(x) |x>.
Observable build_cost_hamiltonian(int n_qubits, const std::function<double(std::uint64_t)>& q);
Eigen::VectorXd max_cut_values(int n_nodes, const std::vector<std::pair<int, int>>& edges);

struct QaoaOptions {
  int p = 1;
  MultiStartOptions optimizer{5, GdOptions{}, EvalMode::exact(), GradientMethod::finite_difference};
  std::uint64_t final_samples = 1024;
};

struct QaoaResult {
  Eigen::VectorXd theta;  // (beta_1, gamma_1, ..., beta_p, gamma_p)
  double expectation;
  std::map<std::string, std::uint64_t> samples;
  std::string best_bitstring;
  double best_value;
  GdResult best;
  std::vector<double> restart_costs;
};

QaoaResult qaoa(const Eigen::VectorXd& cost_values, const QaoaOptions& options, RandomStream& rng);

struct QmlResult {
  Eigen::VectorXd theta;
  double loss;
  std::vector<double> loss_history;
  GdResult best;
};

// Least-squares fit of the circuit's expectation to (x, y) samples:
// minimizes sum_i (f(x_i, theta) - y_i)^2.
QmlResult qml_fit(const ParameterizedCircuit& pc, const Eigen::MatrixXd& xs,
                  const Eigen::VectorXd& ys, const MultiStartOptions& options, RandomStream& rng);

double qml_predict(const ParameterizedCircuit& pc, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& x);

}  // namespace qcsim
