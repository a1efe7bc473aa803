#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcsim/vqa.hpp"

using namespace qcsim;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::VectorXd no_data() { return Eigen::VectorXd(); }

}  // namespace

TEST_SUITE("vqa") {
  TEST_CASE("slots must be registered contiguously") {
    ParameterizedCircuit pc(1);
    CHECK_THROWS(pc.add_rotation(Axis::y, 0, Slot::train(1)));
    pc.add_rotation(Axis::y, 0, Slot::train(0));
    CHECK_THROWS(pc.add_rotation(Axis::z, 0, Slot::train(0)));  // duplicate
    pc.add_rotation(Axis::z, 0, Slot::train(1));
    CHECK_THROWS(pc.add_rotation(Axis::x, 0, Slot::data(2)));
    pc.add_rotation(Axis::x, 0, Slot::data(0));
    CHECK(pc.num_trainable() == 2);
    CHECK(pc.num_data() == 1);
    CHECK(pc.num_layers() == 3);
  }

  TEST_CASE("prepare matches an explicit gate-by-gate construction") {
    ParameterizedCircuit pc(2);
    pc.add_rotation(Axis::y, 0, Slot::train(0));
    pc.add_rotation(Axis::z, 1, Slot::data(0));
    pc.add_gate(cnot(), {0, 1});
    pc.add_rotation(Axis::x, 1, Slot::fixed(0.7));

    Eigen::VectorXd theta(1);
    theta << 1.1;
    Eigen::VectorXd x(1);
    x << -0.4;
    const StateVector got = pc.prepare(theta, x);

    StateVector want = StateVector::zero(2);
    want = apply(rotation(Axis::y, 1.1), {0}, want);
    want = apply(rotation(Axis::z, -0.4), {1}, want);
    want = apply(cnot(), {0, 1}, want);
    want = apply(rotation(Axis::x, 0.7), {1}, want);
    CHECK((got.amplitudes() - want.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS(pc.prepare(Eigen::VectorXd(), x));       // theta size
    CHECK_THROWS(pc.prepare(theta, Eigen::VectorXd()));   // x size
  }

  TEST_CASE("diagonal and mixer layers match dense matrix exponentials") {
    Eigen::VectorXd diag(4);
    diag << 0.0, -1.0, -1.0, -2.0;
    ParameterizedCircuit pc(2);
    pc.add_diagonal_generator(diag, Slot::train(0));
    pc.add_x_mixer(Slot::train(1));
    const Vector plus = Vector::Constant(4, Complex(0.5, 0.0));
    pc.set_initial_state(StateVector(2, plus));

    Eigen::VectorXd theta(2);
    theta << 0.8, 0.3;
    const StateVector got = pc.prepare(theta, no_data());

    Matrix c = Matrix::Zero(4, 4);
    c.diagonal() = diag.cast<Complex>();
    const Matrix x1 = embed(pauli(Axis::x).matrix(), {0}, 2);
    const Matrix x2 = embed(pauli(Axis::x).matrix(), {1}, 2);
    StateVector want(2, plus);
    want = apply(from_generator(c, 0.8), want);
    want = apply(from_generator(x1 + x2, 0.3), want);
    CHECK((got.amplitudes() - want.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS(pc.add_diagonal_generator(Eigen::VectorXd::Zero(2), Slot::train(2)));
  }

  TEST_CASE("shift constants come from the generator spectrum") {
    ParameterizedCircuit pc(2);
    pc.add_rotation(Axis::y, 0, Slot::train(0));                       // spectrum {-1/2, 1/2}
    Eigen::VectorXd zdiag(4);
    zdiag << 1.0, -1.0, -1.0, 1.0;
    pc.add_diagonal_generator(zdiag, Slot::train(1));                  // spectrum {-1, 1}
    Matrix big = 2.5 * pauli(Axis::z).matrix();
    pc.add_generator(big, {1}, Slot::train(2));                        // spectrum {-2.5, 2.5}
    CHECK(pc.shift_constant(0) == doctest::Approx(0.5));
    CHECK(pc.shift_constant(1) == doctest::Approx(1.0));
    CHECK(pc.shift_constant(2) == doctest::Approx(2.5));
    CHECK_THROWS(pc.shift_constant(3));

    // two-qubit mixer spectrum {-2, 0, 2} is not two-valued
    ParameterizedCircuit mixer(2);
    mixer.add_x_mixer(Slot::train(0));
    CHECK_THROWS(mixer.shift_constant(0));
    // asymmetric diagonal {0, 1} is rejected too
    ParameterizedCircuit skew(1);
    Eigen::VectorXd d01(2);
    d01 << 0.0, 1.0;
    skew.add_diagonal_generator(d01, Slot::train(0));
    CHECK_THROWS(skew.shift_constant(0));
    // single-qubit mixer has spectrum {-1, 1}
    ParameterizedCircuit m1(1);
    m1.add_x_mixer(Slot::train(0));
    CHECK(m1.shift_constant(0) == doctest::Approx(1.0));
  }

  TEST_CASE("parameter shift reproduces the analytic cosine derivative") {
    ParameterizedCircuit pc(1);
    pc.add_rotation(Axis::y, 0, Slot::train(0));
    pc.set_observable(Observable::z_all(1));
    for (double t : {0.0, 0.3, 1.2, -2.0, pi}) {
      Eigen::VectorXd theta(1);
      theta << t;
      CHECK(evaluate_cost(pc, theta, no_data(), EvalMode::exact()) ==
            doctest::Approx(std::cos(t)).epsilon(1e-12));
      const Eigen::VectorXd g = parameter_shift_gradient(pc, theta, no_data());
      CHECK(g(0) == doctest::Approx(-std::sin(t)).epsilon(1e-12));
    }
  }

  TEST_CASE("parameter shift agrees with finite differences on a layered ansatz") {
    RandomStream rng(197);
    ParameterizedCircuit pc = hardware_ansatz(2, 2);
    pc.set_observable(Observable::z_all(2));
    for (int rep = 0; rep < 3; ++rep) {
      Eigen::VectorXd theta(pc.num_trainable());
      for (int i = 0; i < theta.size(); ++i) theta(i) = rng.uniform(-pi, pi);
      const Eigen::VectorXd ps = parameter_shift_gradient(pc, theta, no_data());
      const Eigen::VectorXd fd = finite_difference_gradient(pc, theta, no_data(), 1e-5);
      REQUIRE(ps.size() == fd.size());
      CHECK((ps - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
    CHECK_THROWS(finite_difference_gradient(pc, Eigen::VectorXd::Zero(pc.num_trainable()),
                                            no_data(), 0.0));
  }

  TEST_CASE("shot-based evaluation needs a stream and is fork-deterministic") {
    ParameterizedCircuit pc(1);
    pc.add_rotation(Axis::y, 0, Slot::train(0));
    pc.set_observable(Observable::z_all(1));
    Eigen::VectorXd theta(1);
    theta << 0.9;
    CHECK_THROWS(evaluate_cost(pc, theta, no_data(), EvalMode::sampled(100)));
    RandomStream base(199);
    RandomStream a = base.fork(4);
    RandomStream b = base.fork(4);
    const double va = evaluate_cost(pc, theta, no_data(), EvalMode::sampled(2000), &a);
    const double vb = evaluate_cost(pc, theta, no_data(), EvalMode::sampled(2000), &b);
    CHECK(va == vb);
    CHECK(std::abs(va - std::cos(0.9)) < 0.1);
  }

  TEST_CASE("gradient descent minimizes a quadratic bowl") {
    Eigen::VectorXd c(2);
    c << 1.5, -2.0;
    const CostFn cost = [&](const Eigen::VectorXd& t) { return (t - c).squaredNorm(); };
    const GradFn grad = [&](const Eigen::VectorXd& t) { return Eigen::VectorXd(2.0 * (t - c)); };
    GdOptions opts;
    const GdResult res = gradient_descent(cost, grad, Eigen::VectorXd::Zero(2), opts);
    CHECK(res.converged);
    CHECK((res.theta - c).norm() < 1e-5);
    CHECK(res.cost < 1e-10);
    CHECK(static_cast<int>(res.history.size()) == res.iterations + 1);
    CHECK(res.history.front().cost == doctest::Approx(c.squaredNorm()));
    // history costs are monotonically nonincreasing under backtracking
    for (std::size_t i = 1; i < res.history.size(); ++i) {
      CHECK(res.history[i].cost <= res.history[i - 1].cost + 1e-12);
    }
  }

  TEST_CASE("backtracking halves the step until the cost stops increasing") {
    const CostFn cost = [](const Eigen::VectorXd& t) { return t.squaredNorm(); };
    const GradFn grad = [](const Eigen::VectorXd& t) { return Eigen::VectorXd(2.0 * t); };
    GdOptions opts;
    opts.gamma = 1.6;  // diverges without backtracking
    Eigen::VectorXd t0(1);
    t0 << 1.0;
    const GdResult res = gradient_descent(cost, grad, t0, opts);
    CHECK(res.converged);
    CHECK(res.final_gamma < 1.6);
    CHECK(std::abs(res.theta(0)) < 1e-5);

    GdOptions plain = opts;
    plain.backtracking = false;
    plain.max_iters = 40;
    const GdResult diverged = gradient_descent(cost, grad, t0, plain);
    CHECK_FALSE(diverged.converged);
    CHECK(diverged.cost > 1.0);
    CHECK_THROWS(gradient_descent(cost, grad, t0, GdOptions{-1.0, 1e-6, 10, true}));
  }

  TEST_CASE("vqe reaches the ground state of a paired-spin matrix") {
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    h(2, 2) = -1.0;
    h(3, 3) = 1.0;
    h(1, 2) = 2.0;
    h(2, 1) = 2.0;  // eigenvalues {1, 1, 1, -3}
    RandomStream rng(11);
    MultiStartOptions opts;
    opts.gd.max_iters = 300;
    const VqeResult res = vqe(Observable::spectral(h), hardware_ansatz(2, 2), opts, rng);
    CHECK(std::abs(res.energy - (-3.0)) < 1e-2);
    CHECK(res.energy >= -3.0 - 1e-9);  // variational bound
    CHECK(res.restart_costs.size() == 5);
    CHECK(res.restart_costs[static_cast<std::size_t>(res.best_restart)] ==
          doctest::Approx(res.best.cost));
    CHECK(res.theta.size() == 14);
  }

  TEST_CASE("vqe on the identity is flat and instantly converged") {
    RandomStream rng(211);
    MultiStartOptions opts;
    opts.restarts = 2;
    const VqeResult res =
        vqe(Observable::spectral(Matrix::Identity(2, 2)), hardware_ansatz(1, 1), opts, rng);
    CHECK(res.energy == doctest::Approx(1.0));
    CHECK(res.best.iterations == 0);
    CHECK(res.best.converged);
  }

  TEST_CASE("vqe rejects an ansatz with data slots") {
    ParameterizedCircuit pc(1);
    pc.add_rotation(Axis::y, 0, Slot::data(0));
    RandomStream rng(223);
    CHECK_THROWS(vqe(Observable::z_all(1), std::move(pc), MultiStartOptions{}, rng));
  }

  TEST_CASE("hardware ansatz has the documented shape") {
    const ParameterizedCircuit pc = hardware_ansatz(2, 2);
    CHECK(pc.num_trainable() == 14);
    CHECK(pc.num_data() == 0);
    CHECK(pc.num_layers() == 16);  // (2 RY + 2 RZ + 1 CNOT) x 2 + 6 final rotations
    const ParameterizedCircuit three = hardware_ansatz(3, 1);
    CHECK(three.num_trainable() == 3 * 2 + 3 * 3);
    CHECK_THROWS(hardware_ansatz(2, 0));
  }

  TEST_CASE("max cut values count cut edges with a minus sign") {
    const Eigen::VectorXd values = max_cut_values(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    REQUIRE(values.size() == 16);
    CHECK(values(0b0000) == 0.0);
    CHECK(values(0b0101) == -4.0);
    CHECK(values(0b1010) == -4.0);
    CHECK(values(0b0001) == -2.0);
    CHECK(values.minCoeff() == -4.0);
    CHECK(values.sum() == doctest::Approx(-32.0));
    CHECK_THROWS(max_cut_values(2, {{0, 0}}));
    CHECK_THROWS(max_cut_values(2, {{0, 5}}));
    const Observable obs = build_cost_hamiltonian(2, [](std::uint64_t x) {
      return static_cast<double>(x);
    });
    CHECK(obs.eigenvalue(0) == doctest::Approx(3.0));
    CHECK(obs.stored_diagonal());
  }

  TEST_CASE("qaoa circuit at theta = 0 leaves the uniform superposition") {
    const Eigen::VectorXd values = max_cut_values(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    ParameterizedCircuit pc(4);
    pc.add_diagonal_generator(values, Slot::train(0), "cost");
    pc.add_x_mixer(Slot::train(1));
    pc.set_observable(Observable::diagonal(values, "cost"));
    pc.set_initial_state(StateVector(4, Vector::Constant(16, Complex(0.25, 0.0))));
    const double at_zero = evaluate_cost(pc, Eigen::VectorXd::Zero(2), no_data(), EvalMode::exact());
    CHECK(at_zero == doctest::Approx(values.mean()).epsilon(1e-10));
    CHECK(at_zero == doctest::Approx(-2.0).epsilon(1e-10));
  }

  TEST_CASE("qaoa finds the ring max cut") {
    const Eigen::VectorXd values = max_cut_values(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    QaoaOptions opts;
    opts.p = 2;
    opts.optimizer.gd.max_iters = 200;
    RandomStream rng(5);
    const QaoaResult res = qaoa(values, opts, rng);
    CHECK(res.theta.size() == 4);
    CHECK(res.best_value == doctest::Approx(values.minCoeff()));
    CHECK((res.best_bitstring == "0101" || res.best_bitstring == "1010"));
    CHECK(res.expectation < -3.9);
    std::uint64_t total = 0;
    std::uint64_t on_optimum = 0;
    for (const auto& [bits, count] : res.samples) {
      total += count;
      if (bits == "0101" || bits == "1010") on_optimum += count;
    }
    CHECK(total == opts.final_samples);
    CHECK(on_optimum > 900);
    CHECK(res.restart_costs.size() == 5);
    CHECK_THROWS(qaoa(Eigen::VectorXd::Zero(3), opts, rng));  // not a power of two
  }

  TEST_CASE("qml fits a one-parameter teacher") {
    // teacher f(x) = cos(x + 0.7); student RY(x) then RY(theta), readout <Z>
    const int points = 8;
    Eigen::MatrixXd xs(points, 1);
    Eigen::VectorXd ys(points);
    for (int i = 0; i < points; ++i) {
      const double x = 2.0 * pi * static_cast<double>(i) / points;
      xs(i, 0) = x;
      ys(i) = std::cos(x + 0.7);
    }
    ParameterizedCircuit pc(1);
    pc.add_rotation(Axis::y, 0, Slot::data(0));
    pc.add_rotation(Axis::y, 0, Slot::train(0));
    pc.set_observable(Observable::z_all(1));

    MultiStartOptions opts;
    opts.restarts = 3;
    opts.gd.max_iters = 300;
    RandomStream rng(2);
    const QmlResult res = qml_fit(pc, xs, ys, opts, rng);
    CHECK(res.loss < 1e-8);
    CHECK(res.loss_history.front() > res.loss);
    Eigen::VectorXd probe(1);
    probe << 0.33;
    CHECK(qml_predict(pc, res.theta, probe) == doctest::Approx(std::cos(0.33 + 0.7)).epsilon(1e-4));

    CHECK_THROWS(qml_fit(pc, xs, Eigen::VectorXd::Zero(3), opts, rng));  // label count
    CHECK_THROWS(qml_fit(pc, Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(4), opts, rng));
  }
}
