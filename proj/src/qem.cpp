#include "qcsim/qem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qcsim/circuit_io.hpp"
#include "qcsim/gates.hpp"

namespace qcsim {

namespace {

// Rebuilds a gate with its rotation angle over-rotated by (1 + eps);
// non-parameterized gates pass through. Controlled labels recurse into the
// inner gate.
Gate over_rotated(const Gate& gate, double eps) {
  const std::string& label = gate.label();
  auto angle_of = [&](const char* prefix) -> std::optional<double> {
    const std::string p = std::string(prefix) + "(";
    if (label.rfind(p, 0) == 0 && label.back() == ')') {
      return std::stod(label.substr(p.size(), label.size() - p.size() - 1));
    }
    return std::nullopt;
  };
  if (auto t = angle_of("RX")) return rotation(Axis::x, *t * (1.0 + eps));
  if (auto t = angle_of("RY")) return rotation(Axis::y, *t * (1.0 + eps));
  if (auto t = angle_of("RZ")) return rotation(Axis::z, *t * (1.0 + eps));
  if (auto t = angle_of("P")) return phase_gate(*t * (1.0 + eps));
  if (label.rfind("CU(", 0) == 0 && label.back() == ')') {
    const Gate inner = gate_from_label(label.substr(3, label.size() - 4));
    const Gate perturbed_inner = over_rotated(inner, eps);
    if (perturbed_inner.label() != inner.label()) return controlled(perturbed_inner);
  }
  return gate;
}

std::vector<int> noise_targets(const NoiseOp& op, int n_qubits) {
  if (!op.qubits.empty()) return op.qubits;
  std::vector<int> all(n_qubits);
  for (int q = 0; q < n_qubits; ++q) all[q] = q;
  return all;
}

void apply_gate_noise(const NoiseSpec& noise, double lambda, Matrix* rho, int n_qubits,
                      std::vector<std::string>* warnings) {
  for (const NoiseOp& op : noise.ops) {
    if (op.final_placement) continue;
    const KrausChannel ch = scaled_channel(op, lambda, warnings);
    DensityMatrix tmp(n_qubits, *rho);
    *rho = apply_channel(ch, tmp, noise_targets(op, n_qubits)).matrix();
  }
}

int folding_repeats(double lambda) {
  const double k = (lambda - 1.0) / 2.0;
  const double rounded = std::round(k);
  if (lambda < 1.0 || std::abs(k - rounded) > 1e-9) {
    throw std::invalid_argument("gate folding needs odd integer scale factors (1, 3, 5, ...)");
  }
  return static_cast<int>(rounded);
}

}  // namespace

DensityMatrix run_density(const Circuit& circuit, const NoiseSpec& noise, double lambda,
                          ScaleMethod method, std::vector<std::string>* warnings) {
  const int n = circuit.n_qubits();
  if (n > max_density_qubits()) {
    throw std::invalid_argument("density execution exceeds the density-matrix qubit cap");
  }
  const double eps = noise.cce_epsilon * (method == ScaleMethod::probability ? lambda : 1.0);
  const double channel_lambda = method == ScaleMethod::probability ? lambda : 1.0;
  const int repeats = method == ScaleMethod::gate_folding ? folding_repeats(lambda) : 0;

  const std::int64_t dim = std::int64_t{1} << n;
  Matrix rho = Matrix::Zero(dim, dim);
  rho(0, 0) = 1.0;

  for (const CircuitOp& op : circuit.ops()) {
    const Gate executed = noise.cce_epsilon != 0.0 ? over_rotated(op.gate, eps) : op.gate;
    const Matrix full = embed(executed.matrix(), op.targets, n);
    rho = full * rho * full.adjoint();
    apply_gate_noise(noise, channel_lambda, &rho, n, warnings);
    for (int rep = 0; rep < repeats; ++rep) {
      rho = full.adjoint() * rho * full;
      apply_gate_noise(noise, channel_lambda, &rho, n, warnings);
      rho = full * rho * full.adjoint();
      apply_gate_noise(noise, channel_lambda, &rho, n, warnings);
    }
  }
  for (const NoiseOp& op : noise.ops) {
    if (!op.final_placement) continue;
    const KrausChannel ch = scaled_channel(op, channel_lambda, warnings);
    DensityMatrix tmp(n, rho);
    rho = apply_channel(ch, tmp, noise_targets(op, n)).matrix();
  }
  return DensityMatrix(n, std::move(rho));
}

NoisyValue noisy_expectation(const NoisyCircuit& nc, double lambda, std::uint64_t shots,
                             RandomStream* rng, ScaleMethod method,
                             std::vector<std::string>* warnings) {
  const DensityMatrix rho = run_density(nc.circuit, nc.noise, lambda, method, warnings);
  const Observable& obs = nc.circuit.observable();
  if (shots == 0) {
    return NoisyValue{expectation(obs, rho), 0.0};
  }
  if (rng == nullptr) throw std::invalid_argument("sampled expectations need a random stream");
  const ShotEstimate est = estimate_expectation(obs, rho, shots, *rng);
  return NoisyValue{est.estimate, est.std_error};
}

ZneFit zne_extrapolate(const std::vector<double>& lambdas, const std::vector<double>& values,
                       FitModel model, int degree, const std::vector<double>* std_errors) {
  const std::size_t n = lambdas.size();
  if (n == 0 || values.size() != n) {
    throw std::invalid_argument("extrapolation needs matching lambda/value lists");
  }
  if (std_errors && std_errors->size() != n) {
    throw std::invalid_argument("per-point errors must match the point count");
  }

  int n_params = 0;
  switch (model) {
    case FitModel::linear:
      n_params = 2;
      break;
    case FitModel::polynomial:
      if (degree < 1 || degree > 3) {
        throw std::invalid_argument("polynomial degree must be between 1 and 3");
      }
      n_params = degree + 1;
      break;
    case FitModel::exponential:
      n_params = 2;
      break;
  }
  if (static_cast<int>(n) < n_params) {
    throw std::invalid_argument("need at least " + std::to_string(n_params) +
                                " points for this model");
  }

  ZneFit fit;
  if (model == FitModel::exponential) {
    // log-linear fit of a exp(-b l); requires one common sign
    double sign = 0.0;
    for (double v : values) {
      if (v == 0.0 || (sign != 0.0 && std::signbit(v) != std::signbit(sign))) {
        throw std::invalid_argument(
            "exponential extrapolation needs nonzero points of one sign");
      }
      sign = v;
    }
    const double s = std::signbit(sign) ? -1.0 : 1.0;
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd target(n);
    for (std::size_t i = 0; i < n; ++i) {
      design(static_cast<std::int64_t>(i), 0) = 1.0;
      design(static_cast<std::int64_t>(i), 1) = -lambdas[i];
      target(static_cast<std::int64_t>(i)) = std::log(std::abs(values[i]));
    }
    const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(target);
    const double a = s * std::exp(sol(0));
    const double b = sol(1);
    fit.params = Eigen::Vector2d(a, b);
    fit.f0 = a;
    fit.residuals = Eigen::VectorXd(n);
    for (std::size_t i = 0; i < n; ++i) {
      fit.residuals(static_cast<std::int64_t>(i)) = values[i] - a * std::exp(-b * lambdas[i]);
    }
    if (std_errors) {
      // delta method through the log-linear weights
      const Eigen::MatrixXd pinv =
          (design.transpose() * design).ldlt().solve(design.transpose());
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double w = pinv(0, static_cast<std::int64_t>(i));
        const double sigma_log = (*std_errors)[i] / std::abs(values[i]);
        var += w * w * sigma_log * sigma_log;
      }
      fit.f0_std_error = std::abs(a) * std::sqrt(var);
    }
    return fit;
  }

  Eigen::MatrixXd design(n, n_params);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    double power = 1.0;
    for (int c = 0; c < n_params; ++c) {
      design(static_cast<std::int64_t>(i), c) = power;
      power *= lambdas[i];
    }
    target(static_cast<std::int64_t>(i)) = values[i];
  }
  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(target);
  fit.params = sol;
  fit.f0 = sol(0);  // model value at lambda = 0
  fit.residuals = target - design * sol;
  if (std_errors) {
    const Eigen::MatrixXd pinv = (design.transpose() * design).ldlt().solve(design.transpose());
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = pinv(0, static_cast<std::int64_t>(i));
      var += w * w * (*std_errors)[i] * (*std_errors)[i];
    }
    fit.f0_std_error = std::sqrt(var);
  }
  return fit;
}

ZneReport zne_run(const NoisyCircuit& nc, const ZneConfig& config, RandomStream& rng) {
  std::vector<double> factors = config.scale_factors;
  std::sort(factors.begin(), factors.end());
  if (factors.empty()) throw std::invalid_argument("need at least one scale factor");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] < 1.0 - 1e-12) {
      throw std::invalid_argument("scale factors must be >= 1");
    }
    if (i > 0 && factors[i] - factors[i - 1] < 1e-12) {
      throw std::invalid_argument("scale factors must be distinct");
    }
  }

  ZneReport report;
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<double> errors;
  std::optional<double> raw;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    RandomStream point_rng = rng.fork(1000 + i);
    const NoisyValue nv = noisy_expectation(nc, factors[i], config.samples_per_point, &point_rng,
                                            config.method, &report.warnings);
    lambdas.push_back(factors[i]);
    values.push_back(nv.value);
    errors.push_back(nv.std_error);
    report.points.push_back(ZnePoint{factors[i], nv.value, nv.std_error});
    if (std::abs(factors[i] - 1.0) <= 1e-12) raw = nv.value;
  }
  if (!raw) {
    RandomStream point_rng = rng.fork(999);
    raw = noisy_expectation(nc, 1.0, config.samples_per_point, &point_rng, config.method,
                            &report.warnings)
              .value;
  }
  report.raw = *raw;

  const bool sampled = config.samples_per_point > 0;
  const ZneFit fit = zne_extrapolate(lambdas, values, config.model, config.poly_degree,
                                     sampled ? &errors : nullptr);
  report.mitigated = fit.f0;
  report.mitigated_std_error = fit.f0_std_error;
  report.fit_params = fit.params;
  report.residuals = fit.residuals;
  return report;
}

}  // namespace qcsim
