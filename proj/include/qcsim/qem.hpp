#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcsim/circuit.hpp"
#include "qcsim/density.hpp"
#include "qcsim/noise.hpp"

namespace qcsim {

struct NoisyCircuit {
  Circuit circuit;
  NoiseSpec noise;
};

enum class ScaleMethod {
  probability,   // multiply channel error weights (and cce epsilon) by lambda
  gate_folding,  // replace U by U (U^dag U)^k for odd lambda = 2k+1
};

// Density-matrix execution of a circuit under its noise model, amplified by
// lambda. Channels marked final run once after the last gate; all others run
// after every gate application. Clamped probabilities are reported through
// `warnings`.
DensityMatrix run_density(const Circuit& circuit, const NoiseSpec& noise, double lambda = 1.0,
                          ScaleMethod method = ScaleMethod::probability,
                          std::vector<std::string>* warnings = nullptr);

struct NoisyValue {
  double value;
  double std_error;  // 0 in exact mode
};

NoisyValue noisy_expectation(const NoisyCircuit& nc, double lambda, std::uint64_t shots = 0,
                             RandomStream* rng = nullptr, ScaleMethod method = ScaleMethod::probability,
                             std::vector<std::string>* warnings = nullptr);

enum class FitModel { linear, polynomial, exponential };

struct ZneFit {
  double f0;                  // extrapolated zero-noise value
  Eigen::VectorXd params;     // model coefficients
  Eigen::VectorXd residuals;  // data minus model at the sampled points
  double f0_std_error = 0.0;  // propagated from per-point errors when given
};

// Least-squares fit of (lambda, value) points and extrapolation to lambda=0.
// linear: a0 + a1 l; polynomial: sum a_k l^k up to `degree` (max 3);
// exponential: a exp(-b l), fitted log-linearly (points must share one sign).
ZneFit zne_extrapolate(const std::vector<double>& lambdas, const std::vector<double>& values,
                       FitModel model, int degree = 2,
                       const std::vector<double>* std_errors = nullptr);

struct ZneConfig {
  std::vector<double> scale_factors{1.0, 1.5, 2.0, 2.5};
  FitModel model = FitModel::linear;
  int poly_degree = 2;
  std::uint64_t samples_per_point = 0;  // 0 = exact expectations
  ScaleMethod method = ScaleMethod::probability;
};

struct ZnePoint {
  double lambda;
  double value;
  double std_error;
};

struct ZneReport {
  double raw;        // value at lambda = 1
  double mitigated;  // extrapolated value
  double mitigated_std_error;
  std::vector<ZnePoint> points;
  Eigen::VectorXd fit_params;
  Eigen::VectorXd residuals;
  std::vector<std::string> warnings;
};

ZneReport zne_run(const NoisyCircuit& nc, const ZneConfig& config, RandomStream& rng);

}  // namespace qcsim
