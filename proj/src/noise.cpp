#include "qcsim/noise.hpp"

#include <cmath>

namespace qcsim {

namespace {
int arity_of_dim(std::int64_t dim) {
  int arity = 0;
  while ((std::int64_t{1} << arity) < dim) ++arity;
  if ((std::int64_t{1} << arity) != dim) {
    throw std::invalid_argument("Kraus operator dimension must be a power of two");
  }
  return arity;
}

void check_probability(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("probability must lie in [0, 1], got " + std::to_string(p));
  }
}
}  // namespace

KrausChannel::KrausChannel(std::string label, std::vector<Matrix> operators)
    : label_(std::move(label)), operators_(std::move(operators)) {
  if (operators_.empty()) throw std::invalid_argument("channel needs at least one Kraus operator");
  const std::int64_t d = operators_.front().rows();
  arity_ = arity_of_dim(d);
  Matrix completeness = Matrix::Zero(d, d);
  for (const Matrix& e : operators_) {
    if (e.rows() != d || e.cols() != d) {
      throw std::invalid_argument("Kraus operators must be square with one shared dimension");
    }
    completeness += e.adjoint() * e;
  }
  if ((completeness - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTol) {
    throw std::invalid_argument("channel '" + label_ +
                                "' violates sum E^dag E = I within 1e-10");
  }
}

KrausChannel bit_flip(double p) {
  check_probability(p);
  Matrix e0 = std::sqrt(p) * Matrix::Identity(2, 2);
  Matrix e1 = std::sqrt(1.0 - p) * pauli(Axis::x).matrix();
  return KrausChannel("bitflip(" + std::to_string(p) + ")", {e0, e1});
}

KrausChannel phase_flip(double p) {
  check_probability(p);
  Matrix e0 = std::sqrt(p) * Matrix::Identity(2, 2);
  Matrix e1 = std::sqrt(1.0 - p) * pauli(Axis::z).matrix();
  return KrausChannel("phaseflip(" + std::to_string(p) + ")", {e0, e1});
}

KrausChannel depolarizing(double p) {
  check_probability(p);
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(1.0 - 3.0 * p / 4.0) * Matrix::Identity(2, 2));
  ops.push_back(std::sqrt(p / 4.0) * pauli(Axis::x).matrix());
  ops.push_back(std::sqrt(p / 4.0) * pauli(Axis::y).matrix());
  ops.push_back(std::sqrt(p / 4.0) * pauli(Axis::z).matrix());
  return KrausChannel("depolarizing(" + std::to_string(p) + ")", std::move(ops));
}

DensityMatrix apply_channel(const KrausChannel& channel, const DensityMatrix& rho,
                            const std::vector<int>& targets) {
  const int k = channel.arity();
  std::vector<std::vector<int>> applications;
  if (static_cast<int>(targets.size()) == k) {
    applications.push_back(targets);
  } else if (k == 1 && !targets.empty()) {
    for (int q : targets) applications.push_back({q});
  } else {
    throw std::invalid_argument("target list does not match channel arity");
  }

  Matrix current = rho.matrix();
  for (const auto& app : applications) {
    Matrix next = Matrix::Zero(current.rows(), current.cols());
    for (const Matrix& e : channel.operators()) {
      const Matrix full = embed(e, app, rho.n_qubits());
      next += full * current * full.adjoint();
    }
    current = std::move(next);
  }
  return DensityMatrix(rho.n_qubits(), std::move(current));
}

Gate perturbed_gate(const Matrix& h, double epsilon, const std::string& label) {
  return from_generator(h, 1.0 + epsilon, label.empty() ? "perturbed" : label);
}

double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double fidelity_lower_bound(const Matrix& h, double epsilon) {
  if (!is_hermitian(h, kTol)) {
    throw std::invalid_argument("generator must be Hermitian within 1e-10");
  }
  const double norm = spectral_norm(h);
  return 1.0 - norm * norm * epsilon * epsilon / 2.0;
}

KrausChannel scaled_channel(const NoiseOp& op, double lambda,
                            std::vector<std::string>* warnings) {
  if (lambda < 0.0) throw std::invalid_argument("scale factor must be nonnegative");
  // `p` is a keep probability for the flip channels and an error probability
  // for depolarizing; in both cases the *error* weight is multiplied by
  // lambda and the result clamped back into [0, 1].
  double scaled;
  switch (op.kind) {
    case NoiseOp::Kind::bit_flip:
    case NoiseOp::Kind::phase_flip:
      scaled = 1.0 - lambda * (1.0 - op.p);
      break;
    case NoiseOp::Kind::depolarizing:
      scaled = lambda * op.p;
      break;
    default:
      throw std::logic_error("unknown noise kind");
  }
  if (scaled < 0.0 || scaled > 1.0) {
    if (warnings) {
      warnings->push_back(std::string(noise_kind_name(op.kind)) + " probability clamped at scale " +
                          std::to_string(lambda));
    }
    scaled = std::min(1.0, std::max(0.0, scaled));
  }
  switch (op.kind) {
    case NoiseOp::Kind::bit_flip:
      return bit_flip(scaled);
    case NoiseOp::Kind::phase_flip:
      return phase_flip(scaled);
    default:
      return depolarizing(scaled);
  }
}

const char* noise_kind_name(NoiseOp::Kind kind) {
  switch (kind) {
    case NoiseOp::Kind::bit_flip:
      return "bitflip";
    case NoiseOp::Kind::phase_flip:
      return "phaseflip";
    case NoiseOp::Kind::depolarizing:
      return "depolarizing";
  }
  return "unknown";
}

}  // namespace qcsim
