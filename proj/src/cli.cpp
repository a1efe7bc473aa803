#include "qcsim/cli.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcsim/circuit.hpp"
#include "qcsim/circuit_io.hpp"
#include "qcsim/density.hpp"
#include "qcsim/measure.hpp"
#include "qcsim/noise.hpp"
#include "qcsim/qec.hpp"
#include "qcsim/qem.hpp"
#include "qcsim/run_record.hpp"
#include "qcsim/state.hpp"
#include "qcsim/vqa.hpp"

namespace qcsim {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string resolve_against(const std::string& path, const fs::path& base) {
  fs::path p(path);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.string();
}

struct CommonArgs {
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common_flags(CLI::App* sub, CommonArgs* args) {
  sub->add_option("--seed", args->seed, "RNG seed (default: $QCSIM_SEED, else 0)");
  sub->add_option("--out", args->out, "write the run record here instead of stdout");
}

std::uint64_t resolve_seed(const CommonArgs& args) {
  if (args.seed) return *args.seed;
  if (const char* env = std::getenv("QCSIM_SEED")) {
    std::uint64_t value = 0;
    const std::string text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw std::runtime_error("QCSIM_SEED must be a non-negative integer, got '" + text + "'");
    }
    return value;
  }
  return 0;
}

int emit_record(RunRecord record, const CommonArgs& args,
                std::chrono::steady_clock::time_point start, int exit_code = 0) {
  record.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  const std::string text = to_json(record).dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.out, text);
  }
  return exit_code;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json history_json(const GdResult& r) {
  json cost = json::array();
  json theta = json::array();
  for (const GdStep& step : r.history) {
    cost.push_back(step.cost);
    theta.push_back(vector_json(step.theta));
  }
  return json{{"cost", cost}, {"theta", theta}};
}

json gd_json(const GdResult& r) {
  return json{{"iterations", r.iterations},
              {"converged", r.converged},
              {"final_gamma", r.final_gamma},
              {"history", history_json(r)}};
}

json histogram_json(const std::map<std::string, std::uint64_t>& histogram) {
  json h = json::object();
  for (const auto& [key, count] : histogram) h[key] = count;
  return h;
}

// ---------------------------------------------------------------------------
// Experiment config blocks shared by vqe / qaoa / qml.

GdOptions gd_options_from(const json& opt) {
  GdOptions gd;
  gd.gamma = opt.value("gamma", gd.gamma);
  gd.tol = opt.value("tol", gd.tol);
  gd.max_iters = opt.value("max_iters", gd.max_iters);
  gd.backtracking = opt.value("backtracking", gd.backtracking);
  return gd;
}

GradientMethod gradient_from(const json& opt, GradientMethod fallback) {
  const std::string name = opt.value("gradient", "");
  if (name.empty()) return fallback;
  if (name == "parameter-shift") return GradientMethod::parameter_shift;
  if (name == "finite-difference") return GradientMethod::finite_difference;
  throw std::runtime_error("unknown gradient method '" + name +
                           "' (use parameter-shift or finite-difference)");
}

EvalMode mode_from(const json& config) {
  if (!config.contains("mode")) return EvalMode::exact();
  const json& m = config.at("mode");
  const std::string type = m.value("type", "exact");
  if (type == "exact") return EvalMode::exact();
  if (type == "shots") {
    if (!m.contains("shots")) throw std::runtime_error("shots mode needs a 'shots' count");
    const std::uint64_t shots = m.at("shots").get<std::uint64_t>();
    if (shots == 0) throw std::runtime_error("shots must be positive");
    return EvalMode::sampled(shots);
  }
  throw std::runtime_error("unknown mode '" + type + "' (use exact or shots)");
}

MultiStartOptions optimizer_from(const json& config, GradientMethod default_gradient) {
  MultiStartOptions opt;
  opt.gradient = default_gradient;
  if (config.contains("optimizer")) {
    const json& o = config.at("optimizer");
    opt.restarts = o.value("restarts", opt.restarts);
    if (opt.restarts < 1) throw std::runtime_error("restarts must be positive");
    opt.gd = gd_options_from(o);
    opt.gradient = gradient_from(o, default_gradient);
  }
  opt.mode = mode_from(config);
  return opt;
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) {
    throw std::runtime_error("matrix must be a nonempty array of rows");
  }
  const std::size_t n = rows.size();
  Matrix m(static_cast<std::int64_t>(n), static_cast<std::int64_t>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) {
      throw std::runtime_error("matrix must be square");
    }
    for (std::size_t c = 0; c < n; ++c) {
      const json& cell = rows[r][c];
      if (cell.is_number()) {
        m(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) = cell.get<double>();
      } else if (cell.is_array() && cell.size() == 2) {
        m(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)) =
            Complex(cell[0].get<double>(), cell[1].get<double>());
      } else {
        throw std::runtime_error("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Slot slot_from(const json& entry, int* next_train, int* next_data) {
  if (entry.contains("value")) return Slot::fixed(entry.at("value").get<double>());
  const std::string kind = entry.value("slot", "train");
  if (kind == "train") {
    const int index = entry.contains("index") ? entry.at("index").get<int>() : *next_train;
    *next_train = index + 1;
    return Slot::train(index);
  }
  if (kind == "data") {
    const int index = entry.contains("index") ? entry.at("index").get<int>() : *next_data;
    *next_data = index + 1;
    return Slot::data(index);
  }
  throw std::runtime_error("slot must be 'train' or 'data' (or give a fixed 'value')");
}

std::vector<int> targets_from(const json& entry) {
  if (entry.contains("qubit")) return {entry.at("qubit").get<int>()};
  if (entry.contains("qubits")) {
    std::vector<int> targets;
    for (const json& q : entry.at("qubits")) targets.push_back(q.get<int>());
    return targets;
  }
  throw std::runtime_error("gate entry needs 'qubit' or 'qubits'");
}

// Ansatz block: {"type": "hardware", "qubits": n, "layers": l} or
// {"type": "layers", "qubits": n, "layers": [entry, ...]} where each entry is
// a trainable/data rotation {"gate": "ry", "qubit": 0, "slot": "train"},
// a fixed rotation ({"value": 0.3} instead of a slot), a full-register mixer
// {"gate": "x_mixer", ...}, or a fixed gate {"gate": "CNOT", "qubits": [0, 1]}.
ParameterizedCircuit ansatz_from_json(const json& a) {
  const int qubits = a.at("qubits").get<int>();
  const std::string type = a.value("type", "hardware");
  if (type == "hardware") {
    const json& layers = a.at("layers");
    if (!layers.is_number_integer()) {
      throw std::runtime_error("hardware ansatz expects an integer layer count");
    }
    return hardware_ansatz(qubits, layers.get<int>());
  }
  if (type != "layers") {
    throw std::runtime_error("unknown ansatz type '" + type + "' (use hardware or layers)");
  }

  ParameterizedCircuit pc(qubits);
  int next_train = 0;
  int next_data = 0;
  for (const json& entry : a.at("layers")) {
    const std::string gate = entry.at("gate").get<std::string>();
    if (gate == "rx" || gate == "ry" || gate == "rz") {
      const Axis axis = gate == "rx" ? Axis::x : gate == "ry" ? Axis::y : Axis::z;
      pc.add_rotation(axis, entry.at("qubit").get<int>(),
                      slot_from(entry, &next_train, &next_data));
    } else if (gate == "x_mixer") {
      pc.add_x_mixer(slot_from(entry, &next_train, &next_data));
    } else {
      pc.add_gate(gate_from_label(gate), targets_from(entry));
    }
  }
  return pc;
}

Observable observable_from(const json& config, int n_qubits, const fs::path& base) {
  if (!config.contains("observable")) return Observable::z_all(n_qubits);
  const json& o = config.at("observable");
  if (o.is_string()) {
    if (o.get<std::string>() == "zn") return Observable::z_all(n_qubits);
    throw std::runtime_error("observable string must be 'zn' (or use {\"file\": ...})");
  }
  Observable obs = o.contains("file")
                       ? load_observable_file(resolve_against(o.at("file").get<std::string>(), base))
                       : Observable::spectral(matrix_from_json(o.at("matrix")));
  if (obs.n_qubits() != n_qubits) {
    throw std::runtime_error("observable size does not match the register");
  }
  return obs;
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string circuit_file;
  std::uint64_t shots = 0;
  std::string readout = "observable";
  std::string noise_file;
  std::string csv;
  CommonArgs common;
};

NoiseSpec merge_noise(const NoiseSpec& base, const NoiseSpec& extra) {
  NoiseSpec merged = base;
  merged.ops.insert(merged.ops.end(), extra.ops.begin(), extra.ops.end());
  if (extra.cce_epsilon != 0.0) {
    if (merged.cce_epsilon != 0.0 && merged.cce_epsilon != extra.cce_epsilon) {
      throw std::runtime_error("cce epsilon given in both the circuit and the noise file");
    }
    merged.cce_epsilon = extra.cce_epsilon;
  }
  return merged;
}

json probabilities_json(const Eigen::VectorXd& probs, int n_qubits) {
  json out = json::object();
  for (std::int64_t x = 0; x < probs.size(); ++x) {
    if (probs(x) > 1e-12) out[to_bitstring(static_cast<std::uint64_t>(x), n_qubits)] = probs(x);
  }
  return out;
}

struct SampledEstimate {
  std::map<std::string, std::uint64_t> histogram;
  double mean = 0.0;
  double std_error = 0.0;
};

// One sampling pass feeding both the histogram and the shot estimate, so the
// two views of a record agree draw for draw.
SampledEstimate sample_eigenvalues(const Observable& obs, const std::vector<double>& probs,
                                   std::uint64_t shots, RandomStream& rng) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t t = 0; t < shots; ++t) {
    counts[static_cast<std::size_t>(sample_outcome(probs, rng))]++;
  }
  SampledEstimate result;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    result.histogram[format_eigenvalue(obs.eigenvalue(static_cast<int>(i)))] += counts[i];
    result.mean += obs.eigenvalue(static_cast<int>(i)) * static_cast<double>(counts[i]);
  }
  result.mean /= static_cast<double>(shots);
  double ssq = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double dev = obs.eigenvalue(static_cast<int>(i)) - result.mean;
    ssq += dev * dev * static_cast<double>(counts[i]);
  }
  if (shots > 1) {
    result.std_error = std::sqrt(ssq / static_cast<double>(shots - 1) /
                                 static_cast<double>(shots));
  }
  return result;
}

void write_run_csv(const std::string& path, const json& outputs) {
  std::ostringstream csv;
  if (outputs.contains("histogram")) {
    csv << "outcome,count\n";
    for (const auto& [key, value] : outputs.at("histogram").items()) {
      csv << key << "," << value.get<std::uint64_t>() << "\n";
    }
  } else if (outputs.contains("probabilities")) {
    csv << "bitstring,probability\n";
    for (const auto& [key, value] : outputs.at("probabilities").items()) {
      csv << key << "," << value.get<double>() << "\n";
    }
  } else {
    csv << "expectation\n" << outputs.at("expectation").get<double>() << "\n";
  }
  write_text_file(path, csv.str());
}

json exec_run(const RunArgs& args, std::uint64_t seed, json* config) {
  const ParsedCircuit parsed = load_circuit_file(args.circuit_file);
  const Circuit& circuit = parsed.circuit;
  const int n = circuit.n_qubits();
  NoiseSpec noise = parsed.noise;
  if (!args.noise_file.empty()) {
    noise = merge_noise(noise, load_noise_file(args.noise_file, n));
  }
  const Readout readout =
      args.readout == "bitstring" ? Readout::bitstring : Readout::observable;

  *config = json{{"circuit_file", args.circuit_file},
                 {"circuit_source", read_text_file(args.circuit_file)},
                 {"shots", args.shots},
                 {"readout", args.readout}};
  if (!args.noise_file.empty()) {
    (*config)["noise_file"] = args.noise_file;
    (*config)["noise_source"] = read_text_file(args.noise_file);
  }

  json outputs{{"n_qubits", n}, {"noisy", !noise.empty()}};
  RandomStream rng(seed);

  if (noise.empty()) {
    if (args.shots == 0) {
      const StateVector psi = run_statevector(circuit);
      if (readout == Readout::observable) {
        outputs["expectation"] = expectation(circuit.observable(), psi);
      } else {
        outputs["probabilities"] =
            probabilities_json(psi.amplitudes().cwiseAbs2(), n);
      }
    } else {
      const ShotResult result =
          run_and_measure(circuit, StateVector::zero(n), args.shots, rng, readout);
      outputs["histogram"] = histogram_json(result.histogram);
      if (result.estimate) {
        outputs["estimate"] = json{{"value", result.estimate->estimate},
                                   {"std_error", result.estimate->std_error},
                                   {"shots", result.estimate->shots}};
      }
    }
  } else {
    std::vector<std::string> warnings;
    const DensityMatrix rho = run_density(circuit, noise, 1.0, ScaleMethod::probability,
                                          &warnings);
    if (args.shots == 0) {
      if (readout == Readout::observable) {
        outputs["expectation"] = expectation(circuit.observable(), rho);
      } else {
        outputs["probabilities"] =
            probabilities_json(rho.matrix().diagonal().real().cwiseMax(0.0), n);
      }
    } else if (readout == Readout::observable) {
      const Observable& obs = circuit.observable();
      const SampledEstimate est =
          sample_eigenvalues(obs, obs.probabilities_density(rho.matrix()), args.shots, rng);
      outputs["histogram"] = histogram_json(est.histogram);
      outputs["estimate"] =
          json{{"value", est.mean}, {"std_error", est.std_error}, {"shots", args.shots}};
    } else {
      const Eigen::VectorXd diag = rho.matrix().diagonal().real().cwiseMax(0.0);
      std::vector<double> probs(diag.data(), diag.data() + diag.size());
      std::map<std::string, std::uint64_t> histogram;
      for (std::uint64_t t = 0; t < args.shots; ++t) {
        const int outcome = sample_outcome(probs, rng);
        histogram[to_bitstring(static_cast<std::uint64_t>(outcome), n)]++;
      }
      outputs["histogram"] = histogram_json(histogram);
    }
    outputs["warnings"] = warnings;
  }

  if (!args.csv.empty()) write_run_csv(args.csv, outputs);
  return outputs;
}

// ---------------------------------------------------------------------------
// vqe / qaoa / qml

json exec_vqe(const std::string& config_path, std::uint64_t seed, json* config) {
  const json cfg = json::parse(read_text_file(config_path));
  *config = json{{"config_file", config_path}, {"config", cfg}};
  const fs::path base = fs::path(config_path).parent_path();

  const json& ham = cfg.at("hamiltonian");
  const Matrix h = ham.contains("file")
                       ? load_matrix_json(resolve_against(ham.at("file").get<std::string>(), base))
                       : matrix_from_json(ham.at("matrix"));
  const Observable obs = Observable::spectral(h);

  ParameterizedCircuit ansatz = ansatz_from_json(cfg.at("ansatz"));
  if (ansatz.n_qubits() != obs.n_qubits()) {
    throw std::runtime_error("ansatz register does not match the observable");
  }
  const MultiStartOptions options = optimizer_from(cfg, GradientMethod::parameter_shift);

  RandomStream rng(seed);
  const VqeResult result = vqe(obs, std::move(ansatz), options, rng);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  return json{{"energy", result.energy},
              {"theta", vector_json(result.theta)},
              {"restart_costs", result.restart_costs},
              {"best_restart", result.best_restart},
              {"min_eigenvalue", solver.eigenvalues().minCoeff()},
              {"optimizer", gd_json(result.best)}};
}

json exec_qaoa(const std::string& config_path, std::uint64_t seed, json* config) {
  const json cfg = json::parse(read_text_file(config_path));
  *config = json{{"config_file", config_path}, {"config", cfg}};

  const json& graph = cfg.at("graph");
  const int nodes = graph.at("nodes").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const json& e : graph.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::runtime_error("edges must be [a, b] pairs");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  const Eigen::VectorXd values = max_cut_values(nodes, edges);

  QaoaOptions options;
  options.p = cfg.value("p", 1);
  options.final_samples = cfg.value("final_samples", options.final_samples);
  options.optimizer = optimizer_from(cfg, GradientMethod::finite_difference);

  RandomStream rng(seed);
  const QaoaResult result = qaoa(values, options, rng);

  return json{{"theta", vector_json(result.theta)},
              {"expectation", result.expectation},
              {"samples", histogram_json(result.samples)},
              {"best_bitstring", result.best_bitstring},
              {"best_value", result.best_value},
              {"optimal_value", values.minCoeff()},
              {"optimum_achieved", result.best_value <= values.minCoeff() + 1e-9},
              {"restart_costs", result.restart_costs},
              {"optimizer", gd_json(result.best)}};
}

// Numeric CSV with a header row; the last column is the target.
void load_dataset_csv(const std::string& path, Eigen::MatrixXd* xs, Eigen::VectorXd* ys) {
  std::istringstream stream(read_text_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty() || line_no == 1) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw ParseError(path, line_no, 1, "dataset fields must be numeric, got '" + field + "'");
      }
    }
    if (row.size() < 2) {
      throw ParseError(path, line_no, 1, "dataset rows need at least one feature and a target");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path, line_no, 1, "dataset rows must all have the same width");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset '" + path + "' has no data rows");

  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  const std::int64_t k = static_cast<std::int64_t>(rows.front().size()) - 1;
  xs->resize(n, k);
  ys->resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < k; ++j) (*xs)(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    (*ys)(i) = rows[static_cast<std::size_t>(i)].back();
  }
}

json exec_qml(const std::string& config_path, std::uint64_t seed, json* config) {
  const json cfg = json::parse(read_text_file(config_path));
  *config = json{{"config_file", config_path}, {"config", cfg}};
  const fs::path base = fs::path(config_path).parent_path();

  Eigen::MatrixXd xs;
  Eigen::VectorXd ys;
  load_dataset_csv(resolve_against(cfg.at("dataset").get<std::string>(), base), &xs, &ys);

  ParameterizedCircuit pc = ansatz_from_json(cfg.at("ansatz"));
  pc.set_observable(observable_from(cfg, pc.n_qubits(), base));
  if (pc.num_data() != xs.cols()) {
    throw std::runtime_error("ansatz expects " + std::to_string(pc.num_data()) +
                             " feature(s), dataset has " + std::to_string(xs.cols()));
  }
  const MultiStartOptions options = optimizer_from(cfg, GradientMethod::parameter_shift);

  RandomStream rng(seed);
  const QmlResult result = qml_fit(pc, xs, ys, options, rng);

  json predictions = json::array();
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const Eigen::VectorXd x = xs.row(i);
    predictions.push_back(qml_predict(pc, result.theta, x));
  }
  return json{{"loss", result.loss},
              {"theta", vector_json(result.theta)},
              {"loss_history", result.loss_history},
              {"predictions", predictions},
              {"optimizer", gd_json(result.best)}};
}

// ---------------------------------------------------------------------------
// qec

struct QecArgs {
  std::string code;
  std::string error_model = "random-unitary";
  int trials = 100;
  int qubit = -1;  // -1: random position per trial
  std::string csv;
  CommonArgs common;
};

Matrix random_unitary2(RandomStream& rng) {
  auto draw = [&rng] { return Complex(rng.normal(), rng.normal()); };
  Vector a(2);
  a << draw(), draw();
  a.normalize();
  Vector b(2);
  b << draw(), draw();
  b -= a * a.dot(b);
  b.normalize();
  Matrix u(2, 2);
  u.col(0) = a;
  u.col(1) = b;
  return u;
}

// error model: x | y | z | rx:<angle> | ry:<angle> | rz:<angle> | random-unitary
Gate error_gate(const std::string& model, RandomStream& rng) {
  if (model == "x") return pauli(Axis::x);
  if (model == "y") return pauli(Axis::y);
  if (model == "z") return pauli(Axis::z);
  if (model == "random-unitary") return Gate("U(random)", random_unitary2(rng));
  const std::size_t colon = model.find(':');
  if (colon != std::string::npos) {
    const std::string name = model.substr(0, colon);
    const double angle = std::stod(model.substr(colon + 1));
    if (name == "rx") return rotation(Axis::x, angle);
    if (name == "ry") return rotation(Axis::y, angle);
    if (name == "rz") return rotation(Axis::z, angle);
  }
  throw std::runtime_error("unknown error model '" + model +
                           "' (use x, y, z, rx:<angle>, ry:<angle>, rz:<angle>, random-unitary)");
}

json exec_qec(const QecArgs& args, std::uint64_t seed, json* config) {
  const CodeInstance code = CodeInstance::make(args.code);
  if (args.trials < 1) throw std::runtime_error("trials must be positive");
  if (args.qubit >= code.n_physical()) {
    throw std::runtime_error("qubit " + std::to_string(args.qubit) + " out of range for " +
                             args.code);
  }
  *config = json{{"code", args.code},
                 {"error_model", args.error_model},
                 {"trials", args.trials},
                 {"qubit", args.qubit < 0 ? json("random") : json(args.qubit)}};

  struct Row {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double fidelity_sum = 0.0;
  };
  std::map<int, Row> rows;
  RandomStream rng(seed);

  for (int t = 0; t < args.trials; ++t) {
    RandomStream trial = rng.fork(static_cast<std::uint64_t>(t));
    auto draw = [&trial] { return Complex(trial.normal(), trial.normal()); };
    Vector pair(2);
    pair << draw(), draw();
    pair.normalize();
    const Complex alpha = pair(0);
    const Complex beta = pair(1);

    const int position = args.qubit >= 0
                             ? args.qubit
                             : static_cast<int>(trial.below(
                                   static_cast<std::uint64_t>(code.n_physical())));

    StateVector psi = qec_encode(code, alpha, beta);
    psi = apply(error_gate(args.error_model, trial), {position}, psi);
    const SyndromeResult syndrome = measure_syndrome(code, psi, trial);
    const StateVector corrected = qec_correct(code, syndrome.label, syndrome.post_state);
    const StateVector decoded = qec_decode(code, corrected);

    const StateVector target(1, pair);
    const double fidelity = std::norm(inner_product(target, decoded));
    Row& row = rows[position];
    row.trials++;
    row.fidelity_sum += fidelity;
    if (fidelity >= 1.0 - 1e-9) row.successes++;
  }

  json table = json::array();
  std::uint64_t total = 0;
  std::uint64_t total_successes = 0;
  double total_fidelity = 0.0;
  for (const auto& [position, row] : rows) {
    table.push_back(json{{"qubit", position},
                         {"trials", row.trials},
                         {"successes", row.successes},
                         {"success_rate",
                          static_cast<double>(row.successes) / static_cast<double>(row.trials)},
                         {"mean_fidelity", row.fidelity_sum / static_cast<double>(row.trials)}});
    total += row.trials;
    total_successes += row.successes;
    total_fidelity += row.fidelity_sum;
  }
  json outputs{{"code", args.code},
               {"error_model", args.error_model},
               {"rows", table},
               {"overall",
                json{{"trials", total},
                     {"successes", total_successes},
                     {"success_rate",
                      static_cast<double>(total_successes) / static_cast<double>(total)},
                     {"mean_fidelity", total_fidelity / static_cast<double>(total)}}}};

  if (!args.csv.empty()) {
    std::ostringstream csv;
    csv << "qubit,trials,successes,success_rate,mean_fidelity\n";
    for (const json& row : table) {
      csv << row.at("qubit").get<int>() << "," << row.at("trials").get<std::uint64_t>() << ","
          << row.at("successes").get<std::uint64_t>() << ","
          << row.at("success_rate").get<double>() << ","
          << row.at("mean_fidelity").get<double>() << "\n";
    }
    write_text_file(args.csv, csv.str());
  }
  return outputs;
}

// ---------------------------------------------------------------------------
// zne

struct ZneArgs {
  std::string circuit_file;
  std::string config_file;
  std::string noise_file;
  std::vector<double> factors;
  std::string model;
  int degree = 0;  // 0: keep config/default
  std::int64_t samples = -1;
  std::string method;
  CommonArgs common;
};

FitModel fit_model_from(const std::string& name) {
  if (name == "linear") return FitModel::linear;
  if (name == "polynomial") return FitModel::polynomial;
  if (name == "exponential") return FitModel::exponential;
  throw std::runtime_error("unknown fit model '" + name + "'");
}

const char* fit_model_name(FitModel model) {
  switch (model) {
    case FitModel::linear: return "linear";
    case FitModel::polynomial: return "polynomial";
    case FitModel::exponential: return "exponential";
  }
  return "linear";
}

ScaleMethod scale_method_from(const std::string& name) {
  if (name == "probability") return ScaleMethod::probability;
  if (name == "gate-folding") return ScaleMethod::gate_folding;
  throw std::runtime_error("unknown scale method '" + name + "'");
}

json exec_zne(const ZneArgs& args, std::uint64_t seed, json* config) {
  const ParsedCircuit parsed = load_circuit_file(args.circuit_file);
  NoiseSpec noise = parsed.noise;
  if (!args.noise_file.empty()) {
    noise = merge_noise(noise, load_noise_file(args.noise_file, parsed.circuit.n_qubits()));
  }

  ZneConfig zc;
  if (!args.config_file.empty()) {
    const json cfg = json::parse(read_text_file(args.config_file));
    if (cfg.contains("scale_factors")) {
      zc.scale_factors = cfg.at("scale_factors").get<std::vector<double>>();
    }
    if (cfg.contains("model")) zc.model = fit_model_from(cfg.at("model").get<std::string>());
    zc.poly_degree = cfg.value("poly_degree", zc.poly_degree);
    zc.samples_per_point = cfg.value("samples_per_point", zc.samples_per_point);
    if (cfg.contains("method")) zc.method = scale_method_from(cfg.at("method").get<std::string>());
  }
  if (!args.factors.empty()) zc.scale_factors = args.factors;
  if (!args.model.empty()) zc.model = fit_model_from(args.model);
  if (args.degree > 0) zc.poly_degree = args.degree;
  if (args.samples >= 0) zc.samples_per_point = static_cast<std::uint64_t>(args.samples);
  if (!args.method.empty()) zc.method = scale_method_from(args.method);

  *config = json{{"circuit_file", args.circuit_file},
                 {"circuit_source", read_text_file(args.circuit_file)},
                 {"scale_factors", zc.scale_factors},
                 {"model", fit_model_name(zc.model)},
                 {"poly_degree", zc.poly_degree},
                 {"samples_per_point", zc.samples_per_point},
                 {"method",
                  zc.method == ScaleMethod::probability ? "probability" : "gate-folding"}};
  if (!args.noise_file.empty()) {
    (*config)["noise_file"] = args.noise_file;
    (*config)["noise_source"] = read_text_file(args.noise_file);
  }

  RandomStream rng(seed);
  const ZneReport report = zne_run(NoisyCircuit{parsed.circuit, noise}, zc, rng);
  const double ideal =
      expectation(parsed.circuit.observable(), run_statevector(parsed.circuit));

  json points = json::array();
  for (const ZnePoint& p : report.points) {
    points.push_back(json{{"lambda", p.lambda}, {"value", p.value}, {"std_error", p.std_error}});
  }
  return json{{"raw", report.raw},
              {"mitigated", report.mitigated},
              {"mitigated_std_error", report.mitigated_std_error},
              {"ideal", ideal},
              {"points", points},
              {"fit_params", vector_json(report.fit_params)},
              {"residuals", vector_json(report.residuals)},
              {"warnings", report.warnings}};
}

// ---------------------------------------------------------------------------
// qft-check

json exec_qft_check(int max_qubits, double tol) {
  if (max_qubits < 1 || max_qubits > max_density_qubits()) {
    throw std::runtime_error("max qubits must lie in [1, " +
                             std::to_string(max_density_qubits()) + "]");
  }
  json results = json::array();
  bool all_pass = true;
  for (int n = 1; n <= max_qubits; ++n) {
    const Matrix u = unitary_of(qft(n));
    const double deviation = (u - dft_matrix(n)).cwiseAbs().maxCoeff();
    const bool pass = deviation <= tol;
    all_pass = all_pass && pass;
    results.push_back(json{{"n", n}, {"max_abs_deviation", deviation}, {"pass", pass}});
  }
  return json{{"tolerance", tol}, {"results", results}, {"all_pass", all_pass}};
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"qcsim: gate-model quantum simulator and variational-algorithm toolkit"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a circuit file");
  run_cmd->add_option("circuit", run_args.circuit_file, "circuit file")->required();
  run_cmd->add_option("--shots", run_args.shots, "number of shots (0 = exact expectation)");
  run_cmd->add_option("--readout", run_args.readout, "readout mode")
      ->check(CLI::IsMember({"observable", "bitstring"}));
  run_cmd->add_option("--noise", run_args.noise_file, "extra noise directives file");
  run_cmd->add_option("--csv", run_args.csv, "also export the main table as CSV");
  add_common_flags(run_cmd, &run_args.common);

  std::string vqe_config;
  CommonArgs vqe_common;
  CLI::App* vqe_cmd = app.add_subcommand("vqe", "variational eigensolver experiment");
  vqe_cmd->add_option("config", vqe_config, "experiment config JSON")->required();
  add_common_flags(vqe_cmd, &vqe_common);

  std::string qaoa_config;
  CommonArgs qaoa_common;
  CLI::App* qaoa_cmd = app.add_subcommand("qaoa", "approximate-optimization experiment");
  qaoa_cmd->add_option("config", qaoa_config, "experiment config JSON")->required();
  add_common_flags(qaoa_cmd, &qaoa_common);

  std::string qml_config;
  CommonArgs qml_common;
  CLI::App* qml_cmd = app.add_subcommand("qml", "circuit regression experiment");
  qml_cmd->add_option("config", qml_config, "experiment config JSON")->required();
  add_common_flags(qml_cmd, &qml_common);

  QecArgs qec_args;
  CLI::App* qec_cmd = app.add_subcommand("qec", "error-correction success-rate table");
  qec_cmd->add_option("code", qec_args.code, "bitflip3 | phaseflip3 | shor9")->required();
  qec_cmd->add_option("--error-model", qec_args.error_model,
                      "x | y | z | rx:<angle> | ry:<angle> | rz:<angle> | random-unitary");
  qec_cmd->add_option("--trials", qec_args.trials, "number of Monte-Carlo trials");
  qec_cmd->add_option("--qubit", qec_args.qubit,
                      "fixed error position (default: random per trial)");
  qec_cmd->add_option("--csv", qec_args.csv, "also export the table as CSV");
  add_common_flags(qec_cmd, &qec_args.common);

  ZneArgs zne_args;
  CLI::App* zne_cmd = app.add_subcommand("zne", "zero-noise extrapolation report");
  zne_cmd->add_option("circuit", zne_args.circuit_file, "circuit file with a noise block")
      ->required();
  zne_cmd->add_option("--config", zne_args.config_file, "ZNE config JSON");
  zne_cmd->add_option("--noise", zne_args.noise_file, "extra noise directives file");
  zne_cmd->add_option("--factors", zne_args.factors, "noise scale factors")->delimiter(',');
  zne_cmd->add_option("--model", zne_args.model, "fit model")
      ->check(CLI::IsMember({"linear", "polynomial", "exponential"}));
  zne_cmd->add_option("--degree", zne_args.degree, "polynomial degree (1-3)");
  zne_cmd->add_option("--samples", zne_args.samples, "shots per point (0 = exact)");
  zne_cmd->add_option("--method", zne_args.method, "noise amplification method")
      ->check(CLI::IsMember({"probability", "gate-folding"}));
  add_common_flags(zne_cmd, &zne_args.common);

  int qft_max_qubits = 4;
  double qft_tol = 1e-9;
  CommonArgs qft_common;
  CLI::App* qft_cmd = app.add_subcommand("qft-check", "compare qft circuits to the dense DFT");
  qft_cmd->add_option("--max-qubits", qft_max_qubits, "largest register to check");
  qft_cmd->add_option("--tol", qft_tol, "per-entry tolerance");
  add_common_flags(qft_cmd, &qft_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (run_cmd->parsed()) {
      RunRecord record{.command = "run", .seed = resolve_seed(run_args.common)};
      record.outputs = exec_run(run_args, record.seed, &record.config);
      return emit_record(std::move(record), run_args.common, start);
    }
    if (vqe_cmd->parsed()) {
      RunRecord record{.command = "vqe", .seed = resolve_seed(vqe_common)};
      record.outputs = exec_vqe(vqe_config, record.seed, &record.config);
      return emit_record(std::move(record), vqe_common, start);
    }
    if (qaoa_cmd->parsed()) {
      RunRecord record{.command = "qaoa", .seed = resolve_seed(qaoa_common)};
      record.outputs = exec_qaoa(qaoa_config, record.seed, &record.config);
      return emit_record(std::move(record), qaoa_common, start);
    }
    if (qml_cmd->parsed()) {
      RunRecord record{.command = "qml", .seed = resolve_seed(qml_common)};
      record.outputs = exec_qml(qml_config, record.seed, &record.config);
      return emit_record(std::move(record), qml_common, start);
    }
    if (qec_cmd->parsed()) {
      RunRecord record{.command = "qec", .seed = resolve_seed(qec_args.common)};
      record.outputs = exec_qec(qec_args, record.seed, &record.config);
      return emit_record(std::move(record), qec_args.common, start);
    }
    if (zne_cmd->parsed()) {
      RunRecord record{.command = "zne", .seed = resolve_seed(zne_args.common)};
      record.outputs = exec_zne(zne_args, record.seed, &record.config);
      return emit_record(std::move(record), zne_args.common, start);
    }
    if (qft_cmd->parsed()) {
      RunRecord record{.command = "qft-check", .seed = resolve_seed(qft_common)};
      record.config = json{{"max_qubits", qft_max_qubits}, {"tolerance", qft_tol}};
      record.outputs = exec_qft_check(qft_max_qubits, qft_tol);
      const bool all_pass = record.outputs.at("all_pass").get<bool>();
      return emit_record(std::move(record), qft_common, start, all_pass ? 0 : 1);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace qcsim
