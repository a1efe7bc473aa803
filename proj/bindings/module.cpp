#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcsim/circuit.hpp"
#include "qcsim/circuit_io.hpp"
#include "qcsim/density.hpp"
#include "qcsim/gates.hpp"
#include "qcsim/measure.hpp"
#include "qcsim/noise.hpp"
#include "qcsim/qec.hpp"
#include "qcsim/qem.hpp"
#include "qcsim/run_record.hpp"
#include "qcsim/state.hpp"
#include "qcsim/vqa.hpp"

namespace py = pybind11;
using namespace qcsim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gate-model quantum simulator core";
  m.attr("__version__") = library_version();

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform01", &RandomStream::uniform01)
      .def("below", &RandomStream::below)
      .def("normal", &RandomStream::normal)
      .def("fork", &RandomStream::fork, py::arg("stream_id"));

  py::class_<StateVector>(m, "StateVector")
      .def(py::init<int, Vector>(), py::arg("n_qubits"), py::arg("amplitudes"))
      .def_static("basis", &StateVector::basis)
      .def_static("zero", &StateVector::zero)
      .def_property_readonly("n_qubits", &StateVector::n_qubits)
      .def_property_readonly("amplitudes",
                             [](const StateVector& s) { return s.amplitudes(); })
      .def("probability", &StateVector::probability)
      .def("norm", &StateVector::norm);

  m.def("tensor", &tensor);
  m.def("inner_product", &inner_product);
  m.def("global_phase_equal", &global_phase_equal, py::arg("a"), py::arg("b"),
        py::arg("tol") = 1e-10);
  m.def("bell_state", [](const std::string& which) {
    if (which == "phi+") return bell_state(Bell::phi_plus);
    if (which == "phi-") return bell_state(Bell::phi_minus);
    if (which == "psi+") return bell_state(Bell::psi_plus);
    if (which == "psi-") return bell_state(Bell::psi_minus);
    throw std::invalid_argument("bell state must be phi+/phi-/psi+/psi-");
  });

  py::class_<Gate>(m, "Gate")
      .def(py::init<std::string, Matrix>(), py::arg("label"), py::arg("matrix"))
      .def_property_readonly("label", &Gate::label)
      .def_property_readonly("matrix", [](const Gate& g) { return g.matrix(); });

  m.def("gate", &gate_from_label, py::arg("label"),
        "Gate from its circuit-file label, e.g. 'H', 'RX(0.5)', 'CU(T)'");
  m.def("apply",
        py::overload_cast<const Gate&, const std::vector<int>&, const StateVector&>(&apply),
        py::arg("gate"), py::arg("targets"), py::arg("state"));
  m.def("embed",
        py::overload_cast<const Matrix&, const std::vector<int>&, int>(&embed),
        py::arg("u"), py::arg("targets"), py::arg("n_qubits"));

  py::class_<Observable>(m, "Observable")
      .def_static("spectral", &Observable::spectral)
      .def_static("diagonal", &Observable::diagonal, py::arg("values"),
                  py::arg("label") = "diagonal")
      .def_static("z_all", &Observable::z_all)
      .def_property_readonly("n_qubits", &Observable::n_qubits)
      .def_property_readonly("eigenvalues",
                             [](const Observable& o) { return o.eigenvalues(); })
      .def("probabilities", &Observable::probabilities)
      .def("expectation", &Observable::expectation);

  m.def("expectation",
        py::overload_cast<const Observable&, const StateVector&>(&expectation));
  m.def("measure_once",
        py::overload_cast<const Observable&, const StateVector&, RandomStream&>(&measure_once));
  m.def("estimate_expectation",
        [](const Observable& obs, const StateVector& psi, std::uint64_t shots,
           RandomStream& rng) {
          const ShotEstimate e = estimate_expectation(obs, psi, shots, rng);
          return py::make_tuple(e.estimate, e.std_error);
        });

  py::class_<MeasurementRecord>(m, "MeasurementRecord")
      .def_readonly("outcome", &MeasurementRecord::outcome)
      .def_readonly("eigenvalue", &MeasurementRecord::eigenvalue)
      .def_readonly("probability", &MeasurementRecord::probability)
      .def_readonly("post_state", &MeasurementRecord::post_state);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<int, Matrix>(), py::arg("n_qubits"), py::arg("rho"))
      .def_static("pure", &DensityMatrix::pure)
      .def_static("from_ensemble", &DensityMatrix::from_ensemble)
      .def_static("maximally_mixed", &DensityMatrix::maximally_mixed)
      .def_property_readonly("n_qubits", &DensityMatrix::n_qubits)
      .def_property_readonly("matrix", [](const DensityMatrix& d) { return d.matrix(); })
      .def("purity", &DensityMatrix::purity)
      .def("is_valid", &DensityMatrix::is_valid, py::arg("tol") = 1e-8);

  m.def("partial_trace", &partial_trace, py::arg("rho"), py::arg("traced"));
  m.def("trace_distance", &trace_distance);
  m.def("fidelity", &fidelity);

  py::class_<Circuit>(m, "Circuit")
      .def(py::init<int>(), py::arg("n_qubits"))
      .def("add",
           [](Circuit& c, const std::string& label, const std::vector<int>& targets) -> Circuit& {
             return c.add(gate_from_label(label), targets);
           },
           py::return_value_policy::reference_internal)
      .def("set_observable", &Circuit::set_observable)
      .def_property_readonly("n_qubits", &Circuit::n_qubits);

  m.def("run_statevector", py::overload_cast<const Circuit&>(&run_statevector));
  m.def("run_and_measure",
        [](const Circuit& c, std::uint64_t shots, RandomStream& rng, const std::string& readout) {
          const ShotResult r =
              run_and_measure(c, StateVector::zero(c.n_qubits()), shots, rng,
                              readout == "bitstring" ? Readout::bitstring : Readout::observable);
          py::dict out;
          out["histogram"] = r.histogram;
          if (r.estimate) {
            out["estimate"] = py::make_tuple(r.estimate->estimate, r.estimate->std_error);
          }
          return out;
        },
        py::arg("circuit"), py::arg("shots"), py::arg("rng"),
        py::arg("readout") = "observable");
  m.def("unitary_of", &unitary_of);
  m.def("qft", &qft);
  m.def("dft_matrix", &dft_matrix);

  m.def("parse_circuit", [](const std::string& text) {
    ParsedCircuit parsed = parse_circuit_file(text);
    return parsed.circuit;
  });

  py::class_<KrausChannel>(m, "KrausChannel")
      .def(py::init<std::string, std::vector<Matrix>>(), py::arg("label"), py::arg("operators"))
      .def_property_readonly("label", &KrausChannel::label)
      .def_property_readonly("operators",
                             [](const KrausChannel& k) { return k.operators(); });
  m.def("bit_flip", &bit_flip);
  m.def("phase_flip", &phase_flip);
  m.def("depolarizing", &depolarizing);
  m.def("apply_channel", &apply_channel, py::arg("channel"), py::arg("rho"), py::arg("targets"));
  m.def("perturbed_gate", &perturbed_gate, py::arg("h"), py::arg("epsilon"),
        py::arg("label") = "");
  m.def("fidelity_lower_bound", &fidelity_lower_bound);

  py::class_<CodeInstance>(m, "CodeInstance")
      .def_static("make", &CodeInstance::make)
      .def_property_readonly("name", &CodeInstance::name)
      .def_property_readonly("n_physical", &CodeInstance::n_physical);
  m.def("qec_encode", &qec_encode);
  m.def("measure_syndrome", [](const CodeInstance& code, const StateVector& psi,
                               RandomStream& rng) {
    const SyndromeResult r = measure_syndrome(code, psi, rng);
    return py::make_tuple(r.label, r.post_state);
  });
  m.def("syndrome_distribution", &syndrome_distribution);
  m.def("qec_correct", &qec_correct);
  m.def("qec_decode", &qec_decode);

  m.def("zne_extrapolate",
        [](const std::vector<double>& lambdas, const std::vector<double>& values,
           const std::string& model, int degree) {
          FitModel fm = FitModel::linear;
          if (model == "polynomial") fm = FitModel::polynomial;
          if (model == "exponential") fm = FitModel::exponential;
          const ZneFit fit = zne_extrapolate(lambdas, values, fm, degree);
          return py::make_tuple(fit.f0, fit.params, fit.residuals);
        },
        py::arg("lambdas"), py::arg("values"), py::arg("model") = "linear",
        py::arg("degree") = 2);

  m.def("hardware_ansatz", &hardware_ansatz, py::arg("n_qubits"), py::arg("layers"));
  py::class_<ParameterizedCircuit>(m, "ParameterizedCircuit")
      .def_property_readonly("n_qubits", &ParameterizedCircuit::n_qubits)
      .def_property_readonly("num_trainable", &ParameterizedCircuit::num_trainable);
  m.def("vqe",
        [](const Matrix& h, int layers, int restarts, std::uint64_t seed) {
          const Observable obs = Observable::spectral(h);
          MultiStartOptions options;
          options.restarts = restarts;
          RandomStream rng(seed);
          const VqeResult r = vqe(obs, hardware_ansatz(obs.n_qubits(), layers), options, rng);
          return py::make_tuple(r.energy, r.theta);
        },
        py::arg("hamiltonian"), py::arg("layers") = 2, py::arg("restarts") = 5,
        py::arg("seed") = 0, "Ground-state search with a hardware-style ansatz");
}
