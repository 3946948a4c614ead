// Copyright 2026 The isolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isolab/channel.hpp"
#include "isolab/circuit.hpp"
#include "isolab/linalg.hpp"
#include "isolab/protocol.hpp"
#include "isolab/reduction.hpp"

namespace py = pybind11;
using namespace isolab;

namespace {

SearchOptions search(std::size_t restarts, std::uint64_t seed) {
    SearchOptions o;
    o.restarts = restarts;
    o.seed = seed;
    return o;
}

ChannelHandle channel_from(const py::object &obj) {
    if (py::isinstance<ChannelHandle>(obj)) return obj.cast<ChannelHandle>();
    if (py::isinstance<Circuit>(obj)) return ChannelHandle(obj.cast<Circuit>());
    return ChannelHandle(parse_circuit(obj.cast<std::string>()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Channel isometry analysis, swap-test protocol and reduction tools";
    m.attr("__version__") = ISOLAB_VERSION;

    py::register_exception<DimensionCapError>(m, "DimensionCapError", PyExc_ValueError);
    py::register_exception<NotNearIsometryError>(m, "NotNearIsometryError", PyExc_RuntimeError);
    py::register_exception<CircuitError>(m, "CircuitError", PyExc_ValueError);

    // Linear algebra on plain complex arrays.
    m.def("operator_norm", &operator_norm);
    m.def("trace_norm", &trace_norm);
    m.def("purity_metrics", [](const ComplexMatrix &rho) {
        const PurityMetrics p = purity_metrics(DensityMatrix(rho));
        return py::dict(py::arg("purity") = p.purity, py::arg("opnorm") = p.opnorm,
                        py::arg("tdist_to_pure") = p.tdist_to_pure);
    });
    m.def("fidelity", [](const ComplexMatrix &rho, const ComplexMatrix &sigma) {
        return fidelity(DensityMatrix(rho), DensityMatrix(sigma));
    });
    m.def("swap_test", [](const ComplexMatrix &rho) {
        const SwapTestResult r = swap_test(DensityMatrix(rho));
        return py::make_tuple(r.p_symmetric, r.p_antisymmetric);
    }, "(p_symmetric, p_antisymmetric) for a state on X (x) X.");

    py::class_<Circuit>(m, "Circuit")
        .def_static("parse", [](const std::string &text) { return parse_circuit(text); })
        .def_static("load", [](const std::string &path) {
            py::object open = py::module_::import("builtins").attr("open");
            return parse_circuit(open(path).attr("read")().cast<std::string>());
        })
        .def_property_readonly("input_qubits", &Circuit::input_qubits)
        .def_property_readonly("output_qubits", &Circuit::output_qubits)
        .def_property_readonly("peak_qubits", &Circuit::peak_qubits)
        .def_property_readonly("gate_count", [](const Circuit &c) { return c.gates().size(); })
        .def_property_readonly("isometric_by_construction", &Circuit::is_isometric_by_construction)
        .def("validate", [](const Circuit &c) -> std::optional<std::string> {
            if (auto e = validate_circuit(c)) return "line " + std::to_string(e->line) + ": " + e->message;
            return std::nullopt;
        })
        .def("serialize", &serialize_circuit)
        .def("__eq__", [](const Circuit &a, const Circuit &b) { return a == b; });

    py::class_<ChannelHandle>(m, "Channel")
        .def(py::init([](const py::object &c) { return channel_from(c); }), py::arg("circuit"))
        .def_property_readonly("circuit", &ChannelHandle::circuit)
        .def_property_readonly("dim_in", &ChannelHandle::dim_in)
        .def_property_readonly("dim_out", &ChannelHandle::dim_out)
        .def("apply", [](const ChannelHandle &ch, const ComplexMatrix &rho) {
            return ch.apply(DensityMatrix(rho)).matrix();
        })
        .def("apply_extended", [](const ChannelHandle &ch, const ComplexVector &psi) {
            return apply_extended(ch, PureState(psi)).matrix();
        }, "(Phi (x) 1_R)(|psi><psi|) for psi on H (x) R.")
        .def("choi", [](const ChannelHandle &ch) { return choi_of(ch).matrix.matrix(); })
        .def("choi_rank", [](const ChannelHandle &ch) { return choi_rank(choi_of(ch)); })
        .def("kraus", [](const ChannelHandle &ch) { return kraus_from_choi(choi_of(ch)).operators; });

    m.def("exact_isometry_test", [](const ChannelHandle &ch) {
        const ExactIsometryResult r = exact_isometry_test(ch);
        return py::dict(py::arg("choi_rank") = r.choi_rank, py::arg("exact_isometry") = r.exact_isometry,
                        py::arg("isometry_operator") = r.isometry_operator,
                        py::arg("isometry_residual") = r.isometry_residual);
    });

    m.def("min_output_opnorm", [](const ChannelHandle &ch, std::size_t restarts, std::uint64_t seed) {
        const MinOutputResult r = min_output_opnorm(ch, search(restarts, seed));
        return py::make_tuple(r.value, r.minimizer.amplitudes());
    }, py::arg("channel"), py::arg("restarts") = 16, py::arg("seed") = 0,
       "(value, minimizing amplitudes on H (x) R).");

    m.def("analyze", [](const ChannelHandle &ch, double epsilon, std::size_t restarts, std::uint64_t seed) {
        ch.check_extended_cap();
        const IsometryReport r = analyze_isometry(ch, epsilon, search(restarts, seed));
        return py::dict(py::arg("choi_rank") = r.choi_rank, py::arg("exact_isometry") = r.exact_isometry,
                        py::arg("isometry_operator") = r.isometry_operator,
                        py::arg("min_output_opnorm") = r.min_output_opnorm,
                        py::arg("minimizing_state") = r.minimizing_state.amplitudes(),
                        py::arg("classification") = to_string(r.classification));
    }, py::arg("channel"), py::arg("epsilon") = 0.25, py::arg("restarts") = 16, py::arg("seed") = 0);

    m.def("extract_approx_isometry", [](const ChannelHandle &ch, std::uint64_t seed) {
        const ApproxIsometry a = extract_approx_isometry(ch, seed);
        return py::dict(py::arg("operator") = a.operator_a, py::arg("eps_measured") = a.eps_measured,
                        py::arg("max_probe_distance") = a.max_probe_distance,
                        py::arg("probe_count") = a.probe_count);
    }, py::arg("channel"), py::arg("seed") = 0);

    m.def("run_protocol", [](const ChannelHandle &ch, const ComplexVector &psi, std::size_t shots, std::uint64_t seed) {
        const WitnessState w = honest_witness(ch, PureState(psi));
        const ProtocolResult r = shots ? run_protocol_sampled(ch, w, shots, seed) : run_protocol_exact(ch, w);
        py::dict out(py::arg("p_step1_symmetric") = r.p_step1_symmetric,
                     py::arg("p_step3_antisymmetric_given_step1") = r.p_step3_antisymmetric_given_step1,
                     py::arg("p_accept") = r.p_accept);
        if (r.shots) out["accepts"] = r.shots->accepts;
        return out;
    }, py::arg("channel"), py::arg("psi"), py::arg("shots") = 0, py::arg("seed") = 0,
       "Two-copy swap-test protocol on the honest witness |psi>|psi>.");

    m.def("run_protocol_on_witness", [](const ChannelHandle &ch, const ComplexMatrix &witness) {
        return run_protocol_exact(ch, WitnessState{DensityMatrix(witness)}).p_accept;
    });

    py::class_<VerifierSpec>(m, "Verifier")
        .def_static("parse", [](const std::string &text) { return parse_verifier(text); })
        .def_readonly("circuit", &VerifierSpec::circuit)
        .def_readonly("witness", &VerifierSpec::witness)
        .def_readonly("ancilla", &VerifierSpec::ancilla)
        .def_readonly("measured", &VerifierSpec::measured)
        .def_readonly("garbage", &VerifierSpec::garbage)
        .def("serialize", &serialize_verifier)
        .def("max_accept_prob", [](const VerifierSpec &v) {
            const AcceptanceResult r = max_accept_prob(v);
            return py::make_tuple(r.p, r.optimal_witness.amplitudes());
        });

    m.def("build_instance", [](const VerifierSpec &v, double epsilon) {
        const ReductionOutput r = build_instance(v, epsilon);
        return py::dict(py::arg("circuit") = r.channel_circuit, py::arg("padding_qubits") = r.padding_qubits,
                        py::arg("measured_output") = r.measured_output, py::arg("output_dim") = r.output_dim);
    });

    m.def("reduction_check", [](const VerifierSpec &v, double epsilon, std::size_t restarts, std::uint64_t seed) {
        const ReductionCheckReport r = reduction_check(v, epsilon, search(restarts, seed));
        return py::dict(py::arg("p") = r.p, py::arg("min_output_opnorm") = r.min_output_opnorm,
                        py::arg("output_dim") = r.output_dim, py::arg("regime") = to_string(r.regime),
                        py::arg("implication_holds") = r.implication_holds,
                        py::arg("classification") = to_string(r.classification));
    }, py::arg("verifier"), py::arg("epsilon"), py::arg("restarts") = 16, py::arg("seed") = 0);
}
