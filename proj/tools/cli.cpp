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

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "isolab/channel.hpp"
#include "isolab/circuit.hpp"
#include "isolab/protocol.hpp"
#include "isolab/reduction.hpp"
#include "report.hpp"

namespace isolab::cli {

namespace {

// Problems with files or flag values; reported with exit code 2.
class InputError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json(const std::string &path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error &e) {
        throw InputError(path + ": " + e.what());
    }
}

Circuit load_circuit(const std::string &path) {
    return parse_circuit(read_file(path));
}

struct Common {
    std::string path;
    double epsilon = 0.25;
    std::size_t restarts = 16;
    std::uint64_t seed = 0;
};

SearchOptions search_options(const Common &c) {
    SearchOptions o;
    o.restarts = c.restarts;
    o.seed = c.seed;
    return o;
}

Json circuit_summary(const Circuit &c) {
    Json j = Json::object();
    j["input_qubits"] = c.input_qubits();
    j["output_qubits"] = c.output_qubits();
    j["peak_qubits"] = c.peak_qubits();
    j["gate_count"] = c.gates().size();
    j["isometric_by_construction"] = c.is_isometric_by_construction();
    return j;
}

Json purity_json(const PurityMetrics &m) {
    Json j = Json::object();
    j["purity"] = m.purity;
    j["opnorm"] = m.opnorm;
    j["tdist_to_pure"] = m.tdist_to_pure;
    return j;
}

Report cmd_validate(const Common &c) {
    Report r;
    r.command = "validate";
    r.inputs["path"] = c.path;
    const Circuit circuit = load_circuit(c.path);
    r.results["valid"] = true;
    const Json summary = circuit_summary(circuit);
    for (const auto &[k, v] : summary.items()) {
        r.results[k] = v;
    }
    return r;
}

Report cmd_analyze(const Common &c) {
    Report r;
    r.command = "analyze";
    r.inputs["path"] = c.path;
    r.inputs["epsilon"] = c.epsilon;
    r.inputs["restarts"] = c.restarts;
    r.seed = c.seed;
    const ChannelHandle ch(load_circuit(c.path));
    ch.check_extended_cap();
    const IsometryReport rep = analyze_isometry(ch, c.epsilon, search_options(c));
    r.results["choi_rank"] = rep.choi_rank;
    r.results["exact_isometry"] = rep.exact_isometry;
    if (rep.isometry_operator) {
        r.results["isometry_operator"] = to_json(*rep.isometry_operator);
    }
    r.results["min_output_opnorm"] = rep.min_output_opnorm;
    r.results["classification"] = to_string(rep.classification);
    r.results["minimizing_state"] = to_json(rep.minimizing_state.amplitudes());
    r.results["purity_at_minimizer"] = purity_json(purity_metrics(apply_extended(ch, rep.minimizing_state)));
    return r;
}

Report cmd_choi(const Common &c) {
    Report r;
    r.command = "choi";
    r.inputs["path"] = c.path;
    const ChannelHandle ch(load_circuit(c.path));
    const ChoiMatrix choi = choi_of(ch);
    r.results["dim_in"] = choi.dim_in;
    r.results["dim_out"] = choi.dim_out;
    r.results["rank_tolerance"] = tol::kRank;
    r.results["rank"] = choi_rank(choi);
    r.results["eigenvalues"] = to_json(choi_eigenvalues(choi));
    r.results["matrix"] = to_json(choi.matrix.matrix());
    return r;
}

Report cmd_kraus(const Common &c) {
    Report r;
    r.command = "kraus";
    r.inputs["path"] = c.path;
    const ChannelHandle ch(load_circuit(c.path));
    const KrausSet k = kraus_from_choi(choi_of(ch));
    r.results["dim_in"] = k.dim_in;
    r.results["dim_out"] = k.dim_out;
    r.results["count"] = k.operators.size();
    r.results["completeness_error"] = k.completeness_error();
    r.results["reconstruction_residual"] = kraus_reconstruction_residual(ch, k);
    Json ops = Json::array();
    for (const auto &op : k.operators) {
        ops.push_back(to_json(op));
    }
    r.results["operators"] = std::move(ops);
    return r;
}

// {"amplitudes": [...]} or {"density_matrix": [[...]]}.
DensityMatrix state_from_file(const std::string &path) {
    const Json j = read_json(path);
    if (j.contains("density_matrix")) {
        return DensityMatrix(matrix_from_json(j.at("density_matrix")));
    }
    if (j.contains("amplitudes")) {
        return PureState::normalized(vector_from_json(j.at("amplitudes"))).density();
    }
    throw InputError(path + ": expected an 'amplitudes' or 'density_matrix' field");
}

PureState pure_from_file(const std::string &path) {
    const Json j = read_json(path);
    if (!j.contains("amplitudes")) {
        throw InputError(path + ": expected an 'amplitudes' field");
    }
    return PureState::normalized(vector_from_json(j.at("amplitudes")));
}

Report cmd_protocol(const Common &c, const std::string &witness, const std::string &psi_source, std::size_t shots) {
    Report r;
    r.command = "protocol";
    r.inputs["path"] = c.path;
    r.inputs["witness"] = witness;
    r.inputs["psi"] = psi_source;
    r.inputs["shots"] = shots;
    r.inputs["restarts"] = c.restarts;
    r.seed = c.seed;
    const ChannelHandle ch(load_circuit(c.path));

    WitnessState w{DensityMatrix::maximally_mixed(1)};
    if (witness == "honest") {
        PureState psi = PureState::basis(1, 0);
        if (psi_source == "auto") {
            const MinOutputResult search = min_output_opnorm(ch, search_options(c));
            psi = search.minimizer;
            r.results["min_output_opnorm"] = search.value;
        } else {
            psi = pure_from_file(psi_source);
        }
        r.results["psi"] = to_json(psi.amplitudes());
        w = honest_witness(ch, psi);
    } else {
        w = WitnessState{state_from_file(witness)};
    }

    const ProtocolResult res = shots > 0 ? run_protocol_sampled(ch, w, shots, c.seed) : run_protocol_exact(ch, w);
    r.results["p_step1_symmetric"] = res.p_step1_symmetric;
    r.results["p_step3_antisymmetric_given_step1"] = res.p_step3_antisymmetric_given_step1;
    r.results["p_accept"] = res.p_accept;
    if (res.shots) {
        Json s = Json::object();
        s["n"] = res.shots->n;
        s["accepts"] = res.shots->accepts;
        s["frequency"] = static_cast<double>(res.shots->accepts) / static_cast<double>(res.shots->n);
        r.results["shots"] = std::move(s);
    }
    return r;
}

std::string default_reduce_output(const std::string &verifier_path) {
    std::filesystem::path p(verifier_path);
    p.replace_extension(".reduction.circ");
    return p.string();
}

Report cmd_reduce(const Common &c, bool check, std::string output) {
    Report r;
    r.command = "reduce";
    if (output.empty()) {
        output = default_reduce_output(c.path);
    }
    r.inputs["path"] = c.path;
    r.inputs["epsilon"] = c.epsilon;
    r.inputs["check"] = check;
    r.inputs["output"] = output;
    const VerifierSpec v = parse_verifier(read_file(c.path));
    const ReductionOutput inst = build_instance(v, c.epsilon);
    {
        std::ofstream out(output, std::ios::binary);
        if (!out) {
            throw InputError("cannot write '" + output + "'");
        }
        out << serialize_circuit(inst.channel_circuit);
    }
    r.results["output_path"] = output;
    r.results["padding_qubits"] = inst.padding_qubits;
    r.results["output_dim"] = inst.output_dim;
    r.results["measured_output"] = inst.measured_output;
    const Json summary = circuit_summary(inst.channel_circuit);
    for (const auto &[k, val] : summary.items()) {
        r.results[k] = val;
    }
    if (check) {
        r.inputs["restarts"] = c.restarts;
        r.seed = c.seed;
        const ReductionCheckReport t = reduction_check(v, c.epsilon, search_options(c));
        Json j = Json::object();
        j["p"] = t.p;
        j["optimal_witness"] = to_json(t.optimal_witness.amplitudes());
        j["min_output_opnorm"] = t.min_output_opnorm;
        j["regime"] = to_string(t.regime);
        if (t.implication_holds) {
            j["implication_holds"] = *t.implication_holds;
        } else {
            j["implication_holds"] = nullptr;
        }
        j["classification"] = to_string(t.classification);
        r.results["check"] = std::move(j);
    }
    return r;
}

void add_search_flags(CLI::App *sub, Common &c) {
    sub->add_option("--restarts", c.restarts, "Random restarts of the minimum-output search")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed for every randomized step")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Isometry analysis of mixed-state quantum circuits", "isolab"};
    app.set_version_flag("--version", std::string(ISOLAB_VERSION));
    app.require_subcommand(1);

    Common c;
    std::string witness = "honest";
    std::string psi = "auto";
    std::size_t shots = 0;
    bool check = false;
    std::string output;

    auto *validate = app.add_subcommand("validate", "Parse and validate a circuit file");
    validate->add_option("path", c.path, "Circuit file")->required();

    auto *analyze = app.add_subcommand("analyze", "Isometry analysis of a circuit's channel");
    analyze->add_option("path", c.path, "Circuit file")->required();
    analyze->add_option("--epsilon", c.epsilon, "Promise gap parameter in [0, 1/2)")->capture_default_str();
    add_search_flags(analyze, c);

    auto *choi = app.add_subcommand("choi", "Normalized Choi matrix and its spectrum");
    choi->add_option("path", c.path, "Circuit file")->required();

    auto *kraus = app.add_subcommand("kraus", "Minimal Kraus decomposition");
    kraus->add_option("path", c.path, "Circuit file")->required();

    auto *protocol = app.add_subcommand("protocol", "Simulate the two-copy swap-test protocol");
    protocol->add_option("path", c.path, "Circuit file")->required();
    protocol->add_option("--witness", witness, "'honest' or a JSON state file")->capture_default_str();
    protocol->add_option("--psi", psi, "'auto' or a JSON file with the state for the honest witness")
        ->capture_default_str();
    protocol->add_option("--shots", shots, "Sampled shots (0 for exact only)")->capture_default_str();
    add_search_flags(protocol, c);

    auto *reduce = app.add_subcommand("reduce", "Build the channel instance for a verifier circuit");
    reduce->add_option("path", c.path, "Verifier file")->required();
    reduce->add_option("--epsilon", c.epsilon, "Target gap parameter in (0, 1/2)")->capture_default_str();
    reduce->add_flag("--check", check, "Also compute acceptance and minimum output opnorm");
    reduce->add_option("-o,--output", output, "Path of the emitted circuit file");
    add_search_flags(reduce, c);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        Report report;
        if (app.got_subcommand(validate)) {
            report = cmd_validate(c);
        } else if (app.got_subcommand(analyze)) {
            report = cmd_analyze(c);
        } else if (app.got_subcommand(choi)) {
            report = cmd_choi(c);
        } else if (app.got_subcommand(kraus)) {
            report = cmd_kraus(c);
        } else if (app.got_subcommand(protocol)) {
            report = cmd_protocol(c, witness, psi, shots);
        } else {
            report = cmd_reduce(c, check, output);
        }
        out << render(report);
        return kExitOk;
    } catch (const CircuitError &e) {
        err << c.path << ":" << e.error().line << ": error: " << e.error().message << "\n";
        return kExitInput;
    } catch (const DimensionCapError &e) {
        err << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NotNearIsometryError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace isolab::cli
