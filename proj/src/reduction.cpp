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

#include "isolab/reduction.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace isolab {

namespace {

constexpr std::size_t kMaxVerifierInputQubits = 10;

std::vector<std::size_t> sorted_copy(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

void require_partition(std::vector<std::size_t> parts, std::size_t n, const std::string &what) {
    std::sort(parts.begin(), parts.end());
    if (parts.size() != n) {
        throw std::invalid_argument(what + " must partition the " + std::to_string(n) + " qubits");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (parts[k] != k) {
            throw std::invalid_argument(what + " must partition the " + std::to_string(n) + " qubits");
        }
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void fail(std::size_t line, std::string message) {
    throw CircuitError(CircuitParseError{line, std::move(message)});
}

std::vector<std::size_t> parse_index_list(std::string_view text, std::size_t line) {
    std::vector<std::size_t> out;
    std::string buf(text);
    for (char &c : buf) {
        if (c == ',') {
            c = ' ';
        }
    }
    std::istringstream in(buf);
    std::string tok;
    while (in >> tok) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            fail(line, "invalid qubit index '" + tok + "' in register header");
        }
        out.push_back(v);
    }
    return out;
}

void write_list(std::ostream &out, const std::vector<std::size_t> &v) {
    for (std::size_t q : v) {
        out << " " << q;
    }
}

}  // namespace

void validate_verifier(const VerifierSpec &v) {
    if (auto err = validate_circuit(v.circuit)) {
        throw CircuitError(*err);
    }
    if (!v.circuit.is_isometric_by_construction()) {
        throw std::invalid_argument("verifier body may contain only unitaries and ancillas");
    }
    require_partition([&] {
        auto all = v.witness;
        all.insert(all.end(), v.ancilla.begin(), v.ancilla.end());
        return all;
    }(), v.circuit.input_qubits(), "witness and ancilla registers");
    require_partition([&] {
        auto all = v.garbage;
        all.push_back(v.measured);
        return all;
    }(), v.circuit.output_qubits(), "measured and garbage registers");
    if (v.witness.empty()) {
        throw std::invalid_argument("witness register is empty");
    }
}

VerifierSpec parse_verifier(std::string_view source) {
    std::map<std::string, std::pair<std::size_t, std::vector<std::size_t>>> headers;
    std::string body;
    bool circuit_started = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        std::size_t nl = source.find('\n', pos);
        std::string_view raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? source.size() + 1 : nl + 1;
        ++line_no;
        std::string_view content = raw;
        if (auto hash = content.find('#'); hash != std::string_view::npos) {
            content = content.substr(0, hash);
        }
        content = trim(content);
        const auto colon = content.find(':');
        const bool header_like = !circuit_started && colon != std::string_view::npos;
        if (!circuit_started && content.rfind("qubits", 0) == 0) {
            circuit_started = true;
        }
        if (header_like) {
            std::string key(trim(content.substr(0, colon)));
            if (key != "witness" && key != "ancilla" && key != "measure" && key != "garbage") {
                fail(line_no, "unknown register header '" + key + "'");
            }
            if (headers.count(key) != 0) {
                fail(line_no, "duplicate register header '" + key + "'");
            }
            headers[key] = {line_no, parse_index_list(content.substr(colon + 1), line_no)};
            body += "\n";  // keep line numbers aligned for the circuit parser
        } else {
            body.append(raw);
            body += "\n";
        }
    }
    for (const char *key : {"witness", "ancilla", "measure", "garbage"}) {
        if (headers.count(key) == 0) {
            fail(1, std::string("missing register header '") + key + "'");
        }
    }
    const auto &measure = headers["measure"];
    if (measure.second.size() != 1) {
        fail(measure.first, "measure header takes exactly one qubit");
    }

    VerifierSpec v;
    v.circuit = parse_circuit(body);
    v.witness = headers["witness"].second;
    v.ancilla = headers["ancilla"].second;
    v.measured = measure.second.front();
    v.garbage = headers["garbage"].second;
    try {
        validate_verifier(v);
    } catch (const CircuitError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        fail(headers["witness"].first, e.what());
    }
    return v;
}

std::string serialize_verifier(const VerifierSpec &v) {
    std::ostringstream out;
    out << "witness:";
    write_list(out, v.witness);
    out << "\nancilla:";
    write_list(out, v.ancilla);
    out << "\nmeasure: " << v.measured << "\ngarbage:";
    write_list(out, v.garbage);
    out << "\n" << serialize_circuit(v.circuit);
    return out.str();
}

KrausSet controlled_depolarize_kraus_set(std::size_t target_dim) {
    return KrausSet{2 * target_dim, 2 * target_dim, controlled_depolarize_kraus(target_dim)};
}

std::size_t required_output_qubits(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw std::invalid_argument("epsilon must lie in (0, 1/2)");
    }
    std::size_t q = 0;
    while (static_cast<double>(std::size_t{1} << q) <= 2.0 / epsilon) {
        ++q;
    }
    return q;
}

ReductionOutput build_instance(const VerifierSpec &v, double epsilon) {
    validate_verifier(v);
    const std::size_t needed = required_output_qubits(epsilon);
    const std::size_t n_in = v.circuit.input_qubits();

    // Channel register layout: witness qubits, then verifier ancillas, each in
    // ascending label order. Qubits the body appends keep their labels.
    std::vector<std::size_t> relabel(n_in);
    const auto witness = sorted_copy(v.witness);
    const auto ancilla = sorted_copy(v.ancilla);
    for (std::size_t k = 0; k < witness.size(); ++k) {
        relabel[witness[k]] = k;
    }
    for (std::size_t k = 0; k < ancilla.size(); ++k) {
        relabel[ancilla[k]] = witness.size() + k;
    }
    auto map = [&](std::size_t q) { return q < n_in ? relabel[q] : q; };

    std::vector<Gate> gates;
    for (std::size_t k = 0; k < ancilla.size(); ++k) {
        gates.push_back(Gate::ancilla());
    }
    for (const Gate &g : v.circuit.gates()) {
        Gate copy = g;
        for (auto &t : copy.targets) {
            t = map(t);
        }
        gates.push_back(std::move(copy));
    }
    const std::size_t n_out = v.circuit.output_qubits();
    ReductionOutput out;
    out.padding_qubits = needed > n_out ? needed - n_out : 0;
    for (std::size_t k = 0; k < out.padding_qubits; ++k) {
        gates.push_back(Gate::ancilla());
    }
    out.measured_output = map(v.measured);
    std::vector<std::size_t> targets;
    for (std::size_t g : v.garbage) {
        targets.push_back(map(g));
    }
    for (std::size_t k = 0; k < out.padding_qubits; ++k) {
        targets.push_back(n_out + k);
    }
    std::sort(targets.begin(), targets.end());
    gates.push_back(Gate::dephase(out.measured_output));
    gates.push_back(Gate::cdepolarize(out.measured_output, std::move(targets)));

    out.channel_circuit = Circuit(witness.size(), std::move(gates));
    out.output_dim = std::size_t{1} << out.channel_circuit.output_qubits();
    if (auto err = validate_circuit(out.channel_circuit)) {
        throw std::logic_error("build_instance produced an invalid circuit: " + err->to_string());
    }
    return out;
}

namespace {

// Columns: V applied to |w> (x) |0>_A for each witness basis state w, with the
// witness register in ascending label order.
ComplexMatrix verifier_on_witness_space(const VerifierSpec &v) {
    const std::size_t n_in = v.circuit.input_qubits();
    if (n_in > kMaxVerifierInputQubits) {
        throw DimensionCapError("verifier has " + std::to_string(n_in) + " input qubits; the limit is " +
                                std::to_string(kMaxVerifierInputQubits));
    }
    const auto witness = sorted_copy(v.witness);
    const std::size_t wdim = std::size_t{1} << witness.size();
    const std::size_t out_dim = std::size_t{1} << v.circuit.output_qubits();
    ComplexMatrix cols(out_dim, wdim);
    for (std::size_t w = 0; w < wdim; ++w) {
        std::size_t index = 0;
        for (std::size_t k = 0; k < witness.size(); ++k) {
            if ((w >> (witness.size() - 1 - k)) & 1u) {
                index |= std::size_t{1} << (n_in - 1 - witness[k]);
            }
        }
        ComplexVector input = ComplexVector::Zero(std::size_t{1} << n_in);
        input[index] = 1.0;
        cols.col(w) = apply_isometric_circuit(v.circuit, input);
    }
    return cols;
}

// Rows of the verifier output where the measured qubit is |1>.
std::vector<Eigen::Index> accepting_rows(const VerifierSpec &v) {
    const std::size_t n_out = v.circuit.output_qubits();
    const std::size_t bit = std::size_t{1} << (n_out - 1 - v.measured);
    std::vector<Eigen::Index> rows;
    for (std::size_t r = 0; r < (std::size_t{1} << n_out); ++r) {
        if (r & bit) {
            rows.push_back(static_cast<Eigen::Index>(r));
        }
    }
    return rows;
}

}  // namespace

AcceptanceResult max_accept_prob(const VerifierSpec &v) {
    validate_verifier(v);
    const ComplexMatrix cols = verifier_on_witness_space(v);
    const ComplexMatrix accepted = cols(accepting_rows(v), Eigen::all);
    const ComplexMatrix e = accepted.adjoint() * accepted;
    auto [p, vec] = top_eigenpair(e);
    return {std::clamp(p, 0.0, 1.0), PureState::normalized(vec)};
}

double accept_probability(const VerifierSpec &v, const DensityMatrix &witness) {
    validate_verifier(v);
    const ComplexMatrix cols = verifier_on_witness_space(v);
    if (static_cast<Eigen::Index>(witness.dim()) != cols.cols()) {
        throw DimensionError("accept_probability: witness dimension mismatch");
    }
    const ComplexMatrix out = cols * witness.matrix() * cols.adjoint();
    double p = 0.0;
    for (Eigen::Index r : accepting_rows(v)) {
        p += out(r, r).real();
    }
    return std::clamp(p, 0.0, 1.0);
}

std::string to_string(AcceptanceRegime r) {
    switch (r) {
        case AcceptanceRegime::LowAcceptance:
            return "p <= epsilon";
        case AcceptanceRegime::HighAcceptance:
            return "p >= 1 - epsilon";
        case AcceptanceRegime::Gap:
            return "no implication applies";
    }
    return "no implication applies";
}

ReductionCheckReport reduction_check(const VerifierSpec &v, double epsilon, const SearchOptions &options) {
    constexpr double kSlack = 1e-3;
    ReductionCheckReport report;
    report.epsilon = epsilon;
    const AcceptanceResult acc = max_accept_prob(v);
    report.p = acc.p;
    report.optimal_witness = acc.optimal_witness;
    const ReductionOutput instance = build_instance(v, epsilon);
    report.output_dim = instance.output_dim;
    report.padding_qubits = instance.padding_qubits;
    const ChannelHandle ch(instance.channel_circuit);
    const ClassificationResult cls = classify_nonisometry(ch, epsilon, options, 1.0 - acc.p);
    report.min_output_opnorm = cls.min_found;
    report.classification = cls.classification;
    if (acc.p <= epsilon) {
        report.regime = AcceptanceRegime::LowAcceptance;
        report.implication_holds = report.min_output_opnorm >= 1.0 - epsilon - kSlack;
    } else if (acc.p >= 1.0 - epsilon) {
        report.regime = AcceptanceRegime::HighAcceptance;
        report.implication_holds = report.min_output_opnorm <= epsilon + kSlack;
    } else {
        report.regime = AcceptanceRegime::Gap;
    }
    return report;
}

}  // namespace isolab
