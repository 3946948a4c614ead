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

#include "isolab/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace isolab {

namespace {

const std::map<std::string, std::size_t, std::less<>> &arities() {
    static const std::map<std::string, std::size_t, std::less<>> table = {
        {"I", 1}, {"X", 1}, {"Y", 1}, {"Z", 1}, {"H", 1}, {"S", 1}, {"T", 1},
        {"CNOT", 2}, {"CZ", 2}, {"SWAP", 2},
    };
    return table;
}

ComplexMatrix matrix_from(std::initializer_list<std::initializer_list<Complex>> rows) {
    ComplexMatrix m(rows.size(), rows.begin()->size());
    Eigen::Index i = 0;
    for (const auto &row : rows) {
        Eigen::Index j = 0;
        for (const auto &v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

ComplexMatrix outer_unit(std::size_t dim, std::size_t i, std::size_t j) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}

ComplexMatrix insert_zero_qubit(const ComplexMatrix &rho, std::size_t pos, std::size_t n_qubits) {
    const std::size_t low_bits = n_qubits - pos;
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<Eigen::Index> target(dim);
    const std::size_t low_mask = (std::size_t{1} << low_bits) - 1;
    for (std::size_t i = 0; i < dim; ++i) {
        target[i] = static_cast<Eigen::Index>(((i >> low_bits) << (low_bits + 1)) | (i & low_mask));
    }
    ComplexMatrix out = ComplexMatrix::Zero(2 * dim, 2 * dim);
    out(target, target) = rho;
    return out;
}

ComplexVector insert_zero_qubit(const ComplexVector &psi, std::size_t pos, std::size_t n_qubits) {
    const std::size_t low_bits = n_qubits - pos;
    const std::size_t dim = std::size_t{1} << n_qubits;
    const std::size_t low_mask = (std::size_t{1} << low_bits) - 1;
    ComplexVector out = ComplexVector::Zero(2 * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out[((i >> low_bits) << (low_bits + 1)) | (i & low_mask)] = psi[i];
    }
    return out;
}

ComplexMatrix trace_out_qubit(const ComplexMatrix &rho, std::size_t pos, std::size_t n_qubits) {
    const std::size_t dims[] = {std::size_t{1} << pos, 2, std::size_t{1} << (n_qubits - pos - 1)};
    const std::size_t keep[] = {0, 2};
    return partial_trace(rho, dims, keep);
}

// Sum_k K rho K* with each K acting on `targets`.
ComplexMatrix apply_kraus_local(const std::vector<ComplexMatrix> &kraus, std::span<const std::size_t> targets,
                                std::size_t n_qubits, const ComplexMatrix &rho) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus) {
        ComplexMatrix tmp = rho;
        apply_local_left(k, targets, n_qubits, tmp);
        ComplexMatrix adj = tmp.adjoint();
        apply_local_left(k, targets, n_qubits, adj);
        out += adj.adjoint();
    }
    return out;
}

double max_abs_entry(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

std::optional<std::string> check_gate(const Gate &g, std::size_t width) {
    for (std::size_t t : g.targets) {
        if (t >= width) {
            return "target out of range";
        }
    }
    std::vector<std::size_t> sorted = g.targets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        return "duplicate target";
    }
    switch (g.kind) {
        case GateKind::AddAncilla:
            if (!g.targets.empty() || !g.operators.empty()) {
                return "ancilla takes no targets";
            }
            return std::nullopt;
        case GateKind::TraceOut:
            if (g.targets.size() != 1) {
                return "traceout takes exactly one target";
            }
            return std::nullopt;
        case GateKind::Unitary: {
            if (g.targets.empty()) {
                return "gate has no targets";
            }
            if (g.operators.size() != 1) {
                return "unitary gate must carry one matrix";
            }
            const auto &u = g.operators.front();
            const Eigen::Index dim = Eigen::Index{1} << g.targets.size();
            if (u.rows() != dim || u.cols() != dim) {
                return "gate matrix dimension does not match target count";
            }
            if (!all_finite(u)) {
                return "gate matrix has non-finite entries";
            }
            if (max_abs_entry(u.adjoint() * u - ComplexMatrix::Identity(dim, dim)) > tol::kStructural) {
                return "non-unitary gate";
            }
            return std::nullopt;
        }
        case GateKind::Channel: {
            if (g.targets.empty()) {
                return "channel has no targets";
            }
            if (g.operators.empty()) {
                return "channel has no Kraus operators";
            }
            const Eigen::Index dim = Eigen::Index{1} << g.targets.size();
            ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
            for (const auto &k : g.operators) {
                if (k.rows() != dim || k.cols() != dim) {
                    return "Kraus operator dimension does not match target count";
                }
                if (!all_finite(k)) {
                    return "Kraus operator has non-finite entries";
                }
                sum += k.adjoint() * k;
            }
            if (max_abs_entry(sum - ComplexMatrix::Identity(dim, dim)) > tol::kStructural) {
                return "not trace preserving";
            }
            return std::nullopt;
        }
    }
    return "unknown gate kind";
}

// Width after applying g to a register of `width` qubits.
std::size_t width_after(const Gate &g, std::size_t width) {
    if (g.kind == GateKind::AddAncilla) {
        return width + 1;
    }
    if (g.kind == GateKind::TraceOut) {
        return width == 0 ? 0 : width - 1;
    }
    return width;
}

}  // namespace

Gate Gate::builtin(std::string_view name, std::vector<std::size_t> targets) {
    return Gate{GateKind::Unitary, std::string(name), std::move(targets), {builtin_gate_matrix(name)}};
}

Gate Gate::umatrix(ComplexMatrix u, std::vector<std::size_t> targets) {
    return Gate{GateKind::Unitary, "umatrix", std::move(targets), {std::move(u)}};
}

Gate Gate::ancilla() {
    return Gate{GateKind::AddAncilla, "ancilla", {}, {}};
}

Gate Gate::trace_out(std::size_t qubit) {
    return Gate{GateKind::TraceOut, "traceout", {qubit}, {}};
}

Gate Gate::depolarize(std::vector<std::size_t> targets) {
    auto kraus = depolarize_kraus(std::size_t{1} << targets.size());
    return Gate{GateKind::Channel, "depolarize", std::move(targets), std::move(kraus)};
}

Gate Gate::dephase(std::size_t qubit) {
    return Gate{GateKind::Channel, "dephase", {qubit}, dephase_kraus()};
}

Gate Gate::cdepolarize(std::size_t control, std::vector<std::size_t> targets) {
    auto kraus = controlled_depolarize_kraus(std::size_t{1} << targets.size());
    targets.insert(targets.begin(), control);
    return Gate{GateKind::Channel, "cdepolarize", std::move(targets), std::move(kraus)};
}

Gate Gate::channel(std::string name, std::vector<ComplexMatrix> kraus, std::vector<std::size_t> targets) {
    return Gate{GateKind::Channel, std::move(name), std::move(targets), std::move(kraus)};
}

const std::vector<std::string> &builtin_gate_names() {
    static const std::vector<std::string> names = {"I", "X", "Y", "Z", "H", "S", "T", "CNOT", "CZ", "SWAP"};
    return names;
}

std::size_t builtin_gate_arity(std::string_view name) {
    auto it = arities().find(name);
    if (it == arities().end()) {
        throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
    }
    return it->second;
}

ComplexMatrix builtin_gate_matrix(std::string_view name) {
    const Complex i(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "I") return ComplexMatrix::Identity(2, 2);
    if (name == "X") return matrix_from({{0, 1}, {1, 0}});
    if (name == "Y") return matrix_from({{0, -i}, {i, 0}});
    if (name == "Z") return matrix_from({{1, 0}, {0, -1}});
    if (name == "H") return matrix_from({{r, r}, {r, -r}});
    if (name == "S") return matrix_from({{1, 0}, {0, i}});
    if (name == "T") return matrix_from({{1, 0}, {0, std::polar(1.0, M_PI / 4)}});
    if (name == "CNOT") return matrix_from({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
    if (name == "CZ") return matrix_from({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}});
    if (name == "SWAP") return matrix_from({{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

std::vector<ComplexMatrix> depolarize_kraus(std::size_t dim) {
    std::vector<ComplexMatrix> out;
    out.reserve(dim * dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
            out.push_back(scale * outer_unit(dim, a, b));
        }
    }
    return out;
}

std::vector<ComplexMatrix> dephase_kraus() {
    return {outer_unit(2, 0, 0), outer_unit(2, 1, 1)};
}

std::vector<ComplexMatrix> controlled_depolarize_kraus(std::size_t target_dim) {
    if (target_dim == 0) {
        throw std::invalid_argument("controlled_depolarize_kraus: target dimension must be positive");
    }
    std::vector<ComplexMatrix> out;
    out.reserve(1 + target_dim * target_dim);
    out.push_back(tensor(outer_unit(2, 0, 0), ComplexMatrix::Identity(target_dim, target_dim)));
    for (const auto &k : depolarize_kraus(target_dim)) {
        out.push_back(tensor(outer_unit(2, 1, 1), k));
    }
    return out;
}

std::vector<ComplexMatrix> depolarizing_noise_kraus(std::size_t dim, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("depolarizing strength must lie in [0, 1]");
    }
    std::vector<ComplexMatrix> out;
    out.push_back(std::sqrt(1.0 - delta) * ComplexMatrix::Identity(dim, dim));
    for (auto &k : depolarize_kraus(dim)) {
        out.push_back(std::sqrt(delta) * k);
    }
    return out;
}

Circuit::Circuit(std::size_t input_qubits, std::vector<Gate> gates)
    : input_qubits_(input_qubits), gates_(std::move(gates)) {}

std::size_t Circuit::output_qubits() const {
    std::size_t w = input_qubits_;
    for (const auto &g : gates_) {
        w = width_after(g, w);
    }
    return w;
}

std::size_t Circuit::peak_qubits() const {
    std::size_t w = input_qubits_;
    std::size_t peak = w;
    for (const auto &g : gates_) {
        w = width_after(g, w);
        peak = std::max(peak, w);
    }
    return peak;
}

bool Circuit::is_isometric_by_construction() const {
    return std::all_of(gates_.begin(), gates_.end(), [](const Gate &g) {
        return g.kind == GateKind::Unitary || g.kind == GateKind::AddAncilla;
    });
}

std::string CircuitParseError::to_string() const {
    return "line " + std::to_string(line) + ": " + message;
}

namespace detail {

std::optional<CircuitParseError> validate_with_lines(const Circuit &c, std::span<const std::size_t> lines) {
    auto line_of = [&](std::size_t k) { return k < lines.size() ? lines[k] : k + 2; };
    if (c.input_qubits() == 0) {
        return CircuitParseError{1, "qubits must be at least 1"};
    }
    std::size_t width = c.input_qubits();
    const auto &gates = c.gates();
    for (std::size_t k = 0; k < gates.size(); ++k) {
        if (auto msg = check_gate(gates[k], width)) {
            return CircuitParseError{line_of(k), *msg};
        }
        width = width_after(gates[k], width);
        if (width == 0 && k + 1 < gates.size()) {
            return CircuitParseError{line_of(k), "qubit count drops to zero before the final gate"};
        }
    }
    return std::nullopt;
}

}  // namespace detail

std::optional<CircuitParseError> validate_circuit(const Circuit &c) {
    return detail::validate_with_lines(c, {});
}

void apply_local_left(const ComplexMatrix &op, std::span<const std::size_t> targets, std::size_t n_qubits,
                      ComplexMatrix &x) {
    const std::size_t k = targets.size();
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (static_cast<std::size_t>(x.rows()) != dim) {
        throw DimensionError("apply_local_left: register dimension mismatch");
    }
    if (static_cast<std::size_t>(op.rows()) != (std::size_t{1} << k) || op.rows() != op.cols()) {
        throw DimensionError("apply_local_left: operator dimension does not match target count");
    }
    const std::size_t sub = std::size_t{1} << k;
    // offset[m]: index bits contributed by local basis state m.
    std::vector<std::size_t> offset(sub, 0);
    for (std::size_t m = 0; m < sub; ++m) {
        for (std::size_t t = 0; t < k; ++t) {
            if ((m >> (k - 1 - t)) & 1u) {
                offset[m] |= std::size_t{1} << (n_qubits - 1 - targets[t]);
            }
        }
    }
    std::vector<std::size_t> bit_positions(k);
    for (std::size_t t = 0; t < k; ++t) {
        bit_positions[t] = n_qubits - 1 - targets[t];
    }
    std::sort(bit_positions.begin(), bit_positions.end());

    std::vector<Eigen::Index> rows(sub);
    const std::size_t bases = dim >> k;
    for (std::size_t r = 0; r < bases; ++r) {
        std::size_t base = r;
        for (std::size_t p : bit_positions) {
            const std::size_t low = base & ((std::size_t{1} << p) - 1);
            base = ((base >> p) << (p + 1)) | low;
        }
        for (std::size_t m = 0; m < sub; ++m) {
            rows[m] = static_cast<Eigen::Index>(base | offset[m]);
        }
        ComplexMatrix block = op * x(rows, Eigen::all);
        x(rows, Eigen::all) = block;
    }
}

ComplexMatrix apply_circuit_embedded(const Circuit &c, const ComplexMatrix &rho, std::size_t leading_qubits,
                                     std::size_t trailing_qubits) {
    std::size_t width = c.input_qubits();
    const std::size_t expected = std::size_t{1} << (leading_qubits + width + trailing_qubits);
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != expected) {
        throw DimensionError("apply_circuit: input dimension " + std::to_string(rho.rows()) + " does not match " +
                             std::to_string(expected));
    }
    ComplexMatrix state = rho;
    std::vector<std::size_t> absolute;
    for (const auto &g : c.gates()) {
        const std::size_t n = leading_qubits + width + trailing_qubits;
        absolute.clear();
        for (std::size_t t : g.targets) {
            absolute.push_back(leading_qubits + t);
        }
        switch (g.kind) {
            case GateKind::Unitary: {
                const auto &u = g.operators.front();
                apply_local_left(u, absolute, n, state);
                state.adjointInPlace();
                apply_local_left(u, absolute, n, state);
                state.adjointInPlace();
                break;
            }
            case GateKind::Channel:
                state = apply_kraus_local(g.operators, absolute, n, state);
                break;
            case GateKind::AddAncilla:
                state = insert_zero_qubit(state, leading_qubits + width, n);
                ++width;
                break;
            case GateKind::TraceOut:
                state = trace_out_qubit(state, absolute.front(), n);
                --width;
                break;
        }
    }
    return state;
}

DensityMatrix apply_circuit(const Circuit &c, const DensityMatrix &rho) {
    if (auto err = validate_circuit(c)) {
        throw CircuitError(*err);
    }
    if (rho.dim() != (std::size_t{1} << c.input_qubits())) {
        throw DimensionError("apply_circuit: state dimension " + std::to_string(rho.dim()) +
                             " does not match 2^" + std::to_string(c.input_qubits()));
    }
    return DensityMatrix(apply_circuit_embedded(c, rho.matrix(), 0, 0));
}

ComplexVector apply_isometric_circuit(const Circuit &c, const ComplexVector &psi) {
    if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << c.input_qubits())) {
        throw DimensionError("apply_isometric_circuit: state dimension mismatch");
    }
    std::size_t width = c.input_qubits();
    ComplexMatrix state = psi;
    for (const auto &g : c.gates()) {
        switch (g.kind) {
            case GateKind::Unitary:
                apply_local_left(g.operators.front(), g.targets, width, state);
                break;
            case GateKind::AddAncilla:
                state = insert_zero_qubit(ComplexVector(state.col(0)), width, width);
                ++width;
                break;
            default:
                throw std::invalid_argument("apply_isometric_circuit: circuit contains a non-unitary gate");
        }
    }
    return state.col(0);
}

}  // namespace isolab
