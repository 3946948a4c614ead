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

#ifndef ISOLAB_CIRCUIT_HPP
#define ISOLAB_CIRCUIT_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isolab/linalg.hpp"

namespace isolab {

/// Mixed-state circuits over qubits.
///
/// Qubit q of an n-qubit register is tensor factor q, so it is bit (n - 1 - q)
/// of a basis index. `ancilla` appends a |0> qubit at index n; `traceout q`
/// discards qubit q and shifts every higher index down by one.

enum class GateKind { Unitary, AddAncilla, TraceOut, Channel };

struct Gate {
    GateKind kind = GateKind::Unitary;
    /// Builtin gate name, "umatrix", or channel name (depolarize, dephase,
    /// cdepolarize, or a caller-chosen name for custom Kraus sets).
    std::string name;
    /// Qubits acted on. For cdepolarize the control comes first.
    std::vector<std::size_t> targets;
    /// Unitary: a single matrix. Channel: the Kraus operators.
    std::vector<ComplexMatrix> operators;

    static Gate builtin(std::string_view name, std::vector<std::size_t> targets);
    static Gate umatrix(ComplexMatrix u, std::vector<std::size_t> targets);
    static Gate ancilla();
    static Gate trace_out(std::size_t qubit);
    static Gate depolarize(std::vector<std::size_t> targets);
    static Gate dephase(std::size_t qubit);
    static Gate cdepolarize(std::size_t control, std::vector<std::size_t> targets);
    /// Channel gate with explicit Kraus operators. Not expressible in the text
    /// format unless `name` is one of the named channels.
    static Gate channel(std::string name, std::vector<ComplexMatrix> kraus, std::vector<std::size_t> targets);

    bool operator==(const Gate &) const = default;
};

/// Names accepted by `gate <NAME>`.
const std::vector<std::string> &builtin_gate_names();
/// Matrix of a builtin gate; throws std::invalid_argument for unknown names.
ComplexMatrix builtin_gate_matrix(std::string_view name);
std::size_t builtin_gate_arity(std::string_view name);

/// Kraus set {|i><j| / sqrt(d)} of the completely depolarizing channel on d dims.
std::vector<ComplexMatrix> depolarize_kraus(std::size_t dim);
/// {|0><0|, |1><1|}.
std::vector<ComplexMatrix> dephase_kraus();
/// {|0><0| (x) I_d} u {|1><1| (x) |i><j| / sqrt(d)}: depolarize the target
/// block only when the control qubit is |1>.
std::vector<ComplexMatrix> controlled_depolarize_kraus(std::size_t target_dim);
/// (1 - delta) rho + delta I/d, as Kraus operators.
std::vector<ComplexMatrix> depolarizing_noise_kraus(std::size_t dim, double delta);

class Circuit {
   public:
    Circuit() = default;
    Circuit(std::size_t input_qubits, std::vector<Gate> gates);

    std::size_t input_qubits() const { return input_qubits_; }
    std::size_t output_qubits() const;
    /// Largest register width reached while running the gate list.
    std::size_t peak_qubits() const;
    const std::vector<Gate> &gates() const { return gates_; }

    /// True when every gate is a unitary or an ancilla introduction.
    bool is_isometric_by_construction() const;

    bool operator==(const Circuit &) const = default;

   private:
    std::size_t input_qubits_ = 0;
    std::vector<Gate> gates_;
};

/// A located problem in circuit source or structure. `line` is 1-based.
struct CircuitParseError {
    std::size_t line = 0;
    std::string message;

    std::string to_string() const;
};

/// Exception carrying a CircuitParseError.
class CircuitError : public std::invalid_argument {
   public:
    explicit CircuitError(CircuitParseError error)
        : std::invalid_argument(error.to_string()), error_(std::move(error)) {}
    const CircuitParseError &error() const { return error_; }

   private:
    CircuitParseError error_;
};

/// Parses and validates circuit text. Throws CircuitError.
Circuit parse_circuit(std::string_view source);

/// Checks every gate invariant. For constructed circuits the reported line is
/// the line the offending gate occupies in serialize_circuit's output
/// (gate k is on line k + 2).
std::optional<CircuitParseError> validate_circuit(const Circuit &c);

/// Text form accepted by parse_circuit. Matrix entries are written with 17
/// significant digits so they round-trip exactly. Throws std::invalid_argument
/// for channel gates with custom Kraus sets.
std::string serialize_circuit(const Circuit &c);

/// Parses a complex literal of the form a+bi, a-bi, a, or bi.
Complex parse_complex(std::string_view text);
std::string format_complex(Complex z);
/// %.17g formatting.
std::string format_double(double x);

/// Runs the circuit on a density matrix whose register is
/// [leading | circuit qubits | trailing]. The circuit acts only on its own
/// qubits; ancillas are inserted just before the trailing block. No
/// validation of the result is performed.
ComplexMatrix apply_circuit_embedded(const Circuit &c, const ComplexMatrix &rho, std::size_t leading_qubits,
                                     std::size_t trailing_qubits);

/// rho -> output of the circuit, validated as a density matrix.
DensityMatrix apply_circuit(const Circuit &c, const DensityMatrix &rho);

/// Runs a circuit made only of unitaries and ancillas on a state vector.
ComplexVector apply_isometric_circuit(const Circuit &c, const ComplexVector &psi);

/// op acting on `targets` of an n-qubit register, applied from the left to
/// the rows of x.
void apply_local_left(const ComplexMatrix &op, std::span<const std::size_t> targets, std::size_t n_qubits,
                      ComplexMatrix &x);

}  // namespace isolab

#endif
