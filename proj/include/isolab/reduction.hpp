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

#ifndef ISOLAB_REDUCTION_HPP
#define ISOLAB_REDUCTION_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isolab/channel.hpp"
#include "isolab/circuit.hpp"

namespace isolab {

/// A verifier circuit V (unitaries and ancillas only) with labelled registers.
/// `witness` and `ancilla` partition the input qubits; `measured` and
/// `garbage` partition the output qubits. The verifier accepts when the
/// measured qubit reads |1>.
struct VerifierSpec {
    Circuit circuit;
    std::vector<std::size_t> witness;
    std::vector<std::size_t> ancilla;
    std::size_t measured = 0;
    std::vector<std::size_t> garbage;
};

/// Throws std::invalid_argument describing the first violated invariant.
void validate_verifier(const VerifierSpec &v);

/// Circuit text preceded by `witness:`, `ancilla:`, `measure:` and `garbage:`
/// header lines. Throws CircuitError (with the offending line) on bad input.
VerifierSpec parse_verifier(std::string_view source);
std::string serialize_verifier(const VerifierSpec &v);

/// Kraus set of the controlled completely depolarizing channel on 2 x d.
KrausSet controlled_depolarize_kraus_set(std::size_t target_dim);

struct ReductionOutput {
    /// Input: the witness qubits in ascending label order. Output: every
    /// verifier output qubit plus padding; the measured qubit controls a
    /// depolarizing channel on the garbage and padding qubits.
    Circuit channel_circuit;
    std::size_t padding_qubits = 0;
    /// Index of the measured qubit in the channel's output register.
    std::size_t measured_output = 0;
    /// 2d = dimension of the output register, with 2d > 2/epsilon.
    std::size_t output_dim = 0;
};

/// Smallest qubit count q with 2^q > 2/epsilon.
std::size_t required_output_qubits(double epsilon);

ReductionOutput build_instance(const VerifierSpec &v, double epsilon);

struct AcceptanceResult {
    double p = 0.0;
    PureState optimal_witness = PureState::basis(1, 0);
};

/// Top eigenpair of the acceptance operator on the witness register (qubits
/// in ascending label order). Throws DimensionCapError beyond 10 input qubits.
AcceptanceResult max_accept_prob(const VerifierSpec &v);

/// Pr[accept] when the witness register holds `witness`, by simulating V.
double accept_probability(const VerifierSpec &v, const DensityMatrix &witness);

enum class AcceptanceRegime { LowAcceptance, HighAcceptance, Gap };
std::string to_string(AcceptanceRegime r);

struct ReductionCheckReport {
    double epsilon = 0.0;
    double p = 0.0;
    PureState optimal_witness = PureState::basis(1, 0);
    double min_output_opnorm = 1.0;
    std::size_t output_dim = 0;
    std::size_t padding_qubits = 0;
    AcceptanceRegime regime = AcceptanceRegime::Gap;
    /// Empty in the gap, where neither implication applies.
    std::optional<bool> implication_holds;
    Classification classification = Classification::Indeterminate;
};

/// Builds the instance, searches its minimum output opnorm and checks the
/// implication that applies (slack 1e-3). 1 - p is a certified lower bound on
/// the instance's minimum and is used for classification.
ReductionCheckReport reduction_check(const VerifierSpec &v, double epsilon, const SearchOptions &options);

}  // namespace isolab

#endif
