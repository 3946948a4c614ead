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

#include <gtest/gtest.h>

#include <random>

#include "isolab/reduction.hpp"
#include "isolab/random.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {

VerifierSpec accept_if_one() {
    return parse_verifier("witness: 0\nancilla:\nmeasure: 0\ngarbage:\nqubits 1\ngate I 0\n");
}

VerifierSpec always_reject() {
    return parse_verifier("witness: 0\nancilla: 1\nmeasure: 1\ngarbage: 0\nqubits 2\ngate I 0\n");
}

VerifierSpec hadamard_measure() {
    return parse_verifier("witness: 0\nancilla:\nmeasure: 0\ngarbage:\nqubits 1\ngate H 0\n");
}

VerifierSpec coin_flip() {
    return parse_verifier("witness: 0\nancilla: 1\nmeasure: 1\ngarbage: 0\nqubits 2\ngate H 1\n");
}

// Witness on qubits {0, 1} (labels deliberately not first), one ancilla, a
// random unitary across all three.
VerifierSpec random_verifier(std::uint64_t seed) {
    Rng rng = stream_rng(seed, 0);
    Circuit body(3, {Gate::umatrix(haar_unitary(8, rng), {0, 1, 2})});
    return VerifierSpec{body, {0, 2}, {1}, 1, {0, 2}};
}

// Pr[M = 1] from the naive simulator with the witness placed on its labels.
double simulated_accept(const VerifierSpec &v, const ComplexVector &witness) {
    const std::size_t n = v.circuit.input_qubits();
    std::vector<std::size_t> w = v.witness;
    std::sort(w.begin(), w.end());
    ComplexVector input = ComplexVector::Zero(std::size_t{1} << n);
    for (std::size_t x = 0; x < (std::size_t{1} << w.size()); ++x) {
        std::size_t index = 0;
        for (std::size_t k = 0; k < w.size(); ++k)
            if ((x >> (w.size() - 1 - k)) & 1u) index |= std::size_t{1} << (n - 1 - w[k]);
        input[index] = witness[x];
    }
    const ComplexMatrix out = oracle::simulate(v.circuit, input * input.adjoint());
    const std::size_t n_out = v.circuit.output_qubits();
    double p = 0;
    for (std::size_t r = 0; r < (std::size_t{1} << n_out); ++r)
        if ((r >> (n_out - 1 - v.measured)) & 1u) p += out(r, r).real();
    return p;
}

}  // namespace

TEST(controlled_depolarize, kraus_structure) {
    const KrausSet k2 = controlled_depolarize_kraus_set(2);
    EXPECT_EQ(k2.operators.size(), 5u);
    EXPECT_LT(k2.completeness_error(), 1e-12);

    Rng rng = stream_rng(50, 0);
    for (std::size_t d : {2u, 4u}) {
        const KrausSet k = controlled_depolarize_kraus_set(d);
        const DensityMatrix target = random_density_matrix(d, rng);
        const ComplexMatrix off = k.apply(tensor(DensityMatrix::basis(2, 0), target).matrix());
        EXPECT_LT((off - tensor(DensityMatrix::basis(2, 0), target).matrix()).norm(), 1e-12);
        const ComplexMatrix on = k.apply(tensor(DensityMatrix::basis(2, 1), target).matrix());
        EXPECT_LT((on - tensor(DensityMatrix::basis(2, 1), DensityMatrix::maximally_mixed(d)).matrix()).norm(), 1e-12);
    }
}

TEST(controlled_depolarize, superposed_control_gives_block_form) {
    Rng rng = stream_rng(51, 0);
    const std::size_t d = 4;
    const double p = 0.3;
    const ComplexVector phi0 = haar_pure_state(d, rng).amplitudes(), phi1 = haar_pure_state(d, rng).amplitudes();
    ComplexVector in(2 * d);
    in << std::sqrt(1 - p) * phi0, std::sqrt(p) * phi1;
    const ComplexMatrix out = controlled_depolarize_kraus_set(d).apply(in * in.adjoint());
    ComplexMatrix expected = ComplexMatrix::Zero(2 * d, 2 * d);
    expected.topLeftCorner(d, d) = (1 - p) * phi0 * phi0.adjoint();
    expected.bottomRightCorner(d, d) = p * ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    EXPECT_LT((out - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(padding, output_dimension_exceeds_two_over_epsilon) {
    EXPECT_EQ(required_output_qubits(0.3), 3u);
    EXPECT_EQ(required_output_qubits(0.25), 4u);
    EXPECT_EQ(required_output_qubits(0.1), 5u);
    EXPECT_EQ(required_output_qubits(0.49), 3u);
    for (double eps : {0.01, 0.05, 0.125, 0.2, 0.3, 0.4}) {
        const std::size_t q = required_output_qubits(eps);
        EXPECT_GT(std::ldexp(1.0, static_cast<int>(q)), 2.0 / eps);
        EXPECT_LE(std::ldexp(1.0, static_cast<int>(q) - 1), 2.0 / eps);
    }
    EXPECT_THROW(required_output_qubits(0.0), std::invalid_argument);
    EXPECT_THROW(required_output_qubits(0.5), std::invalid_argument);
}

TEST(verifier_format, parse_and_round_trip) {
    const VerifierSpec v = always_reject();
    EXPECT_EQ(v.witness, std::vector<std::size_t>{0});
    EXPECT_EQ(v.ancilla, std::vector<std::size_t>{1});
    EXPECT_EQ(v.measured, 1u);
    const VerifierSpec back = parse_verifier(serialize_verifier(v));
    EXPECT_EQ(back.circuit, v.circuit);
    EXPECT_EQ(back.garbage, v.garbage);
}

TEST(verifier_format, malformed_headers) {
    auto line_of = [](const std::string &text) -> std::size_t {
        try {
            parse_verifier(text);
        } catch (const CircuitError &e) {
            return e.error().line;
        }
        return 0;
    };
    // Missing measure header.
    EXPECT_GT(line_of("witness: 0\nancilla:\ngarbage:\nqubits 1\ngate I 0\n"), 0u);
    // Garbage index that is not an output.
    EXPECT_GT(line_of("witness: 0\nancilla:\nmeasure: 0\ngarbage: 3\nqubits 1\ngate I 0\n"), 0u);
    // Witness and ancilla overlap.
    EXPECT_GT(line_of("witness: 0\nancilla: 0\nmeasure: 0\ngarbage:\nqubits 1\ngate I 0\n"), 0u);
    // Non-integer index, reported on its own line.
    EXPECT_EQ(line_of("witness: x\nancilla:\nmeasure: 0\ngarbage:\nqubits 1\ngate I 0\n"), 1u);
    // Circuit errors keep their source line numbers.
    EXPECT_EQ(line_of("witness: 0\nancilla:\nmeasure: 0\ngarbage:\nqubits 1\ngate Q 0\n"), 6u);
    // Channel gates are not allowed in a verifier body.
    EXPECT_GT(line_of("witness: 0\nancilla:\nmeasure: 0\ngarbage:\nqubits 1\nchannel dephase 0\n"), 0u);
}

TEST(build_instance, accept_if_one_structure) {
    const ReductionOutput r = build_instance(accept_if_one(), 0.3);
    EXPECT_EQ(r.channel_circuit.input_qubits(), 1u);
    EXPECT_EQ(r.channel_circuit.output_qubits(), 3u);
    EXPECT_EQ(r.padding_qubits, 2u);
    EXPECT_EQ(r.output_dim, 8u);
    EXPECT_GT(static_cast<double>(r.output_dim), 2.0 / 0.3);
    EXPECT_FALSE(validate_circuit(r.channel_circuit));
    // Witness |1>: the measured qubit reads 1 and the rest is maximally mixed.
    const DensityMatrix out = apply_circuit(r.channel_circuit, DensityMatrix::basis(2, 1));
    const ComplexMatrix expected = tensor(DensityMatrix::basis(2, 1), DensityMatrix::maximally_mixed(4)).matrix();
    EXPECT_LT((out.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(oracle::top_eigenvalue(out.matrix()), 0.25, 1e-12);
    EXPECT_THROW(build_instance(accept_if_one(), 0.6), std::invalid_argument);
}

TEST(build_instance, round_trips_through_text) {
    for (const auto &v : {accept_if_one(), always_reject(), coin_flip(), random_verifier(52)}) {
        const Circuit c = build_instance(v, 0.2).channel_circuit;
        EXPECT_EQ(parse_circuit(serialize_circuit(c)), c);
    }
}

TEST(build_instance, dephasing_is_redundant) {
    for (const auto &v : {coin_flip(), random_verifier(53)}) {
        const Circuit c = build_instance(v, 0.3).channel_circuit;
        std::vector<Gate> gates = c.gates();
        const auto it = std::find_if(gates.begin(), gates.end(), [](const Gate &g) { return g.name == "dephase"; });
        ASSERT_NE(it, gates.end());
        gates.erase(it);
        const Circuit without(c.input_qubits(), gates);
        EXPECT_LT((oracle::choi(c) - oracle::choi(without)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(build_instance, outputs_are_block_diagonal_in_the_measured_qubit) {
    Rng rng = stream_rng(54, 0);
    for (std::uint64_t seed : {55u, 56u, 57u}) {
        const VerifierSpec v = random_verifier(seed);
        const ReductionOutput r = build_instance(v, 0.3);
        const ChannelHandle ch(r.channel_circuit);
        const std::size_t n = r.channel_circuit.output_qubits() + r.channel_circuit.input_qubits();
        ComplexMatrix one = ComplexMatrix::Zero(2, 2);
        one(1, 1) = 1.0;
        const ComplexMatrix proj = oracle::embed(one, {r.measured_output}, n);
        for (int trial = 0; trial < 5; ++trial) {
            const PureState psi = haar_pure_state(ch.dim_in() * ch.dim_in(), rng);
            const ComplexMatrix out = apply_extended(ch, psi).matrix();
            EXPECT_LT((proj * out - out * proj).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(build_instance, output_opnorm_formula) {
    // For input psi on W (x) R, V|psi>|0> = sqrt(1-p)|0>_M|phi0> + sqrt(p)|1>_M|phi1>
    // and the output opnorm is max{1 - p, (p/d) opnorm(rho_res)}, where rho_res
    // is the R marginal of |phi1> and 2d is the output dimension.
    Rng rng = stream_rng(58, 0);
    const VerifierSpec v = random_verifier(59);
    const ReductionOutput r = build_instance(v, 0.3);
    const ChannelHandle ch(r.channel_circuit);
    const double d = r.output_dim / 2.0;
    // The channel is V with ancillas relabelled; run V on witness (x) R with the
    // naive simulator, witness labels {0, 2}, ancilla label 1.
    for (int trial = 0; trial < 10; ++trial) {
        const PureState psi = haar_pure_state(16, rng);
        ComplexVector input = ComplexVector::Zero(64);  // qubits 0,1,2 then R (2 qubits)
        for (std::size_t w = 0; w < 4; ++w)
            for (std::size_t ref = 0; ref < 4; ++ref) {
                const std::size_t q0 = w >> 1, q2 = w & 1u;
                input[((q0 << 2) | q2) << 2 | ref] = psi.amplitudes()[w * 4 + ref];
            }
        const ComplexMatrix out = oracle::simulate(v.circuit, input * input.adjoint(), 2);
        // Split on the measured qubit (label 1 of 5 qubits).
        ComplexMatrix one = ComplexMatrix::Zero(2, 2);
        one(1, 1) = 1.0;
        const ComplexMatrix accept = oracle::embed(one, {1}, 5) * out * oracle::embed(one, {1}, 5);
        const double p = accept.trace().real();
        ComplexMatrix rho_res = oracle::partial_trace(accept, {2, 2, 2, 2, 2}, {3, 4});
        if (p > 1e-12) rho_res /= p;
        const double predicted = std::max(1 - p, p / d * oracle::top_eigenvalue(rho_res));
        EXPECT_NEAR(operator_norm(apply_extended(ch, psi).matrix()), predicted, 1e-9);
    }
}

TEST(max_accept, examples) {
    AcceptanceResult a = max_accept_prob(accept_if_one());
    EXPECT_NEAR(a.p, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(a.optimal_witness.amplitudes()[1]), 1.0, 1e-12);

    a = max_accept_prob(hadamard_measure());
    EXPECT_NEAR(a.p, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(a.optimal_witness.amplitudes()[0]), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(std::abs(a.optimal_witness.amplitudes()[1]), std::sqrt(0.5), 1e-12);

    a = max_accept_prob(coin_flip());
    EXPECT_NEAR(a.p, 0.5, 1e-12);
    Rng rng = stream_rng(60, 0);
    for (int trial = 0; trial < 5; ++trial)
        EXPECT_NEAR(accept_probability(coin_flip(), haar_pure_state(2, rng).density()), 0.5, 1e-12);

    EXPECT_NEAR(max_accept_prob(always_reject()).p, 0.0, 1e-12);
}

TEST(max_accept, agrees_with_direct_simulation) {
    Rng rng = stream_rng(61, 0);
    for (std::uint64_t seed = 62; seed < 70; ++seed) {
        const VerifierSpec v = random_verifier(seed);
        const AcceptanceResult a = max_accept_prob(v);
        EXPECT_GE(a.p, -1e-10);
        EXPECT_LE(a.p, 1 + 1e-10);
        EXPECT_NEAR(simulated_accept(v, a.optimal_witness.amplitudes()), a.p, 1e-9);
        EXPECT_NEAR(accept_probability(v, a.optimal_witness.density()), a.p, 1e-9);
        for (int k = 0; k < 10; ++k) {
            const PureState w = haar_pure_state(4, rng);
            EXPECT_LE(simulated_accept(v, w.amplitudes()), a.p + 1e-10);
        }
    }
}

TEST(reduction_check, yes_direction) {
    SearchOptions o;
    o.restarts = 16;
    const ReductionCheckReport r = reduction_check(accept_if_one(), 0.3, o);
    EXPECT_NEAR(r.p, 1.0, 1e-10);
    EXPECT_EQ(r.regime, AcceptanceRegime::HighAcceptance);
    EXPECT_GE(r.output_dim / 2, 4u);
    EXPECT_LE(r.min_output_opnorm, 0.25 + 1e-3);
    ASSERT_TRUE(r.implication_holds);
    EXPECT_TRUE(*r.implication_holds);
    EXPECT_EQ(r.classification, Classification::YesInstance);
}

TEST(reduction_check, no_direction) {
    SearchOptions o;
    o.restarts = 64;
    const ReductionCheckReport r = reduction_check(always_reject(), 0.3, o);
    EXPECT_NEAR(r.p, 0.0, 1e-12);
    EXPECT_NEAR(r.min_output_opnorm, 1.0, 1e-6);
    EXPECT_EQ(r.regime, AcceptanceRegime::LowAcceptance);
    EXPECT_TRUE(r.implication_holds.value_or(false));
    EXPECT_EQ(r.classification, Classification::NoInstance);
}

TEST(reduction_check, gap_reports_no_implication) {
    SearchOptions o;
    o.restarts = 8;
    const ReductionCheckReport r = reduction_check(coin_flip(), 0.3, o);
    EXPECT_NEAR(r.p, 0.5, 1e-12);
    EXPECT_EQ(r.regime, AcceptanceRegime::Gap);
    EXPECT_FALSE(r.implication_holds);
    EXPECT_GE(r.min_output_opnorm, 0.5 - 1e-9);
    EXPECT_EQ(r.classification, Classification::Indeterminate);
}

TEST(validate_verifier, rejects_bad_partitions) {
    VerifierSpec v = coin_flip();
    v.garbage = {};
    EXPECT_THROW(validate_verifier(v), std::invalid_argument);
    v = coin_flip();
    v.ancilla = {};
    EXPECT_THROW(validate_verifier(v), std::invalid_argument);
    v = coin_flip();
    v.circuit = Circuit(2, {Gate::trace_out(0)});
    EXPECT_THROW(validate_verifier(v), std::invalid_argument);
}
