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

#include "isolab/circuit.hpp"
#include "isolab/random.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {

CircuitParseError parse_error(const std::string &text) {
    try {
        parse_circuit(text);
    } catch (const CircuitError &e) {
        return e.error();
    }
    ADD_FAILURE() << "expected a parse error for:\n" << text;
    return {};
}

}  // namespace

TEST(parse, smallest_circuit) {
    Circuit c = parse_circuit("qubits 1\ngate H 0\n");
    EXPECT_EQ(c.input_qubits(), 1u);
    EXPECT_EQ(c.output_qubits(), 1u);
    ASSERT_EQ(c.gates().size(), 1u);
    EXPECT_EQ(c.gates()[0].name, "H");
}

TEST(parse, ancilla_bookkeeping) {
    Circuit c = parse_circuit("qubits 1\nancilla\ngate CNOT 0 1\n");
    EXPECT_EQ(c.output_qubits(), 2u);
    EXPECT_EQ(c.peak_qubits(), 2u);
    EXPECT_TRUE(c.is_isometric_by_construction());
}

TEST(parse, comments_blank_lines_and_all_forms) {
    Circuit c = parse_circuit(
        "# header comment\n"
        "qubits 2\n"
        "\n"
        "gate CZ 0 1   # trailing\n"
        "umatrix 1 : 0 1 1 0\n"
        "umatrix 0 : 0.70710678118654757 0.70710678118654757i 0.70710678118654757i 0.70710678118654757\n"
        "ancilla\n"
        "channel depolarize 2\n"
        "channel dephase 0\n"
        "channel cdepolarize 0 : 1 2\n"
        "traceout 1\n");
    EXPECT_EQ(c.gates().size(), 8u);
    EXPECT_EQ(c.output_qubits(), 2u);
    EXPECT_FALSE(c.is_isometric_by_construction());
}

TEST(parse, errors_carry_line_numbers) {
    CircuitParseError e = parse_error("qubits 1\ngate CNOT 0 5\n");
    EXPECT_EQ(e.line, 2u);
    EXPECT_NE(e.message.find("target out of range"), std::string::npos);

    e = parse_error("qubits 2\ngate H 0\ngate FOO 1\n");
    EXPECT_EQ(e.line, 3u);
    EXPECT_NE(e.message.find("unknown gate"), std::string::npos);

    e = parse_error("");
    EXPECT_EQ(e.line, 1u);
    EXPECT_EQ(e.message, "missing qubits header");

    e = parse_error("# only a comment\n\ngate H 0\n");
    EXPECT_NE(e.message.find("missing qubits header"), std::string::npos);

    e = parse_error("qubits 1\numatrix 0 : 1 1 0 1\n");
    EXPECT_EQ(e.line, 2u);
    EXPECT_EQ(e.message, "non-unitary gate");

    e = parse_error("qubits 2\ngate CNOT 0 0\n");
    EXPECT_EQ(e.line, 2u);

    e = parse_error("qubits 1\numatrix 0 : 1 0 0\n");
    EXPECT_EQ(e.line, 2u);

    e = parse_error("qubits 1\nchannel wobble 0\n");
    EXPECT_NE(e.message.find("unknown channel"), std::string::npos);

    e = parse_error("qubits 2\ntraceout 0\ntraceout 0\ngate H 0\n");
    EXPECT_EQ(e.line, 3u);
}

TEST(complex_literals, forms) {
    EXPECT_EQ(parse_complex("1.5"), Complex(1.5, 0));
    EXPECT_EQ(parse_complex("-2i"), Complex(0, -2));
    EXPECT_EQ(parse_complex("1e-3+2.5e2i"), Complex(1e-3, 250));
    EXPECT_EQ(parse_complex("0.5-0.25i"), Complex(0.5, -0.25));
    EXPECT_EQ(parse_complex("i"), Complex(0, 1));
    EXPECT_THROW(parse_complex("abc"), std::invalid_argument);
    EXPECT_EQ(parse_complex(format_complex(Complex(0.1, -1.0 / 3.0))), Complex(0.1, -1.0 / 3.0));
}

TEST(validate, non_unitary_and_non_trace_preserving) {
    ComplexMatrix m(2, 2);
    m << 1, 1, 0, 1;
    Circuit bad(1, {Gate::umatrix(m, {0})});
    auto err = validate_circuit(bad);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->message, "non-unitary gate");
    EXPECT_EQ(err->line, 2u);

    auto kraus = dephase_kraus();
    kraus[0](0, 0) += 1e-3;
    Circuit leaky(1, {Gate::builtin("H", {0}), Gate::channel("leaky", kraus, {0})});
    err = validate_circuit(leaky);
    ASSERT_TRUE(err);
    EXPECT_EQ(err->message, "not trace preserving");
    EXPECT_EQ(err->line, 3u);

    EXPECT_FALSE(validate_circuit(Circuit(1, {Gate::channel("ok", dephase_kraus(), {0})})));
}

TEST(apply, identity_and_full_trace) {
    Rng rng = stream_rng(20, 0);
    const DensityMatrix rho = random_density_matrix(4, rng);
    Circuit id(2, {});
    EXPECT_LT((apply_circuit(id, rho).matrix() - rho.matrix()).norm(), 1e-15);
    Circuit trace(1, {Gate::trace_out(0)});
    const DensityMatrix out = apply_circuit(trace, random_density_matrix(2, rng));
    ASSERT_EQ(out.dim(), 1u);
    EXPECT_NEAR(out.matrix()(0, 0).real(), 1.0, 1e-12);
}

TEST(apply, copying_decoheres_plus_state) {
    Circuit c = parse_circuit("qubits 1\nancilla\ngate CNOT 0 1\ntraceout 1\n");
    ComplexVector plus(2);
    plus << 1, 1;
    const DensityMatrix out = apply_circuit(c, PureState::normalized(plus).density());
    // Hand multiplication: CNOT (|+><+| (x) |0><0|) CNOT = |phi+><phi+|, whose
    // marginal is I/2.
    EXPECT_LT((out.matrix() - ComplexMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(apply, matches_naive_simulator_on_random_circuits) {
    std::mt19937_64 gen(21);
    Rng rng = stream_rng(21, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const Circuit c = oracle::random_circuit(gen, 3, 4, false);
        const DensityMatrix rho = random_density_matrix(std::size_t{1} << c.input_qubits(), rng);
        const DensityMatrix out = apply_circuit(c, rho);
        const ComplexMatrix ref = oracle::simulate(c, rho.matrix());
        EXPECT_LT((out.matrix() - ref).cwiseAbs().maxCoeff(), 1e-12) << serialize_circuit(c);
        EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-9);
    }
}

TEST(apply, linear_in_the_input) {
    std::mt19937_64 gen(22);
    Rng rng = stream_rng(22, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const Circuit c = oracle::random_circuit(gen, 2, 4, false);
        const std::size_t d = std::size_t{1} << c.input_qubits();
        const DensityMatrix a = random_density_matrix(d, rng), b = random_density_matrix(d, rng);
        const double alpha = 0.3;
        const DensityMatrix mix(alpha * a.matrix() + (1 - alpha) * b.matrix());
        const ComplexMatrix lhs = apply_circuit(c, mix).matrix();
        const ComplexMatrix rhs = alpha * apply_circuit(c, a).matrix() + (1 - alpha) * apply_circuit(c, b).matrix();
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(apply, isometric_circuits_keep_pure_states_pure) {
    std::mt19937_64 gen(23);
    Rng rng = stream_rng(23, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const Circuit c = oracle::random_circuit(gen, 3, 5, true);
        const PureState psi = haar_pure_state(std::size_t{1} << c.input_qubits(), rng);
        const DensityMatrix out = apply_circuit(c, psi.density());
        EXPECT_NEAR(out.matrix().squaredNorm(), 1.0, 1e-9);
    }
}

TEST(apply, rejects_wrong_input_dimension) {
    Circuit c(2, {Gate::builtin("H", {0})});
    EXPECT_THROW(apply_circuit(c, DensityMatrix::maximally_mixed(2)), DimensionError);
}

TEST(serialize, empty_circuit) {
    EXPECT_EQ(serialize_circuit(Circuit(3, {})), "qubits 3\n");
}

TEST(serialize, explicit_matrix_round_trips_exactly) {
    Rng rng = stream_rng(24, 0);
    const ComplexMatrix u = haar_unitary(4, rng);
    Circuit c(2, {Gate::umatrix(u, {1, 0})});
    const Circuit back = parse_circuit(serialize_circuit(c));
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.gates()[0].operators[0], u);
}

TEST(serialize, random_corpus_round_trips) {
    std::mt19937_64 gen(25);
    for (int trial = 0; trial < 150; ++trial) {
        const Circuit c = oracle::random_circuit(gen, 3, 5, trial % 2 == 0);
        const std::string text = serialize_circuit(c);
        EXPECT_EQ(parse_circuit(text), c) << text;
        EXPECT_EQ(serialize_circuit(parse_circuit(text)), text);
    }
}

TEST(serialize, custom_channels_are_rejected) {
    Circuit c(1, {Gate::channel("mine", dephase_kraus(), {0})});
    EXPECT_THROW(serialize_circuit(c), std::invalid_argument);
}

TEST(kraus_sets, builtin_channels_are_complete) {
    for (const auto &set : {depolarize_kraus(2), depolarize_kraus(4), dephase_kraus(), controlled_depolarize_kraus(2),
                            controlled_depolarize_kraus(4), depolarizing_noise_kraus(4, 0.01)}) {
        const Eigen::Index d = set[0].cols();
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        for (const auto &k : set) sum += k.adjoint() * k;
        EXPECT_LT((sum - ComplexMatrix::Identity(d, d)).norm(), 1e-12);
    }
}
