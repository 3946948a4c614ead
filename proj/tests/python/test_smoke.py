# Copyright 2026 The isolab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import isolab

RESET = "qubits 1\nancilla\ngate SWAP 0 1\ntraceout 1\n"
OMEGA = "qubits 1\nchannel depolarize 0\n"


def test_parse_and_serialize_round_trip():
    c = isolab.Circuit.parse(RESET)
    assert (c.input_qubits, c.output_qubits, c.peak_qubits) == (1, 1, 2)
    assert isolab.Circuit.parse(c.serialize()) == c
    assert not c.isometric_by_construction


def test_bad_circuit_raises():
    with pytest.raises(ValueError):
        isolab.Circuit.parse("qubits 1\ngate FOO 0\n")


def test_hadamard_is_exact_isometry():
    ch = isolab.Channel("qubits 1\ngate H 0\n")
    r = isolab.exact_isometry_test(ch)
    assert r["exact_isometry"] and r["choi_rank"] == 1
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    u = r["isometry_operator"]
    # Equal up to a global phase.
    assert abs(abs(np.vdot(u.ravel(), h.ravel())) - 2) < 1e-9


def test_reset_channel_minimum():
    ch = isolab.Channel(RESET)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    out = ch.apply_extended(phi)
    assert np.allclose(out, np.diag([0.5, 0.5, 0, 0]), atol=1e-12)
    value, psi = isolab.min_output_opnorm(ch, restarts=8, seed=3)
    assert abs(value - 0.5) < 1e-3
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert ch.choi_rank() == 2
    kraus = ch.kraus()
    assert np.allclose(sum(k.conj().T @ k for k in kraus), np.eye(2), atol=1e-10)


def test_honest_protocol_on_depolarizing_qubit():
    ch = isolab.Channel(OMEGA)
    value, psi = isolab.min_output_opnorm(ch, restarts=4, seed=0)
    assert abs(value - 0.25) < 1e-6
    exact = isolab.run_protocol(ch, psi)
    assert abs(exact["p_accept"] - 0.375) < 1e-9
    sampled = isolab.run_protocol(ch, psi, shots=20000, seed=5)
    assert abs(sampled["accepts"] / 20000 - 0.375) < 0.02


def test_purity_metrics_and_swap_test():
    rho = np.diag([0.75, 0.25]).astype(complex)
    m = isolab.purity_metrics(rho)
    assert abs(m["purity"] - 0.625) < 1e-12
    assert abs(m["opnorm"] - 0.75) < 1e-12
    _, p_anti = isolab.swap_test(np.kron(rho, rho))
    assert abs(p_anti - (1 - 0.625) / 2) < 1e-12


def test_reduction_yes_instance():
    v = isolab.Verifier.parse("witness: 0\nancilla:\nmeasure: 0\ngarbage:\nqubits 1\ngate I 0\n")
    p, _ = v.max_accept_prob()
    assert abs(p - 1) < 1e-10
    inst = isolab.build_instance(v, 0.3)
    assert inst["output_dim"] >= 8
    r = isolab.reduction_check(v, 0.3, restarts=4, seed=1)
    assert r["min_output_opnorm"] <= 0.25 + 1e-3
    assert r["implication_holds"] is True


def test_dimension_cap():
    wide = "qubits 7\n" + "ancilla\n" * 6
    with pytest.raises(isolab.DimensionCapError):
        isolab.analyze(isolab.Channel(wide))
