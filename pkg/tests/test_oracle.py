import random

import numpy as np
import pytest

from icmverify import (
    GateList,
    IcmCircuit,
    MeasurementRule,
    OracleError,
    QubitDecl,
    SizeCapError,
    channel_choi,
    channels_equal,
    choi_of_unitary,
    derive_truth_table,
    fit_frames,
    oracle_truth_table,
    parse_circuit,
    run_branch,
    sample_verify,
    table_equal,
    validate_icm,
)
from icmverify.oracle import MAX_ORACLE_QUBITS

from conftest import load_fixture, random_circuit

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)


# --- channels ----------------------------------------------------------------


def test_cnot_channel_is_the_cnot_unitary(cnot_circuit):
    u = np.zeros((4, 4))
    u[[0, 1, 3, 2], [0, 1, 2, 3]] = 1
    assert channels_equal(channel_choi(cnot_circuit), choi_of_unitary(u))


def test_choi_trace_convention(cnot_circuit):
    choi = channel_choi(cnot_circuit)
    assert abs(np.trace(choi) - 4.0) < 1e-12


def test_teleport_needs_frames():
    c = load_fixture("teleport.icm")
    raw = channel_choi(c)
    ident = choi_of_unitary(np.eye(2))
    assert not channels_equal(raw, ident)
    frames = {
        frozenset({("q1", 0)}): "I",
        frozenset({("q1", 1)}): "X",
    }
    assert channels_equal(channel_choi(c, frames=frames), ident)


def test_static_frame_string():
    c = load_fixture("cnot.icm")
    flipped = channel_choi(c, frames="XI")
    u = np.zeros((4, 4))
    u[[0, 1, 3, 2], [0, 1, 2, 3]] = 1
    x0 = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert channels_equal(flipped, choi_of_unitary(x0 @ u))


def test_size_cap():
    n = MAX_ORACLE_QUBITS + 1
    c = IcmCircuit(tuple(QubitDecl(f"q{i}", "io") for i in range(n)), (), ())
    with pytest.raises(SizeCapError):
        oracle_truth_table(c)


def test_channel_size_cap_counts_input_ports():
    # n + k <= cap: 7 io qubits means 14 simulated qubits total
    n = MAX_ORACLE_QUBITS // 2 + 1
    c = IcmCircuit(tuple(QubitDecl(f"q{i}", "io") for i in range(n)), (), ())
    with pytest.raises(SizeCapError):
        channel_choi(c)


# --- run_branch --------------------------------------------------------------


def test_run_branch_teleport_branches():
    c = load_fixture("teleport.icm")
    vec0, alive0 = run_branch(c, {"q1": KET0}, {"q1": 0})
    assert alive0 == ["q2"]
    # +1 branch carries |0> through unchanged, weight 1/2
    assert np.allclose(vec0, KET0 / np.sqrt(2))
    vec1, _ = run_branch(c, {"q1": KET0}, {"q1": 1})
    assert np.allclose(vec1, KET1 / np.sqrt(2))


def test_run_branch_conditional_bases(t_circuit):
    vec, alive = run_branch(
        t_circuit, {"q1": KET0}, {"q2": 0, "q3": 0}
    )
    assert alive == ["q1"]
    assert np.vdot(vec, vec).real > 0


# --- truth tables ------------------------------------------------------------


def test_oracle_table_matches_derivation(cnot_circuit, t_circuit):
    for c in (cnot_circuit, t_circuit):
        assert table_equal(oracle_truth_table(c), derive_truth_table(c))


@pytest.mark.parametrize("seed", range(30))
def test_oracle_table_matches_derivation_randomised(seed):
    rng = random.Random(1000 + seed)
    c = random_circuit(rng)
    if validate_icm(c) or c.n > MAX_ORACLE_QUBITS:
        pytest.skip("generator produced an oversized/invalid circuit")
    assert table_equal(oracle_truth_table(c), derive_truth_table(c))


def test_oracle_table_detects_mutation(t_circuit):
    mutated = load_fixture("t_mutated.icm")
    assert not table_equal(oracle_truth_table(mutated),
                           derive_truth_table(t_circuit))


# --- frame fitting -----------------------------------------------------------


def test_fit_frames_teleport():
    c = load_fixture("teleport.icm")
    frames = fit_frames(c, np.eye(2))
    assert frames == {
        frozenset({("q1", 0)}): "I",
        frozenset({("q1", 1)}): "X",
    }
    assert channels_equal(channel_choi(c, frames=frames), choi_of_unitary(np.eye(2)))


def test_fit_frames_rejects_non_pauli_residue():
    c = load_fixture("teleport.icm")
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    assert fit_frames(c, h) is None


def test_fit_frames_shape_check():
    c = load_fixture("teleport.icm")
    with pytest.raises(OracleError, match="ports"):
        fit_frames(c, np.eye(4))


# --- sampling ----------------------------------------------------------------


def test_sample_verify_passes_on_own_table(t_circuit):
    table = derive_truth_table(t_circuit)
    assert sample_verify(t_circuit, table, shots=100, seed=7)


def test_sample_verify_catches_wrong_table(t_circuit):
    wrong = derive_truth_table(load_fixture("t_mutated.icm"))
    assert not sample_verify(t_circuit, wrong, shots=100, seed=7)


def test_sample_verify_catches_sign_flip(cnot_circuit):
    table = derive_truth_table(cnot_circuit)
    rows = tuple(
        type(r)(r.input, r.output, -r.sign) if i == 0 else r
        for i, r in enumerate(table.rows)
    )
    flipped = type(table)(table.n, rows)
    assert not sample_verify(cnot_circuit, flipped, shots=100, seed=7)


def test_sample_verify_zero_shots_warns(cnot_circuit):
    table = derive_truth_table(cnot_circuit)
    with pytest.warns(UserWarning, match="vacuous"):
        assert sample_verify(cnot_circuit, table, shots=0)


def test_sample_verify_is_seeded(cnot_circuit):
    table = derive_truth_table(cnot_circuit)
    a = sample_verify(cnot_circuit, table, shots=50, seed=3)
    b = sample_verify(cnot_circuit, table, shots=50, seed=3)
    assert a is True and b is True


# --- dense sanity ------------------------------------------------------------


def test_t_conjugation_of_x():
    t = np.diag([1, np.exp(1j * np.pi / 4)])
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    got = t @ x @ t.conj().T
    assert np.allclose(got, (x + y) / np.sqrt(2))
