import pathlib
import random

import numpy as np
import pytest

from icmverify import (
    GateList,
    IcmCircuit,
    MeasurementRule,
    QubitDecl,
    parse_circuit,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


def load_fixture(name: str) -> IcmCircuit:
    return parse_circuit((FIXTURES / name).read_text())


@pytest.fixture
def t_circuit():
    return load_fixture("t.icm")


@pytest.fixture
def cnot_circuit():
    return load_fixture("cnot.icm")


# --- dense references -------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_P = np.diag([1, 1j]).astype(complex)
_T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)

GATE_1Q = {
    "h": _H,
    "p": _P,
    "pdg": _P.conj().T,
    "t": _T,
    "tdg": _T.conj().T,
    "x": _X,
    "z": _Z,
}


def ideal_unitary(g: GateList) -> np.ndarray:
    """Dense unitary of a gate list; qubit 0 is the most significant bit."""
    dim = 2**g.n
    u = np.eye(dim, dtype=complex)
    for gate in g.gates:
        name, *args = gate
        if name == "cnot":
            c, t = args
            m = np.zeros((dim, dim), dtype=complex)
            for b in range(dim):
                nb = b ^ (1 << (g.n - 1 - t)) if (b >> (g.n - 1 - c)) & 1 else b
                m[nb, b] = 1
        else:
            m = np.array([[1.0]], dtype=complex)
            for q in range(g.n):
                m = np.kron(m, GATE_1Q[name] if q == args[0] else np.eye(2))
        u = m @ u
    return u


# --- random circuit generation ----------------------------------------------


def random_circuit(
    rng: random.Random,
    max_io: int = 4,
    max_anc: int = 4,
    max_cnots: int = 10,
) -> IcmCircuit:
    """A random valid ICM circuit (single-flavour teleport ancillae)."""
    n_io = rng.randint(1, max_io)
    n_anc = rng.randint(0, max_anc)
    qubits = [QubitDecl(f"q{i}", "io") for i in range(n_io)]
    rules = []
    for j in range(n_anc):
        qid = f"a{j}"
        kind = rng.choice(["teleport", "computational"])
        if kind == "computational":
            qubits.append(QubitDecl(qid, kind, rng.choice("XZ")))
            continue
        # teleport: rotate at most one end
        style = rng.choice(["init", "measurement", "none"])
        if style == "init":
            qubits.append(QubitDecl(qid, kind, rng.choice("YA")))
            if rng.random() < 0.7:
                rules.append(MeasurementRule(qid, rng.choice("XZ")))
        elif style == "measurement":
            qubits.append(QubitDecl(qid, kind, rng.choice("XZ")))
            rules.append(MeasurementRule(qid, rng.choice("YA")))
        else:
            qubits.append(QubitDecl(qid, kind, rng.choice("XZ")))
            if rng.random() < 0.5:
                rules.append(MeasurementRule(qid, rng.choice("XZ")))
    ids = [q.id for q in qubits]
    cnots = []
    if len(ids) >= 2:
        for _ in range(rng.randint(0, max_cnots)):
            c, t = rng.sample(ids, 2)
            cnots.append((c, t))
    rng.shuffle(rules)
    return IcmCircuit(tuple(qubits), tuple(cnots), tuple(rules))
