"""Dense-statevector oracle.

Everything here is deliberately independent of the bitmask algebra in
``pauli.py``/``table.py``: Paulis act as explicit basis-index
permutations with phases, circuits run as branch-by-branch Kraus maps on
full statevectors, and channels compare through Choi matrices.  The
point is cross-checking, so no code path is shared with the derivation
engine beyond the circuit IR itself.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .circuit import Basis, IcmCircuit
from .pauli import PauliOperator, TableRow
from .table import StabiliserTruthTable, seed_rows

MAX_ORACLE_QUBITS = 12

_SQRT2 = math.sqrt(2.0)

# single-qubit kets indexed by init basis letter (the +1 eigenstate)
KET = {
    "Z": np.array([1.0, 0.0], dtype=complex),
    "X": np.array([1.0, 1.0], dtype=complex) / _SQRT2,
    "Y": np.array([1.0, 1.0j], dtype=complex) / _SQRT2,
    "A": np.array([1.0, np.exp(0.25j * np.pi)], dtype=complex) / _SQRT2,
}


class OracleError(Exception):
    pass


class SizeCapError(OracleError):
    """Raised when a circuit is too wide for dense simulation."""


def _check_size(n: int) -> None:
    if n > MAX_ORACLE_QUBITS:
        raise SizeCapError(
            f"dense oracle capped at {MAX_ORACLE_QUBITS} qubits, got {n}"
        )


class DenseState:
    """Statevector over n qubits; qubit 0 owns the most significant bit."""

    def __init__(self, n: int, vec: np.ndarray | None = None):
        _check_size(n)
        self.n = n
        if vec is None:
            vec = np.zeros(2**n, dtype=complex)
            vec[0] = 1.0
        self.vec = np.asarray(vec, dtype=complex).reshape(2**n)

    @classmethod
    def product(cls, kets: list[np.ndarray]) -> "DenseState":
        vec = np.array([1.0], dtype=complex)
        for k in kets:
            vec = np.kron(vec, k)
        return cls(len(kets), vec)

    def _axes(self) -> np.ndarray:
        return self.vec.reshape((2,) * self.n)

    def apply_cnot(self, control: int, target: int) -> None:
        t = self._axes()
        sel = (slice(None),) * control + (1,)
        moved_target = target if target < control else target - 1
        t[sel] = np.flip(t[sel], axis=moved_target).copy()
        self.vec = t.reshape(-1)

    def apply_1q(self, q: int, u: np.ndarray) -> None:
        t = self._axes()
        t = np.tensordot(u, t, axes=([1], [q]))
        t = np.moveaxis(t, 0, q)
        self.vec = np.ascontiguousarray(t).reshape(-1)

    def project(self, q: int, basis: Basis, outcome: int) -> "DenseState":
        """Unnormalised projection of qubit q onto (-1)**outcome eigenstate."""
        if basis == "A":
            # A-basis "measurement": eigenstates |A0>, Z|A0>
            ket = KET["A"].copy()
            if outcome:
                ket[1] = -ket[1]
        elif basis == "Y":
            ket = np.array([1.0, 1.0j * (1 - 2 * outcome)], dtype=complex) / _SQRT2
        elif basis == "X":
            ket = np.array([1.0, 1.0 - 2.0 * outcome], dtype=complex) / _SQRT2
        else:
            ket = np.zeros(2, dtype=complex)
            ket[outcome] = 1.0
        t = self._axes()
        amp = np.tensordot(ket.conj(), t, axes=([0], [q]))
        out = DenseState.__new__(DenseState)
        out.n = self.n - 1
        out.vec = np.ascontiguousarray(amp).reshape(-1)
        return out

    def norm2(self) -> float:
        return float(np.vdot(self.vec, self.vec).real)


def run_branch(
    c: IcmCircuit,
    input_kets: dict[str, np.ndarray],
    outcomes: dict[str, int],
) -> tuple[np.ndarray, list[str]]:
    """Run one measurement branch; returns (unnormalised vec, leftover ids).

    ``outcomes`` fixes the +1/-1 result (0/1) for every measured qubit.
    Conditional partners are measured immediately after their trigger in
    the basis the trigger outcome selects.
    """
    kets = []
    for q in c.qubits:
        if q.kind == "io":
            kets.append(input_kets[q.id])
        else:
            kets.append(KET[q.init])
    state = DenseState.product(kets)
    for ci, ti in c.cnot_indices():
        state.apply_cnot(ci, ti)

    alive = [q.id for q in c.qubits]
    measured: set[str] = set()

    def measure(qid: str, basis: Basis) -> None:
        nonlocal state
        if qid in measured:
            raise OracleError(f"qubit {qid!r} measured twice in one branch")
        pos = alive.index(qid)
        state = state.project(pos, basis, outcomes[qid])
        alive.pop(pos)
        measured.add(qid)

    for rule in c.rules:
        measure(rule.q1, rule.b1)
        if rule.conditional:
            basis = rule.b2 if outcomes[rule.q1] == 0 else rule.b3
            measure(rule.q2, basis)
    return state.vec, alive


def _port_ids(c: IcmCircuit) -> tuple[list[str], list[str]]:
    """(input ports, output ports) by qubit id.

    Inputs are the io qubits in declaration order.  Outputs come from the
    circuit's ``out`` metadata when present, otherwise every unmeasured
    qubit in declaration order.
    """
    ins = c.io_ids()
    if c.outputs:
        outs = list(c.outputs)
    else:
        measured = c.measured_ids()
        outs = [q.id for q in c.qubits if q.id not in measured]
    return ins, outs


def _all_outcomes(c: IcmCircuit) -> list[dict[str, int]]:
    ids = sorted(c.measured_ids())
    combos = []
    for bits in range(2 ** len(ids)):
        combos.append({qid: (bits >> i) & 1 for i, qid in enumerate(ids)})
    return combos


PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frame_unitary(frame: str | None, m: int) -> np.ndarray:
    """Pauli string (e.g. 'XI') applied to the output ports, or identity."""
    if not frame:
        return np.eye(2**m, dtype=complex)
    if len(frame) != m:
        raise OracleError(f"frame {frame!r} does not cover {m} output ports")
    u = np.array([[1.0]], dtype=complex)
    for ch in frame:
        u = np.kron(u, PAULI_1Q[ch])
    return u


def channel_choi(
    c: IcmCircuit,
    frames: dict[frozenset[tuple[str, int]], str] | str | None = None,
) -> np.ndarray:
    """Choi matrix of the circuit's io -> output channel, trace 2**k.

    ``frames`` optionally supplies a measurement-outcome-dependent Pauli
    correction on the output ports: either one static Pauli string, or a
    map keyed by frozenset of (measured qubit id, outcome bit) items.
    """
    ins, outs = _port_ids(c)
    k, m = len(ins), len(outs)
    _check_size(c.n + k)  # branch sims hold at most n qubits; k extra for bases
    dim_in, dim_out = 2**k, 2**m
    extras = [
        q.id for q in c.qubits if q.id not in c.measured_ids() and q.id not in outs
    ]

    basis_kets = [np.array([1.0, 0.0], dtype=complex),
                  np.array([0.0, 1.0], dtype=complex)]

    # columns[b][i] = output-port block of the Kraus column for branch b,
    # input basis state i, with any extra unmeasured qubits kept so they
    # can be traced out pairwise below.
    choi = np.zeros((dim_in * dim_out, dim_in * dim_out), dtype=complex)
    blocks: list[np.ndarray] = []  # shape (dim_in, dim_out, dim_extra)
    for outcome in _all_outcomes(c):
        cols = np.zeros((dim_in, dim_out * 2 ** len(extras)), dtype=complex)
        for i in range(dim_in):
            input_kets = {
                qid: basis_kets[(i >> (k - 1 - j)) & 1]
                for j, qid in enumerate(ins)
            }
            vec, alive = run_branch(c, input_kets, outcome)
            # reorder leftover qubits to (outs..., extras...)
            perm = [alive.index(q) for q in outs + extras]
            t = vec.reshape((2,) * len(alive)).transpose(perm)
            cols[i] = t.reshape(-1)
        if frames is not None:
            if isinstance(frames, str):
                fr = frames
            else:
                fr = frames.get(frozenset(outcome.items()), "")
            u = _frame_unitary(fr, m)
            cols = cols @ np.kron(u.T, np.eye(2 ** len(extras)))
        blocks.append(cols.reshape(dim_in, dim_out, 2 ** len(extras)))

    for b in blocks:
        # Choi += sum_ij |i><j| (x) sum_e b[i,:,e] b[j,:,e]^dagger
        flat = b.reshape(dim_in, dim_out, -1)
        for i in range(dim_in):
            for j in range(dim_in):
                block = flat[i] @ flat[j].conj().T
                choi[i * dim_out:(i + 1) * dim_out,
                     j * dim_out:(j + 1) * dim_out] += block

    herm_err = np.abs(choi - choi.conj().T).max()
    if herm_err > 1e-10:
        raise OracleError(f"Choi matrix not Hermitian (err {herm_err:.2e})")
    eig = np.linalg.eigvalsh((choi + choi.conj().T) / 2)
    if eig.min() < -1e-10:
        raise OracleError(f"Choi matrix not PSD (min eig {eig.min():.2e})")
    return choi


def choi_of_unitary(u: np.ndarray) -> np.ndarray:
    """Choi matrix (trace 2**k convention) of a k-qubit unitary."""
    d = u.shape[0]
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            choi[i * d:(i + 1) * d, j * d:(j + 1) * d] = np.outer(
                u[:, i], u[:, j].conj()
            )
    return choi


def channels_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.abs(a - b).max() <= tol)


def _pauli_strings(m: int):
    if m == 0:
        yield ""
        return
    for rest in _pauli_strings(m - 1):
        for ch in "IXYZ":
            yield ch + rest


def fit_frames(
    c: IcmCircuit, u_ideal: np.ndarray, tol: float = 1e-8
) -> dict[frozenset[tuple[str, int]], str] | None:
    """Per-branch Pauli corrections making the circuit implement ``u_ideal``.

    For every measurement branch the Kraus operator is computed densely
    and matched against (Pauli string) x ``u_ideal`` up to scale.  Returns
    a frame table suitable for ``channel_choi``, or None if some branch
    of nonzero weight is not a Pauli multiple of the target.
    """
    ins, outs = _port_ids(c)
    k, m = len(ins), len(outs)
    if u_ideal.shape != (2**m, 2**k):
        raise OracleError("ideal operator does not match the circuit's ports")
    if m > 4:
        raise SizeCapError("frame fitting capped at 4 output ports")
    _check_size(c.n)
    extras = [
        q.id for q in c.qubits if q.id not in c.measured_ids() and q.id not in outs
    ]
    if extras:
        raise OracleError(f"unmeasured non-output qubits {extras}; cannot fit frames")
    basis_kets = [np.array([1.0, 0.0], dtype=complex),
                  np.array([0.0, 1.0], dtype=complex)]

    table: dict[frozenset[tuple[str, int]], str] = {}
    for outcome in _all_outcomes(c):
        kraus = np.zeros((2**m, 2**k), dtype=complex)
        for i in range(2**k):
            input_kets = {
                qid: basis_kets[(i >> (k - 1 - j)) & 1]
                for j, qid in enumerate(ins)
            }
            vec, alive = run_branch(c, input_kets, outcome)
            perm = [alive.index(q) for q in outs]
            kraus[:, i] = vec.reshape((2,) * m).transpose(perm).reshape(-1)
        scale = np.abs(kraus).max()
        if scale < tol:  # zero-weight branch, correction irrelevant
            table[frozenset(outcome.items())] = "I" * m
            continue
        residue = kraus @ u_ideal.conj().T  # should be (scalar) x Pauli
        hit = None
        for ps in _pauli_strings(m):
            pu = _frame_unitary(ps, m)
            lead = None
            for a, b in zip(residue.reshape(-1), pu.reshape(-1)):
                if abs(b) > 0.5:
                    lead = a / b
                    break
            if lead is None or abs(lead) < tol:
                continue
            if np.abs(residue - lead * pu).max() <= tol * max(1.0, abs(lead)):
                hit = ps
                break
        if hit is None:
            return None
        table[frozenset(outcome.items())] = hit
    return table


# ---------------------------------------------------------------------------
# independent truth-table oracle


def _pauli_action(p: PauliOperator):
    """Return (offset, phase array) so that P|e_k> = phases[k] |e_{k ^ off}>."""
    n, x, z = p.n, p.x, p.z
    off = 0
    for k in range(n):
        if (x >> k) & 1:
            off |= 1 << (n - 1 - k)
    zmask = 0
    for k in range(n):
        if (z >> k) & 1:
            zmask |= 1 << (n - 1 - k)
    base = (1j) ** (p.phase % 4) * (1j) ** bin(x & z).count("1")
    ks = np.arange(2**n)
    par = np.zeros(2**n, dtype=np.int64)  # parity of popcount(k & zmask)
    for bit in range(n):
        if (zmask >> bit) & 1:
            par += (ks >> bit) & 1
    phases = base * (-1.0 + 0j) ** (par % 2)
    return off, phases


def _pauli_matrix_apply(p: PauliOperator, vecs: np.ndarray) -> np.ndarray:
    """Apply P to columns of vecs (dim 2**n x m) without building P."""
    off, phases = _pauli_action(p)
    idx = np.arange(vecs.shape[0]) ^ off
    return phases[:, None] * vecs[idx]


def oracle_truth_table(c: IcmCircuit) -> StabiliserTruthTable:
    """Re-derive the truth table by brute-force conjugation.

    The CNOT region is a permutation U of computational basis states;
    each seed row's image is U P U^dagger, recovered by fitting a Pauli
    to the dense matrix action and verifying the fit on every column.
    """
    _check_size(c.n)
    n = c.n
    dim = 2**n
    # U as index permutation: CNOT(c,t) maps e_k -> e_{k with t-bit ^= c-bit}
    perm = np.arange(dim)
    for ci, ti in c.cnot_indices():
        cb, tb = n - 1 - ci, n - 1 - ti
        flip = ((perm >> cb) & 1) << tb
        perm = perm ^ flip

    inv = np.empty(dim, dtype=np.int64)
    inv[perm] = np.arange(dim)

    rows = []
    for qi, qid, basis, _kind in seed_rows(c):
        if basis == "X":
            p = PauliOperator(n, 1 << qi, 0)
        else:
            p = PauliOperator(n, 0, 1 << qi)
        # column k of M = U P U^-1:
        #   U^-1 e_k = e_{inv[k]};  P e_m = phases[m] e_{m ^ off};  U e_m = e_{perm[m]}
        off, phases = _pauli_action(p)
        col_row = perm[inv ^ off]
        col_val = phases[inv]
        # fit a signed Pauli to M: the index offset must be constant
        offs = col_row ^ np.arange(dim)
        if not (offs == offs[0]).all():
            raise OracleError("conjugated operator is not a Pauli (offset varies)")
        out_off = int(offs[0])
        out_x = 0
        for bit in range(n):
            if (out_off >> (n - 1 - bit)) & 1:
                out_x |= 1 << bit
        # z-bits from value ratios between column 0 and single-bit columns
        out_z = 0
        for bit in range(n):
            ratio = col_val[1 << (n - 1 - bit)] / col_val[0]
            if abs(ratio + 1) < 1e-9:
                out_z |= 1 << bit
            elif abs(ratio - 1) > 1e-9:
                raise OracleError("conjugated operator is not a Pauli (bad ratio)")
        q = PauliOperator(n, out_x, out_z)
        fit_off, fit_phases = _pauli_action(q)
        lead = col_val[0] / fit_phases[0]
        if abs(lead - 1) < 1e-9:
            sign = 1
        elif abs(lead + 1) < 1e-9:
            sign = -1
        else:
            raise OracleError(f"non-real conjugation phase {lead!r}")
        # verify the fit on every column
        if fit_off != out_off or not np.allclose(
            col_val, sign * fit_phases, atol=1e-9
        ):
            raise OracleError("pauli fit failed verification")
        rows.append(TableRow(p, q, sign, provenance=(qid, basis)))
    return StabiliserTruthTable(n, tuple(rows))


# ---------------------------------------------------------------------------
# sampling verification


def sample_verify(
    c: IcmCircuit,
    table: StabiliserTruthTable,
    shots: int = 100,
    seed: int | None = None,
) -> bool:
    """Check each table row by preparing its +1 eigenstate and sampling.

    For a row P -> s*Q the seed qubit is prepared in the +1 eigenstate of
    its single-qubit input letter, all other io qubits in |0>, ancillae
    per their declared inits; after the CNOT region the state is
    stabilised by s*Q exactly, so every sampled Q-measurement must return
    s.  shots=0 passes vacuously (with a warning).
    """
    _check_size(c.n)
    if shots == 0:
        warnings.warn("sample_verify called with shots=0; result is vacuous")
        return True
    rng = np.random.default_rng(seed)
    for row in table.rows:
        seed_q = None
        for k in range(c.n):
            if (row.input.x >> k) & 1 or (row.input.z >> k) & 1:
                seed_q = k
                break
        letter = row.input.letter(seed_q)
        kets = []
        for i, q in enumerate(c.qubits):
            if i == seed_q:
                kets.append(KET[letter])
            elif q.kind == "io":
                kets.append(KET["Z"])
            else:
                kets.append(KET[q.init])
        state = DenseState.product(kets)
        for ci, ti in c.cnot_indices():
            state.apply_cnot(ci, ti)
        vec = state.vec
        # measure Q: expectation and sampled outcomes
        qvec = _pauli_matrix_apply(row.output, vec[:, None])[:, 0]
        expval = float(np.vdot(vec, qvec).real)
        if abs(expval - row.sign) > 1e-9:
            return False
        # sample: project onto +-1 eigenspaces of Q
        plus = (vec + qvec) / 2.0
        p_plus = float(np.vdot(plus, plus).real)
        draws = rng.random(shots) < p_plus
        want = row.sign == 1
        if not (draws == want).all():
            return False
    return True
