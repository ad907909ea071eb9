"""Stabiliser truth tables: derivation, canonical form, comparison.

Seeding rules per qubit kind:

* io qubit: an X row and a Z row;
* teleport ancilla with rotated init (Y or A): an X row and a Z row,
  i.e. the rotated initialisation is temporarily replaced by the plain
  seeds;
* teleport ancilla with plain init: one row in the init basis;
* computational ancilla: one row in the init basis;
* distillation ancillae contribute no rows.

Every derived row conjugates its seed through the CNOT region and
carries sign +1 (X-type and Z-type seeds cannot pick up signs under
CNOT conjugation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import IcmCircuit, ROTATED_BASES
from .pauli import (
    PauliOperator,
    TableRow,
    conjugate_rows_batch,
    bits_to_pauli,
    row_multiply,
)


@dataclass(frozen=True)
class StabiliserTruthTable:
    n: int
    rows: tuple[TableRow, ...]

    def format(self) -> str:
        return "\n".join(r.format() for r in self.rows)

    def __str__(self) -> str:
        return self.format()


def expected_row_count(c: IcmCircuit) -> int:
    """2*|io| + 2*|rotated-init teleport| + |rotated-meas teleport| + |computational|."""
    count = 0
    for q in c.qubits:
        if q.kind == "io":
            count += 2
        elif q.kind == "teleport":
            count += 2 if q.init in ROTATED_BASES else 1
        elif q.kind == "computational":
            count += 1
    return count


def seed_rows(c: IcmCircuit) -> list[tuple[int, str, str, str]]:
    """(qubit index, qubit id, basis letter, seed kind) in declaration order."""
    seeds: list[tuple[int, str, str, str]] = []
    for i, q in enumerate(c.qubits):
        if q.kind == "io":
            seeds.append((i, q.id, "X", "io"))
            seeds.append((i, q.id, "Z", "io"))
        elif q.kind == "teleport":
            if q.init in ROTATED_BASES:
                seeds.append((i, q.id, "X", "rotated-init"))
                seeds.append((i, q.id, "Z", "rotated-init"))
            else:
                seeds.append((i, q.id, q.init, "plain-init"))
        elif q.kind == "computational":
            seeds.append((i, q.id, q.init, "computational"))
        # distillation: no rows
    return seeds


def derive_truth_table(c: IcmCircuit) -> StabiliserTruthTable:
    """Conjugate every seed through the CNOT region (word-parallel)."""
    seeds = seed_rows(c)
    n = c.n
    r = len(seeds)
    xs = np.zeros((r, n), dtype=np.uint8)
    zs = np.zeros((r, n), dtype=np.uint8)
    inputs: list[PauliOperator] = []
    for row_i, (qi, _qid, basis, _kind) in enumerate(seeds):
        if basis == "X":
            xs[row_i, qi] = 1
            inputs.append(PauliOperator(n, 1 << qi, 0))
        else:
            zs[row_i, qi] = 1
            inputs.append(PauliOperator(n, 0, 1 << qi))
    signs = np.zeros(r, dtype=np.uint8)
    conjugate_rows_batch(xs, zs, signs, c.cnot_indices())
    if signs.any():  # pragma: no cover - impossible for pure-type seeds
        raise AssertionError("single-type seed picked up a sign under CNOT conjugation")
    rows = tuple(
        TableRow(inputs[i], bits_to_pauli(xs[i], zs[i]), 1,
                 provenance=(seeds[i][1], seeds[i][2]))
        for i in range(r)
    )
    return StabiliserTruthTable(n, rows)


def _row_key(row: TableRow, n: int) -> int:
    """4n-bit word: input x|z then output x|z, qubit 0 most significant."""
    key = 0
    for value in (row.input.x, row.input.z, row.output.x, row.output.z):
        for k in range(n):
            key = (key << 1) | ((value >> k) & 1)
    return key


def canonicalize_table(t: StabiliserTruthTable) -> StabiliserTruthTable:
    """Reduced row-echelon form over GF(2) with signs carried along.

    Rows are eliminated with ``row_multiply`` under a leftmost-pivot
    rule, then sorted by pivot position.  The result is a canonical
    representative of the row span, so tables agree exactly when their
    spans (including signs) agree.
    """
    n = t.n
    width = 4 * n
    work: list[tuple[int, TableRow]] = [(_row_key(r, n), r) for r in t.rows]
    pivots: dict[int, tuple[int, TableRow]] = {}  # pivot bit position -> row
    trivial: list[TableRow] = []

    for key, row in work:
        while key:
            lead = width - key.bit_length()  # leftmost set bit position
            if lead not in pivots:
                break
            pkey, prow = pivots[lead]
            key ^= pkey
            row = row_multiply(row, prow)
        if key:
            pivots[width - key.bit_length()] = (key, row)
        elif row.sign == -1:
            # contradictory span: keep a -identity marker row
            trivial.append(row)

    # back-substitute so every pivot column is cleared elsewhere
    order = sorted(pivots)
    for i in reversed(range(len(order))):
        lead = order[i]
        key, row = pivots[lead]
        for j in range(i):
            kj, rj = pivots[order[j]]
            if (kj >> (width - 1 - lead)) & 1:
                pivots[order[j]] = (kj ^ key, row_multiply(rj, row))

    rows = [pivots[lead][1] for lead in sorted(pivots)]
    rows.extend(trivial[:1])
    return StabiliserTruthTable(n, tuple(rows))


def table_equal(a: StabiliserTruthTable, b: StabiliserTruthTable) -> bool:
    """Span equality (signs included) via canonical forms."""
    if a.n != b.n:
        return False
    ca = canonicalize_table(a)
    cb = canonicalize_table(b)
    return [(r.input, r.output, r.sign) for r in ca.rows] == [
        (r.input, r.output, r.sign) for r in cb.rows
    ]
