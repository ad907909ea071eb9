"""Black-box verification of a candidate circuit against a specification.

Three criteria, all report data rather than exceptions:

1. every ancilla is initialised exactly as the init set I prescribes;
2. conjugating each truth-table input through the candidate's CNOT
   region reproduces the tabulated output, sign included;
3. the candidate's ancilla measurement rules equal O, in order.

Criterion 2 checks literal rows (obligations), not row-span
equivalence; ``spec_equiv`` is the span-level comparison for two
specifications.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import IcmCircuit, validate_icm
from .pauli import (
    PauliOperator,
    TableRow,
    bits_to_pauli,
    conjugate_rows_batch,
    pauli_format,
    rows_to_bits,
)
from .specfmt import Specification, permute_table
from .table import table_equal


@dataclass
class RowCheck:
    row: TableRow
    actual: PauliOperator
    actual_sign: int

    @property
    def passed(self) -> bool:
        return self.actual == self.row.output and self.actual_sign == self.row.sign

    def describe(self) -> str:
        verdict = "ok" if self.passed else "MISMATCH"
        got = ("+" if self.actual_sign == 1 else "-") + pauli_format(self.actual)
        return f"{self.row.format()}  got {got}  [{verdict}]"


@dataclass
class VerificationReport:
    roster_ok: bool
    roster_message: str = ""
    init_ok: bool = False
    init_mismatches: list[str] = field(default_factory=list)
    table_ok: bool = False
    row_checks: list[RowCheck] = field(default_factory=list)
    rules_ok: bool = False
    rules_divergence: int | None = None  # first diverging rule index

    @property
    def overall(self) -> bool:
        return self.roster_ok and self.init_ok and self.table_ok and self.rules_ok

    def lines(self) -> list[str]:
        out = [f"overall: {'pass' if self.overall else 'fail'}"]
        if not self.roster_ok:
            out.append(f"roster: fail ({self.roster_message})")
            return out
        out.append("roster: ok")
        out.append("criterion1-init: " + ("pass" if self.init_ok else "fail"))
        for m in self.init_mismatches:
            out.append(f"  init-mismatch: {m}")
        out.append("criterion2-table: " + ("pass" if self.table_ok else "fail"))
        for rc in self.row_checks:
            if not rc.passed:
                out.append("  row: " + rc.describe())
        out.append("criterion3-rules: " + ("pass" if self.rules_ok else "fail"))
        if self.rules_divergence is not None:
            out.append(f"  first-divergence: rule {self.rules_divergence}")
        return out

    def format(self) -> str:
        return "\n".join(self.lines())


def _roster_check(candidate: IcmCircuit, spec: Specification) -> str | None:
    if candidate.n != spec.n:
        return f"candidate has {candidate.n} qubits, spec has {spec.n}"
    cand_io = set(candidate.io_ids())
    if cand_io != set(spec.io_ids):
        return (
            f"io qubits differ: candidate {sorted(cand_io)}, "
            f"spec {sorted(spec.io_ids)}"
        )
    cand_anc = {q.id for q in candidate.qubits if q.kind != "io"}
    if cand_anc != set(spec.ancilla_order):
        return (
            f"ancillae differ: candidate {sorted(cand_anc)}, "
            f"spec {sorted(spec.ancilla_order)}"
        )
    return None


def verify(candidate: IcmCircuit, spec: Specification) -> VerificationReport:
    violations = validate_icm(candidate)
    if violations:
        return VerificationReport(
            roster_ok=False,
            roster_message="candidate is not valid ICM: "
            + "; ".join(v.message for v in violations),
        )
    mismatch = _roster_check(candidate, spec)
    if mismatch is not None:
        return VerificationReport(roster_ok=False, roster_message=mismatch)
    report = VerificationReport(roster_ok=True)

    # criterion 1: init set
    for qid in spec.ancilla_order:
        actual = candidate.qubit(qid).init
        if actual != spec.inits[qid]:
            report.init_mismatches.append(
                f"{qid}: spec {spec.inits[qid]}, candidate {actual}"
            )
    report.init_ok = not report.init_mismatches

    # criterion 2: table rows, re-indexed into the candidate's column order
    perm = [spec.roster().index(q.id) for q in candidate.qubits]
    cnots = candidate.cnot_indices()
    local = permute_table(spec.table, perm)
    back = [candidate.index(qid) for qid in spec.roster()]
    xs, zs = rows_to_bits([row.input for row in local.rows], candidate.n)
    flips = np.zeros(len(local.rows), dtype=np.uint8)
    conjugate_rows_batch(xs, zs, flips, cnots)
    for i, spec_row in enumerate(spec.table.rows):
        out = bits_to_pauli(xs[i], zs[i])
        sign = 1 if flips[i] == 0 else -1
        out_spec_cols = _permute(out, back)
        report.row_checks.append(
            RowCheck(spec_row, out_spec_cols.canonical(), sign)
        )
    report.table_ok = all(rc.passed for rc in report.row_checks)

    # criterion 3: measurement rules, order-sensitive
    anc = {q.id for q in candidate.qubits if q.kind != "io"}
    cand_rules = [
        r for r in candidate.rules
        if all(q in anc for q in r.measured_qubits())
    ]
    report.rules_ok = tuple(cand_rules) == tuple(spec.rules)
    if not report.rules_ok:
        limit = min(len(cand_rules), len(spec.rules))
        report.rules_divergence = next(
            (i for i in range(limit) if cand_rules[i] != spec.rules[i]), limit
        )
    return report


def _permute(p: PauliOperator, perm: list[int]) -> PauliOperator:
    x = z = 0
    for new, old in enumerate(perm):
        x |= ((p.x >> old) & 1) << new
        z |= ((p.z >> old) & 1) << new
    return PauliOperator(p.n, x, z, p.phase)


@dataclass
class SpecDiff:
    equal: bool
    messages: list[str]

    def format(self) -> str:
        head = "equal" if self.equal else "different"
        return "\n".join([head] + [f"  {m}" for m in self.messages])


def spec_diff(a: Specification, b: Specification) -> SpecDiff:
    """Span-level comparison of two specifications."""
    msgs: list[str] = []
    if a.n != b.n:
        msgs.append(f"qubit counts differ: {a.n} vs {b.n}")
    if tuple(a.io_ids) != tuple(b.io_ids):
        msgs.append(f"io lists differ: {a.io_ids} vs {b.io_ids}")
    if a.inits != b.inits:
        only_a = {k: v for k, v in a.inits.items() if b.inits.get(k) != v}
        only_b = {k: v for k, v in b.inits.items() if a.inits.get(k) != v}
        msgs.append(f"init sets differ: {only_a} vs {only_b}")
    if not msgs:  # tables only comparable on a shared roster
        # align b's columns to a's roster before span comparison
        perm = [b.roster().index(qid) for qid in a.roster()]
        bt = permute_table(b.table, perm)
        if not table_equal(a.table, bt):
            msgs.append("truth tables span different groups")
    if tuple(a.rules) != tuple(b.rules):
        limit = min(len(a.rules), len(b.rules))
        idx = next(
            (i for i in range(limit) if a.rules[i] != b.rules[i]), limit
        )
        msgs.append(f"measurement rules differ at rule {idx}")
    return SpecDiff(not msgs, msgs)


def spec_equiv(a: Specification, b: Specification) -> bool:
    return spec_diff(a, b).equal
