"""Specification tuples (ST, I, O) and their ``spec v1`` text format.

Table columns follow the roster order: io qubits first (io-line order),
then ancillae (init-line order).  ``derive_specification`` permutes the
circuit's declaration-order table into that convention so that a spec
file stands alone without the source circuit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import (
    BASES,
    IcmCircuit,
    MeasurementRule,
    validate_icm,
)
from .pauli import PauliOperator, TableRow, row_parse
from .table import StabiliserTruthTable, derive_truth_table


class SpecParseError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Specification:
    n: int
    io_ids: tuple[str, ...]
    inits: dict[str, str]          # ancilla id -> init basis (the set I)
    table: StabiliserTruthTable    # ST, columns in roster order
    rules: tuple[MeasurementRule, ...]  # O, order-significant
    ancilla_order: tuple[str, ...] = field(default=())

    def __post_init__(self):
        anc = self.ancilla_order or tuple(self.inits)
        object.__setattr__(self, "ancilla_order", anc)
        roster = self.roster()
        if len(roster) != self.n or len(set(roster)) != self.n:
            raise SpecParseError(
                f"roster has {len(set(roster))} distinct ids for {self.n} qubits"
            )
        if self.table.n != self.n:
            raise SpecParseError(
                f"table is {self.table.n}-qubit but spec declares {self.n}"
            )
        io = set(self.io_ids)
        for qid in self.inits:
            if qid in io:
                raise SpecParseError(f"init set names io qubit {qid!r}")
        for rule in self.rules:
            for qid in rule.measured_qubits():
                if qid in io:
                    raise SpecParseError(
                        f"measurement rules name io qubit {qid!r}"
                    )
                if qid not in self.inits:
                    raise SpecParseError(
                        f"measurement rules name undeclared qubit {qid!r}"
                    )

    def roster(self) -> tuple[str, ...]:
        return self.io_ids + self.ancilla_order


def _permute_pauli(p: PauliOperator, perm: list[int]) -> PauliOperator:
    """perm[new_position] = old_position."""
    x = z = 0
    for new, old in enumerate(perm):
        x |= ((p.x >> old) & 1) << new
        z |= ((p.z >> old) & 1) << new
    return PauliOperator(p.n, x, z, p.phase)


def permute_table(
    t: StabiliserTruthTable, perm: list[int]
) -> StabiliserTruthTable:
    rows = tuple(
        TableRow(_permute_pauli(r.input, perm), _permute_pauli(r.output, perm),
                 r.sign, r.provenance)
        for r in t.rows
    )
    return StabiliserTruthTable(t.n, rows)


def derive_specification(c: IcmCircuit) -> Specification:
    violations = validate_icm(c)
    if violations:
        raise SpecParseError(
            "circuit fails ICM validation: " + "; ".join(v.message for v in violations)
        )
    io = list(c.io_ids())
    anc = [q.id for q in c.qubits if q.kind != "io"]
    roster = io + anc
    perm = [c.index(qid) for qid in roster]
    table = permute_table(derive_truth_table(c), perm)
    inits = {q.id: q.init for q in c.qubits if q.kind != "io"}
    anc_set = set(anc)
    rules = tuple(
        r for r in c.rules if all(q in anc_set for q in r.measured_qubits())
    )
    return Specification(c.n, tuple(io), inits, table, rules, tuple(anc))


def serialize_spec(s: Specification) -> str:
    out = ["spec v1", f"qubits {s.n}"]
    if s.io_ids:
        out.append("io " + " ".join(s.io_ids))
    for qid in s.ancilla_order:
        out.append(f"init {qid} {s.inits[qid]}")
    out.append("table")
    for row in s.table.rows:
        out.append(row.format())
    out.append("end")
    for rule in s.rules:
        out.append(rule.format())
    return "\n".join(out) + "\n"


def _parse_rule(parts: list[str], line: int) -> MeasurementRule:
    def basis(tok: str) -> str:
        if tok not in BASES:
            raise SpecParseError(f"unknown basis {tok!r}", line)
        return tok

    if len(parts) == 3:
        return MeasurementRule(parts[1], basis(parts[2]))
    if (
        len(parts) == 9
        and parts[3] == "?"
        and parts[6] == ":"
        and parts[4] == parts[7]
    ):
        return MeasurementRule(
            parts[1], basis(parts[2]), parts[4], basis(parts[5]), basis(parts[8])
        )
    raise SpecParseError(
        "expected 'measure q B' or 'measure q1 B1 ? q2 B2 : q2 B3'", line
    )


def parse_spec(text: str) -> Specification:
    n: int | None = None
    io: list[str] = []
    inits: dict[str, str] = {}
    anc_order: list[str] = []
    rows: list[TableRow] = []
    rules: list[MeasurementRule] = []
    in_table = False
    saw_table = False
    header_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if not header_seen:
            if stripped != "spec v1":
                raise SpecParseError("expected 'spec v1' header", lineno)
            header_seen = True
            continue
        if in_table:
            if stripped == "end":
                in_table = False
                continue
            try:
                row = row_parse(stripped, n)
            except Exception as exc:
                raise SpecParseError(str(exc), lineno) from exc
            rows.append(row)
            continue
        parts = stripped.split()
        kw = parts[0]
        if kw == "qubits":
            if len(parts) != 2 or not parts[1].isdigit():
                raise SpecParseError("expected 'qubits <N>'", lineno)
            n = int(parts[1])
        elif kw == "io":
            io.extend(parts[1:])
        elif kw == "init":
            if len(parts) != 3:
                raise SpecParseError("expected 'init <id> <basis>'", lineno)
            if parts[2] not in BASES:
                raise SpecParseError(f"unknown basis {parts[2]!r}", lineno)
            if parts[1] in inits:
                raise SpecParseError(f"duplicate init for {parts[1]!r}", lineno)
            inits[parts[1]] = parts[2]
            anc_order.append(parts[1])
        elif kw == "table":
            if n is None:
                raise SpecParseError("'table' before 'qubits'", lineno)
            if saw_table:
                raise SpecParseError("duplicate table block", lineno)
            in_table = saw_table = True
        elif kw == "measure":
            rules.append(_parse_rule(parts, lineno))
        else:
            raise SpecParseError(f"unknown directive {kw!r}", lineno)

    if n is None:
        raise SpecParseError("missing 'qubits' line")
    if in_table:
        raise SpecParseError("table block not closed with 'end'")
    return Specification(
        n, tuple(io), inits, StabiliserTruthTable(n, tuple(rows)),
        tuple(rules), tuple(anc_order),
    )
