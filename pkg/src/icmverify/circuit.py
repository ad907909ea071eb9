"""ICM circuit representation, the ``icm v1`` text format, and validation.

An ICM circuit is qubit declarations (io qubits plus teleport,
computational and distillation ancillae), a CNOT-only gate region, and
an ordered list of measurement rules.  A rule is either unconditional,
``measure q B``, or conditional, ``measure q1 B1 ? q2 B2 : q2 B3``:
measure ``q1`` in ``B1``; on eigenvalue +1 measure ``q2`` in ``B2``,
otherwise in ``B3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

PLAIN_BASES = ("X", "Z")
ROTATED_BASES = ("Y", "A")
BASES = PLAIN_BASES + ROTATED_BASES
KINDS = ("io", "teleport", "computational", "distillation")

Basis = str  # one of "X", "Z", "Y", "A"


class IcmParseError(ValueError):
    """Parse failure; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class QubitDecl:
    id: str
    kind: str  # io | teleport | computational | distillation
    init: Basis | None = None  # None exactly for io qubits

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise IcmParseError(f"unknown qubit kind {self.kind!r}")
        if self.kind == "io":
            if self.init is not None:
                raise IcmParseError(f"io qubit {self.id} must not carry an init basis")
        else:
            if self.init not in BASES:
                raise IcmParseError(f"ancilla {self.id} needs an init basis from {BASES}")


@dataclass(frozen=True)
class MeasurementRule:
    """(q1, B1, q2, B2, B3); the conditional part is all-or-nothing."""

    q1: str
    b1: Basis
    q2: str | None = None
    b2: Basis | None = None
    b3: Basis | None = None

    def __post_init__(self) -> None:
        if self.b1 not in BASES:
            raise IcmParseError(f"bad measurement basis {self.b1!r}")
        cond = (self.q2, self.b2, self.b3)
        if any(v is not None for v in cond) and any(v is None for v in cond):
            raise IcmParseError("conditional rule needs q2, B2 and B3 together")
        if self.q2 is not None:
            if self.q2 == self.q1:
                raise IcmParseError(f"rule conditions {self.q1} on itself")
            for b in (self.b2, self.b3):
                if b not in BASES:
                    raise IcmParseError(f"bad measurement basis {b!r}")

    @property
    def conditional(self) -> bool:
        return self.q2 is not None

    def measured_qubits(self) -> tuple[str, ...]:
        return (self.q1,) if self.q2 is None else (self.q1, self.q2)

    def format(self) -> str:
        if self.q2 is None:
            return f"measure {self.q1} {self.b1}"
        return f"measure {self.q1} {self.b1} ? {self.q2} {self.b2} : {self.q2} {self.b3}"


@dataclass(frozen=True)
class IcmCircuit:
    qubits: tuple[QubitDecl, ...]
    cnots: tuple[tuple[str, str], ...] = ()
    rules: tuple[MeasurementRule, ...] = ()
    outputs: tuple[str, ...] | None = None  # metadata only

    _index: dict[str, int] = field(default=None, compare=False, repr=False)  # type: ignore

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {q.id: i for i, q in enumerate(self.qubits)})

    @property
    def n(self) -> int:
        return len(self.qubits)

    def qubit(self, qid: str) -> QubitDecl:
        return self.qubits[self.index(qid)]

    def index(self, qid: str) -> int:
        try:
            return self._index[qid]
        except KeyError:
            raise KeyError(f"undeclared qubit {qid!r}") from None

    def io_ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.qubits if q.kind == "io")

    def ancilla_ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.qubits if q.kind != "io")

    def cnot_indices(self) -> list[tuple[int, int]]:
        return [(self.index(c), self.index(t)) for c, t in self.cnots]

    def measured_ids(self) -> tuple[str, ...]:
        seen: list[str] = []
        for r in self.rules:
            for q in r.measured_qubits():
                if q not in seen:
                    seen.append(q)
        return tuple(seen)

    def measurement_basis_positions(self, qid: str) -> list[Basis]:
        """Every basis this qubit may be measured in across all rules."""
        out: list[Basis] = []
        for r in self.rules:
            if r.q1 == qid:
                out.append(r.b1)
            if r.q2 == qid:
                out.extend([r.b2, r.b3])  # type: ignore[list-item]
        return out


@dataclass(frozen=True)
class Violation:
    code: str
    entity: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.entity}]: {self.message}"


def parse_circuit(text: str) -> IcmCircuit:
    """Parse the ``icm v1`` format; raises IcmParseError with line numbers."""
    lines = text.splitlines()
    header_seen = False
    declared_n: int | None = None
    qubits: list[QubitDecl] = []
    cnots: list[tuple[str, str]] = []
    rules: list[MeasurementRule] = []
    outputs: list[str] | None = None
    ids: set[str] = set()

    def need(qid: str, ln: int) -> str:
        if qid not in ids:
            raise IcmParseError(f"undeclared qubit {qid!r}", ln)
        return qid

    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if not header_seen:
            if tok != ["icm", "v1"]:
                raise IcmParseError(f"expected 'icm v1' header, got {line!r}", ln)
            header_seen = True
            continue
        kw = tok[0]
        if kw == "qubits":
            if len(tok) != 2 or not tok[1].isdigit():
                raise IcmParseError("usage: qubits <count>", ln)
            declared_n = int(tok[1])
        elif kw == "io":
            if len(tok) < 2:
                raise IcmParseError("usage: io <id> [<id> ...]", ln)
            for qid in tok[1:]:
                if qid in ids:
                    raise IcmParseError(f"duplicate qubit id {qid!r}", ln)
                ids.add(qid)
                qubits.append(QubitDecl(qid, "io"))
        elif kw == "ancilla":
            # ancilla <id> <kind> init <basis>
            if len(tok) != 5 or tok[3] != "init":
                raise IcmParseError("usage: ancilla <id> <kind> init <basis>", ln)
            qid, kind, basis = tok[1], tok[2], tok[4]
            if qid in ids:
                raise IcmParseError(f"duplicate qubit id {qid!r}", ln)
            if kind not in KINDS or kind == "io":
                raise IcmParseError(f"unknown ancilla kind {kind!r}", ln)
            if basis not in BASES:
                raise IcmParseError(f"unknown init basis {basis!r}", ln)
            ids.add(qid)
            qubits.append(QubitDecl(qid, kind, basis))
        elif kw == "cnot":
            if len(tok) != 3:
                raise IcmParseError("usage: cnot <control> <target>", ln)
            c, t = need(tok[1], ln), need(tok[2], ln)
            if c == t:
                raise IcmParseError(f"cnot control equals target ({c})", ln)
            cnots.append((c, t))
        elif kw == "measure":
            rules.append(_parse_measure(tok, ln, need))
        elif kw == "out":
            if len(tok) < 2:
                raise IcmParseError("usage: out <id> [<id> ...]", ln)
            outputs = [need(q, ln) for q in tok[1:]]
        else:
            raise IcmParseError(f"unknown directive {kw!r}", ln)

    if not header_seen:
        raise IcmParseError("missing 'icm v1' header")
    if not qubits:
        raise IcmParseError("circuit declares no qubits")
    if declared_n is not None and declared_n != len(qubits):
        raise IcmParseError(
            f"qubits line says {declared_n} but {len(qubits)} qubits are declared"
        )
    try:
        return IcmCircuit(
            tuple(qubits), tuple(cnots), tuple(rules),
            tuple(outputs) if outputs is not None else None,
        )
    except IcmParseError:
        raise
    except ValueError as exc:  # pragma: no cover - defensive
        raise IcmParseError(str(exc))


def _parse_measure(tok: list[str], ln: int, need) -> MeasurementRule:
    if len(tok) == 3:
        return MeasurementRule(need(tok[1], ln), _basis(tok[2], ln))
    # measure q1 B1 ? q2 B2 : q2 B3
    if len(tok) == 9 and tok[3] == "?" and tok[6] == ":":
        q1 = need(tok[1], ln)
        q2 = need(tok[4], ln)
        if tok[7] != q2:
            raise IcmParseError(
                f"conditional branches name different qubits ({tok[4]!r} vs {tok[7]!r})", ln
            )
        try:
            return MeasurementRule(q1, _basis(tok[2], ln), q2,
                                   _basis(tok[5], ln), _basis(tok[8], ln))
        except IcmParseError as exc:
            raise IcmParseError(str(exc), ln) from None
    raise IcmParseError(
        "usage: measure <id> <B> | measure <id> <B> ? <id2> <B2> : <id2> <B3>", ln
    )


def _basis(tok: str, ln: int) -> Basis:
    if tok not in BASES:
        raise IcmParseError(f"unknown basis {tok!r}", ln)
    return tok


def serialize_circuit(c: IcmCircuit) -> str:
    """Write a circuit back out as ``icm v1`` text."""
    out = ["icm v1", f"qubits {c.n}"]
    for q in c.qubits:  # declaration order preserved so round-trips are exact
        if q.kind == "io":
            out.append(f"io {q.id}")
        else:
            out.append(f"ancilla {q.id} {q.kind} init {q.init}")
    for ctrl, tgt in c.cnots:
        out.append(f"cnot {ctrl} {tgt}")
    for r in c.rules:
        out.append(r.format())
    if c.outputs:
        out.append("out " + " ".join(c.outputs))
    return "\n".join(out) + "\n"


def teleport_rotation(c: IcmCircuit, q: QubitDecl) -> str:
    """Classify a teleport ancilla: 'init', 'measurement', 'none' or 'both'."""
    rot_init = q.init in ROTATED_BASES
    rot_meas = any(b in ROTATED_BASES for b in c.measurement_basis_positions(q.id))
    if rot_init and rot_meas:
        return "both"
    if rot_init:
        return "init"
    if rot_meas:
        return "measurement"
    return "none"


def validate_icm(c: IcmCircuit) -> list[Violation]:
    """Check ICM invariants; returns structured violations (empty == valid)."""
    out: list[Violation] = []
    ids = {q.id for q in c.qubits}
    if len(ids) != len(c.qubits):
        out.append(Violation("duplicate-id", "circuit", "duplicate qubit ids"))

    for q in c.qubits:
        if q.kind == "computational" and q.init not in PLAIN_BASES:
            out.append(Violation(
                "computational-init", q.id,
                f"computational ancillae initialise in X or Z, not {q.init}"))

    for i, (ctrl, tgt) in enumerate(c.cnots):
        for qid in (ctrl, tgt):
            if qid not in ids:
                out.append(Violation("undeclared", f"cnot[{i}]", f"unknown qubit {qid!r}"))
        if ctrl == tgt:
            out.append(Violation("cnot-self", f"cnot[{i}]", f"control equals target ({ctrl})"))

    seen_q1: dict[str, int] = {}
    conditioned: dict[str, int] = {}
    for i, r in enumerate(c.rules):
        for qid in r.measured_qubits():
            if qid not in ids:
                out.append(Violation("undeclared", f"rule[{i}]", f"unknown qubit {qid!r}"))
        if r.q1 in seen_q1:
            out.append(Violation(
                "remeasured", r.q1,
                f"qubit measured by rule {seen_q1[r.q1]} and again by rule {i}"))
        seen_q1[r.q1] = i
        if r.q2 is not None:
            if r.q2 in conditioned:
                out.append(Violation(
                    "reconditioned", r.q2,
                    f"qubit conditioned by rules {conditioned[r.q2]} and {i}"))
            conditioned[r.q2] = i

    # a conditioned qubit must be measured by a strictly later rule or not at all
    for q2, i in conditioned.items():
        j = seen_q1.get(q2)
        if j is not None and j <= i:
            out.append(Violation(
                "condition-order", q2,
                f"conditioned by rule {i} but measured by rule {j} (must be later)"))

    for q in c.qubits:
        if q.kind == "teleport" and teleport_rotation(c, q) == "both":
            out.append(Violation(
                "doubly-rotated", q.id,
                f"teleport ancilla has rotated init {q.init} and a rotated measurement"))

    return out
