"""Compile small Clifford+T gate lists into ICM circuits.

Every gate becomes a fixed teleportation gadget; the classical side
effect of each gadget is a Pauli byproduct whose exponents are affine
GF(2) functions of the measurement outcomes.  The compiler tracks one
(x, z) pair of affine forms per logical qubit so the byproduct never
has to be applied physically, and emits the outcome-conditioned
measurement rules needed to keep T gadgets deterministic.

Gadget corpus (carrier w; outcomes are 0 for the +1 eigenvalue):

rotated-measurement flavour
    p/pdg  a init Z, CNOT(w,a),  measure a Y     z ^= m+1 / m
    sx     a init X, CNOT(a,w),  measure a Y     x ^= m        (H stage)
    t/tdg  a1,a2 init Z, CNOT(w,a1), CNOT(a1,a2),
           measure w A, a1 Y (t) or X (tdg); carrier moves to a2
                                                 z ^= m_w+m_a1+1 / +0

rotated-initialisation flavour
    p/pdg  a init Y, CNOT(w,a),  measure a Z     z ^= m / m+1
    sx     a init Y, CNOT(a,w),  measure a X     x ^= m+1      (H stage)
    t/tdg  a1 init A, a2 init Y, CNOT(a1,w), CNOT(a1,a2),
           measure w Z then a2 in X/Z (t) or Z/X (tdg) conditioned on w;
           carrier moves to a1
                                                 x ^= m_w
                                                 z ^= m_w+m_a2 / +1

h in the rotated-initialisation flavour compiles as the stage triple
p; sx; p (P sqrtX P is proportional to H).  In the rotated-measurement
flavour it instead starts with a carrier-moving stage -- a init Y,
CNOT(w, a), measure w in Y -- which realises P.H with byproduct (XZ)^m;
the following Pdg stage completes H and cancels the Z half of that
byproduct, so the final X frame holds a single outcome variable.

A t gadget only tolerates an incoming X frame of at most one outcome
variable, absorbed by conditioning the gadget's rotated measurement
basis (Y vs X, i.e. t vs tdg structure) on that variable's outcome,
using T X = (phase) X T^dag.  In the rotated-initialisation flavour the
conditional slot is already spent on the carrier measurement, so any
X-frame variable there raises CompileError.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .circuit import IcmCircuit, MeasurementRule, QubitDecl


GATES_1Q = ("h", "p", "pdg", "t", "tdg", "x", "z")
FLAVOURS = ("rotated_meas", "rotated_init")


class CompileError(Exception):
    pass


@dataclass(frozen=True)
class GateList:
    n: int
    gates: tuple[tuple, ...]  # ("t", 0) or ("cnot", 0, 1), 0-based

    def __post_init__(self) -> None:
        for g in self.gates:
            name, *args = g
            if name == "cnot":
                ok = len(args) == 2 and args[0] != args[1]
            else:
                ok = name in GATES_1Q and len(args) == 1
            if not ok or any(not 0 <= a < self.n for a in args):
                raise CompileError(f"bad gate {g!r}")


def parse_gates(text: str) -> GateList:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "gates v1":
        raise CompileError("expected 'gates v1' header")
    if len(lines) < 2 or not lines[1].startswith("qubits "):
        raise CompileError("expected 'qubits N' after header")
    try:
        n = int(lines[1].split()[1])
    except (IndexError, ValueError):
        raise CompileError(f"bad qubit count line {lines[1]!r}") from None
    if n < 1:
        raise CompileError("need at least one qubit")
    gates = []
    for ln in lines[2:]:
        tok = ln.split()
        try:
            gates.append((tok[0], *(int(t) - 1 for t in tok[1:])))
        except ValueError:
            raise CompileError(f"bad gate line {ln!r}") from None
    return GateList(n, tuple(gates))


@dataclass
class _Form:
    """Affine GF(2) form: const xor (sum of outcome variables)."""

    vars: frozenset[str] = frozenset()
    const: int = 0

    def xor(self, other: "_Form") -> "_Form":
        return _Form(self.vars ^ other.vars, self.const ^ other.const)

    def evaluate(self, outcomes: dict[str, int]) -> int:
        return (self.const + sum(outcomes[v] for v in self.vars)) & 1

    @property
    def zero(self) -> bool:
        return not self.vars and self.const == 0


def _v(var: str) -> _Form:
    return _Form(frozenset([var]))


@dataclass(frozen=True)
class CompileResult:
    circuit: IcmCircuit
    out_ports: tuple[str, ...]  # carrier of each logical qubit, in order
    x_forms: tuple[_Form, ...]
    z_forms: tuple[_Form, ...]
    exact: bool = True  # False when compiled without corrections

    def frame_for(self, outcomes: dict[str, int]) -> str:
        letters = []
        for x, z in zip(self.x_forms, self.z_forms):
            xb, zb = x.evaluate(outcomes), z.evaluate(outcomes)
            letters.append("IZXY"[2 * xb + zb])
        return "".join(letters)

    def frame_map(self) -> dict[frozenset, str]:
        """Outcome-keyed frame table in the shape channel_choi accepts."""
        measured = list(self.circuit.measured_ids())
        if len(measured) > 16:
            raise CompileError("frame table too large to enumerate")
        table = {}
        for bits in itertools.product((0, 1), repeat=len(measured)):
            o = dict(zip(measured, bits))
            table[frozenset(o.items())] = self.frame_for(o)
        return table


@dataclass
class _Emitter:
    flavour: str
    corrections: bool
    qubits: list[QubitDecl] = field(default_factory=list)
    cnots: list[tuple[str, str]] = field(default_factory=list)
    rules: list[MeasurementRule] = field(default_factory=list)
    # rule index per outcome variable, for conditional-basis upgrades
    rule_of: dict[str, int] = field(default_factory=dict)
    counter: int = 0

    def fresh(self, kind: str, init: str) -> str:
        self.counter += 1
        qid = f"a{self.counter}"
        self.qubits.append(QubitDecl(qid, kind, init))
        return qid

    def measure(self, qid: str, basis: str) -> str:
        self.rule_of[qid] = len(self.rules)
        self.rules.append(MeasurementRule(qid, basis))
        return qid

    def condition(self, var: str, anc: str, b2: str, b3: str) -> None:
        """Upgrade the rule measuring `var` so it also fixes `anc`'s basis."""
        idx = self.rule_of.get(var)
        if idx is None or self.rules[idx].conditional:
            raise CompileError(f"cannot condition twice on outcome of {var!r}")
        prev = self.rules[idx]
        self.rules[idx] = MeasurementRule(prev.q1, prev.b1, anc, b2, b3)


def compile_to_icm(
    g: GateList, flavour: str = "rotated_meas", corrections: bool = True
) -> CompileResult:
    if flavour not in FLAVOURS:
        raise CompileError(f"unknown flavour {flavour!r} (want one of {FLAVOURS})")
    em = _Emitter(flavour, corrections)
    carriers = [f"q{i + 1}" for i in range(g.n)]
    for qid in carriers:
        em.qubits.append(QubitDecl(qid, "io"))
    xf = [_Form() for _ in range(g.n)]
    zf = [_Form() for _ in range(g.n)]

    for gate in g.gates:
        name, *args = gate
        if name == "x":
            xf[args[0]] = xf[args[0]].xor(_Form(const=1))
        elif name == "z":
            zf[args[0]] = zf[args[0]].xor(_Form(const=1))
        elif name == "cnot":
            c, t = args
            em.cnots.append((carriers[c], carriers[t]))
            xf[t] = xf[t].xor(xf[c])
            zf[c] = zf[c].xor(zf[t])
        elif name in ("p", "pdg"):
            _emit_p(em, carriers, xf, zf, args[0], dagger=name == "pdg")
        elif name == "h":
            _emit_h(em, carriers, xf, zf, args[0])
        else:  # t / tdg
            _emit_t(em, carriers, xf, zf, args[0], dagger=name == "tdg")

    return CompileResult(
        IcmCircuit(tuple(em.qubits), tuple(em.cnots), tuple(em.rules),
                   outputs=tuple(carriers)),
        tuple(carriers),
        tuple(xf),
        tuple(zf),
        exact=corrections,
    )


def _emit_p(em, carriers, xf, zf, q, dagger):
    w = carriers[q]
    zf[q] = zf[q].xor(xf[q])  # P X Pdg = iXZ
    if em.flavour == "rotated_meas":
        a = em.fresh("teleport", "Z")
        em.cnots.append((w, a))
        em.measure(a, "Y")
        zf[q] = zf[q].xor(_v(a)).xor(_Form(const=0 if dagger else 1))
    else:
        a = em.fresh("teleport", "Y")
        em.cnots.append((w, a))
        em.measure(a, "Z")
        zf[q] = zf[q].xor(_v(a)).xor(_Form(const=1 if dagger else 0))


def _emit_h(em, carriers, xf, zf, q):
    if em.flavour == "rotated_meas":
        # Stage 1 teleports through |Y> and measures the old carrier in Y,
        # realising P.H with the correlated byproduct (XZ)^m; stage 2 (Pdg)
        # completes H and its conjugation cancels the Z half of that
        # byproduct, leaving a single outcome variable in the X frame.
        # Stage 3 teleports back onto a plain-init carrier so later gadgets
        # may measure it in a rotated basis.
        w = carriers[q]
        a1 = em.fresh("teleport", "Y")
        em.cnots.append((w, a1))
        m1 = em.measure(w, "Y")
        carriers[q] = a1
        xf[q], zf[q] = zf[q].xor(_v(m1)), xf[q].xor(zf[q]).xor(_v(m1))
        _emit_p(em, carriers, xf, zf, q, dagger=True)
        a3 = em.fresh("teleport", "Z")
        em.cnots.append((a1, a3))
        m3 = em.measure(a1, "X")
        carriers[q] = a3
        zf[q] = zf[q].xor(_v(m3))
    else:
        _emit_p(em, carriers, xf, zf, q, dagger=False)
        _emit_sx(em, carriers, xf, zf, q)
        _emit_p(em, carriers, xf, zf, q, dagger=False)


def _emit_sx(em, carriers, xf, zf, q):
    w = carriers[q]
    xf[q] = xf[q].xor(zf[q])  # sqrtX Z sqrtXdg = iXZ
    if em.flavour == "rotated_meas":
        a = em.fresh("teleport", "X")
        em.cnots.append((a, w))
        em.measure(a, "Y")
        xf[q] = xf[q].xor(_v(a))
    else:
        a = em.fresh("teleport", "Y")
        em.cnots.append((a, w))
        em.measure(a, "X")
        xf[q] = xf[q].xor(_v(a)).xor(_Form(const=1))


def _emit_t(em, carriers, xf, zf, q, dagger):
    w = carriers[q]
    d = 1 if dagger else 0
    x = xf[q]
    if len(x.vars) > 1:
        raise CompileError(
            "t gate after an X frame spanning several outcomes; no single "
            "measurement rule can select the basis from an outcome parity"
        )
    # T X = (phase) X Tdg, so a one-bit X frame flips which structure to
    # emit; with an outcome variable in play the flip rides on that rule.
    eff = d ^ x.const

    if em.flavour == "rotated_meas":
        a1 = em.fresh("teleport", "Z")
        a2 = em.fresh("teleport", "Z")
        em.cnots.append((w, a1))
        em.cnots.append((a1, a2))
        if not em.corrections:
            em.measure(w, "A")
            carriers[q] = a2
            return
        mw = em.measure(w, "A")
        basis = lambda e: "X" if e else "Y"
        if x.vars:
            (var,) = x.vars
            em.condition(var, a1, basis(eff), basis(eff ^ 1))
        else:
            em.measure(a1, basis(eff))
        zf[q] = zf[q].xor(_v(mw)).xor(_v(a1)).xor(_Form(x.vars, 1 ^ d ^ x.const))
        carriers[q] = a2
    else:
        if x.vars:
            raise CompileError(
                "t gate after an X-type frame is not expressible in the "
                "rotated-initialisation flavour; the carrier measurement "
                "already consumes the one conditional slot"
            )
        a1 = em.fresh("teleport", "A")
        if not em.corrections:
            em.cnots.append((a1, w))
            em.measure(w, "Z")
            carriers[q] = a1
            return
        a2 = em.fresh("teleport", "Y")
        em.cnots.append((a1, w))
        em.cnots.append((a1, a2))
        b2, b3 = ("Z", "X") if eff else ("X", "Z")
        em.rule_of[w] = len(em.rules)
        em.rules.append(MeasurementRule(w, "Z", a2, b2, b3))
        xf[q] = xf[q].xor(_v(w))
        zf[q] = zf[q].xor(_v(w)).xor(_v(a2)).xor(_Form(const=eff))
        carriers[q] = a1
