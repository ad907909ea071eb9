"""Phase-tracked Pauli operators and truth-table row algebra.

Operators are stored in symplectic form: an ``x`` bit-mask, a ``z``
bit-mask (bit ``k`` refers to qubit ``k``, qubit 0 is the leftmost
letter in text form), and a global phase as a power of ``i``.  A qubit
whose x and z bits are both set carries the literal letter Y, with the
convention ``Y = iXZ`` so that ``X*Z = -iY``.

Truth-table rows pair a canonical (phase-free) input operator with an
output operator and a +-1 sign; the sign is the phase quotient picked
up between output product and input product when rows are multiplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

_PHASE_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


class PauliError(ValueError):
    """Malformed Pauli text or an operation on incompatible operands."""


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli ``i**phase * (L_0 x L_1 x ... x L_{n-1})``."""

    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PauliError(f"operator needs at least one qubit, got n={self.n}")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise PauliError("x/z bits outside the declared qubit range")
        object.__setattr__(self, "phase", self.phase % 4)

    def letter(self, k: int) -> str:
        return _BITS_LETTER[(self.x >> k) & 1, (self.z >> k) & 1]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def weight(self) -> int:
        return ((self.x | self.z)).bit_count()

    def canonical(self) -> "PauliOperator":
        """The same letters with the global phase dropped."""
        return PauliOperator(self.n, self.x, self.z, 0)

    def __str__(self) -> str:
        return pauli_format(self)


def pauli_parse(text: str, n: int | None = None) -> PauliOperator:
    """Parse text such as ``XIZ``, ``-iY`` or ``+ XX`` into an operator.

    Raises PauliError naming the offending column for bad letters.
    """
    s = text.strip().replace(" ", "")
    phase = 0
    for prefix in ("-i", "+i", "i", "-", "+"):
        if s.startswith(prefix) and len(s) > len(prefix):
            phase = _PREFIX_PHASE[prefix]
            s = s[len(prefix):]
            break
    if not s:
        raise PauliError(f"empty Pauli string in {text!r}")
    if n is not None and len(s) != n:
        raise PauliError(f"expected {n} letters, got {len(s)} in {text!r}")
    x = z = 0
    for k, ch in enumerate(s):
        if ch not in _LETTER_BITS:
            raise PauliError(f"bad Pauli letter {ch!r} at column {k + 1} of {text!r}")
        xb, zb = _LETTER_BITS[ch]
        x |= xb << k
        z |= zb << k
    return PauliOperator(len(s), x, z, phase)


def pauli_format(p: PauliOperator) -> str:
    """Render an operator as letters with an ``i``/``-``/``-i`` prefix."""
    return _PHASE_PREFIX[p.phase] + "".join(p.letter(k) for k in range(p.n))


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Product ``a * b`` with the full power-of-i phase."""
    if a.n != b.n:
        raise PauliError(f"cannot multiply operators on {a.n} and {b.n} qubits")
    xa, za, xb, zb = a.x, a.z, b.x, b.z
    # letter products contributing i: ZX, YZ, XY; contributing -i: XZ, ZY, YX
    plus_i = (~xa & za & xb & ~zb) | (xa & za & ~xb & zb) | (xa & ~za & xb & zb)
    minus_i = (xa & ~za & ~xb & zb) | (~xa & za & xb & zb) | (xa & za & xb & ~zb)
    phase = a.phase + b.phase + plus_i.bit_count() + 3 * minus_i.bit_count()
    return PauliOperator(a.n, xa ^ xb, za ^ zb, phase % 4)


def conjugate_cnot(p: PauliOperator, control: int, target: int) -> PauliOperator:
    """Conjugate ``p`` by a single CNOT: ``CNOT . p . CNOT``."""
    if control == target:
        raise PauliError("cnot control and target must differ")
    xc = (p.x >> control) & 1
    zc = (p.z >> control) & 1
    xt = (p.x >> target) & 1
    zt = (p.z >> target) & 1
    x = p.x ^ (xc << target)
    z = p.z ^ (zt << control)
    phase = p.phase + 2 * (xc & zt & (xt ^ zc ^ 1))
    return PauliOperator(p.n, x, z, phase % 4)


def conjugate_circuit(p: PauliOperator, cnots: Iterable[tuple[int, int]]) -> PauliOperator:
    """Conjugate ``p`` through a CNOT list applied in temporal order."""
    for c, t in cnots:
        p = conjugate_cnot(p, c, t)
    return p


# -- word-parallel batch conjugation ----------------------------------------
#
# Rows are held as (R, n) uint8 bit arrays so a whole table moves through
# one CNOT with three vectorised column operations.

def conjugate_rows_batch(
    xs: np.ndarray, zs: np.ndarray, signs: np.ndarray, cnots: Sequence[tuple[int, int]]
) -> None:
    """In-place conjugation of R rows at once; ``signs`` holds 0/1 flip bits."""
    for c, t in cnots:
        xc = xs[:, c]
        zt = zs[:, t]
        signs ^= xc & zt & (xs[:, t] ^ zs[:, c] ^ 1)
        xs[:, t] ^= xc
        zs[:, c] ^= zt


def rows_to_bits(paulis: Sequence[PauliOperator], n: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.zeros((len(paulis), n), dtype=np.uint8)
    zs = np.zeros((len(paulis), n), dtype=np.uint8)
    for i, p in enumerate(paulis):
        for k in range(n):
            xs[i, k] = (p.x >> k) & 1
            zs[i, k] = (p.z >> k) & 1
    return xs, zs


def bits_to_pauli(xrow: np.ndarray, zrow: np.ndarray) -> PauliOperator:
    x = z = 0
    for k in range(xrow.shape[0]):
        x |= int(xrow[k]) << k
        z |= int(zrow[k]) << k
    return PauliOperator(xrow.shape[0], x, z, 0)


# -- truth-table rows --------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    """A stabiliser truth-table row ``sign * (input -> output)``.

    Both operators are canonical (phase 0); ``sign`` is +1 or -1.
    ``provenance`` optionally records the seeding qubit and basis.
    """

    input: PauliOperator
    output: PauliOperator
    sign: int = 1
    provenance: tuple[str, str] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.input.n != self.output.n:
            raise PauliError("row input and output act on different qubit counts")
        if self.input.phase or self.output.phase:
            raise PauliError("row operators must be canonical (phase-free)")
        if self.sign not in (1, -1):
            raise PauliError(f"row sign must be +-1, got {self.sign}")

    def format(self) -> str:
        sign = "+" if self.sign == 1 else "-"
        return f"{sign} {pauli_format(self.input)} -> {pauli_format(self.output)}"

    def __str__(self) -> str:
        return self.format()


def row_parse(text: str, n: int | None = None) -> TableRow:
    """Parse ``+ XII -> XXX`` into a TableRow."""
    parts = text.split("->")
    if len(parts) != 2:
        raise PauliError(f"row needs exactly one '->': {text!r}")
    lhs = parts[0].strip()
    sign = 1
    if lhs.startswith("+"):
        lhs = lhs[1:].strip()
    elif lhs.startswith("-"):
        sign = -1
        lhs = lhs[1:].strip()
    pin = pauli_parse(lhs, n)
    pout = pauli_parse(parts[1].strip(), pin.n)
    if pin.phase or pout.phase:
        raise PauliError(f"row operators must not carry i phases: {text!r}")
    return TableRow(pin, pout, sign)


def row_multiply(r1: TableRow, r2: TableRow) -> TableRow:
    """Row product: canonicalised input product, output product, merged sign.

    The relative phase between the two products must be real (+-1);
    rows drawn from a common circuit always satisfy this.
    """
    pin = pauli_mul(r1.input, r2.input)
    pout = pauli_mul(r1.output, r2.output)
    rel = (pout.phase - pin.phase) % 4
    if rel not in (0, 2):
        raise PauliError("row product has imaginary relative phase; rows are incompatible")
    sign = r1.sign * r2.sign * (1 if rel == 0 else -1)
    return TableRow(pin.canonical(), pout.canonical(), sign)


@dataclass(frozen=True)
class FormalSuperposition:
    """Display-only weighted sum of rows, e.g. ``(S3 + S1)/sqrt(2)``."""

    terms: tuple[tuple[float, TableRow], ...]

    def format(self) -> str:
        if len(self.terms) == 1:
            coeff, row = self.terms[0]
            inner = f"({row.format()})"
            return inner if coeff == 1 else f"{coeff:g}*{inner}"
        inner = " + ".join(f"({row.format()})" for _, row in self.terms)
        return f"({inner})/sqrt(2)"

    def __str__(self) -> str:
        return self.format()


def row_superpose(r1: TableRow, r2: TableRow) -> FormalSuperposition:
    """Formal superposition ``(r1 + r2)/sqrt(2)``; equal rows collapse."""
    if r1 == r2:
        return FormalSuperposition(((1.0, r1),))
    w = 1.0 / np.sqrt(2.0)
    return FormalSuperposition(((w, r1), (w, r2)))
