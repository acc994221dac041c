"""Phase-gadget circuits: interleaved Z/X gadget entries over n qubits.

A gadget entry is (basis, angle, legs). Legs are a GF(2) vector with bit
q = qubit q. A circuit of d entries projects onto a pair of leg matrices
(L_Z, L_X) whose columns are the legs of the Z (resp. X) entries in
order, plus the basis/angle sequence that the optimizer never touches.

Sign convention (asserted against the oracle): a gadget applies
exp(-i*theta/2) to basis states with even parity over its legs and
exp(+i*theta/2) to odd parity, matching RZ = diag(e^{-i t/2}, e^{+i t/2}).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuits import ParseError, wrap_angle
from .gf2 import BitMatrix, BitVec, inverse_transpose, mat_vec

log = logging.getLogger(__name__)

ZERO_ANGLE_TOL = 1e-12


def is_zero_angle(angle: float, tol: float = ZERO_ANGLE_TOL) -> bool:
    """True when the angle is 0 mod 2*pi within tolerance."""
    return abs(math.remainder(angle, 2.0 * math.pi)) <= tol


@dataclass(frozen=True)
class GadgetEntry:
    basis: str
    angle: float
    legs: BitVec

    def __post_init__(self):
        if self.basis not in ("Z", "X"):
            raise ValueError(f"basis must be 'Z' or 'X', got {self.basis!r}")
        if not math.isfinite(self.angle):
            raise ValueError("gadget angle must be finite")
        if self.legs.popcount() == 0:
            raise ValueError("gadgets need at least one leg")


def zgadget(angle: float, legs: BitVec | str) -> GadgetEntry:
    if isinstance(legs, str):
        legs = BitVec.from_string(legs)
    return GadgetEntry("Z", float(angle), legs)


def xgadget(angle: float, legs: BitVec | str) -> GadgetEntry:
    if isinstance(legs, str):
        legs = BitVec.from_string(legs)
    return GadgetEntry("X", float(angle), legs)


@dataclass(frozen=True)
class GadgetCircuit:
    n_qubits: int
    entries: tuple[GadgetEntry, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("gadget circuits need at least one qubit")
        for e in self.entries:
            if e.legs.n != self.n_qubits:
                raise ValueError("leg vector length must match qubit count")

    def __len__(self) -> int:
        return len(self.entries)


def gadget_circuit(
    n_qubits: int, specs: Iterable[tuple[str, float, BitVec | str]]
) -> GadgetCircuit:
    """Assemble a circuit, dropping zero-leg specs (pure global phases)."""
    entries = []
    for basis, angle, legs in specs:
        if isinstance(legs, str):
            legs = BitVec.from_string(legs)
        if legs.popcount() == 0:
            log.debug("dropping zero-leg %s gadget (angle %g): global phase only", basis, angle)
            continue
        entries.append(GadgetEntry(basis, float(angle), legs))
    return GadgetCircuit(n_qubits, tuple(entries))


def leg_matrices(g: GadgetCircuit) -> tuple[BitMatrix, BitMatrix]:
    """(L_Z, L_X) with column j the legs of the j-th Z (resp. X) entry."""
    z_cols = [e.legs for e in g.entries if e.basis == "Z"]
    x_cols = [e.legs for e in g.entries if e.basis == "X"]
    return (
        BitMatrix.from_cols(g.n_qubits, z_cols),
        BitMatrix.from_cols(g.n_qubits, x_cols),
    )


def basis_sequence(g: GadgetCircuit) -> tuple[tuple[str, float], ...]:
    """The interleaving and angle data untouched by the optimizer."""
    return tuple((e.basis, e.angle) for e in g.entries)


def from_leg_matrices(
    lz: BitMatrix, lx: BitMatrix, sequence: Sequence[tuple[str, float]]
) -> GadgetCircuit:
    """Rebuild a gadget circuit from leg matrices and the basis/angle sequence."""
    if lz.rows != lx.rows:
        raise ValueError("leg matrices must have matching qubit counts")
    d_z = sum(1 for b, _ in sequence if b == "Z")
    d_x = len(sequence) - d_z
    if (d_z, d_x) != (lz.cols, lx.cols):
        raise ValueError("sequence does not match leg matrix widths")
    zi = xi = 0
    entries = []
    for basis, angle in sequence:
        if basis == "Z":
            legs = lz.col(zi)
            zi += 1
        else:
            legs = lx.col(xi)
            xi += 1
        entries.append(GadgetEntry(basis, angle, legs))
    return GadgetCircuit(lz.rows, tuple(entries))


def apply_action(g: GadgetCircuit, c: BitMatrix) -> GadgetCircuit:
    """Act with C on Z legs and (C^T)^-1 on X legs; order and angles kept."""
    if not c.is_square() or c.rows != g.n_qubits:
        raise ValueError("action matrix must be n x n")
    c_x = inverse_transpose(c)  # raises NotInvertibleError for singular C
    entries = []
    for e in g.entries:
        m = c if e.basis == "Z" else c_x
        entries.append(GadgetEntry(e.basis, e.angle, mat_vec(m, e.legs)))
    return GadgetCircuit(g.n_qubits, tuple(entries))


def commutes(a: GadgetEntry, b: GadgetEntry) -> bool:
    """Same-basis gadgets always commute; mixed pairs iff shared legs are even."""
    if a.legs.n != b.legs.n:
        raise ValueError("gadgets act on different qubit counts")
    if a.basis == b.basis:
        return True
    return (a.legs & b.legs).popcount() % 2 == 0


def fuse_adjacent(g: GadgetCircuit, tol: float = ZERO_ANGLE_TOL) -> GadgetCircuit:
    """Merge equal-(basis, legs) entries that commuting swaps can join.

    Greedy bubble pass to a fixpoint: entry j is pulled next to entry i
    when everything between commutes with it; merged angles that vanish
    mod 2*pi drop the entry. Never increases the entry count.
    """
    entries = list(g.entries)
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(entries):
            ei = entries[i]
            j = i + 1
            # Walk right while everything commutes with entry i; the first
            # equal-(basis, legs) entry found this way can be pulled adjacent.
            while j < len(entries):
                ej = entries[j]
                if ej.basis == ei.basis and ej.legs == ei.legs:
                    merged = ei.angle + ej.angle
                    del entries[j]
                    if is_zero_angle(merged, tol):
                        del entries[i]
                        i -= 1
                    else:
                        entries[i] = GadgetEntry(ei.basis, merged, ei.legs)
                    changed = True
                    break
                if not commutes(ej, ei):
                    break
                j += 1
            i += 1
    return GadgetCircuit(g.n_qubits, tuple(entries))


def parse_gadgets(text: str) -> GadgetCircuit:
    """Parse the gadget text format (qubits / zgadget / xgadget lines)."""
    n_qubits = None
    specs: list[tuple[str, float, BitVec]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.lower().split()
        head, args = parts[0], parts[1:]
        if head == "qubits":
            if n_qubits is not None:
                raise ParseError(lineno, "duplicate qubits declaration")
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError(lineno, "qubits expects one positive integer")
            n_qubits = int(args[0])
            continue
        if head not in ("zgadget", "xgadget"):
            raise ParseError(lineno, f"unknown construct {head!r}")
        if n_qubits is None:
            raise ParseError(lineno, "expected 'qubits <n>' before gadgets")
        if len(args) != 2:
            raise ParseError(lineno, f"{head} expects an angle and a bitstring")
        try:
            angle = float(args[0])
        except ValueError:
            raise ParseError(lineno, f"bad angle {args[0]!r}") from None
        if not math.isfinite(angle):
            raise ParseError(lineno, f"non-finite angle {args[0]}")
        if len(args[1]) != n_qubits or any(ch not in "01" for ch in args[1]):
            raise ParseError(lineno, f"bitstring must be {n_qubits} characters of 0/1")
        legs = BitVec.from_string(args[1])
        specs.append(("Z" if head == "zgadget" else "X", angle, legs))
    if n_qubits is None:
        raise ParseError(1, "missing 'qubits <n>' declaration")
    return gadget_circuit(n_qubits, specs)


def serialize_gadgets(g: GadgetCircuit) -> str:
    lines = [f"qubits {g.n_qubits}"]
    for e in g.entries:
        head = "zgadget" if e.basis == "Z" else "xgadget"
        lines.append(f"{head} {e.angle!r} {e.legs.to_string()}")
    return "\n".join(lines) + "\n"


def normalized(g: GadgetCircuit) -> GadgetCircuit:
    """Wrap every angle to (-pi, pi]; same unitary up to global phase."""
    return GadgetCircuit(
        g.n_qubits,
        tuple(GadgetEntry(e.basis, wrap_angle(e.angle), e.legs) for e in g.entries),
    )
