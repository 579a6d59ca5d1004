"""Binary symplectic Pauli algebra with phase tracking.

An operator is ``i**phase * prod_q X_q**x_q Z_q**z_q`` with X written before
Z on every qubit. ``x`` and ``z`` are int bitsets (bit q is site q). In this
normal form an operator is Hermitian exactly when ``phase`` has the parity of
the number of Y sites, which is what :meth:`PauliOperator.is_hermitian` checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Sequence

import numpy as np

from . import gf2
from .lattice import Lattice


class StabilizerError(ValueError):
    pass


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self) -> None:
        limit = 1 << self.n
        if self.x >= limit or self.z >= limit or self.x < 0 or self.z < 0:
            raise StabilizerError(f"bitsets do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_bits(cls, x: Sequence[int], z: Sequence[int], phase: int = 0) -> "PauliOperator":
        if len(x) != len(z):
            raise StabilizerError("x and z must have equal length")
        return cls(len(x), gf2.bits_to_int(x), gf2.bits_to_int(z), phase)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parse ``"+XZIY"``, ``"-iZZ"`` and friends (site 1 leftmost)."""
        sign = 0
        body = text.strip()
        for prefix, s in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2), ("i", 1)):
            if body.startswith(prefix):
                sign, body = s, body[len(prefix):]
                break
        x = z = 0
        n_y = 0
        for q, ch in enumerate(body):
            if ch == "X":
                x |= 1 << q
            elif ch == "Z":
                z |= 1 << q
            elif ch == "Y":
                x |= 1 << q
                z |= 1 << q
                n_y += 1
            elif ch not in "I_.":
                raise StabilizerError(f"bad Pauli character {ch!r} in {text!r}")
        # Y = i X Z, so each Y adds one power of i to the normal form
        return cls(len(body), x, z, sign + n_y)

    @property
    def x_bits(self) -> np.ndarray:
        return np.array(gf2.int_to_bits(self.x, self.n), dtype=np.uint8)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array(gf2.int_to_bits(self.z, self.n), dtype=np.uint8)

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def num_y(self) -> int:
        return gf2.popcount(self.x & self.z)

    @property
    def sign_exp(self) -> int:
        """Power of i in front of the {I,X,Y,Z} product form."""
        return (self.phase - self.num_y) % 4

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if not self.is_hermitian():
            raise StabilizerError("non-Hermitian operator has no real sign")
        return 1 if self.sign_exp == 0 else -1

    def is_hermitian(self) -> bool:
        return (self.phase - self.num_y) % 2 == 0

    def symplectic(self) -> int:
        """(x|z) packed into one int: x in the low n bits, z above."""
        return self.x | (self.z << self.n)

    def commutes(self, other: "PauliOperator") -> bool:
        return (gf2.popcount(self.x & other.z) + gf2.popcount(self.z & other.x)) % 2 == 0

    def pauli_at(self, q: int) -> str:
        return "IXZY"[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    def letters(self) -> str:
        return "".join(self.pauli_at(q) for q in range(self.n))

    def __str__(self) -> str:
        return ("+", "+i", "-", "-i")[self.sign_exp] + self.letters()

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def to_dict(self) -> dict:
        return {
            "x": "".join(str(b) for b in gf2.int_to_bits(self.x, self.n)),
            "z": "".join(str(b) for b in gf2.int_to_bits(self.z, self.n)),
            "phase": self.phase,
            "text": str(self),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PauliOperator":
        if "x" in d:
            return cls.from_bits([int(c) for c in d["x"]], [int(c) for c in d["z"]],
                                 int(d.get("phase", 0)))
        return cls.from_string(d["text"])


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Product ``p * q``; each site with p.z = q.x = 1 contributes Z X = -X Z."""
    if p.n != q.n:
        raise StabilizerError(f"length mismatch: {p.n} vs {q.n}")
    phase = p.phase + q.phase + 2 * gf2.popcount(p.z & q.x)
    return PauliOperator(p.n, p.x ^ q.x, p.z ^ q.z, phase)


@dataclass(frozen=True)
class StabilizerSet:
    ops: tuple
    lattice: Lattice

    def __post_init__(self) -> None:
        ops = tuple(self.ops)
        for op in ops:
            if op.n != self.lattice.num_sites:
                raise StabilizerError(
                    f"operator on {op.n} qubits does not fit a {self.lattice.num_sites}-site lattice")
        object.__setattr__(self, "ops", ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self) -> Iterator[PauliOperator]:
        return iter(self.ops)

    def __getitem__(self, i):
        return self.ops[i]

    def commuting(self) -> bool:
        return all(a.commutes(b) for i, a in enumerate(self.ops) for b in self.ops[i + 1:])

    def in_canonical_group(self) -> bool:
        """Every element equals (with sign) a product of canonical generators."""
        return all(in_canonical_group(op, self.lattice) for op in self.ops)

    def is_generating(self) -> bool:
        return gf2_rank(self) == self.lattice.num_sites and self.in_canonical_group()

    def to_dict(self) -> dict:
        return {"lattice": self.lattice.to_dict(), "operators": [op.to_dict() for op in self.ops]}

    @classmethod
    def from_dict(cls, d: dict, lattice: Lattice | None = None) -> "StabilizerSet":
        from .lattice import build_lattice

        lat = lattice if lattice is not None else build_lattice(d["lattice"])
        return cls(tuple(PauliOperator.from_dict(o) for o in d["operators"]), lat)


def canonical_operator(lattice: Lattice, a: int) -> PauliOperator:
    return PauliOperator(lattice.num_sites, 1 << a, lattice.neighbor_masks[a], 0)


def canonical_set(lattice: Lattice) -> StabilizerSet:
    """X on each site, Z on its neighbours (any weight > 0 is a neighbour)."""
    return StabilizerSet(tuple(canonical_operator(lattice, a) for a in range(lattice.num_sites)), lattice)


def product_of_sites(lattice: Lattice, sites: int) -> PauliOperator:
    """Product of the canonical generators selected by the bitset ``sites``."""
    op = PauliOperator.identity(lattice.num_sites)
    for a in gf2.iter_bits(sites):
        op = multiply(op, canonical_operator(lattice, a))
    return op


def in_canonical_group(op: PauliOperator, lattice: Lattice) -> bool:
    """Membership including the sign: the X part fixes the generator subset."""
    return product_of_sites(lattice, op.x) == op


def transform_set(stabs: StabilizerSet, m) -> StabilizerSet:
    """Element j is the ascending-k product of ops[k] over m[j][k] == 1."""
    m = np.asarray(m)
    n = len(stabs)
    if m.shape != (n, n):
        raise StabilizerError(f"transform matrix must be {n}x{n}, got {m.shape}")
    if not np.all((m == 0) | (m == 1)):
        raise StabilizerError("transform matrix must be binary")
    rows = [gf2.bits_to_int(row) for row in m]
    r = gf2.rank(rows)
    if r != n:
        raise StabilizerError(f"transform matrix is singular over GF(2): rank {r} < {n}")
    out = []
    for row in m:
        op = PauliOperator.identity(stabs.lattice.num_sites)
        for k in np.flatnonzero(row):
            op = multiply(op, stabs.ops[k])
        out.append(op)
    return StabilizerSet(tuple(out), stabs.lattice)


def gf2_rank(stabs) -> int:
    return gf2.rank(op.symplectic() for op in stabs)


def _gray_start(stabs: Sequence[PauliOperator], index: int, n: int) -> PauliOperator:
    g = index ^ (index >> 1)
    op = PauliOperator.identity(n)
    for k in gf2.iter_bits(g):
        op = multiply(op, stabs[k])
    return op


def enumerate_group(stabs, limit: int = 20, start: int = 0, stop: int | None = None,
                    n: int | None = None) -> Iterator[PauliOperator]:
    """All 2**k products of the generators in Gray-code order.

    ``start``/``stop`` select a sub-range of Gray indices so the walk can be
    split into independent chunks; the concatenation of consecutive chunks is
    the full sequence.
    """
    ops = list(stabs)
    k = len(ops)
    if k > limit:
        raise StabilizerError(f"{k} generators exceeds enumeration limit {limit}")
    if n is None:
        n = stabs.lattice.num_sites if isinstance(stabs, StabilizerSet) else ops[0].n
    total = 1 << k
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    cur = _gray_start(ops, start, n)
    yield cur
    for i in range(start + 1, stop):
        # Gray step i flips the generator at the lowest set bit of i
        flip = (i & -i).bit_length() - 1
        cur = multiply(cur, ops[flip])
        yield cur


def support_stats(p: PauliOperator) -> tuple[int, int, bool]:
    w = gf2.popcount(p.x | p.z)
    return w, w % 2, p.z == 0


def parse_operator_list(texts: Sequence[str], lattice: Lattice) -> StabilizerSet:
    return StabilizerSet(tuple(PauliOperator.from_string(t) for t in texts), lattice)


__all__: List[str] = [
    "PauliOperator",
    "StabilizerError",
    "StabilizerSet",
    "canonical_operator",
    "canonical_set",
    "enumerate_group",
    "gf2_rank",
    "in_canonical_group",
    "multiply",
    "product_of_sites",
    "support_stats",
    "transform_set",
]
