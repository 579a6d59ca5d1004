"""Grouping stabilizers into globally applied measurement patterns.

A pattern assigns one single-qubit basis to every site. A stabilizer can be
read off a pattern when the pattern measures exactly the stabilizer's Pauli
on each site of its support; the ±1 outcomes on the support are then
multiplied. Sites nobody pins are measured in Z, the native basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .lattice import Lattice
from .penalty import total_penalty
from .stabilizer import PauliOperator, StabilizerSet

FREE = "."
BASES = ("X", "Y", "Z", FREE)
ORDERS = ("given", "penalty-ascending", "random-seeded")


class PlannerError(ValueError):
    pass


@dataclass(frozen=True)
class MeasurementPattern:
    basis: tuple

    def __post_init__(self) -> None:
        basis = tuple(self.basis)
        bad = [b for b in basis if b not in BASES]
        if bad:
            raise PlannerError(f"unknown basis labels {bad}")
        object.__setattr__(self, "basis", basis)

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def resolved(self) -> tuple:
        return tuple("Z" if b == FREE else b for b in self.basis)

    def ascii(self, lattice: Optional[Lattice] = None) -> str:
        if lattice is None:
            return " ".join(self.basis)
        lines = []
        width = max(len(r) for r in lattice.rows())
        ragged = len({len(r) for r in lattice.rows()}) > 1
        for row in lattice.rows():
            pad = " " * (width - len(row)) if ragged else ""
            lines.append(pad + " ".join(self.basis[s] for s in row))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"basis": "".join(self.basis), "resolved": "".join(self.resolved)}

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementPattern":
        return cls(tuple(d["basis"]))

    @classmethod
    def uniform(cls, n: int, basis: str) -> "MeasurementPattern":
        return cls((basis,) * n)


def pattern_covers(pattern: MeasurementPattern, s: PauliOperator) -> bool:
    if len(pattern) != s.n:
        raise PlannerError(f"pattern has {len(pattern)} sites, operator {s.n}")
    res = pattern.resolved
    return all(res[q] == s.pauli_at(q) for q in range(s.n) if (s.support >> q) & 1)


def pattern_penalty(pattern: MeasurementPattern, lattice: Lattice) -> float:
    """Sum of squared couplings over edges whose ends are measured differently."""
    if len(pattern) != lattice.num_sites:
        raise PlannerError("pattern and lattice sizes differ")
    res = pattern.resolved
    a = lattice.adjacency
    return float(sum(a[j, k] ** 2 for j, k in lattice.edges if res[j] != res[k]))


def _grid_color(lattice: Lattice, site: int) -> int:
    cols = lattice.params["cols"]
    return (site // cols + site % cols) % 2


def checkerboard_patterns(lattice: Lattice):
    if lattice.shape != "grid":
        raise PlannerError(f"checkerboard patterns need a grid lattice, got {lattice.shape}")
    n = lattice.num_sites
    a = tuple("X" if _grid_color(lattice, s) == 0 else "Z" for s in range(n))
    b = tuple("Z" if _grid_color(lattice, s) == 0 else "X" for s in range(n))
    return MeasurementPattern(a), MeasurementPattern(b)


def checkerboard_order(stabs: StabilizerSet) -> List[int]:
    """Indices ordered colour-0 first, keyed on each operator's lowest X site."""
    lat = stabs.lattice
    if lat.shape != "grid":
        raise PlannerError("checkerboard order needs a grid lattice")

    def key(i):
        x = stabs[i].x
        site = (x & -x).bit_length() - 1 if x else 0
        return (_grid_color(lat, site), i)

    return sorted(range(len(stabs)), key=key)


def ordering(stabs: StabilizerSet, order: str = "given", seed: Optional[int] = None) -> List[int]:
    idx = list(range(len(stabs)))
    if order == "given":
        return idx
    if order == "penalty-ascending":
        per = total_penalty(stabs).per_stabilizer
        return sorted(idx, key=lambda i: (per[i], i))
    if order == "random-seeded":
        random.Random(seed).shuffle(idx)
        return idx
    if order == "checkerboard":
        return checkerboard_order(stabs)
    raise PlannerError(f"unknown order {order!r}; expected one of {ORDERS + ('checkerboard',)}")


def plan_patterns(stabs: StabilizerSet, order: Sequence[int] | str = "given",
                  seed: Optional[int] = None) -> List[MeasurementPattern]:
    """Greedy first-fit cover of ``stabs`` by measurement patterns."""
    if len(stabs) == 0:
        raise PlannerError("cannot plan an empty stabilizer set")
    idx = ordering(stabs, order, seed) if isinstance(order, str) else list(order)
    n = stabs.lattice.num_sites
    uncovered = [stabs[i] for i in idx]
    patterns: List[MeasurementPattern] = []
    while uncovered:
        pins = [FREE] * n
        for s in uncovered:
            need = {q: s.pauli_at(q) for q in range(n) if (s.support >> q) & 1}
            if all(pins[q] in (FREE, b) for q, b in need.items()):
                for q, b in need.items():
                    pins[q] = b
        pattern = MeasurementPattern(tuple(pins))
        patterns.append(pattern)
        # Free -> Z may also pick up operators that were not admitted explicitly
        uncovered = [s for s in uncovered if not pattern_covers(pattern, s)]
    return patterns


def cover_matrix(patterns: Sequence[MeasurementPattern], stabs: StabilizerSet) -> List[List[bool]]:
    return [[pattern_covers(p, s) for s in stabs] for p in patterns]


def first_cover(patterns: Sequence[MeasurementPattern], s: PauliOperator) -> Optional[int]:
    for i, p in enumerate(patterns):
        if pattern_covers(p, s):
            return i
    return None


def plan_penalty(patterns: Sequence[MeasurementPattern], lattice: Lattice) -> float:
    return float(sum(pattern_penalty(p, lattice) for p in patterns))
