"""Cross-talk penalty of stabilizers and stabilizer sets.

For one operator the penalty is ``sum_{j,k} x_j z_k a_jk**2``: every ordered
(X-or-Y site, Z-or-Y site) pair joined by an edge costs the squared coupling.
A Y site sits in both indicator vectors, so two adjacent Y sites cost twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from . import gf2
from .lattice import Lattice
from .stabilizer import PauliOperator, StabilizerError, StabilizerSet


@dataclass
class PenaltyBreakdown:
    per_stabilizer: List[float]
    total: float
    per_edge: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_stabilizer": [_num(v) for v in self.per_stabilizer],
            "total": _num(self.total),
            "per_edge": [
                {"sites": [j + 1, k + 1], "value": _num(v)}
                for (j, k), v in sorted(self.per_edge.items())
            ],
        }


def _num(v: float):
    return int(v) if float(v).is_integer() else float(v)


def _check(p: PauliOperator, lattice: Lattice) -> None:
    if p.n != lattice.num_sites:
        raise StabilizerError(f"operator on {p.n} qubits, lattice has {lattice.num_sites} sites")


def stabilizer_penalty(p: PauliOperator, lattice: Lattice) -> float:
    _check(p, lattice)
    if lattice.is_binary:
        masks = lattice.neighbor_masks
        return float(sum(gf2.popcount(masks[j] & p.z) for j in gf2.iter_bits(p.x)))
    a2 = lattice.adjacency ** 2
    return float(p.x_bits @ a2 @ p.z_bits)


def binary_penalty(x: int, z: int, masks) -> int:
    """Integer penalty straight from bitsets; the optimizer's hot path."""
    total = 0
    while x:
        low = x & -x
        total += bin(masks[low.bit_length() - 1] & z).count("1")
        x ^= low
    return total


def edge_contributions(p: PauliOperator, lattice: Lattice) -> Dict[Tuple[int, int], float]:
    """Contribution per unordered edge ``(j, k)`` with ``j < k``."""
    _check(p, lattice)
    out: Dict[Tuple[int, int], float] = {}
    a = lattice.adjacency
    for j in gf2.iter_bits(p.x):
        for k in gf2.iter_bits(p.z & lattice.neighbor_masks[j]):
            key = (min(j, k), max(j, k))
            out[key] = out.get(key, 0.0) + float(a[j, k]) ** 2
    return out


def total_penalty(stabs: StabilizerSet) -> PenaltyBreakdown:
    per = [stabilizer_penalty(op, stabs.lattice) for op in stabs]
    per_edge: Dict[Tuple[int, int], float] = {}
    for op in stabs:
        for key, v in edge_contributions(op, stabs.lattice).items():
            per_edge[key] = per_edge.get(key, 0.0) + v
    return PenaltyBreakdown(per, float(sum(per)), per_edge)


def penalty_matrix(p: PauliOperator, lattice: Lattice) -> np.ndarray:
    """``B = A o (x z^T)``; ``trace(B^T B)`` is the penalty."""
    return lattice.adjacency * np.outer(p.x_bits, p.z_bits)
