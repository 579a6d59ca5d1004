"""Minimum cross-talk generating sets.

Group elements of the cluster-state stabilizer group are indexed by the set
of canonical generators multiplied together, which is also their X support.
Independence of group elements is therefore plain GF(2) independence, the
elements form a linear matroid, and sorting by penalty then adding greedily
gives a minimum-weight basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np

from . import gf2
from .hctf import kernel_basis
from .lattice import Lattice
from .penalty import PenaltyBreakdown, binary_penalty, total_penalty
from .stabilizer import StabilizerSet, product_of_sites

EXACT_LIMIT = 20


class OptimizerError(ValueError):
    pass


@dataclass
class OptimizedBasis:
    set: StabilizerSet
    total_penalty: float
    mode: str
    certificate: List[float] = field(default_factory=list)
    breakdown: PenaltyBreakdown | None = None

    def to_dict(self) -> dict:
        d = self.set.to_dict()
        d.update({
            "mode": self.mode,
            "total_penalty": _num(self.total_penalty),
            "certificate": [_num(v) for v in self.certificate],
        })
        if self.breakdown is not None:
            d["breakdown"] = self.breakdown.to_dict()
        return d


def _num(v):
    return int(v) if float(v).is_integer() else float(v)


def _bitstring(v: int, n: int) -> str:
    return format(v, f"0{n}b")[::-1] if n else ""


def _sort_key(pen: float, x: int, z: int, n: int):
    return (pen, gf2.popcount(x | z), _bitstring(x, n) + _bitstring(z, n))


def _weighted_penalty_fn(lattice: Lattice):
    if lattice.is_binary:
        masks = lattice.neighbor_masks
        return lambda x, z: binary_penalty(x, z, masks)
    a2 = lattice.adjacency ** 2
    n = lattice.num_sites

    def pen(x, z):
        xb = np.array(gf2.int_to_bits(x, n), dtype=float)
        zb = np.array(gf2.int_to_bits(z, n), dtype=float)
        return float(xb @ a2 @ zb)

    return pen


def _z_of(lattice: Lattice, x: int) -> int:
    z = 0
    masks = lattice.neighbor_masks
    for a in gf2.iter_bits(x):
        z ^= masks[a]
    return z


def greedy_basis(lattice: Lattice, candidates: Iterable[Tuple[int, int]]):
    """Matroid greedy over ``(x, z)`` candidates; returns chosen (key, x, z)."""
    n = lattice.num_sites
    pen = _weighted_penalty_fn(lattice)
    ranked = sorted((_sort_key(pen(x, z), x, z, n), x, z) for x, z in candidates)
    basis = gf2.EchelonBasis()
    chosen = []
    for key, x, z in ranked:
        if basis.add(x):
            chosen.append((key, x, z))
            if len(chosen) == n:
                break
    return chosen


def _finish(lattice: Lattice, chosen, mode: str) -> OptimizedBasis:
    if len(chosen) != lattice.num_sites:
        raise OptimizerError(f"candidate pool spans only {len(chosen)} of {lattice.num_sites} dimensions")
    ops = tuple(product_of_sites(lattice, x) for _, x, _ in chosen)
    stabs = StabilizerSet(ops, lattice)
    breakdown = total_penalty(stabs)
    profile = sorted(breakdown.per_stabilizer)
    return OptimizedBasis(stabs, breakdown.total, mode, profile, breakdown)


def group_elements(lattice: Lattice) -> Iterable[Tuple[int, int]]:
    """Every nontrivial (x, z) in the group, by a Gray-code walk on x."""
    n = lattice.num_sites
    masks = lattice.neighbor_masks
    x = z = 0
    for i in range(1, 1 << n):
        flip = (i & -i).bit_length() - 1
        x ^= 1 << flip
        z ^= masks[flip]
        yield x, z


def min_penalty_basis_exact(lattice: Lattice) -> OptimizedBasis:
    n = lattice.num_sites
    if n > EXACT_LIMIT:
        raise OptimizerError(
            f"exact mode enumerates 2^{n} elements; limit is {EXACT_LIMIT} sites, use heuristic mode")
    return _finish(lattice, greedy_basis(lattice, group_elements(lattice)), "exact")


def _distance_two_balls(lattice: Lattice) -> List[int]:
    masks = lattice.neighbor_masks
    out = []
    for a in range(lattice.num_sites):
        ball = masks[a] | (1 << a)
        for b in gf2.iter_bits(masks[a]):
            ball |= masks[b]
        out.append(ball)
    return out


def _local_products(lattice: Lattice, max_degree: int) -> Iterable[int]:
    """X supports of size 2..max_degree whose sites are pairwise within distance 2."""
    balls = _distance_two_balls(lattice)

    def extend(chosen: int, allowed: int, last: int, size: int):
        if size >= 2:
            yield chosen
        if size == max_degree:
            return
        cand = allowed >> (last + 1)
        offset = last + 1
        while cand:
            low = cand & -cand
            b = low.bit_length() - 1 + offset
            cand ^= low
            yield from extend(chosen | (1 << b), allowed & balls[b], b, size + 1)

    for a in range(lattice.num_sites):
        yield from extend(1 << a, balls[a] & ~(1 << a), a, 1)


def min_penalty_basis_heuristic(lattice: Lattice, max_product_degree: int = 2) -> OptimizedBasis:
    if max_product_degree < 1:
        raise OptimizerError("max_product_degree must be >= 1")
    xs = {1 << a for a in range(lattice.num_sites)}
    xs.update(p.member for p in kernel_basis(lattice))
    xs.update(_local_products(lattice, max_product_degree))
    cands = [(x, _z_of(lattice, x)) for x in sorted(xs)]
    return _finish(lattice, greedy_basis(lattice, cands), "heuristic")


def min_penalty_basis(lattice: Lattice, mode: str = "auto", max_product_degree: int = 2) -> OptimizedBasis:
    if mode == "exact" or (mode == "auto" and lattice.num_sites <= EXACT_LIMIT):
        return min_penalty_basis_exact(lattice)
    if mode in ("heuristic", "auto"):
        return min_penalty_basis_heuristic(lattice, max_product_degree)
    raise OptimizerError(f"unknown mode {mode!r}")
