"""GF(2) linear algebra on int bitsets.

A row is a Python int whose bit ``k`` holds column ``k``. Everything here is
pure and allocation-light so it can sit in the inner loop of the optimizer.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence


def popcount(v: int) -> int:
    return bin(v).count("1")


def rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) via an incremental pivot basis."""
    basis = EchelonBasis()
    for r in rows:
        basis.add(r)
    return len(basis)


class EchelonBasis:
    """Incrementally maintained basis, keyed by leading (highest) bit.

    ``add`` reports whether the vector was independent of what is already
    stored, which is exactly the independence oracle a matroid greedy needs.
    """

    def __init__(self) -> None:
        self._pivots: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self._pivots.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self._pivots[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0


def in_span(v: int, rows: Iterable[int]) -> bool:
    basis = EchelonBasis()
    for r in rows:
        basis.add(r)
    return basis.contains(v)


def rref(rows: Sequence[int], n_cols: int) -> tuple[List[int], List[int]]:
    """Reduced row echelon form, pivoting on low columns first.

    Returns ``(rows, pivot_cols)``; zero rows are dropped.
    """
    work = [r for r in rows if r]
    pivots: List[int] = []
    out: List[int] = []
    for col in range(n_cols):
        bit = 1 << col
        idx = next((i for i, r in enumerate(work) if r & bit), None)
        if idx is None:
            continue
        prow = work.pop(idx)
        work = [r ^ prow if r & bit else r for r in work]
        out = [r ^ prow if r & bit else r for r in out]
        out.append(prow)
        pivots.append(col)
        work = [r for r in work if r]
        if not work:
            break
    return out, pivots


def nullspace(rows: Sequence[int], n_cols: int) -> List[int]:
    """Basis of {v : popcount(row & v) even for every row}.

    One basis vector per free column, with that free bit set and the pivot
    bits back-substituted; the result is ordered by free column.
    """
    red, pivots = rref(rows, n_cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for r, p in zip(red, pivots):
            if (r >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def solve(rows: Sequence[int], rhs: Sequence[int], n_cols: int) -> Optional[int]:
    """One solution of ``popcount(rows[i] & v) % 2 == rhs[i]`` or None.

    Free variables are set to zero, so the answer is deterministic.
    """
    aug_bit = 1 << n_cols
    aug = [r | (aug_bit if b & 1 else 0) for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, n_cols + 1)
    v = 0
    for r, p in zip(red, pivots):
        if p == n_cols:
            return None
        if r & aug_bit:
            v |= 1 << p
    return v


def matvec(rows: Sequence[int], v: int) -> int:
    """Return the syndrome bitset ``sum_i (popcount(rows[i] & v) % 2) << i``."""
    out = 0
    for i, r in enumerate(rows):
        if popcount(r & v) & 1:
            out |= 1 << i
    return out


def bits_to_int(bits: Iterable[int]) -> int:
    v = 0
    for i, b in enumerate(bits):
        if int(b) & 1:
            v |= 1 << i
    return v


def int_to_bits(v: int, n: int) -> List[int]:
    return [(v >> i) & 1 for i in range(n)]


def iter_bits(v: int):
    """Yield indices of set bits in ascending order."""
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


__all__ = [
    "EchelonBasis",
    "bits_to_int",
    "in_span",
    "int_to_bits",
    "iter_bits",
    "matvec",
    "nullspace",
    "popcount",
    "rank",
    "rref",
    "solve",
]
