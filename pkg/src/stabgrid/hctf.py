"""Homogeneous cross-talk-free (all-X) stabilizers.

The product of canonical generators over a site set ``v`` has X exactly on
``v`` and Z on every site touched by an odd number of sites in ``v``. It is
X-only iff ``A v = 0 (mod 2)``, so HCTF supports are the GF(2) kernel of the
binarized adjacency matrix. Everything in this module is checked against that
one condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import gf2
from .lattice import Lattice, grid, triangle
from .stabilizer import PauliOperator, product_of_sites


class HCTFError(ValueError):
    pass


@dataclass(frozen=True)
class XPattern:
    n: int
    member: int
    row_structure: Optional[Tuple[int, ...]] = None

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "XPattern":
        flat = [int(b) for row in rows for b in row]
        return cls(len(flat), gf2.bits_to_int(flat), tuple(len(r) for r in rows))

    @property
    def bits(self) -> List[int]:
        return gf2.int_to_bits(self.member, self.n)

    @property
    def weight(self) -> int:
        return gf2.popcount(self.member)

    def rows(self) -> List[List[int]]:
        bits = self.bits
        structure = self.row_structure or (self.n,)
        out, start = [], 0
        for length in structure:
            out.append(bits[start:start + length])
            start += length
        return out

    def sites(self) -> List[int]:
        return list(gf2.iter_bits(self.member))

    def bitstring(self) -> str:
        return "".join(map(str, self.bits))

    def ascii(self) -> str:
        rows = self.rows()
        if not self.n:
            return ""
        width = max(len(r) for r in rows)
        lines = []
        for r in rows:
            pad = " " * (width - len(r)) if self.row_structure and len(set(self.row_structure)) > 1 else ""
            lines.append(pad + " ".join("X" if b else "." for b in r))
        return "\n".join(lines)

    def operator(self) -> PauliOperator:
        return PauliOperator(self.n, self.member, 0, 0)

    def to_dict(self) -> dict:
        d = {"member": self.bitstring(), "weight": self.weight, "ascii": self.ascii().split("\n")}
        if self.row_structure is not None:
            d["row_structure"] = list(self.row_structure)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "XPattern":
        bits = [int(c) for c in d["member"]]
        rs = tuple(d["row_structure"]) if d.get("row_structure") else None
        return cls(len(bits), gf2.bits_to_int(bits), rs)


def is_hctf(lattice: Lattice, member: int) -> bool:
    """``A v = 0 (mod 2)`` on the binarized adjacency."""
    return gf2.matvec(lattice.neighbor_masks, member) == 0


def violations(lattice: Lattice, member: int) -> List[int]:
    """Sites left with an uncancelled Z by the product over ``member``."""
    return list(gf2.iter_bits(gf2.matvec(lattice.neighbor_masks, member)))


def kernel_basis(lattice: Lattice) -> List[XPattern]:
    basis = gf2.nullspace(lattice.neighbor_masks, lattice.num_sites)
    out = [XPattern(lattice.num_sites, v, lattice.row_structure) for v in basis]
    for p in out:
        assert is_hctf(lattice, p.member)
    return out


def kernel_dimension(lattice: Lattice) -> int:
    return lattice.num_sites - gf2.rank(lattice.neighbor_masks)


def hctf_feasible(lattice: Lattice) -> bool:
    return kernel_dimension(lattice) > 0


def lift(lattice: Lattice, pattern: XPattern) -> PauliOperator:
    """The actual group element: product of canonical generators on the pattern."""
    op = product_of_sites(lattice, pattern.member)
    if op.z:
        raise HCTFError(f"pattern leaves Z on sites {[s + 1 for s in violations(lattice, pattern.member)]}")
    return op


def default_max_rows(width: int) -> int:
    return 4 * width * width


def _propagate(width, initial_row, max_rows, step) -> Tuple[List[Tuple[int, ...]], bool]:
    row = [int(b) & 1 for b in initial_row]
    if len(row) != width:
        raise HCTFError(f"initial row has length {len(row)}, width is {width}")
    if max_rows is None:
        max_rows = default_max_rows(width)
    if max_rows < 1:
        raise HCTFError("max_rows must be >= 1")
    prev = [0] * width
    rows: List[Tuple[int, ...]] = []
    while any(row):
        if len(rows) == max_rows:
            return rows, False
        rows.append(tuple(row))
        prev, row = row, step(prev, row)
    return rows, True


def _rect_step(prev, cur):
    m = len(cur)
    pad = [0] + list(cur) + [0]
    return [(pad[c] + pad[c + 2] + prev[c]) & 1 for c in range(m)]


def _tri_step(prev, cur):
    m = len(cur)
    pad_cur = [0] + list(cur) + [0]
    pad_prev = [0] + list(prev) + [0]
    new = [0] * (m + 1)  # new[0] is the left padding
    for c in range(1, m + 1):
        new[c] = (new[c - 1] + pad_cur[c - 1] + pad_prev[c] + pad_prev[c + 1] + pad_cur[c + 1]) & 1
    return new[1:]


def propagate_rectangular(width: int, initial_row: Sequence[int], max_rows: Optional[int] = None):
    """Grow an HCTF row by row on a square-connectivity strip.

    Each new cell is fixed by requiring an even number of X neighbours at the
    cell directly above it. Stops when a row comes out empty (``terminated``)
    or after ``max_rows`` rows.
    """
    return _propagate(width, initial_row, max_rows, _rect_step)


def propagate_triangular(width: int, initial_row: Sequence[int], max_rows: Optional[int] = None):
    """Row-by-row growth on the sheared fixed-width triangular strip.

    The new row is filled left to right because each cell's cancellation
    condition involves its left neighbour in the same new row.
    """
    return _propagate(width, initial_row, max_rows, _tri_step)


def rows_to_pattern(rows: Sequence[Sequence[int]]) -> XPattern:
    return XPattern.from_rows(rows)


def single_x_generators(width: int, kind: str = "rect", max_rows: Optional[int] = None):
    """Propagations seeded by one X in each column of the first row."""
    step = propagate_rectangular if kind == "rect" else propagate_triangular
    out = []
    for c in range(width):
        initial = [1 if i == c else 0 for i in range(width)]
        out.append(step(width, initial, max_rows))
    return out


def _triangle_boundary(side: int):
    """Three edges of triangle(side) as lists of (i, j), each walked corner to corner."""
    left = [(i, 0) for i in range(side)]
    right = [(i, i) for i in range(side)]
    bottom = [(side - 1, j) for j in range(side)]
    return left, right, bottom


def triangle_canonical_hctf(side: int) -> List[XPattern]:
    """One HCTF per boundary ring, from the outermost inwards.

    Pattern k (0-based) puts X on every edge site at least k steps from both
    corners of that edge. The interior is then solved as a GF(2) system with
    all boundary values pinned.
    """
    if side < 1:
        raise HCTFError("side must be >= 1")
    lat = triangle(side)
    starts = [i * (i + 1) // 2 for i in range(side)]
    site = lambda i, j: starts[i] + j  # noqa: E731
    edges = _triangle_boundary(side)
    boundary = 0
    for edge in edges:
        for i, j in edge:
            boundary |= 1 << site(i, j)
    interior = [s for s in range(lat.num_sites) if not (boundary >> s) & 1]
    col_of = {s: c for c, s in enumerate(interior)}

    patterns: List[XPattern] = []
    for k in range((side + 1) // 2):
        fixed = 0
        for edge in edges:
            for pos, (i, j) in enumerate(edge):
                if k <= pos <= side - 1 - k:
                    fixed |= 1 << site(i, j)
        # A_I v_I = A_B v_B: interior columns unknown, boundary contribution on the right
        eq_rows, rhs = [], []
        for s in range(lat.num_sites):
            mask = lat.neighbor_masks[s]
            eq_rows.append(sum(1 << col_of[t] for t in gf2.iter_bits(mask) if t in col_of))
            rhs.append(gf2.popcount(mask & fixed) & 1)
        sol = gf2.solve(eq_rows, rhs, len(interior))
        if sol is None:
            raise HCTFError(f"no interior completion for boundary ring {k + 1} of triangle({side})")
        member = fixed
        for c in gf2.iter_bits(sol):
            member |= 1 << interior[c]
        assert is_hctf(lat, member)
        patterns.append(XPattern(lat.num_sites, member, lat.row_structure))
    if gf2.rank(p.member for p in patterns) != len(patterns):
        raise HCTFError(f"triangle({side}) ring patterns are not independent")
    return patterns


def extended_tiling(base: XPattern, k: int, l: int, mirror: bool = True) -> XPattern:
    """Tile ``k x l`` copies of an ``m x m`` grid HCTF with empty separators.

    Block (i, j) is flipped top-to-bottom for odd i and left-to-right for odd
    j. ``mirror=False`` skips the flips and is only useful to show they are
    needed; the kernel check then fails.
    """
    rows = base.rows()
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise HCTFError("base pattern must be square")
    if not is_hctf(grid(m, m), base.member):
        raise HCTFError("base pattern is not an HCTF of the square grid")
    if k < 1 or l < 1:
        raise HCTFError("k and l must be >= 1")
    H, W = k * m + (k - 1), l * m + (l - 1)
    out = [[0] * W for _ in range(H)]
    for bi in range(k):
        for bj in range(l):
            block = [list(r) for r in rows]
            if mirror and bi % 2:
                block = block[::-1]
            if mirror and bj % 2:
                block = [r[::-1] for r in block]
            for r in range(m):
                for c in range(m):
                    out[bi * (m + 1) + r][bj * (m + 1) + c] = block[r][c]
    pattern = XPattern.from_rows(out)
    bad = violations(grid(H, W), pattern.member)
    if bad:
        s = bad[0]
        raise HCTFError(f"tiling is not cross-talk free: Z left at row {s // W + 1}, column {s % W + 1}")
    return pattern
