"""Lattice graphs underlying cluster states.

Sites are indexed row-major, 0-based internally (site ``k`` is printed as
``k + 1`` in all user-facing text). Adjacency entries are couplings in
[0, 1]; a weighted entry stores the *square root* of the cross-talk
influence so that penalties, which square the entry, recover the influence.

Built-in shapes and their neighbour conventions:

* ``grid(rows, cols)`` square connectivity.
* ``tri_fixed(rows, width)`` sheared parallelogram: (r, c) touches
  (r, c +- 1), (r + 1, c), (r + 1, c - 1) and by symmetry (r - 1, c),
  (r - 1, c + 1).
* ``triangle(side)`` row i holds i + 1 sites; (i, j) touches (i, j +- 1),
  (i + 1, j), (i + 1, j + 1).
* ``path(n)`` a line.
* ``custom`` a user supplied symmetric weight matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

SHAPES = ("grid", "tri_fixed", "triangle", "path", "custom")


class LatticeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Lattice:
    num_sites: int
    adjacency: np.ndarray
    coords: np.ndarray
    shape: str = "custom"
    params: dict = field(default_factory=dict)
    row_structure: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        adj = np.array(self.adjacency, dtype=float)
        n = self.num_sites
        if n < 1:
            raise LatticeError("lattice must have at least one site")
        if adj.shape != (n, n):
            raise LatticeError(f"adjacency must be {n}x{n}, got {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise LatticeError("adjacency is not symmetric")
        if np.any(np.diag(adj) != 0):
            raise LatticeError("adjacency must have a zero diagonal")
        if np.any(adj < 0) or np.any(adj > 1):
            raise LatticeError("adjacency entries must lie in [0, 1]")
        coords = np.array(self.coords, dtype=float).reshape(n, 2)
        if len({tuple(np.round(c, 9)) for c in coords}) != n:
            raise LatticeError("site coordinates must be pairwise distinct")
        if self.row_structure is not None and sum(self.row_structure) != n:
            raise LatticeError("row_structure does not sum to num_sites")
        adj.setflags(write=False)
        coords.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "coords", coords)
        # neighbour bitmasks (any weight > 0 is an edge)
        masks = tuple(
            sum(1 << int(k) for k in np.flatnonzero(adj[j] > 0)) for j in range(n)
        )
        object.__setattr__(self, "_masks", masks)

    @property
    def neighbor_masks(self) -> Tuple[int, ...]:
        """Binarized adjacency rows as int bitsets."""
        return self._masks  # type: ignore[attr-defined]

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.adjacency == 0) | (self.adjacency == 1)))

    @property
    def edges(self) -> List[Tuple[int, int]]:
        j, k = np.nonzero(np.triu(self.adjacency))
        return [(int(a), int(b)) for a, b in zip(j, k)]

    def degree(self, site: int) -> int:
        return len(neighbors(self, site))

    def degrees(self) -> List[int]:
        return [bin(m).count("1") for m in self.neighbor_masks]

    def rows(self) -> List[List[int]]:
        """Site indices grouped by row (a single row if no structure)."""
        structure = self.row_structure or (self.num_sites,)
        out, start = [], 0
        for length in structure:
            out.append(list(range(start, start + length)))
            start += length
        return out

    def site_label(self, site: int) -> str:
        return str(site + 1)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"shape": self.shape, "params": dict(self.params)}
        if self.shape == "custom":
            d["weights"] = self.adjacency.tolist()
            d["coords"] = self.coords.tolist()
            if self.row_structure is not None:
                d["row_structure"] = list(self.row_structure)
        elif not np.array_equal(self.adjacency, build_lattice(d).adjacency):
            # reweighted built-in geometry
            d["weights"] = self.adjacency.tolist()
        return d

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return (
            self.num_sites == other.num_sites
            and np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.coords, other.coords)
        )

    __hash__ = None  # type: ignore[assignment]


def _from_edges(n, edges, coords, shape, params, row_structure=None) -> Lattice:
    adj = np.zeros((n, n))
    for a, b in edges:
        adj[a, b] = adj[b, a] = 1.0
    return Lattice(n, adj, coords, shape, params, row_structure)


def _positive(name: str, *values: int) -> None:
    for v in values:
        if int(v) != v or v < 1:
            raise LatticeError(f"{name} parameters must be positive integers, got {values}")


def grid(rows: int, cols: int) -> Lattice:
    _positive("grid", rows, cols)
    idx = lambda r, c: r * cols + c  # noqa: E731
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
    coords = [(c, -r) for r in range(rows) for c in range(cols)]
    return _from_edges(rows * cols, edges, coords, "grid",
                       {"rows": rows, "cols": cols}, (cols,) * rows)


def tri_fixed(rows: int, width: int) -> Lattice:
    _positive("tri_fixed", rows, width)
    idx = lambda r, c: r * width + c  # noqa: E731
    edges = []
    for r in range(rows):
        for c in range(width):
            if c + 1 < width:
                edges.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
                if c >= 1:
                    edges.append((idx(r, c), idx(r + 1, c - 1)))
    h = math.sqrt(3) / 2
    coords = [(c + 0.5 * r, -h * r) for r in range(rows) for c in range(width)]
    return _from_edges(rows * width, edges, coords, "tri_fixed",
                       {"rows": rows, "width": width}, (width,) * rows)


def triangle(side: int) -> Lattice:
    _positive("triangle", side)
    starts = [i * (i + 1) // 2 for i in range(side)]
    idx = lambda i, j: starts[i] + j  # noqa: E731
    edges = []
    for i in range(side):
        for j in range(i + 1):
            if j + 1 <= i:
                edges.append((idx(i, j), idx(i, j + 1)))
            if i + 1 < side:
                edges.append((idx(i, j), idx(i + 1, j)))
                edges.append((idx(i, j), idx(i + 1, j + 1)))
    h = math.sqrt(3) / 2
    coords = [(j - 0.5 * i, -h * i) for i in range(side) for j in range(i + 1)]
    return _from_edges(side * (side + 1) // 2, edges, coords, "triangle",
                       {"side": side}, tuple(range(1, side + 1)))


def path(n: int) -> Lattice:
    _positive("path", n)
    edges = [(i, i + 1) for i in range(n - 1)]
    coords = [(i, 0) for i in range(n)]
    return _from_edges(n, edges, coords, "path", {"n": n}, (n,))


def custom(weights, coords=None, row_structure=None) -> Lattice:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
        raise LatticeError("custom weights must be a non-empty square matrix")
    n = w.shape[0]
    if coords is None:
        coords = [(i, 0) for i in range(n)]
    rs = tuple(row_structure) if row_structure is not None else None
    return Lattice(n, w, coords, "custom", {"n": n}, rs)


def build_lattice(spec: Any) -> Lattice:
    """Build from a shorthand string (``grid:3x3``) or a JSON-style dict."""
    if isinstance(spec, Lattice):
        return spec
    if isinstance(spec, str):
        return parse_shorthand(spec)
    if not isinstance(spec, dict):
        raise LatticeError(f"cannot build a lattice from {type(spec).__name__}")
    shape = spec.get("shape")
    params = spec.get("params") or {}
    if shape == "grid":
        lat = grid(params["rows"], params["cols"])
    elif shape == "tri_fixed":
        lat = tri_fixed(params["rows"], params["width"])
    elif shape == "triangle":
        lat = triangle(params["side"])
    elif shape == "path":
        lat = path(params["n"])
    elif shape == "custom":
        if "weights" not in spec:
            raise LatticeError("custom lattice needs a 'weights' matrix")
        return custom(spec["weights"], spec.get("coords"), spec.get("row_structure"))
    else:
        raise LatticeError(f"unknown shape {shape!r}; expected one of {SHAPES}")
    if spec.get("weights") is not None:
        # built-in geometry with a reweighted coupling matrix
        coords = spec.get("coords", lat.coords)
        return Lattice(lat.num_sites, np.asarray(spec["weights"], dtype=float), coords,
                       lat.shape, lat.params, lat.row_structure)
    return lat


def parse_shorthand(text: str) -> Lattice:
    """``grid:RxC``, ``tri:WxH``, ``triangle:R``, ``path:N``, ``file:PATH``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "grid":
            r, c = (int(t) for t in arg.lower().split("x"))
            return grid(r, c)
        if kind == "tri":
            w, h = (int(t) for t in arg.lower().split("x"))
            return tri_fixed(h, w)
        if kind == "triangle":
            return triangle(int(arg))
        if kind == "path":
            return path(int(arg))
    except ValueError as exc:
        if isinstance(exc, LatticeError):
            raise
        raise LatticeError(f"malformed lattice shorthand {text!r}") from exc
    if kind == "file":
        return load_lattice(arg)
    raise LatticeError(f"unknown lattice shorthand {text!r}")


def load_lattice(path_like) -> Lattice:
    data = json.loads(Path(path_like).read_text())
    # accept any artifact that embeds a lattice
    if "shape" not in data and "lattice" in data:
        data = data["lattice"]
    return build_lattice(data)


def neighbors(lattice: Lattice, site: int) -> List[Tuple[int, float]]:
    """Sites with a nonzero coupling to ``site``, ascending."""
    if not 0 <= site < lattice.num_sites:
        raise IndexError(f"site {site} out of range for {lattice.num_sites} sites")
    row = lattice.adjacency[site]
    return [(int(k), float(row[k])) for k in np.flatnonzero(row > 0)]


def relabel(lattice: Lattice, perm: Sequence[int]) -> Lattice:
    """Lattice with site ``k`` moved to position ``perm[k]``."""
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    adj = lattice.adjacency[np.ix_(inv, inv)]
    return Lattice(lattice.num_sites, adj, lattice.coords[inv], "custom",
                   {"n": lattice.num_sites})


def to_dot(lattice: Lattice, name: str = "lattice") -> str:
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for k, (x, y) in enumerate(lattice.coords):
        lines.append(f'  {k + 1} [pos="{x:g},{y:g}!"];')
    for a, b in lattice.edges:
        w = lattice.adjacency[a, b]
        attr = "" if w == 1 else f' [weight={w:g}, label="{w:g}"]'
        lines.append(f"  {a + 1} -- {b + 1}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
