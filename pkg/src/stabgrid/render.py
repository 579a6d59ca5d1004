"""ASCII, DOT and SVG views of lattices with per-site labels."""

from __future__ import annotations

from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .lattice import Lattice, to_dot

COLORS = {"X": "#d9534f", "Z": "#337ab7", "Y": "#9b59b6", "I": "#ffffff", ".": "#eeeeee"}


def site_grid(lattice: Lattice, labels: Sequence[str]) -> str:
    rows = lattice.rows()
    width = max(len(r) for r in rows)
    ragged = len({len(r) for r in rows}) > 1
    lines = []
    for r in rows:
        pad = " " * (width - len(r)) if ragged else ""
        lines.append(pad + " ".join(labels[s] for s in r))
    return "\n".join(lines)


def operator_ascii(lattice: Lattice, letters: str) -> str:
    return site_grid(lattice, ["." if ch == "I" else ch for ch in letters])


def labelled_dot(lattice: Lattice, labels: Optional[Sequence[str]] = None, name: str = "lattice") -> str:
    if labels is None:
        return to_dot(lattice, name)
    lines = to_dot(lattice, name).rstrip("}\n").split("\n")
    for s, lab in enumerate(labels):
        color = COLORS.get(lab, "#ffffff")
        lines.append(f'  {s + 1} [label="{s + 1}:{lab}", style=filled, fillcolor="{color}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def svg(lattice: Lattice, labels: Optional[Sequence[str]] = None, scale: float = 50.0,
        title: str = "") -> str:
    xy = lattice.coords * [scale, -scale]
    xy = xy - xy.min(axis=0) + scale
    w, h = (xy.max(axis=0) + scale).tolist()
    r = scale * 0.3
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    for a, b in lattice.edges:
        (x1, y1), (x2, y2) = xy[a], xy[b]
        wgt = lattice.adjacency[a, b]
        out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                   f'stroke="#555" stroke-width="{1 + 2 * wgt:.2f}"/>')
    for s, (x, y) in enumerate(xy):
        lab = labels[s] if labels is not None else ""
        fill = COLORS.get(lab, "#ffffff")
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}" fill="{fill}" stroke="#222"/>')
        text = lab if lab not in ("", ".", "I") else str(s + 1)
        out.append(f'<text x="{x:.1f}" y="{y + r / 3:.1f}" font-size="{r:.0f}" '
                   f'text-anchor="middle">{escape(text)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
