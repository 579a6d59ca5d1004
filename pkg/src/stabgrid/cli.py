"""``stabgrid`` command line.

Exit status: 0 on success, 2 on usage errors (argparse), 1 on domain errors.
Every subcommand can print JSON (``--format json``) and write its JSON
artifact with ``--out``; those artifacts are accepted by the downstream
subcommands through ``file:PATH`` arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .estimator import (
    FLIP_RULES,
    POLICIES,
    NoiseModel,
    default_threads,
    estimate_set,
    read_table,
    simulate_plan,
    write_table,
)
from .hctf import (
    XPattern,
    extended_tiling,
    kernel_basis,
    lift,
    propagate_rectangular,
    propagate_triangular,
    triangle_canonical_hctf,
)
from .lattice import Lattice, build_lattice, load_lattice, parse_shorthand
from .optimizer import min_penalty_basis
from .penalty import _num, total_penalty
from .planner import ORDERS, MeasurementPattern, cover_matrix, pattern_penalty, plan_patterns
from .render import labelled_dot, operator_ascii, site_grid, svg
from .stabilizer import StabilizerSet, canonical_set


class CLIError(Exception):
    pass


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _emit(args, doc: dict, text: str) -> None:
    if args.out and args.command != "render":
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(text)


def _lattice(args) -> Lattice:
    if getattr(args, "lattice", None):
        return parse_shorthand(args.lattice)
    set_arg = getattr(args, "set", None) or ""
    if set_arg.startswith("file:"):
        return load_lattice(set_arg[5:])
    raise CLIError("--lattice is required")


def _stab_set(args, lattice: Lattice) -> StabilizerSet:
    kind = args.set or "canonical"
    if kind == "canonical":
        return canonical_set(lattice)
    if kind == "optimized":
        return min_penalty_basis(lattice, "auto", args.degree).set
    if kind == "hctf":
        return StabilizerSet(tuple(lift(lattice, p) for p in kernel_basis(lattice)), lattice)
    if kind.startswith("file:"):
        doc = _read_json(kind[5:])
        if "operators" not in doc:
            raise CLIError(f"{kind[5:]} holds no 'operators' list")
        stabs = StabilizerSet.from_dict(doc, lattice)
        if "lattice" in doc and build_lattice(doc["lattice"]) != lattice:
            raise CLIError("the set file was built for a different lattice")
        return stabs
    raise CLIError(f"unknown --set {kind!r}; use canonical, optimized, hctf or file:PATH")


def _ops_text(stabs: StabilizerSet, values=None) -> List[str]:
    lines = []
    for i, op in enumerate(stabs):
        tail = f"  {values[i]:g}" if values is not None else ""
        lines.append(f"{i + 1:>3}  {op}{tail}")
    return lines


def cmd_lattice(args) -> None:
    lat = _lattice(args)
    doc = lat.to_dict()
    doc.update({
        "num_sites": lat.num_sites,
        "edges": [[a + 1, b + 1] for a, b in lat.edges],
        "degrees": lat.degrees(),
    })
    if args.format == "dot":
        print(labelled_dot(lat), end="")
        if args.out:
            Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
        return
    text = "\n".join([
        f"{lat.shape} {lat.params}: {lat.num_sites} sites, {len(lat.edges)} edges",
        site_grid(lat, [str(d) for d in lat.degrees()]),
    ])
    _emit(args, doc, text)


def cmd_canonical(args) -> None:
    lat = _lattice(args)
    stabs = canonical_set(lat)
    _emit(args, stabs.to_dict(), "\n".join(_ops_text(stabs)))


def cmd_score(args) -> None:
    lat = _lattice(args)
    stabs = _stab_set(args, lat)
    br = total_penalty(stabs)
    doc = stabs.to_dict()
    doc["penalty"] = br.to_dict()
    text = "\n".join(_ops_text(stabs, br.per_stabilizer) + [f"total {br.total:g}"])
    _emit(args, doc, text)


def _hctf_patterns(args, lat: Lattice):
    method = args.method or "kernel"
    if method == "kernel":
        return [(p, True) for p in kernel_basis(lat)], lat
    if method == "triangle":
        if lat.shape != "triangle":
            raise CLIError("--method triangle needs a triangle:R lattice")
        return [(p, True) for p in triangle_canonical_hctf(lat.params["side"])], lat
    if method in ("propagate", "tiling"):
        if method == "tiling" and args.initial:
            width, step = len(args.initial), propagate_rectangular
        elif lat.shape == "grid":
            width, step = lat.params["cols"], propagate_rectangular
        elif lat.shape == "tri_fixed" and method == "propagate":
            width, step = lat.params["width"], propagate_triangular
        else:
            raise CLIError(f"--method {method} needs a grid{'' if method == 'tiling' else ' or tri'} lattice")
        if args.initial:
            seeds = [[int(c) for c in args.initial]]
        else:
            seeds = [[int(i == c) for i in range(width)] for c in range(width)]
        out = []
        for seed in seeds:
            rows, done = step(width, seed, args.max_rows)
            out.append((XPattern.from_rows(rows) if rows else XPattern(0, 0, ()), done))
        if method == "propagate":
            return out, None
        k, _, l = (args.tile or "1x1").lower().partition("x")
        tiled = []
        for p, done in out:
            if not done:
                raise CLIError("base propagation did not terminate")
            tiled.append((extended_tiling(p, int(k), int(l or 1)), True))
        return tiled, None
    raise CLIError(f"unknown --method {method!r}")


def cmd_hctf(args) -> None:
    lat = _lattice(args)
    pats, owner = _hctf_patterns(args, lat)
    blocks, items = [], []
    for i, (p, done) in enumerate(pats):
        head = f"# pattern {i + 1}: weight {p.weight}" + ("" if done else " (not terminated)")
        blocks.append(head + "\n" + (p.ascii() if p.n else "(empty)"))
        d = p.to_dict()
        d["terminated"] = done
        if owner is not None:
            d["operator"] = str(lift(owner, p))
        items.append(d)
    doc = {"lattice": lat.to_dict(), "method": args.method or "kernel", "count": len(pats), "patterns": items}
    _emit(args, doc, f"{len(pats)} HCTF pattern(s)\n" + "\n\n".join(blocks))


def cmd_optimize(args) -> None:
    lat = _lattice(args)
    res = min_penalty_basis(lat, args.method or "auto", args.degree)
    doc = res.to_dict()
    text = "\n".join(
        _ops_text(res.set, res.breakdown.per_stabilizer)
        + [f"total {res.total_penalty:g} ({res.mode})"])
    _emit(args, doc, text)


def _plan_doc(lat, stabs, patterns) -> dict:
    pens = [pattern_penalty(p, lat) for p in patterns]
    doc = stabs.to_dict()
    doc.update({
        "patterns": [p.to_dict() for p in patterns],
        "cover": [[int(c) for c in row] for row in cover_matrix(patterns, stabs)],
        "pattern_penalties": [_num(v) for v in pens],
        "pattern_total": _num(sum(pens)),
        "stabilizer_total": _num(total_penalty(stabs).total),
    })
    return doc


def cmd_plan(args) -> None:
    lat = _lattice(args)
    stabs = _stab_set(args, lat)
    patterns = plan_patterns(stabs, args.order, args.seed)
    doc = _plan_doc(lat, stabs, patterns)
    parts = []
    for i, p in enumerate(patterns):
        covered = [j + 1 for j, c in enumerate(doc["cover"][i]) if c]
        parts.append(f"# pattern {i + 1}: penalty {doc['pattern_penalties'][i]:g}, covers {covered}\n"
                     + p.ascii(lat))
    parts.append(f"{len(patterns)} patterns, pattern-level total {doc['pattern_total']:g}, "
                 f"stabilizer-level total {doc['stabilizer_total']:g}")
    _emit(args, doc, "\n\n".join(parts))


def _load_plan(args, lat):
    if args.plan:
        doc = _read_json(args.plan[5:] if args.plan.startswith("file:") else args.plan)
        stabs = StabilizerSet.from_dict(doc, lat)
        return stabs, [MeasurementPattern.from_dict(p) for p in doc["patterns"]]
    stabs = _stab_set(args, lat)
    return stabs, plan_patterns(stabs, args.order, args.seed)


def cmd_simulate(args) -> None:
    if args.plan and not args.lattice:
        args.lattice = "file:" + (args.plan[5:] if args.plan.startswith("file:") else args.plan)
    lat = _lattice(args)
    stabs, patterns = _load_plan(args, lat)
    noise = NoiseModel(args.p_flip, args.p_vacancy, args.vacancy_policy, args.seed, args.flip_rule)
    if not args.out:
        raise CLIError("simulate needs --out DIR for the shot tables")
    tables = simulate_plan(lat, patterns, args.shots, noise, backend=args.backend,
                           partitions=args.partitions, threads=args.threads)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    fmt = args.format if args.format in ("binary", "csv") else "binary"
    entries = []
    for i, t in enumerate(tables):
        name = f"pattern_{i}.{'bin' if fmt == 'binary' else 'csv'}"
        write_table(t, outdir / name, fmt)
        entries.append({"file": name, "format": fmt, "shots": int(len(t))})
    doc = _plan_doc(lat, stabs, patterns)
    doc.update({"noise": noise.to_dict(), "backend": args.backend, "partitions": args.partitions,
                "tables": entries})
    (outdir / "run.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {len(tables)} shot table(s) and run.json to {outdir}")


def cmd_estimate(args) -> None:
    if not args.run:
        raise CLIError("estimate needs --run PATH (the run.json written by simulate)")
    run_path = Path(args.run[5:] if args.run.startswith("file:") else args.run)
    run = _read_json(str(run_path))
    lat = build_lattice(run["lattice"])
    stabs = _stab_set(args, lat) if args.set else StabilizerSet.from_dict(run, lat)
    patterns = [MeasurementPattern.from_dict(p) for p in run["patterns"]]
    tables = [read_table(run_path.parent / t["file"], lat.num_sites, t["format"]) for t in run["tables"]]
    policy = args.vacancy_policy or run.get("noise", {}).get("vacancy_policy", "minus")
    rep = estimate_set(tables, stabs, patterns, policy)
    doc = rep.to_dict()
    doc["vacancy_policy"] = policy
    lines = [f"{i + 1:>3}  {op}  {m:+.4f} +- {se:.4f}"
             for i, (op, m, se) in enumerate(zip(rep.operators, rep.means, rep.stderrs))]
    lines.append(f"fidelity lower bound {rep.fidelity_bound:.6f}")
    _emit(args, doc, "\n".join(lines))


def cmd_render(args) -> None:
    lat = _lattice(args)
    views = []  # (title, labels)
    if args.plan:
        doc = _read_json(args.plan[5:] if args.plan.startswith("file:") else args.plan)
        for i, p in enumerate(doc["patterns"]):
            views.append((f"pattern {i + 1}", list(p["resolved"])))
    elif args.set:
        for i, op in enumerate(_stab_set(args, lat)):
            views.append((f"{i + 1}: {op}", list(op.letters())))
    else:
        views.append(("lattice", None))
    fmt = args.format if args.format in ("ascii", "dot", "svg") else "ascii"
    if fmt == "ascii":
        out = "\n\n".join(
            f"# {t}\n" + (operator_ascii(lat, "".join(l)) if l else site_grid(lat, [str(s + 1) for s in range(lat.num_sites)]))
            for t, l in views)
        out += "\n"
    elif fmt == "dot":
        out = "".join(labelled_dot(lat, l, name=f"view{i}") for i, (_, l) in enumerate(views))
    else:
        out = "".join(svg(lat, l, title=t) for t, l in views)
    if args.out:
        Path(args.out).write_text(out)
    else:
        print(out, end="")


COMMANDS = {
    "lattice": (cmd_lattice, "describe a lattice"),
    "canonical": (cmd_canonical, "list the canonical stabilizers"),
    "score": (cmd_score, "cross-talk penalty of a stabilizer set"),
    "hctf": (cmd_hctf, "cross-talk-free (all-X) stabilizers"),
    "optimize": (cmd_optimize, "minimum-penalty generating set"),
    "plan": (cmd_plan, "group a set into measurement patterns"),
    "simulate": (cmd_simulate, "simulate noisy pattern measurements"),
    "estimate": (cmd_estimate, "per-stabilizer means and fidelity bound"),
    "render": (cmd_render, "ASCII / DOT / SVG diagrams"),
}


def _threads_default() -> int:
    try:
        return default_threads()
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabgrid", description="Cross-talk aware cluster-state verification planning.")
    parser.add_argument("--version", action="version", version=f"stabgrid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--lattice", help="grid:RxC, tri:WxH, triangle:R, path:N or file:PATH")
        p.add_argument("--out", help="output path (a directory for simulate)")
        p.add_argument("--threads", type=int, default=_threads_default(),
                       help="worker cap (default $STABGRID_THREADS or 1)")
        if name in ("score", "plan", "simulate", "estimate", "render"):
            p.add_argument("--set", help="canonical, optimized, hctf or file:PATH")
        if name in ("score", "plan", "simulate", "estimate", "render", "optimize"):
            p.add_argument("--degree", type=int, default=2, help="heuristic product degree")
        if name in ("plan", "simulate"):
            p.add_argument("--order", default="given", choices=ORDERS + ("checkerboard",))
        if name in ("plan", "simulate"):
            p.add_argument("--seed", type=int, default=0)
        if name in ("simulate", "render"):
            p.add_argument("--plan", help="plan JSON written by `plan --out`")
        if name == "hctf":
            p.add_argument("--method", choices=("kernel", "propagate", "triangle", "tiling"), default="kernel")
            p.add_argument("--max-rows", type=int, default=None)
            p.add_argument("--initial", help="first-row bitstring for propagate/tiling, e.g. 100")
            p.add_argument("--tile", help="KxL copies for --method tiling")
        if name == "optimize":
            p.add_argument("--method", choices=("auto", "exact", "heuristic"), default="auto")
        if name == "simulate":
            p.add_argument("--shots", type=int, default=10000)
            p.add_argument("--p-flip", type=float, default=0.0)
            p.add_argument("--p-vacancy", type=float, default=0.0)
            p.add_argument("--vacancy-policy", choices=POLICIES, default="minus")
            p.add_argument("--flip-rule", choices=FLIP_RULES, default="parity",
                           help="parity: odd number of firing edges flips; any: one is enough")
            p.add_argument("--backend", choices=("auto", "statevector", "stabilizer"), default="auto")
            p.add_argument("--partitions", type=int, default=1)
            p.add_argument("--format", choices=("binary", "csv"), default="binary",
                           help="shot table encoding")
        elif name == "estimate":
            p.add_argument("--run", help="run.json written by simulate")
            p.add_argument("--vacancy-policy", choices=POLICIES)
            p.add_argument("--format", choices=("text", "json"), default="text")
        elif name == "render":
            p.add_argument("--format", choices=("ascii", "dot", "svg"), default="ascii")
        elif name == "lattice":
            p.add_argument("--format", choices=("text", "json", "dot"), default="text")
        else:
            p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[args.command][0]
    try:
        handler(args)
    except (CLIError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"stabgrid {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
