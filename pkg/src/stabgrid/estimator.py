"""Simulated pattern measurements and the fidelity lower bound.

Two ideal-outcome samplers are provided:

``statevector``
    Builds the cluster state densely (n <= 12), rotates every qubit into its
    pattern basis and samples computational-basis outcomes.
``stabilizer``
    Uses the fact that measuring single-qubit Paulis on a stabilizer state
    gives outcomes uniformly distributed over an affine GF(2) subspace. The
    constraints come from the group elements the pattern can read off, so
    there is no size limit.

Noise is applied afterwards: every edge whose two ends are measured in
different bases fires independently at each end with probability ``p_flip``.
Under the default ``parity`` rule a site flips when an odd number of its
edges fire; under ``any`` it flips when at least one fires, i.e. with
probability ``1 - (1 - p_flip)**d``. Then each site is vacant with
probability ``p_vacancy``. Shot tables hold +1, -1 or 0
for a vacancy.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import gf2
from .lattice import Lattice
from .planner import MeasurementPattern, first_cover
from .stabilizer import PauliOperator, StabilizerSet, product_of_sites

STATEVECTOR_LIMIT = 12
POLICIES = ("plus", "minus", "skip")
FLIP_RULES = ("parity", "any")


class EstimatorError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    p_flip: float = 0.0
    p_vacancy: float = 0.0
    vacancy_policy: str = "minus"
    seed: int = 0
    flip_rule: str = "parity"

    def __post_init__(self) -> None:
        for name in ("p_flip", "p_vacancy"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise EstimatorError(f"{name} must lie in [0, 1], got {v}")
        if self.vacancy_policy not in POLICIES:
            raise EstimatorError(f"vacancy_policy must be one of {POLICIES}")
        if self.flip_rule not in FLIP_RULES:
            raise EstimatorError(f"flip_rule must be one of {FLIP_RULES}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise EstimatorError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {"p_flip": self.p_flip, "p_vacancy": self.p_vacancy,
                "vacancy_policy": self.vacancy_policy, "seed": int(self.seed),
                "flip_rule": self.flip_rule}


@dataclass
class EstimationReport:
    means: List[float]
    stderrs: List[float]
    shots_used: List[int]
    pattern_index: List[int]
    operators: List[str]
    shots_per_pattern: List[int]
    num_sites: int
    fidelity_bound: float = field(init=False)

    def __post_init__(self) -> None:
        self.fidelity_bound = fidelity_bound(self.means, self.num_sites)

    def to_dict(self) -> dict:
        return {
            "num_sites": self.num_sites,
            "fidelity_bound": self.fidelity_bound,
            "shots_per_pattern": list(self.shots_per_pattern),
            "per_stabilizer": [
                {"operator": op, "pattern": i, "mean": m, "stderr": se, "shots_used": k}
                for op, i, m, se, k in zip(self.operators, self.pattern_index, self.means,
                                           self.stderrs, self.shots_used)
            ],
        }


def fidelity_bound(means: Sequence[float], n: int) -> float:
    """Expectation of ``(sum_a S_a - (n - 2)) / 2`` from per-stabilizer means."""
    return 0.5 * (float(np.sum(means)) - (n - 2))


# --------------------------------------------------------------------------
# dense oracle


def _check_dense(lattice: Lattice) -> None:
    if lattice.num_sites > STATEVECTOR_LIMIT:
        raise EstimatorError(
            f"statevector backend is limited to {STATEVECTOR_LIMIT} sites, lattice has {lattice.num_sites}")


def cluster_statevector(lattice: Lattice) -> np.ndarray:
    """``prod_edges CZ |+>^n``; basis index bit q is qubit q."""
    _check_dense(lattice)
    n = lattice.num_sites
    idx = np.arange(1 << n)
    parity = np.zeros(1 << n, dtype=np.int64)
    for j, k in lattice.edges:
        parity += ((idx >> j) & 1) & ((idx >> k) & 1)
    return np.where(parity % 2, -1.0, 1.0).astype(complex) / np.sqrt(1 << n)


def apply_pauli(op: PauliOperator, psi: np.ndarray) -> np.ndarray:
    idx = np.arange(len(psi))
    zsign = np.array([1 - 2 * (gf2.popcount(i & op.z) & 1) for i in range(len(psi))])
    phi = zsign * psi
    return (1j ** op.phase) * phi[idx ^ op.x]


def cluster_expectation_oracle(lattice: Lattice, p: PauliOperator, psi: Optional[np.ndarray] = None) -> float:
    if p.n != lattice.num_sites:
        raise EstimatorError("operator and lattice sizes differ")
    if psi is None:
        psi = cluster_statevector(lattice)
    val = np.vdot(psi, apply_pauli(p, psi))
    if abs(val.imag) > 1e-10:
        raise EstimatorError(f"non-real expectation {val} for {p}")
    return float(val.real)


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
_ROT = {"X": _H, "Y": _H @ _SDG, "Z": np.eye(2, dtype=complex)}


def outcome_distribution(lattice: Lattice, pattern: MeasurementPattern) -> np.ndarray:
    """Probability of each outcome bitstring (bit q set means qubit q gave -1)."""
    n = lattice.num_sites
    psi = cluster_statevector(lattice).reshape((2,) * n)
    # reshaped axis n-1-q holds qubit q
    for q, b in enumerate(pattern.resolved):
        if b == "Z":
            continue
        ax = n - 1 - q
        psi = np.moveaxis(np.tensordot(_ROT[b], psi, axes=([1], [ax])), 0, ax)
    probs = np.abs(psi.reshape(-1)) ** 2
    return probs / probs.sum()


# --------------------------------------------------------------------------
# ideal samplers


def readable_group(lattice: Lattice, pattern: MeasurementPattern) -> List[PauliOperator]:
    """Generators of the group elements whose every factor matches the pattern."""
    n = lattice.num_sites
    masks = lattice.neighbor_masks
    rows = []
    for q, b in enumerate(pattern.resolved):
        if b == "X":
            rows.append(masks[q])
        elif b == "Z":
            rows.append(1 << q)
        else:
            rows.append(masks[q] ^ (1 << q))
    return [product_of_sites(lattice, t) for t in gf2.nullspace(rows, n)]


class _AffineSampler:
    def __init__(self, lattice: Lattice, pattern: MeasurementPattern):
        n = lattice.num_sites
        gens = readable_group(lattice, pattern)
        rows = [g.support for g in gens]
        rhs = [0 if g.sign == 1 else 1 for g in gens]
        base = gf2.solve(rows, rhs, n)
        if base is None:
            raise EstimatorError("inconsistent outcome constraints")  # cannot happen for a valid state
        self.n = n
        self.base = np.array(gf2.int_to_bits(base, n), dtype=np.uint8)
        free = gf2.nullspace(rows, n)
        self.free = np.array([gf2.int_to_bits(v, n) for v in free], dtype=np.uint8).reshape(len(free), n)

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        coeffs = rng.integers(0, 2, size=(shots, len(self.free)), dtype=np.uint8)
        bits = (coeffs.astype(np.int64) @ self.free.astype(np.int64) + self.base) % 2
        return bits.astype(np.uint8)


class _DenseSampler:
    def __init__(self, lattice: Lattice, pattern: MeasurementPattern):
        self.n = lattice.num_sites
        self.probs = outcome_distribution(lattice, pattern)

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.choice(len(self.probs), size=shots, p=self.probs)
        return ((idx[:, None] >> np.arange(self.n)) & 1).astype(np.uint8)


def _sampler(lattice: Lattice, pattern: MeasurementPattern, backend: str):
    if backend == "auto":
        backend = "statevector" if lattice.num_sites <= STATEVECTOR_LIMIT else "stabilizer"
    if backend == "statevector":
        _check_dense(lattice)
        return _DenseSampler(lattice, pattern)
    if backend == "stabilizer":
        return _AffineSampler(lattice, pattern)
    raise EstimatorError(f"unknown backend {backend!r}")


def mismatched_degree(lattice: Lattice, pattern: MeasurementPattern) -> np.ndarray:
    """Number of neighbours measured in a different basis, per site."""
    res = pattern.resolved
    d = np.zeros(lattice.num_sites, dtype=np.int64)
    for j, k in lattice.edges:
        if res[j] != res[k]:
            d[j] += 1
            d[k] += 1
    return d


def _split(shots: int, parts: int) -> List[int]:
    base, extra = divmod(shots, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def simulate_pattern(lattice: Lattice, pattern: MeasurementPattern, shots: int,
                     noise: NoiseModel = NoiseModel(), stream: int = 0, backend: str = "auto",
                     partitions: int = 1, threads: int = 1) -> np.ndarray:
    """Shot table of shape ``(shots, n)`` with int8 entries +1, -1, 0 (vacant).

    Each partition draws from its own generator seeded by
    ``(seed, stream, partition)``, so output depends only on those and on the
    partition count, never on ``threads``.
    """
    if int(shots) != shots or shots < 1:
        raise EstimatorError(f"shots must be a positive integer, got {shots}")
    if len(pattern) != lattice.num_sites:
        raise EstimatorError("pattern and lattice sizes differ")
    if partitions < 1:
        raise EstimatorError("partitions must be >= 1")
    sampler = _sampler(lattice, pattern, backend)
    d = mismatched_degree(lattice, pattern)
    n = lattice.num_sites

    def run(part: int, count: int) -> np.ndarray:
        seq = np.random.SeedSequence(int(noise.seed), spawn_key=(int(stream), part))
        rng = np.random.default_rng(seq)
        bits = sampler.sample(count, rng)
        if noise.p_flip > 0:
            fired = rng.binomial(np.broadcast_to(d, (count, n)), noise.p_flip)
            flips = (fired & 1) if noise.flip_rule == "parity" else (fired > 0)
            bits ^= flips.astype(np.uint8)
        out = (1 - 2 * bits.astype(np.int8)).astype(np.int8)
        if noise.p_vacancy > 0:
            out[rng.random((count, n)) < noise.p_vacancy] = 0
        return out

    counts = _split(int(shots), partitions)
    if threads > 1 and partitions > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run, range(partitions), counts))
    else:
        chunks = [run(i, c) for i, c in enumerate(counts)]
    return np.concatenate(chunks, axis=0)


def simulate_plan(lattice: Lattice, plan: Sequence[MeasurementPattern], shots, noise: NoiseModel = NoiseModel(),
                  **kwargs) -> List[np.ndarray]:
    """One table per pattern; ``shots`` is an int or a per-pattern list."""
    budget = list(shots) if isinstance(shots, (list, tuple)) else [shots] * len(plan)
    if len(budget) != len(plan):
        raise EstimatorError("shot budget list must match the number of patterns")
    return [simulate_pattern(lattice, p, s, noise, stream=i, **kwargs)
            for i, (p, s) in enumerate(zip(plan, budget))]


def support_products(table: np.ndarray, op: PauliOperator, policy: str) -> np.ndarray:
    """Per-shot estimate of ``op``: its sign times the product of support outcomes."""
    if policy not in POLICIES:
        raise EstimatorError(f"vacancy policy must be one of {POLICIES}")
    cols = list(gf2.iter_bits(op.support))
    vals = table[:, cols].astype(np.int64)
    if policy == "skip":
        vals = vals[np.all(vals != 0, axis=1)]
    else:
        vals = np.where(vals == 0, 1 if policy == "plus" else -1, vals)
    return op.sign * np.prod(vals, axis=1)


def estimate_set(tables: Sequence[np.ndarray], stabs: StabilizerSet, plan: Sequence[MeasurementPattern],
                 policy: str = "minus") -> EstimationReport:
    if len(tables) != len(plan):
        raise EstimatorError("need exactly one shot table per pattern")
    means, ses, used, which = [], [], [], []
    for op in stabs:
        i = first_cover(plan, op)
        if i is None:
            raise EstimatorError(f"stabilizer {op} is not covered by any pattern in the plan")
        prods = support_products(tables[i], op, policy)
        k = len(prods)
        if k == 0:
            m, se = float("nan"), float("nan")
        else:
            m = float(prods.mean())
            se = float(prods.std(ddof=1) / np.sqrt(k)) if k > 1 else float("nan")
        means.append(m)
        ses.append(se)
        used.append(k)
        which.append(i)
    return EstimationReport(means, ses, used, which, [str(op) for op in stabs],
                            [len(t) for t in tables], stabs.lattice.num_sites)


# --------------------------------------------------------------------------
# shot table I/O


def write_table(table: np.ndarray, path, fmt: str = "binary") -> None:
    path = Path(path)
    if fmt == "binary":
        path.write_bytes(np.ascontiguousarray(table, dtype=np.int8).tobytes())
    elif fmt == "csv":
        with path.open("w", newline="") as fh:
            csv.writer(fh).writerows(table.tolist())
    else:
        raise EstimatorError(f"unknown shot table format {fmt!r}")


def read_table(path, n: int, fmt: str = "binary") -> np.ndarray:
    path = Path(path)
    if fmt == "binary":
        raw = np.frombuffer(path.read_bytes(), dtype=np.int8)
        if raw.size % n:
            raise EstimatorError(f"{path} does not hold whole {n}-site shots")
        return raw.reshape(-1, n).copy()
    if fmt == "csv":
        with path.open(newline="") as fh:
            return np.array([[int(v) for v in row] for row in csv.reader(fh) if row], dtype=np.int8)
    raise EstimatorError(f"unknown shot table format {fmt!r}")


def default_threads() -> int:
    return int(os.environ.get("STABGRID_THREADS", "1"))
