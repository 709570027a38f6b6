"""Cartesian parameter sweeps over the chain's steady state."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from bosonic_ness import gaussian, tridiagonal
from bosonic_ness.gaussian import Partition, UnphysicalStateError
from bosonic_ness.ness import SolverError, analytic_ness
from bosonic_ness.params import BathSpec, ChainParams
from bosonic_ness.transport import transport_report
from bosonic_ness.experiments.kato import kato_bound

MEASURES = ("profile", "current", "mi", "tc", "cmi", "chain_rule", "kato")
MEASURE_COLUMNS = {
    "profile": ("profile",),
    "current": ("current",),
    "mi": ("mi",),
    "tc": ("tc",),
    "cmi": ("cmi",),
    "chain_rule": ("chain_rule",),
    "kato": ("kato_epsilon", "kato_bound"),
}
PARTITION_RULES = ("symmetric", "tripartition", "explicit")
AXIS_NAMES = ("L", "Gamma", "N1", "NL", "lambda", "gamma", "b", "k")
WORKERS_ENV = "BOSONIC_NESS_WORKERS"
# the dense covariance-matrix path is O(L^3) per entropy
DENSE_MAX_L = 64


@dataclass(frozen=True)
class SweepSpec:
    """A grid of chain parameters and the measures to evaluate at each point.

    ``b`` and ``k`` default to ``None``: the tripartition then needs them on an
    axis, and the bipartition for ``mi`` falls back to ``k = L // 2``.
    """

    base: ChainParams
    axes: tuple[tuple[str, tuple], ...] = ()
    measures: tuple[str, ...] = ("current",)
    partition: str = "symmetric"
    b: int | None = None
    k: int | None = None
    blocks: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        axes = tuple((str(n), tuple(v)) for n, v in self.axes)
        object.__setattr__(self, "axes", axes)
        names = [n for n, _ in axes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate sweep axis")
        for n, values in axes:
            if n not in AXIS_NAMES:
                raise ValueError(f"{n!r} is not sweepable (choose from {', '.join(AXIS_NAMES)})")
            if not values:
                raise ValueError(f"axis {n!r} has no values")
        for m in self.measures:
            if m not in MEASURES:
                raise ValueError(f"unknown measure {m!r} (choose from {', '.join(MEASURES)})")
        if not self.measures:
            raise ValueError("at least one measure is required")
        if self.partition not in PARTITION_RULES:
            raise ValueError(f"unknown partition rule {self.partition!r}")
        if self.partition == "explicit" and not self.blocks:
            raise ValueError("explicit partition rule needs blocks")

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.axes)

    @property
    def columns(self) -> tuple[str, ...]:
        cols = list(self.axis_names)
        for m in self.measures:
            cols.extend(MEASURE_COLUMNS[m])
        return tuple(cols) + ("error",)

    def grid(self):
        """Grid points in lexicographic axis order, as ``{axis: value}`` dicts."""
        names = self.axis_names
        for combo in itertools.product(*(v for _, v in self.axes)):
            yield dict(zip(names, combo))


def params_at(base: ChainParams, point: dict) -> ChainParams:
    changes = {}
    for name, value in point.items():
        if name in ("b", "k"):
            continue
        key = "lam" if name == "lambda" else name
        changes[key] = value
    return base.with_(**changes)


def _tripartition(spec: SweepSpec, L: int, point: dict) -> Partition:
    b = point.get("b", spec.b)
    k = point.get("k", spec.k)
    if spec.partition == "explicit":
        p = Partition(spec.blocks)
        p.check_range(L)
        p.abc()
        return p
    if b is None:
        raise ValueError("tripartition needs a middle-block size b")
    if spec.partition == "symmetric":
        return Partition.symmetric_tripartition(L, int(b))
    if k is None:
        raise ValueError("tripartition rule needs k")
    return Partition.tripartition(L, int(k), int(b))


def _bipartition(spec: SweepSpec, L: int, point: dict) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if spec.partition == "explicit":
        blocks = [b for b in spec.blocks if b]
        if len(blocks) != 2:
            raise ValueError("mi with an explicit partition needs exactly two non-empty blocks")
        Partition(tuple(blocks)).check_range(L)
        return blocks[0], blocks[1]
    k = point.get("k", spec.k)
    k = L // 2 if k is None else int(k)
    p = Partition.bipartition(L, k)
    return p.blocks[0], p.blocks[1]


def _contiguous_prefix(block, L):
    return block == tuple(range(1, len(block) + 1))


def evaluate_point(spec: SweepSpec, point: dict) -> dict:
    """Evaluate every measure at one grid point; failures land in ``error``."""
    row = dict(point)
    for m in spec.measures:
        for col in MEASURE_COLUMNS[m]:
            row[col] = None
    row["error"] = ""
    try:
        params = params_at(spec.base, point)
        _evaluate(spec, params, point, row)
    except (ValueError, SolverError, UnphysicalStateError, ArithmeticError) as exc:
        for m in spec.measures:
            for col in MEASURE_COLUMNS[m]:
                row[col] = None
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _evaluate(spec, params, point, row):
    L = params.L
    precise = not params.squeezed
    need_dense = any(m in spec.measures for m in ("mi", "tc", "cmi", "chain_rule")) and not precise
    if need_dense and L > DENSE_MAX_L:
        raise ValueError(f"squeezed states use the dense path, limited to L <= {DENSE_MAX_L}")
    m = analytic_ness(params)
    state = tridiagonal.TridiagonalState.from_params(params) if precise else None
    cm = None
    if need_dense or "chain_rule" in spec.measures:
        if L > DENSE_MAX_L:
            raise ValueError(f"chain_rule uses the dense path, limited to L <= {DENSE_MAX_L}")
        cm = gaussian.assemble_cm(m)
    for measure in spec.measures:
        if measure == "profile":
            row["profile"] = [float(x) for x in np.real(np.diag(m.C))]
        elif measure == "current":
            row["current"] = transport_report(params, m).J
        elif measure == "mi":
            A, B = _bipartition(spec, L, point)
            if precise and _contiguous_prefix(A, L) and B == tuple(range(len(A) + 1, L + 1)):
                row["mi"] = tridiagonal.mutual_information(state, len(A))
            else:
                row["mi"] = gaussian.mutual_information(cm or gaussian.assemble_cm(m), A, B)
        elif measure == "tc":
            row["tc"] = (tridiagonal.total_correlations(state) if precise
                         else gaussian.total_correlations(cm))
        elif measure == "cmi":
            A, B, C = _tripartition(spec, L, point).abc()
            if precise and A[0] == 1 and C[-1] == L:
                row["cmi"] = tridiagonal.cmi(state, len(A), len(B))
            else:
                row["cmi"] = gaussian.conditional_mutual_information(
                    cm or gaussian.assemble_cm(m), Partition((A, B, C)))
        elif measure == "chain_rule":
            row["chain_rule"] = gaussian.chain_rule_residual(cm, _tripartition(spec, L, point))
        elif measure == "kato":
            row["kato_epsilon"], row["kato_bound"] = kato_bound(params)
    for key, value in row.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ArithmeticError(f"non-finite {key}")


def _evaluate_many(args):
    spec, points = args
    return [evaluate_point(spec, p) for p in points]


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[dict]:
    """Evaluate the grid; rows come back in lexicographic axis order.

    Points are independent and may be spread over ``workers`` processes
    (argument, then ``BOSONIC_NESS_WORKERS``, then 1); the merge order does
    not depend on the worker count.
    """
    points = list(spec.grid()) or [{}]
    workers = min(resolve_workers(workers), len(points))
    if workers == 1:
        return [evaluate_point(spec, p) for p in points]
    chunks = [points[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_evaluate_many, [(spec, c) for c in chunks]))
    rows = [None] * len(points)
    for i, chunk in enumerate(results):
        for j, row in enumerate(chunk):
            rows[i + j * workers] = row
    return rows


def spec_from_config(cfg: dict) -> SweepSpec:
    """Build a :class:`SweepSpec` from a parsed config dict."""
    cfg = dict(cfg)
    base_kw = {}
    axes = []
    for key in list(cfg):
        value = cfg[key]
        if key in AXIS_NAMES and isinstance(value, list):
            axes.append((key, tuple(value)))
    scalar = {k: v for k, v in cfg.items() if not isinstance(v, list)}
    L0 = scalar.get("L", None)
    if L0 is None:
        axis_L = dict(axes).get("L")
        if axis_L is None:
            raise ValueError("config must set L")
        L0 = axis_L[0]
    base_kw["L"] = L0
    for key, attr in (("omega", "omega"), ("lambda", "lam"), ("gamma", "gamma"), ("Gamma", "Gamma")):
        if key in scalar:
            base_kw[attr] = scalar[key]
    base_kw["bath_left"] = BathSpec(scalar.get("N1", 0.0), scalar.get("r1", 0.0), scalar.get("theta1", 0.0))
    base_kw["bath_right"] = BathSpec(scalar.get("NL", 0.0), scalar.get("rL", 0.0), scalar.get("thetaL", 0.0))
    base = ChainParams(**base_kw)
    measures = tuple(m.strip() for m in cfg.get("measures", "current").split(",") if m.strip())
    blocks = None
    if "blocks" in cfg:
        blocks = tuple(_parse_block(b) for b in cfg["blocks"].split("|"))
    return SweepSpec(base=base, axes=tuple(axes), measures=measures,
                     partition=cfg.get("partition", "explicit" if blocks else "symmetric"),
                     b=scalar.get("b"), k=scalar.get("k"), blocks=blocks)


def _parse_block(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return tuple(out)
