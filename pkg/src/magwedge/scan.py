"""Parameter-plane scans over (aperture, coupling) and CSV emission."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import delta, neumann, robin
from .cache import ThresholdCache
from .fiber import (
    FiberConfig,
    FiberKind,
    FiberModel,
    ThresholdResult,
    delta_threshold_at_origin,
    threshold,
)

SCHEMA_VERSION = 1

ROBIN_COLUMNS = ("phi_over_pi", "beta", "theta", "exists", "p_min_value", "argmin_x")
DELTA_COLUMNS = ("phi_over_pi", "beta", "theta", "exists", "f_min", "x_star", "y_star")
CURVE_COLUMNS = ("phi_over_pi", "I_value")


def axis(lo: float, hi: float, count: int) -> np.ndarray:
    """Inclusive evenly spaced axis, rounded to 12 decimals so printed values stay short."""
    if count < 1:
        raise ValueError(f"axis count must be >= 1, got {count}")
    if count == 1:
        return np.array([round(float(lo), 12)])
    if not lo <= hi:
        raise ValueError(f"axis range [{lo}, {hi}] is empty")
    return np.round(np.linspace(lo, hi, count), 12)


def _map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _solve_threshold(args) -> ThresholdResult:
    kind, beta, cfg = args
    if FiberKind(kind) is FiberKind.DELTA:
        return delta_threshold_at_origin(beta, cfg)
    return threshold(FiberModel(kind, beta), cfg)


def thresholds_for(
    kind,
    betas: Iterable[float],
    cfg: FiberConfig,
    cache: ThresholdCache | None = None,
    jobs: int = 1,
) -> dict[float, ThresholdResult]:
    """Threshold per coupling, reading and filling ``cache``; the cache is not saved here."""
    kind = FiberKind(kind)
    out: dict[float, ThresholdResult] = {}
    missing = []
    for b in dict.fromkeys(float(x) for x in betas):
        hit = cache.get(FiberModel(kind, b), cfg) if cache is not None else None
        if hit is None:
            missing.append(b)
        else:
            out[b] = hit
    for b, res in zip(missing, _map(_solve_threshold, [(kind, b, cfg) for b in missing], jobs)):
        out[b] = res
        if cache is not None:
            cache.put(res)
    return out


@dataclass
class RegionGrid:
    kind: FiberKind
    phi_over_pi: np.ndarray
    beta: np.ndarray
    cells: list[dict] = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return ROBIN_COLUMNS if self.kind is FiberKind.ROBIN else DELTA_COLUMNS

    def rows(self) -> list[tuple]:
        return [tuple(c[k] for k in self.columns) for c in self.cells]


def _robin_cell(args) -> dict:
    f, b, th = args
    v = robin.robin_exists(math.pi * f, b, th)
    return {
        "phi_over_pi": f,
        "beta": b,
        "theta": th,
        "exists": int(v.exists),
        "p_min_value": v.p_min,
        "argmin_x": v.x_star,
    }


def _delta_cell(args) -> dict:
    f, b, th = args
    c = delta.f_inf(math.pi * f, b, th)
    return {
        "phi_over_pi": f,
        "beta": b,
        "theta": th,
        "exists": int(c.exists),
        "f_min": c.f_min,
        "x_star": c.x_star,
        "y_star": c.y_star,
    }


def _region(kind, phis, betas, cfg, cache, jobs, cell_fn) -> RegionGrid:
    phis = np.asarray(phis, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if np.any(phis <= 0) or np.any(phis >= 1):
        raise ValueError("aperture axis must lie inside (0, 1) in units of pi")
    if not np.all(np.isfinite(betas)):
        raise ValueError("coupling axis must be finite")
    th = thresholds_for(kind, betas, cfg, cache, jobs)
    tasks = [(float(f), float(b), th[float(b)].theta) for f in phis for b in betas]
    grid = RegionGrid(FiberKind(kind), phis, betas)
    grid.cells = _map(cell_fn, tasks, jobs)
    return grid


def robin_region(phis, betas, cfg=None, cache=None, jobs=1) -> RegionGrid:
    """Quartic certificate on the grid ``phis x betas`` (apertures in units of pi)."""
    return _region(FiberKind.ROBIN, phis, betas, cfg or FiberConfig(), cache, jobs, _robin_cell)


def delta_region(phis, betas, cfg=None, cache=None, jobs=1) -> RegionGrid:
    if np.any(np.asarray(betas) <= 0):
        raise ValueError("delta-region scans need beta > 0 on the whole axis")
    return _region(FiberKind.DELTA, phis, betas, cfg or FiberConfig(), cache, jobs, _delta_cell)


def neumann_curve(phis, theta: float) -> list[tuple[float, float]]:
    """Optimised N = 2 functional against aperture (in units of pi)."""
    return [(float(f), neumann.n2_functional_value(math.pi * f, theta)) for f in phis]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def render_csv(columns: Sequence[str], rows: Iterable[Sequence], meta: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# schema-version={SCHEMA_VERSION}\n")
    buf.write("# " + ", ".join(f"{k}={_fmt(v) if not isinstance(v, str) else v}" for k, v in meta.items()) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Parse CSV emitted by :func:`render_csv`, skipping ``#`` comment lines."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    rows = [dict(zip(header, (float(x) for x in ln.split(",")))) for ln in lines[1:]]
    return header, rows
