"""Error measurement on the cube and rate-exponent regression.

L2 is taken under the uniform probability measure on [-1, 1]^d (so l2 <= linf
holds), computed by tensor Gauss-Legendre up to d = 3 and by a fixed Sobol
point set at d = 4.  The sup norm is a grid maximum sharpened by a per-axis
ternary refinement around the best grid cells; the reported value is a
certified lower bound on the true sup.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import rng as _rng
from .errors import UsageError
from .quadrature import uniform_cube_rule

__all__ = [
    "ErrorReport",
    "RateFit",
    "l2_error",
    "linf_error",
    "fit_rate",
    "lower_bound_floor",
    "measure_report",
]

DEFAULT_L2_NODES = {1: 64, 2: 64, 3: 64}
DEFAULT_LINF_GRID = {1: 2049, 2: 257, 3: 65, 4: 17}
LINF_RANDOM_POINTS_D4 = 10**5


@dataclass(frozen=True)
class ErrorReport:
    m: int
    method: str
    seed: int
    l2: float
    linf: float
    terms: int
    sparsity: int

    def __post_init__(self):
        for name in ("m", "seed", "l2", "linf", "terms", "sparsity"):
            if getattr(self, name) < 0:
                raise UsageError(f"ErrorReport field {name} must be nonnegative")

    def csv_row(self) -> str:
        return (f"{self.m},{self.method},{self.seed},"
                f"{self.l2:.12e},{self.linf:.12e},{self.terms},{self.sparsity}")


CSV_HEADER = "m,method,seed,l2,linf,terms,sparsity"


def _check_pair(target, comb):
    if target.d != comb.d:
        raise UsageError(f"dimension mismatch: target d={target.d}, combination d={comb.d}")


def l2_error(target, comb, nodes: int | None = None) -> float:
    """||target - comb|| in L2 of the uniform probability measure on the cube."""
    _check_pair(target, comb)
    d = target.d
    if d <= 3:
        n = DEFAULT_L2_NODES[d] if nodes is None else int(nodes)
        if n < 2:
            raise UsageError(f"need at least 2 quadrature nodes per axis, got {n}")
        points, weights = uniform_cube_rule(d, n)
    elif d == 4:
        sampler = qmc.Sobol(d=4, scramble=False)
        points = 2.0 * sampler.random(2**16) - 1.0
        weights = np.full(points.shape[0], 1.0 / points.shape[0])
    else:
        raise UsageError(f"l2_error supports d <= 4, got d={d}")
    diff = target.evaluate_batch(points) - comb.evaluate_batch(points)
    return float(np.sqrt(np.sum(weights * diff * diff)))


def _abs_diff_fn(target, comb):
    def fn(points):
        return np.abs(target.evaluate_batch(points) - comb.evaluate_batch(points))
    return fn


def linf_error(target, comb, grid: int | None = None, refine_top: int = 10) -> float:
    """Sup-norm estimate: grid max plus ternary refinement; never below the grid max."""
    _check_pair(target, comb)
    d = target.d
    if d > 4:
        raise UsageError(f"linf_error supports d <= 4, got d={d}")
    per_axis = DEFAULT_LINF_GRID[d] if grid is None else int(grid)
    if per_axis < 2:
        raise UsageError(f"grid resolution must be at least 2 per axis, got {per_axis}")
    axes = [np.linspace(-1.0, 1.0, per_axis)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in mesh], axis=1)
    if d == 4:
        gen = _rng.stream(0, _rng.PROBE)
        points = np.vstack([points, gen.uniform(-1.0, 1.0, size=(LINF_RANDOM_POINTS_D4, 4))])
    fn = _abs_diff_fn(target, comb)
    vals = fn(points)
    best = float(vals.max())
    k = min(refine_top, points.shape[0])
    top = points[np.argsort(vals)[-k:]]
    spacing = 2.0 / (per_axis - 1)
    return max(best, _ternary_refine(fn, top, spacing))


def _ternary_refine(fn, pts: np.ndarray, spacing: float, passes: int = 2,
                    iters: int = 40) -> float:
    """Cyclic per-axis ternary search from each start point; returns the max seen."""
    x = pts.copy()
    seen = float(fn(x).max())
    d = x.shape[1]
    for _ in range(passes):
        for ax in range(d):
            lo = np.clip(x[:, ax] - spacing, -1.0, 1.0)
            hi = np.clip(x[:, ax] + spacing, -1.0, 1.0)
            for _ in range(iters):
                m1 = lo + (hi - lo) / 3.0
                m2 = hi - (hi - lo) / 3.0
                x1 = x.copy()
                x1[:, ax] = m1
                x2 = x.copy()
                x2[:, ax] = m2
                v1 = fn(x1)
                v2 = fn(x2)
                seen = max(seen, float(v1.max()), float(v2.max()))
                keep_hi = v2 >= v1
                lo = np.where(keep_hi, m1, lo)
                hi = np.where(keep_hi, hi, m2)
            x[:, ax] = 0.5 * (lo + hi)
            seen = max(seen, float(fn(x).max()))
    return seen


@dataclass(frozen=True)
class RateFit:
    points: tuple
    slope: float
    intercept: float
    r2: float

    @property
    def n(self) -> int:
        return len(self.points)

    def to_json_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r2": self.r2, "n": self.n}


def fit_rate(points) -> RateFit:
    """OLS of log error on log m; slope is the empirical rate exponent."""
    kept = []
    for m, err in points:
        if err <= 0:
            warnings.warn(f"fit_rate: dropping nonpositive error {err} at m={m}",
                          stacklevel=2)
            continue
        if m <= 0:
            raise UsageError(f"fit_rate: m values must be positive, got {m}")
        kept.append((float(m), float(err)))
    if len(kept) < 3:
        raise UsageError(f"fit_rate needs at least 3 usable points, got {len(kept)}")
    ms = np.array([p[0] for p in kept])
    if np.unique(ms).size < 2:
        raise UsageError("fit_rate needs at least 2 distinct m values")
    lx = np.log(ms)
    ly = np.log(np.array([p[1] for p in kept]))
    lxc = lx - lx.mean()
    slope = float((lxc @ (ly - ly.mean())) / (lxc @ lxc))
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((resid**2).sum()) / ss_tot
    return RateFit(points=tuple(kept), slope=slope, intercept=intercept, r2=r2)


def lower_bound_floor(m: int, d: int, s: int, A: float) -> float:
    """Sanity floor (A m d^(2s+1) log(md))^(-1/2 - s/d); measured errors must sit above it."""
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise UsageError(f"floor needs integer m >= 2, got {m}")
    if s not in (2, 3):
        raise UsageError(f"order s must be 2 or 3, got {s}")
    if d < 1 or A <= 0:
        raise UsageError(f"need d >= 1 and A > 0, got d={d}, A={A}")
    base = A * m * float(d) ** (2 * s + 1) * math.log(m * d)
    return base ** (-(0.5 + s / d))


def measure_report(target, comb, m: int, method: str, seed: int,
                   l2_nodes: int | None = None, linf_grid: int | None = None) -> ErrorReport:
    """Bundle both error norms and the size stats of a built combination."""
    return ErrorReport(
        m=int(m), method=method, seed=int(seed),
        l2=l2_error(target, comb, nodes=l2_nodes),
        linf=linf_error(target, comb, grid=linf_grid),
        terms=comb.term_count, sparsity=comb.inner_sparsity_max,
    )
