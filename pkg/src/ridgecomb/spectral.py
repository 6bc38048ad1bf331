"""Discrete spectral measures and their samplable ridge representations.

A measure is a finite list of atoms (omega_j, mag_j, phase_j) encoding the
real target f(x) = sum_j mag_j * cos(omega_j . x + phase_j).  Such targets
admit exact mixture representations over ridge atoms: the residual of f after
removing its affine part (s = 2) or its quadratic part (s = 3) equals a known
scale times the mean of sign * (a . x - t)_+^(s-1) under an explicit
probability measure on (sign, a, t).  This module computes those scales in
closed form, samples the measures exactly by inverse CDF, and provides
deterministic quadrature oracles and identity checks used to validate them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import integrate

from . import rng as _rng
from .core import RidgeAtom
from .errors import UsageError
from .quadrature import _leggauss

__all__ = [
    "SpectralMeasure",
    "TargetFunction",
    "IntegralRepresentation",
    "v_fs",
    "exact_sine_representation",
    "spectral_representation",
    "sample_atom",
    "sample_atom_arrays",
    "sample_atom_simplified",
    "representation_mean",
    "verify_ramp_identity",
    "verify_square_identity",
]


# --- closed-form antiderivatives of |cos| and |sin| and their inverses ---

def abs_cos_integral(u):
    """F(u) = integral_0^u |cos w| dw, elementwise; odd and increasing."""
    u = np.asarray(u, dtype=float)
    k = np.floor(u / np.pi + 0.5)
    return 2.0 * k + np.sin(u - k * np.pi)


def abs_cos_integral_inv(y):
    y = np.asarray(y, dtype=float)
    k = np.floor((y + 1.0) / 2.0)
    return k * np.pi + np.arcsin(np.clip(y - 2.0 * k, -1.0, 1.0))


def abs_sin_integral(u):
    """G(u) = integral_0^u |sin w| dw, elementwise; odd and increasing."""
    u = np.asarray(u, dtype=float)
    k = np.floor(u / np.pi)
    return 2.0 * k + 1.0 - np.cos(u - k * np.pi)


def abs_sin_integral_inv(y):
    y = np.asarray(y, dtype=float)
    k = np.floor(y / 2.0)
    return k * np.pi + np.arccos(np.clip(1.0 - (y - 2.0 * k), -1.0, 1.0))


def _sign_pos(x: np.ndarray) -> np.ndarray:
    # sign with the boundary mapped to +1, so eta is never zero
    return np.where(x >= 0.0, 1, -1)


def _force_unit_l1(a: np.ndarray) -> np.ndarray:
    """Nudge the largest entry of each row so that np.abs(row).sum() == 1 exactly."""
    jstar = np.argmax(np.abs(a), axis=1)
    rows = np.arange(a.shape[0])
    for _ in range(8):
        total = np.abs(a).sum(axis=1)
        bad = total != 1.0
        if not bad.any():
            return a
        r, j = rows[bad], jstar[bad]
        a[r, j] -= np.sign(a[r, j]) * (total[bad] - 1.0)
    raise AssertionError("could not normalize rows to exact unit l1 norm")


# --- spectral measures and targets ---

@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Finite cosine spectrum: f(x) = sum_j mags[j] * cos(omegas[j] . x + phases[j])."""

    omegas: np.ndarray
    mags: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        omegas = np.array(self.omegas, dtype=float, copy=True)
        if omegas.ndim == 1:
            omegas = omegas[:, None]
        mags = np.array(self.mags, dtype=float, copy=True)
        phases = np.array(self.phases, dtype=float, copy=True)
        if omegas.ndim != 2 or omegas.shape[0] < 1:
            raise UsageError("omegas must be a (J, d) array with J >= 1")
        J = omegas.shape[0]
        if mags.shape != (J,) or phases.shape != (J,):
            raise UsageError("mags and phases must both have shape (J,)")
        if not np.all(np.isfinite(omegas)) or not np.all(np.isfinite(mags)):
            raise UsageError("measure entries must be finite")
        if np.any(mags <= 0):
            raise UsageError("magnitudes must be strictly positive")
        if np.any(phases <= -np.pi - 1e-12) or np.any(phases > np.pi + 1e-12):
            raise UsageError("phases must lie in (-pi, pi]")
        if np.unique(omegas, axis=0).shape[0] != J:
            raise UsageError("duplicate frequency vectors are not allowed")
        for arr in (omegas, mags, phases):
            arr.setflags(write=False)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "mags", mags)
        object.__setattr__(self, "phases", phases)

    @property
    def d(self) -> int:
        return self.omegas.shape[1]

    @property
    def size(self) -> int:
        return self.omegas.shape[0]

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.cos(points @ self.omegas.T + self.phases) @ self.mags

    def to_json_dict(self) -> dict:
        return {
            "dim": self.d,
            "atoms": [
                {"omega": [float(v) for v in w], "mag": float(m), "phase": float(p)}
                for w, m, p in zip(self.omegas, self.mags, self.phases)
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SpectralMeasure":
        try:
            atoms = doc["atoms"]
            omegas = np.array([a["omega"] for a in atoms], dtype=float)
            if omegas.ndim == 1:
                omegas = omegas[:, None]
            if int(doc["dim"]) != omegas.shape[1]:
                raise UsageError("declared dim does not match omega length")
            return cls(
                omegas=omegas,
                mags=[a["mag"] for a in atoms],
                phases=[a["phase"] for a in atoms],
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise UsageError(f"malformed measure document: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "SpectralMeasure":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def v_fs(meas: SpectralMeasure, s: int) -> float:
    """Spectral moment sum_j mags[j] * ||omega_j||_1^s."""
    if s not in (0, 1, 2, 3):
        raise UsageError(f"moment order must be in {{0,1,2,3}}, got {s}")
    c = np.abs(meas.omegas).sum(axis=1)
    return float((meas.mags * c**s).sum())


@dataclass(frozen=True, eq=False)
class TargetFunction:
    """A target with batch evaluation and its exact expansion data at the origin."""

    d: int
    b0: float
    a0: np.ndarray
    A0: np.ndarray
    _fn: object

    def __post_init__(self):
        a0 = np.array(self.a0, dtype=float, copy=True)
        A0 = np.array(self.A0, dtype=float, copy=True)
        a0.setflags(write=False)
        A0.setflags(write=False)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "b0", float(self.b0))

    @classmethod
    def from_measure(cls, meas: SpectralMeasure) -> "TargetFunction":
        b0 = float((meas.mags * np.cos(meas.phases)).sum())
        a0 = -(meas.omegas.T @ (meas.mags * np.sin(meas.phases)))
        A0 = -(meas.omegas.T * (meas.mags * np.cos(meas.phases))) @ meas.omegas
        return cls(d=meas.d, b0=b0, a0=a0, A0=A0, _fn=meas.evaluate_batch)

    @classmethod
    def from_sine_ridge(cls, theta) -> "TargetFunction":
        theta = _check_theta(theta)
        K = float(theta.sum())
        scale = 1.0 / (4.0 * np.pi * K**2)

        def fn(points, _theta=theta, _scale=scale):
            return np.sin(np.pi * (np.asarray(points, dtype=float) @ _theta)) * _scale

        d = theta.size
        return cls(d=d, b0=0.0, a0=theta / (4.0 * K**2), A0=np.zeros((d, d)), _fn=fn)

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.d:
            raise UsageError(f"points must have shape (n, {self.d})")
        return np.asarray(self._fn(points), dtype=float)

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.evaluate_batch(x[None, :])[0])

    def residual_batch(self, points: np.ndarray, s: int) -> np.ndarray:
        """Target minus its affine part (s=2) or affine + quadratic part (s=3)."""
        points = np.asarray(points, dtype=float)
        out = self.evaluate_batch(points) - self.b0 - points @ self.a0
        if s == 3:
            out = out - 0.5 * np.einsum("ni,ij,nj->n", points, self.A0, points)
        return out


def _check_theta(theta) -> np.ndarray:
    arr = np.asarray(theta, dtype=float)
    if arr.ndim == 0:
        arr = arr[None]
    if arr.ndim != 1 or arr.size < 1:
        raise UsageError("theta must be a nonempty integer vector")
    if np.any(arr != np.round(arr)) or np.any(arr < 1):
        raise UsageError(f"theta entries must be positive integers, got {theta}")
    out = np.round(arr)
    out.setflags(write=False)
    return out


# --- integral representations ---

class IntegralRepresentation:
    """Exact mixture representation of a target's residual over ridge atoms.

    kind "spectral": residual(x) = scale * E[eta (a.x - t)_+^(s-1)] with
    scale = v (s=2) or v/2 (s=3), where the expectation runs over a measure
    whose (j, z) marginal picks a stored frequency and a direction flip and
    whose t-density on [0, 1] is proportional to |cos| (s=2) or |sin| (s=3)
    of (||omega_j||_1 t + z * phase_j).

    kind "exact-sine": the unit-scale ramp representation of the target
    sin(pi theta.x)/(4 pi ||theta||_1^2) for positive integer theta; here
    v = 1 and the t-density is (pi/2)|sin(pi ||theta||_1 t)| with z uniform.
    """

    def __init__(self, d, s, v, kind, measure=None, theta=None, seed=0, tables=None):
        self.d = int(d)
        self.s = int(s)
        self.v = float(v)
        self.kind = kind
        self.measure = measure
        self.theta = theta
        self.seed = int(seed)
        self._tables = tables

    @property
    def residual_scale(self) -> float:
        """Factor multiplying the atom mean to recover the residual."""
        return self.v if self.s == 2 else self.v / 2.0


def spectral_representation(meas: SpectralMeasure, s: int, seed: int = 0) -> IntegralRepresentation:
    """Build the samplable representation of a cosine-sum target for order s."""
    if s not in (2, 3):
        raise UsageError(f"order s must be 2 or 3, got {s}")
    c_all = np.abs(meas.omegas).sum(axis=1)
    keep = c_all > 0  # zero frequencies carry no sampling weight for s >= 1
    js = np.repeat(np.nonzero(keep)[0], 2)
    zs = np.tile(np.array([1, -1]), keep.sum())
    c = c_all[js]
    ph = zs * meas.phases[js]
    F = abs_cos_integral if s == 2 else abs_sin_integral
    W = (F(ph + c) - F(ph)) / c if js.size else np.zeros(0)
    weights = meas.mags[js] * c**s * W
    v = float(weights.sum())
    moment = v_fs(meas, s)
    assert v <= 2.0 * moment + 1e-9 * max(moment, 1.0)
    tables = {
        "js": js,
        "zs": zs,
        "c": c,
        "ph": ph,
        "probs": weights / v if v > 0 else None,
    }
    return IntegralRepresentation(
        d=meas.d, s=s, v=v, kind="spectral", measure=meas, seed=seed, tables=tables
    )


def exact_sine_representation(theta, seed: int = 0) -> IntegralRepresentation:
    """Unit-scale ramp representation of sin(pi theta.x)/(4 pi ||theta||_1^2)."""
    theta = _check_theta(theta)
    return IntegralRepresentation(
        d=theta.size, s=2, v=1.0, kind="exact-sine", theta=theta, seed=seed
    )


def target_of(rep: IntegralRepresentation) -> TargetFunction:
    """The target function a representation stands for."""
    if rep.kind == "exact-sine":
        return TargetFunction.from_sine_ridge(rep.theta)
    return TargetFunction.from_measure(rep.measure)


def sample_atom_arrays(rep: IntegralRepresentation, n: int, seed: int | None = None,
                       channel: int = _rng.ATOMS):
    """Draw n atoms; returns (eta, t, a) as arrays of shape (n,), (n,), (n, d)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise UsageError(f"draw count must be a positive integer, got {n}")
    gen = _rng.stream(rep.seed if seed is None else seed, channel)
    return _draw_arrays(gen, rep, int(n))


def _draw_arrays(gen: np.random.Generator, rep: IntegralRepresentation, n: int):
    # shared by sample_atom_arrays and the rejection loops in the builders
    if rep.v == 0.0:
        raise UsageError("representation has zero spectral mass; nothing to sample")
    if rep.kind == "exact-sine":
        theta = rep.theta
        K = float(theta.sum())
        z = 2 * gen.integers(0, 2, size=n) - 1
        u = gen.random(n)
        t = abs_sin_integral_inv(2.0 * K * u) / (np.pi * K)
        t = np.clip(t, 0.0, 1.0)
        eta = np.where(np.sin(np.pi * K * t) >= 0.0, -z, z)
        a = z[:, None] * (theta / K)
    else:
        tab = rep._tables
        if tab["probs"] is None:
            raise UsageError("representation has no sampling mass (constant target)")
        probs = tab["probs"] / tab["probs"].sum()
        idx = gen.choice(probs.size, size=n, p=probs)
        c, ph, z = tab["c"][idx], tab["ph"][idx], tab["zs"][idx]
        u = gen.random(n)
        F, Finv = (
            (abs_cos_integral, abs_cos_integral_inv)
            if rep.s == 2
            else (abs_sin_integral, abs_sin_integral_inv)
        )
        lo = F(ph)
        t = (Finv(lo + u * (F(ph + c) - lo)) - ph) / c
        t = np.clip(t, 0.0, 1.0)
        arg = c * t + ph
        eta = -_sign_pos(np.cos(arg)) if rep.s == 2 else _sign_pos(np.sin(arg))
        a = (z / c)[:, None] * rep.measure.omegas[tab["js"][idx]]
    a = _force_unit_l1(a)
    if np.any((t < 0.0) | (t > 1.0)) or np.any(np.abs(a).sum(axis=1) != 1.0):
        raise AssertionError("sampled atom violated its invariants")
    return eta.astype(int), t, a


def sample_atom(rep: IntegralRepresentation, n: int, seed: int | None = None,
                channel: int = _rng.ATOMS) -> list[RidgeAtom]:
    eta, t, a = sample_atom_arrays(rep, n, seed, channel)
    return [
        RidgeAtom(sign=int(eta[i]), a=a[i], t=float(t[i]), s=rep.s) for i in range(n)
    ]


def sample_simplified_arrays(meas: SpectralMeasure, s: int, n: int, seed: int = 0):
    """Simplified sampler: frequencies by spectral weight, t uniform on [0, 1].

    The sinusoidal density factor is folded into the term coefficient, so each
    draw carries a coefficient b with |b| <= 1 and the matching combination
    scale is v = 2 * v_fs(meas, s).  Returns (b, t, a, v) with array parts of
    shape (n,), (n,), (n, d); a constant target gives empty arrays and v = 0.
    """
    if s not in (2, 3):
        raise UsageError(f"order s must be 2 or 3, got {s}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise UsageError(f"draw count must be a positive integer, got {n}")
    moment = v_fs(meas, s)
    if moment == 0.0:
        empty = np.zeros(0)
        return empty, empty, np.zeros((0, meas.d)), 0.0
    gen = _rng.stream(seed, _rng.ATOMS)
    c_all = np.abs(meas.omegas).sum(axis=1)
    keep = np.nonzero(c_all > 0)[0]
    weights = meas.mags[keep] * c_all[keep] ** s
    probs = weights / weights.sum()
    pick = keep[gen.choice(keep.size, size=n, p=probs)]
    z = 2 * gen.integers(0, 2, size=n) - 1
    t = gen.random(n)
    arg = c_all[pick] * t + z * meas.phases[pick]
    b = -np.cos(arg) if s == 2 else np.sin(arg)
    a = _force_unit_l1((z / c_all[pick])[:, None] * meas.omegas[pick])
    return b, t, a, 2.0 * moment


def sample_atom_simplified(meas: SpectralMeasure, s: int, n: int, seed: int = 0):
    """Atom-object form of sample_simplified_arrays: returns ([(b, atom)], v)."""
    b, t, a, v = sample_simplified_arrays(meas, s, n, seed=seed)
    terms = [
        (float(b[i]), RidgeAtom(sign=1 if b[i] >= 0 else -1, a=a[i], t=float(t[i]), s=s))
        for i in range(b.size)
    ]
    return terms, v


# --- deterministic quadrature oracle for the represented mean ---

def representation_mean(rep: IntegralRepresentation, points: np.ndarray,
                        nodes: int = 96) -> np.ndarray:
    """E[eta (a.x - t)_+^(s-1)] at each point, by exact-kink Gauss-Legendre.

    The sign rule times the |trig| density collapses to a smooth signed trig
    factor, so the only nonsmooth feature left is the positive-part kink at
    t = z a.x; integrating over [0, clip(z a.x, 0, 1)] makes the integrand a
    polynomial times a sinusoid, which the panel rule resolves to near machine
    precision.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != rep.d:
        raise UsageError(f"points must have shape (n, {rep.d})")
    xi, wq = _leggauss(nodes)
    out = np.zeros(points.shape[0])

    def add_panel(az, trig, freq, phase, power):
        # integral_0^tau trig(freq*t + phase) * (az - t)^power dt, tau = clip(az, 0, 1)
        half = np.clip(az, 0.0, 1.0)[:, None] / 2.0
        tt = half * (xi[None, :] + 1.0)
        vals = trig(freq * tt + phase) * (az[:, None] - tt) ** power
        return (vals * (half * wq[None, :])).sum(axis=1)

    if rep.kind == "exact-sine":
        K = float(rep.theta.sum())
        a_unit = rep.theta / K
        proj = points @ a_unit
        for z in (1, -1):
            out += -z * (np.pi / 4.0) * add_panel(z * proj, np.sin, np.pi * K, 0.0, 1)
        return out

    tab = rep._tables
    if rep.v == 0.0:
        return out
    meas = rep.measure
    power = rep.s - 1
    for e in range(tab["js"].size):
        j, z, c, ph = tab["js"][e], tab["zs"][e], tab["c"][e], tab["ph"][e]
        proj = (z / c) * (points @ meas.omegas[j])
        coeff = meas.mags[j] * c**rep.s / rep.v
        if rep.s == 2:
            out += -coeff * add_panel(proj, np.cos, c, ph, power)
        else:
            out += coeff * add_panel(proj, np.sin, c, ph, power)
    return out


# --- trigonometric Taylor identities behind the representations ---

def verify_ramp_identity(z: float, c: float) -> float:
    """Residual of the first-order identity behind ramp representations.

    Checks -integral_0^c [(z-u)_+ e^{iu} + (-z-u)_+ e^{-iu}] du = e^{iz}-iz-1
    by adaptive quadrature; requires |z| <= c.  Returns the absolute residual.
    """
    z, c = float(z), float(c)
    if c <= 0 or abs(z) > c:
        raise UsageError(f"need |z| <= c and c > 0, got z={z}, c={c}")
    pts = [abs(z)] if 0 < abs(z) < c else None
    re = integrate.quad(
        lambda u: (max(z - u, 0.0) + max(-z - u, 0.0)) * math.cos(u),
        0.0, c, points=pts, limit=200, epsabs=1e-12, epsrel=1e-12,
    )[0]
    im = integrate.quad(
        lambda u: (max(z - u, 0.0) - max(-z - u, 0.0)) * math.sin(u),
        0.0, c, points=pts, limit=200, epsabs=1e-12, epsrel=1e-12,
    )[0]
    lhs = -(re + 1j * im)
    rhs = complex(math.cos(z) - 1.0, math.sin(z) - z)
    return abs(lhs - rhs)


def verify_square_identity(x, omega) -> float:
    """Residual of the second-order identity behind squared-ramp representations.

    Checks (i/2) c^3 integral_0^1 [(-a.x-t)_+^2 e^{-ict} - (a.x-t)_+^2 e^{ict}] dt
    = e^{i omega.x} + (omega.x)^2/2 - i omega.x - 1 with a = omega/||omega||_1.
    Returns the absolute residual.
    """
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if x.shape != omega.shape or x.ndim != 1:
        raise UsageError("x and omega must be 1-d vectors of equal length")
    c = float(np.abs(omega).sum())
    if c == 0.0:
        raise UsageError("omega must be nonzero")
    ax = float(omega @ x) / c
    if abs(ax) > 1.0 + 1e-12:
        raise UsageError("x must lie in the unit cube so that |a.x| <= 1")
    pts = [abs(ax)] if 0 < abs(ax) < 1 else None

    def plus2(v):
        return max(v, 0.0) ** 2

    re = integrate.quad(
        lambda t: (plus2(-ax - t) - plus2(ax - t)) * math.cos(c * t),
        0.0, 1.0, points=pts, limit=200, epsabs=1e-13, epsrel=1e-13,
    )[0]
    im = integrate.quad(
        lambda t: -(plus2(-ax - t) + plus2(ax - t)) * math.sin(c * t),
        0.0, 1.0, points=pts, limit=200, epsabs=1e-13, epsrel=1e-13,
    )[0]
    lhs = 0.5j * c**3 * (re + 1j * im)
    wx = float(omega @ x)
    rhs = complex(math.cos(wx) + wx**2 / 2.0 - 1.0, math.sin(wx) - wx)
    return abs(lhs - rhs)
