"""Named target catalog for the command line.

Two kinds of target spec are understood:

- "sine-ridge:T" where T is a comma-separated positive integer vector,
  optionally parenthesized: the target sin(pi theta . x)/(4 pi ||theta||_1^2).
- "cosine-sum:PATH" where PATH is a JSON file holding a cosine spectrum
  {dim, atoms: [{omega, mag, phase}, ...]}.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError
from .spectral import (
    IntegralRepresentation,
    SpectralMeasure,
    TargetFunction,
    exact_sine_representation,
    spectral_representation,
)

__all__ = ["resolve_target", "catalog_entries", "sine_ridge_measure"]


def _parse_theta(text: str) -> tuple:
    body = text.strip().strip("()").strip()
    parts = [p.strip() for p in body.split(",")]
    parts = [p for p in parts if p]  # tolerate the trailing comma in "(1,)"
    if not parts:
        raise UsageError("sine-ridge target needs at least one integer component")
    try:
        theta = tuple(int(part) for part in parts)
    except ValueError as exc:
        raise UsageError(f"could not parse integer vector from {text!r}") from exc
    if any(v < 1 for v in theta):
        raise UsageError(f"sine-ridge components must be positive integers, got {theta}")
    return theta


def sine_ridge_measure(theta) -> SpectralMeasure:
    """The one-atom cosine spectrum of sin(pi theta . x)/(4 pi ||theta||_1^2)."""
    arr = np.asarray(theta, dtype=float)
    K = arr.sum()
    return SpectralMeasure(
        omegas=np.pi * arr[None, :],
        mags=[1.0 / (4.0 * np.pi * K**2)],
        phases=[-np.pi / 2.0],
    )


def resolve_target(spec: str, s: int, seed: int = 0):
    """Parse a target spec into (TargetFunction, IntegralRepresentation)."""
    if s not in (2, 3):
        raise UsageError(f"order s must be 2 or 3, got {s}")
    if not isinstance(spec, str) or ":" not in spec:
        raise UsageError(
            f"target spec must look like 'sine-ridge:1,1' or 'cosine-sum:file.json', got {spec!r}"
        )
    kind, _, rest = spec.partition(":")
    if kind == "sine-ridge":
        theta = _parse_theta(rest)
        if s == 2:
            rep = exact_sine_representation(theta, seed=seed)
            return TargetFunction.from_sine_ridge(theta), rep
        meas = sine_ridge_measure(theta)
        return TargetFunction.from_measure(meas), spectral_representation(meas, s, seed=seed)
    if kind == "cosine-sum":
        try:
            meas = SpectralMeasure.load(rest)
        except FileNotFoundError as exc:
            raise UsageError(f"measure file not found: {rest}") from exc
        except ValueError as exc:
            raise UsageError(f"could not parse measure file {rest}: {exc}") from exc
        return TargetFunction.from_measure(meas), spectral_representation(meas, s, seed=seed)
    raise UsageError(f"unknown target kind {kind!r}; run the catalog command for options")


def catalog_entries() -> list[dict]:
    return [
        {
            "name": "sine-ridge:T",
            "example": "sine-ridge:1,1",
            "description": "sin(pi T.x)/(4 pi ||T||_1^2) for a positive integer vector T; "
                           "s=2 uses its exact unit-scale representation, s=3 its spectrum",
        },
        {
            "name": "cosine-sum:PATH",
            "example": "cosine-sum:measure.json",
            "description": "finite cosine spectrum loaded from JSON "
                           "{dim, atoms: [{omega, mag, phase}]}; sampled at order s",
        },
    ]
