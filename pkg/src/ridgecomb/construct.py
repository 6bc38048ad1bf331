"""The three combination builders: i.i.d., stratified, and inner-sparsified.

The i.i.d. builder is plain Monte Carlo over the representation's atom
measure.  The stratified builder partitions atom parameter space into cells of
small sup-distance diameter, allocates the term budget proportionally to cell
masses, and samples each cell's conditional measure, which trades the
m^(-1/2) rate for a better exponent.  The sparsifier rewrites each inner
weight vector as an average of m0 signed basis vectors, bounding coordinate
count by m0 without touching any other field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import rng as _rng
from .core import RidgeAtom, RidgeCombination
from .errors import BuilderError, UsageError
from .spectral import (
    IntegralRepresentation,
    TargetFunction,
    _draw_arrays,
    _force_unit_l1,
    abs_sin_integral,
    abs_sin_integral_inv,
    sample_atom_simplified,
)

__all__ = [
    "StratifiedPlan",
    "SparsifierConfig",
    "partition_parameters",
    "estimate_masses",
    "exact_sine_masses",
    "allocate",
    "build_iid",
    "build_simplified",
    "build_stratified",
    "sparsify",
    "build_sparse",
    "default_epsilon",
    "build_from_config",
]

# a cell straddling a starved region aborts after this many pooled draws
REJECTION_DRAW_BUDGET = 10**6
REJECTION_TOTAL_CAP = 2 * 10**8


def _check_build_args(rep: IntegralRepresentation, m, target: TargetFunction):
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise UsageError(f"term budget m must be a positive integer, got {m}")
    if rep.d != target.d:
        raise UsageError(f"representation dimension {rep.d} != target dimension {target.d}")


def _assemble(rep, target, coeffs, eta, t, a, v) -> RidgeCombination:
    terms = []
    for i in range(len(coeffs)):
        atom = RidgeAtom(sign=int(eta[i]), a=a[i], t=float(t[i]), s=rep.s)
        terms.append((float(coeffs[i]), atom))
    A0 = target.A0 if rep.s == 3 else None
    return RidgeCombination(
        d=rep.d, s=rep.s, b0=target.b0, a0=target.a0, A0=A0, v=v, terms=tuple(terms)
    )


# --- i.i.d. builder ---

def build_iid(rep: IntegralRepresentation, m: int, target: TargetFunction,
              seed: int | None = None) -> RidgeCombination:
    """m-term Monte Carlo combination; coefficients are the sampled signs."""
    _check_build_args(rep, m, target)
    if rep.v == 0.0:  # constant-plus-affine target: nothing to sample
        return _assemble(rep, target, np.zeros(0), np.zeros(0, dtype=int),
                         np.zeros(0), np.zeros((0, rep.d)), 0.0)
    gen = _rng.stream(rep.seed if seed is None else seed, _rng.ATOMS)
    eta, t, a = _draw_arrays(gen, rep, int(m))
    return _assemble(rep, target, eta.astype(float), eta, t, a, rep.v)


def build_simplified(meas, s: int, m: int, target: TargetFunction,
                     seed: int = 0) -> RidgeCombination:
    """i.i.d. build from the uniform-threshold sampler; handles constant targets."""
    if target.d != meas.d:
        raise UsageError(f"measure dimension {meas.d} != target dimension {target.d}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise UsageError(f"term budget m must be a positive integer, got {m}")
    terms, v = sample_atom_simplified(meas, s, m, seed=seed)
    A0 = target.A0 if s == 3 else None
    return RidgeCombination(
        d=target.d, s=s, b0=target.b0, a0=target.a0, A0=A0, v=v, terms=tuple(terms)
    )


# --- stratified partition ---

@dataclass(frozen=True, eq=False)
class StratifiedPlan:
    """A partition of (sign, threshold, direction) space with optional allocation.

    Cells are products of an atom sign, a direction sign-orthant, magnitude
    bins for the first d-1 direction coordinates, and a threshold bin.  The
    arrays are parallel, one row per cell, sorted by the integer cell code
    used for membership lookup.
    """

    epsilon: float
    d: int
    s: int
    delta_t: float
    delta_a: float
    n_t: int
    n_a: int
    eta: np.ndarray
    sigma: np.ndarray
    kmag: np.ndarray
    tbin: np.ndarray
    code: np.ndarray
    L: np.ndarray | None = None
    m_alloc: np.ndarray | None = None
    n_draw: np.ndarray | None = None
    mode: str | None = None

    @property
    def M(self) -> int:
        return self.eta.size

    @property
    def diameter_bound(self) -> float:
        """Worst-case within-cell atom_sup_distance; strictly below epsilon."""
        lip = 1.0 if self.s == 2 else 2.0
        return lip * (2 * (self.d - 1) * self.delta_a + self.delta_t)

    def membership_codes(self, eta, t, a) -> np.ndarray:
        """Integer cell code of each atom triple; vectorized."""
        a = np.asarray(a, dtype=float)
        eta01 = (np.asarray(eta) + 1) // 2
        sig = np.where(a >= 0.0, 1, 0)
        sigbits = np.zeros(a.shape[0], dtype=np.int64)
        for i in range(self.d):
            sigbits = sigbits * 2 + sig[:, i]
        kcode = np.zeros(a.shape[0], dtype=np.int64)
        for i in range(self.d - 1):
            digit = np.minimum(
                np.floor(np.abs(a[:, i]) / self.delta_a).astype(np.int64), self.n_a - 1
            )
            kcode = kcode * self.n_a + digit
        tb = np.minimum(np.floor(np.asarray(t) / self.delta_t).astype(np.int64), self.n_t - 1)
        return ((eta01.astype(np.int64) * (1 << self.d) + sigbits)
                * self.n_a ** (self.d - 1) + kcode) * self.n_t + tb

    def rows_of_codes(self, codes: np.ndarray) -> np.ndarray:
        """Row index for each code, or -1 when the code has no cell."""
        pos = np.searchsorted(self.code, codes)
        pos = np.clip(pos, 0, self.M - 1)
        return np.where(self.code[pos] == codes, pos, -1)

    def representatives(self):
        """(eta, t, a) arrays of one canonical atom per cell."""
        t_rep = np.clip((self.tbin + 0.5) * self.delta_t, 0.0, 1.0)
        if self.d == 1:
            a_rep = self.sigma.astype(float).copy()
        else:
            mags = (self.kmag + 0.5) * self.delta_a
            over = mags.sum(axis=1) > 1.0
            mags[over] = self.kmag[over] * self.delta_a  # fall back to the lower corner
            last = np.clip(1.0 - mags.sum(axis=1), 0.0, 1.0)
            a_rep = self.sigma * np.column_stack([mags, last])
        return self.eta.copy(), t_rep, _force_unit_l1(a_rep)

    @property
    def strata(self):
        """List of (representative RidgeAtom, mass) pairs; mass None before estimation."""
        eta, t, a = self.representatives()
        L = self.L if self.L is not None else [None] * self.M
        return [
            (RidgeAtom(sign=int(eta[k]), a=a[k], t=float(t[k]), s=self.s), L[k])
            for k in range(self.M)
        ]

    def _label(self, row: int) -> str:
        return (f"cell(eta={int(self.eta[row])}, sigma={self.sigma[row].tolist()}, "
                f"kmag={self.kmag[row].tolist()}, tbin={int(self.tbin[row])})")


def partition_parameters(d: int, s: int, epsilon: float) -> StratifiedPlan:
    """Enumerate the cell partition for diameter target epsilon (no masses yet)."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise UsageError(f"dimension must be a positive integer, got {d}")
    if s not in (2, 3):
        raise UsageError(f"order s must be 2 or 3, got {s}")
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise UsageError(f"epsilon must be positive, got {epsilon}")
    lip = 1.0 if s == 2 else 2.0
    delta_t = epsilon / (4.0 * lip)
    # magnitude mesh: fine enough that 2(d-1)*delta_a + delta_t stays under epsilon/lip
    delta_a = delta_t if d == 1 else min(delta_t, 5.0 * epsilon / (16.0 * lip * (d - 1)))
    n_t = max(1, math.ceil(1.0 / delta_t - 1e-12))
    n_a = max(1, math.ceil(1.0 / delta_a - 1e-12))

    if d == 1:
        kmag1 = np.zeros((1, 0), dtype=np.int64)
    else:
        grids = np.meshgrid(*([np.arange(n_a, dtype=np.int64)] * (d - 1)), indexing="ij")
        kmag1 = np.stack([g.ravel() for g in grids], axis=1)
        kmag1 = kmag1[kmag1.sum(axis=1) * delta_a <= 1.0 + 1e-9]

    n_k = kmag1.shape[0]
    n_sig = 1 << d
    M = 2 * n_sig * n_k * n_t
    if M > 5 * 10**6:
        raise UsageError(f"partition would have {M} cells; choose a larger epsilon")

    eta_i, sig_i, k_i, t_i = np.meshgrid(
        np.arange(2, dtype=np.int64), np.arange(n_sig, dtype=np.int64),
        np.arange(n_k, dtype=np.int64), np.arange(n_t, dtype=np.int64),
        indexing="ij",
    )
    eta_i, sig_i, k_i, t_i = (v.ravel() for v in (eta_i, sig_i, k_i, t_i))
    eta = 2 * eta_i - 1
    sigma = np.empty((M, d), dtype=np.int64)
    for i in range(d):
        sigma[:, i] = 2 * ((sig_i >> (d - 1 - i)) & 1) - 1
    kmag = kmag1[k_i]
    kcode = np.zeros(M, dtype=np.int64)
    for i in range(d - 1):
        kcode = kcode * n_a + kmag[:, i]
    code = ((eta_i * n_sig + sig_i) * n_a ** (d - 1) + kcode) * n_t + t_i

    order = np.argsort(code)
    plan = StratifiedPlan(
        epsilon=epsilon, d=int(d), s=int(s), delta_t=delta_t, delta_a=delta_a,
        n_t=n_t, n_a=n_a, eta=eta[order], sigma=sigma[order], kmag=kmag[order],
        tbin=t_i[order], code=code[order],
    )
    assert plan.diameter_bound < epsilon
    return plan


def _check_plan_compat(plan: StratifiedPlan, rep: IntegralRepresentation):
    if plan.d != rep.d or plan.s != rep.s:
        raise UsageError("plan and representation disagree on (d, s)")


def estimate_masses(plan: StratifiedPlan, rep: IntegralRepresentation,
                    seed: int | None = None, n: int | None = None) -> StratifiedPlan:
    """Estimate cell masses by binning i.i.d. draws from the representation."""
    _check_plan_compat(plan, rep)
    if n is None:
        n = max(10**4, 100 * plan.M)
    gen = _rng.stream(rep.seed if seed is None else seed, _rng.MASSES)
    counts = np.zeros(plan.M, dtype=np.int64)
    left = int(n)
    while left > 0:
        batch = min(left, 1 << 20)
        eta, t, a = _draw_arrays(gen, rep, batch)
        rows = plan.rows_of_codes(plan.membership_codes(eta, t, a))
        if np.any(rows < 0):
            raise BuilderError("a sampled atom fell outside the partition")
        counts += np.bincount(rows, minlength=plan.M)
        left -= batch
    return replace(plan, L=counts / float(n))


def exact_sine_masses(plan: StratifiedPlan, rep: IntegralRepresentation) -> StratifiedPlan:
    """Closed-form cell masses for the exact sine-ridge representation.

    The threshold density is (pi/2)|sin(pi K t)| and the sign rule fixes eta
    on each arc [j/K, (j+1)/K], so each cell mass is a sum of antiderivative
    differences over the arcs of matching parity inside its threshold bin.
    """
    _check_plan_compat(plan, rep)
    if rep.kind != "exact-sine":
        raise UsageError("exact masses are only available for exact-sine representations")
    theta = rep.theta
    K = int(theta.sum())
    L = np.zeros(plan.M)
    for z in (1, -1):
        a_z = _force_unit_l1((z * theta / float(K))[None, :].copy())[0]
        sig_ok = np.all(plan.sigma == np.where(a_z >= 0.0, 1, -1), axis=1)
        k_ok = np.ones(plan.M, dtype=bool)
        for i in range(plan.d - 1):
            digit = min(int(abs(a_z[i]) // plan.delta_a), plan.n_a - 1)
            k_ok &= plan.kmag[:, i] == digit
        rows = np.nonzero(sig_ok & k_ok)[0]
        if rows.size == 0:
            continue
        lo = plan.tbin[rows] * plan.delta_t
        hi = np.minimum((plan.tbin[rows] + 1) * plan.delta_t, 1.0)
        # arc parity j even <-> sin >= 0 <-> eta = -z
        parity = np.where(plan.eta[rows] == -z, 0, 1)
        mass = np.zeros(rows.size)
        for j in range(K):
            a_arc = np.maximum(lo, j / K)
            b_arc = np.minimum(hi, (j + 1) / K)
            width_ok = (b_arc > a_arc) & (parity == j % 2)
            seg = abs_sin_integral(np.pi * K * b_arc) - abs_sin_integral(np.pi * K * a_arc)
            mass += np.where(width_ok, seg / (4.0 * K), 0.0)
        L[rows] += mass
    total = L.sum()
    assert abs(total - 1.0) <= 1e-9
    return replace(plan, L=L / total)


def allocate(plan: StratifiedPlan, m: int, mode: str, seed: int = 0) -> StratifiedPlan:
    """Assign per-cell term counts; drops zero-mass cells first.

    Signed mode rounds m*L_k to integers by a shared-offset systematic scheme:
    each m_k lands on floor or ceil of m*L_k with the exact mean, and the
    rounded counts always sum to m, so sum(n_k) <= m + M deterministically.
    Fractional mode keeps m_k = m*L_k real and draws n_k = ceil(m_k) atoms.
    """
    if plan.L is None:
        raise UsageError("plan has no masses; run estimate_masses or exact_sine_masses")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise UsageError(f"term budget m must be a positive integer, got {m}")
    if mode not in ("signed", "fractional"):
        raise UsageError(f"mode must be 'signed' or 'fractional', got {mode!r}")
    if abs(plan.L.sum() - 1.0) > 1e-12:
        raise UsageError("cell masses are not normalized")
    keep = np.nonzero(plan.L > 0)[0]
    sub = replace(
        plan,
        eta=plan.eta[keep], sigma=plan.sigma[keep], kmag=plan.kmag[keep],
        tbin=plan.tbin[keep], code=plan.code[keep], L=plan.L[keep] / plan.L[keep].sum(),
    )
    mL = m * sub.L
    if mode == "signed":
        gen = _rng.stream(seed, _rng.ALLOCATION)
        u = 1.0 - gen.random()
        cum = np.cumsum(mL)
        cum[-1] = float(m)
        marks = np.floor(cum - u)
        m_k = np.diff(marks, prepend=-1.0)
        assert int(m_k.sum()) == m
        n_k = (m_k + (m_k == 0)).astype(np.int64)
    else:
        m_k = mL
        n_k = np.maximum(np.ceil(mL - 1e-12).astype(np.int64), 1)
    assert int(n_k.sum()) <= m + sub.M
    return replace(sub, m_alloc=m_k, n_draw=n_k, mode=mode)


# --- conditional sampling within cells ---

def _conditional_exact_sine(gen, rep, plan: StratifiedPlan, need: np.ndarray):
    """Direct inverse-CDF draws from each cell's conditional threshold law."""
    theta, K = rep.theta, int(rep.theta.sum())
    rows = np.repeat(np.arange(plan.M), need)
    R = rows.size
    lo = plan.tbin[rows] * plan.delta_t
    hi = np.minimum((plan.tbin[rows] + 1) * plan.delta_t, 1.0)
    z = plan.sigma[rows, 0]
    parity = np.where(plan.eta[rows] == -z, 0, 1)
    piece_lo = np.empty((R, K))
    piece_hi = np.empty((R, K))
    pm = np.zeros((R, K))
    for j in range(K):
        a_arc = np.maximum(lo, j / K)
        b_arc = np.minimum(hi, (j + 1) / K)
        ok = (b_arc > a_arc) & (parity == j % 2)
        piece_lo[:, j] = a_arc
        piece_hi[:, j] = np.maximum(b_arc, a_arc)
        pm[:, j] = np.where(
            ok,
            abs_sin_integral(np.pi * K * piece_hi[:, j]) - abs_sin_integral(np.pi * K * a_arc),
            0.0,
        )
    cum = np.cumsum(pm, axis=1)
    W = cum[:, -1]
    if np.any(W <= 0):
        bad = int(rows[np.argmax(W <= 0)])
        raise BuilderError(f"{plan._label(bad)} carries mass but admits no draws")
    pick = (cum < (gen.random(R) * W)[:, None]).sum(axis=1)
    pick = np.minimum(pick, K - 1)
    lo_p = piece_lo[np.arange(R), pick]
    hi_p = piece_hi[np.arange(R), pick]
    s_lo = abs_sin_integral(np.pi * K * lo_p)
    s_hi = abs_sin_integral(np.pi * K * hi_p)
    t = abs_sin_integral_inv(s_lo + gen.random(R) * (s_hi - s_lo)) / (np.pi * K)
    t = np.clip(t, lo_p, hi_p)
    # keep boundary draws inside the half-open bin
    edge = (t >= hi) & (hi < 1.0)
    t[edge] = np.nextafter(hi[edge], 0.0)
    a = _force_unit_l1(z[:, None] * (theta / float(K)))
    return rows, plan.eta[rows].copy(), t, a


def _conditional_rejection(gen, rep, plan: StratifiedPlan, need: np.ndarray):
    """Fill per-cell quotas by routing pooled i.i.d. draws to their cells."""
    total = int(need.sum())
    offsets = np.concatenate([[0], np.cumsum(need)])
    out_eta = np.empty(total, dtype=np.int64)
    out_t = np.empty(total)
    out_a = np.empty((total, rep.d))
    filled = np.zeros(plan.M, dtype=np.int64)
    drawn = 0
    batch = 1 << 14
    while np.any(filled < need):
        eta, t, a = _draw_arrays(gen, rep, batch)
        drawn += batch
        rows = plan.rows_of_codes(plan.membership_codes(eta, t, a))
        ok = rows >= 0
        if np.any(ok):
            order = np.argsort(rows[ok], kind="stable")
            srows = rows[ok][order]
            src = np.nonzero(ok)[0][order]
            rank = np.arange(srows.size) - np.searchsorted(srows, srows)
            sel = rank < (need - filled)[srows]
            dest = offsets[srows[sel]] + filled[srows[sel]] + rank[sel]
            out_eta[dest] = eta[src[sel]]
            out_t[dest] = t[src[sel]]
            out_a[dest] = a[src[sel]]
            filled += np.bincount(srows[sel], minlength=plan.M)
        starving = (filled == 0) & (need > 0)
        if drawn >= REJECTION_DRAW_BUDGET and np.any(starving):
            row = int(np.argmax(starving))
            raise BuilderError(
                f"{plan._label(row)} accepted no draws after {drawn} attempts"
            )
        if drawn >= REJECTION_TOTAL_CAP:
            raise BuilderError(f"conditional sampling exceeded {REJECTION_TOTAL_CAP} draws")
        batch = min(batch * 2, 1 << 18)
    rows = np.repeat(np.arange(plan.M), need)
    return rows, out_eta, out_t, out_a


def build_stratified(rep: IntegralRepresentation, m: int, epsilon: float, mode: str,
                     target: TargetFunction, seed: int = 0) -> RidgeCombination:
    """Stratified build: partition, mass, allocate, then conditional sampling.

    Stored coefficients are eta * m_k/n_k (fractional) or eta with m_k copies
    (signed).  The stored scale is v * (terms/m) so that evaluation, which
    divides by the stored term count, reproduces the v/m normalization of the
    estimator regardless of how many terms the allocation produced.
    """
    _check_build_args(rep, m, target)
    if rep.v == 0.0:
        return _assemble(rep, target, np.zeros(0), np.zeros(0, dtype=int),
                         np.zeros(0), np.zeros((0, rep.d)), 0.0)
    plan = partition_parameters(rep.d, rep.s, epsilon)
    if rep.kind == "exact-sine":
        plan = exact_sine_masses(plan, rep)
    else:
        plan = estimate_masses(plan, rep, seed=seed)
    alloc = allocate(plan, int(m), mode, seed=seed)

    if alloc.mode == "signed":
        need = alloc.m_alloc.astype(np.int64)
        coeff_of_row = np.ones(alloc.M)
    else:
        need = alloc.n_draw
        coeff_of_row = alloc.m_alloc / alloc.n_draw

    gen = _rng.stream(seed, _rng.ATOMS)
    if rep.kind == "exact-sine":
        rows, eta, t, a = _conditional_exact_sine(gen, rep, alloc, need)
    else:
        rows, eta, t, a = _conditional_rejection(gen, rep, alloc, need)
    if np.any(eta != alloc.eta[rows]):
        raise BuilderError("a conditional draw disagreed with its cell sign")

    coeffs = coeff_of_row[rows] * eta
    T = rows.size
    v_stored = rep.v * T / float(m)
    return _assemble(rep, target, coeffs, eta, t, a, v_stored)


# --- inner-weight sparsifier ---

@dataclass(frozen=True)
class SparsifierConfig:
    m0: int
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.m0, (int, np.integer)) or self.m0 < 1:
            raise UsageError(f"inner budget m0 must be a positive integer, got {self.m0}")


def sparsify(c: RidgeCombination, cfg: SparsifierConfig) -> RidgeCombination:
    """Replace each inner vector by an average of m0 signed basis draws.

    Draw coordinates with probability |a(j)|, each carrying the fixed sign
    sgn(a(j)); the multinomial counts divided by m0 give an unbiased vector
    with at most m0 nonzero entries and unit l1 norm.  Signs, thresholds,
    coefficients, the scale, and the affine/quadratic parts are untouched.
    """
    if not c.terms:
        return c
    B, A, T = c._stacked
    rowsum = np.abs(A).sum(axis=1)
    if np.any(np.abs(rowsum - 1.0) > 1e-12):
        raise UsageError("sparsify requires every inner vector to have unit l1 norm")
    gen = _rng.stream(cfg.seed, _rng.SPARSIFY)
    absA = np.abs(A) / rowsum[:, None]
    # put each row's largest probability last so the remainder category absorbs
    # float slack in the multinomial's per-row sums
    perm = np.argsort(absA, axis=1, kind="stable")
    counts_p = gen.multinomial(cfg.m0, np.take_along_axis(absA, perm, axis=1))
    counts = np.empty_like(counts_p)
    np.put_along_axis(counts, perm, counts_p, axis=1)
    newA = _force_unit_l1(np.sign(A) * counts / float(cfg.m0))
    terms = tuple(
        (float(B[i]),
         RidgeAtom(sign=c.terms[i][1].sign, a=newA[i], t=float(T[i]), s=c.s))
        for i in range(len(c.terms))
    )
    return RidgeCombination(d=c.d, s=c.s, b0=c.b0, a0=c.a0, A0=c.A0, v=c.v, terms=terms)


def build_sparse(rep: IntegralRepresentation, m: int, m0: int, target: TargetFunction,
                 seed: int = 0) -> RidgeCombination:
    """i.i.d. build followed by inner-weight sparsification with budget m0."""
    dense = build_iid(rep, m, target, seed=seed)
    return sparsify(dense, SparsifierConfig(m0=int(m0), seed=seed))


# --- config plumbing ---

def default_epsilon(m: int, d: int, mode: str) -> float:
    """Sweep schedule for the cell diameter: matches the rate-optimal choices."""
    if mode == "signed":
        return float(m) ** (-1.0 / (d + 2))
    if mode == "fractional":
        return float(m) ** (-1.0 / d)
    raise UsageError(f"mode must be 'signed' or 'fractional', got {mode!r}")


def build_from_config(rep: IntegralRepresentation, target: TargetFunction,
                      config: dict) -> RidgeCombination:
    """Dispatch on {method, m, epsilon?, mode?, m0?, seed}."""
    cfg = dict(config)
    method = cfg.pop("method", None)
    m = cfg.pop("m", None)
    seed = cfg.pop("seed", 0)
    epsilon = cfg.pop("epsilon", None)
    mode = cfg.pop("mode", "fractional")
    m0 = cfg.pop("m0", None)
    if cfg:
        raise UsageError(f"unknown builder config keys: {sorted(cfg)}")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise UsageError(f"builder config needs a positive integer m, got {m}")
    if method == "iid":
        return build_iid(rep, m, target, seed=seed)
    if method == "stratified":
        if epsilon is None or epsilon == "auto":
            epsilon = default_epsilon(m, rep.d, mode)
        return build_stratified(rep, m, float(epsilon), mode, target, seed=seed)
    if method == "sparse":
        if m0 is None or m0 == "auto":
            m0 = math.ceil(math.sqrt(m))
        return build_sparse(rep, m, int(m0), target, seed=seed)
    raise UsageError(f"unknown build method {method!r}")
