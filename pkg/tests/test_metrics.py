"""Error norms, rate fits, and the sanity floor."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgecomb import (
    RidgeAtom,
    RidgeCombination,
    UsageError,
    build_iid,
    build_stratified,
    exact_sine_representation,
    fit_rate,
    l2_error,
    linf_error,
    lower_bound_floor,
    make_affine,
    measure_report,
    target_of,
)
from ridgecomb.metrics import CSV_HEADER

# closed form for || sin(pi x)/(4 pi) - x/4 || in L2([-1,1], dx/2):
# (1/2) int (x/4 - sin(pi x)/(4 pi))^2 dx = 1/48 - 3/(32 pi^2)
AFFINE_ONLY_L2 = math.sqrt(1.0 / 48.0 - 3.0 / (32.0 * math.pi**2))


def single_ramp(t: float, a: float = 1.0) -> RidgeCombination:
    atom = RidgeAtom(sign=1, a=np.array([a]), t=t, s=2)
    return RidgeCombination(d=1, s=2, b0=0.0, a0=np.zeros(1), A0=None, v=1.0,
                            terms=((1.0, atom),))


class TestL2Error:
    def test_matched_constant_is_zero(self):
        rep = exact_sine_representation((1,))
        tgt = target_of(rep)
        exact_affine = make_affine(1, 2, tgt.b0, tgt.a0)
        # the affine part is not the whole target, so this is nonzero ...
        assert l2_error(tgt, exact_affine) > 0.05

    def test_frozen_closed_form_value(self):
        tgt = target_of(exact_sine_representation((1,)))
        affine = make_affine(1, 2, tgt.b0, tgt.a0)
        assert l2_error(tgt, affine) == pytest.approx(AFFINE_ONLY_L2, abs=1e-12)

    def test_node_refinement_agrees_for_smooth_integrands(self):
        tgt = target_of(exact_sine_representation((1, 1)))
        affine = make_affine(2, 2, tgt.b0, tgt.a0)
        assert abs(l2_error(tgt, affine, nodes=64)
                   - l2_error(tgt, affine, nodes=128)) < 1e-10

    def test_d4_quasirandom_path(self):
        rep = exact_sine_representation((1, 1, 1, 1))
        tgt = target_of(rep)
        comb = build_iid(rep, 32, tgt, seed=0)
        err = l2_error(tgt, comb)
        assert 0.0 < err < 1.0

    def test_d5_unsupported(self):
        rep = exact_sine_representation((1, 1, 1, 1, 1))
        tgt = target_of(rep)
        comb = build_iid(rep, 4, tgt, seed=0)
        with pytest.raises(UsageError):
            l2_error(tgt, comb)

    def test_dimension_mismatch(self):
        tgt = target_of(exact_sine_representation((1,)))
        with pytest.raises(UsageError):
            l2_error(tgt, make_affine(2, 2, 0.0, np.zeros(2)))


class TestLinfError:
    def test_identical_pair_is_zero(self):
        c = single_ramp(0.3)
        assert linf_error(c, c) == 0.0

    def test_parallel_ramp_pair_hits_threshold_gap(self):
        # sup |(x-0.2)_+ - (x-0.5)_+| = 0.3, attained on [0.5, 1]
        got = linf_error(single_ramp(0.2), single_ramp(0.5))
        assert got == pytest.approx(0.3, abs=1e-6)

    def test_refinement_recovers_off_grid_interior_maximum(self):
        # |sin(pi x)/(4 pi)| peaks at x = +/- 1/2 with value 1/(4 pi); a
        # 19-point grid misses that point, the ternary polish finds it
        tgt = target_of(exact_sine_representation((1,)))
        zero = make_affine(1, 2, 0.0, np.zeros(1))
        got = linf_error(tgt, zero, grid=19)
        assert got == pytest.approx(1.0 / (4 * math.pi), abs=1e-6)

    def test_sup_dominates_l2(self):
        rep = exact_sine_representation((1, 1))
        tgt = target_of(rep)
        for seed in range(5):
            comb = build_iid(rep, 32, tgt, seed=seed)
            assert linf_error(tgt, comb) >= l2_error(tgt, comb) - 1e-12


class TestFitRate:
    def test_exact_decay_recovered(self):
        pts = [(m, 3.0 * m**-1.0) for m in (4, 16, 64, 256)]
        fit = fit_rate(pts)
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_errors_have_zero_slope(self):
        fit = fit_rate([(4, 0.5), (16, 0.5), (64, 0.5)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert fit.r2 == 1.0

    @given(
        slope=st.floats(min_value=-3.0, max_value=0.5),
        logc=st.floats(min_value=-5.0, max_value=3.0),
    )
    @settings(derandomize=True, deadline=None, max_examples=50)
    def test_power_law_parameters_identified(self, slope, logc):
        pts = [(m, math.exp(logc) * m**slope) for m in (2, 8, 32, 128)]
        fit = fit_rate(pts)
        assert fit.slope == pytest.approx(slope, abs=1e-9)
        assert fit.intercept == pytest.approx(logc, abs=1e-9)

    def test_nonpositive_errors_dropped_with_warning(self):
        with pytest.warns(UserWarning):
            fit = fit_rate([(4, 1.0), (8, 0.0), (16, 0.5), (64, 0.25)])
        assert fit.n == 3

    def test_too_few_points_rejected(self):
        with pytest.raises(UsageError):
            fit_rate([(4, 1.0), (8, 0.5)])
        with pytest.raises(UsageError):
            fit_rate([(4, 1.0), (4, 0.9), (4, 0.8)])

    def test_iid_sweep_slope_window(self):
        # 20-seed means across m = 2^4 .. 2^10 track the m^(-1/2) baseline
        rep = exact_sine_representation((1,))
        tgt = target_of(rep)
        pts = []
        for p in range(4, 11):
            m = 2**p
            errs = [l2_error(tgt, build_iid(rep, m, tgt, seed=s))
                    for s in range(20)]
            pts.append((m, float(np.mean(errs))))
        fit = fit_rate(pts)
        assert -0.65 <= fit.slope <= -0.35


class TestLowerBoundFloor:
    def test_monotone_in_m(self):
        vals = [lower_bound_floor(m, 2, 2, 1.0) for m in (2, 8, 32, 128, 512)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_formula_spot_value(self):
        m, d, s = 256, 2, 2
        base = m * d ** (2 * s + 1) * math.log(m * d)
        assert lower_bound_floor(m, d, s, 1.0) == pytest.approx(
            base ** (-(0.5 + s / d)), rel=1e-15)

    def test_argument_validation(self):
        with pytest.raises(UsageError):
            lower_bound_floor(1, 2, 2, 1.0)
        with pytest.raises(UsageError):
            lower_bound_floor(2.5, 2, 2, 1.0)
        with pytest.raises(UsageError):
            lower_bound_floor(16, 2, 4, 1.0)
        with pytest.raises(UsageError):
            lower_bound_floor(16, 2, 2, 0.0)

    def test_floor_sits_below_stratified_errors(self):
        rep = exact_sine_representation((1,))
        tgt = target_of(rep)
        for seed in range(10):
            comb = build_stratified(rep, 64, 0.25, "fractional", tgt, seed=seed)
            err = l2_error(tgt, comb)
            assert err >= lower_bound_floor(64, 1, 2, 1.0)


class TestReport:
    def test_csv_schema_frozen(self):
        assert CSV_HEADER == "m,method,seed,l2,linf,terms,sparsity"

    def test_row_round_trips_through_the_schema(self):
        rep = exact_sine_representation((1, 1))
        tgt = target_of(rep)
        comb = build_iid(rep, 16, tgt, seed=3)
        rpt = measure_report(tgt, comb, 16, "iid", 3)
        fields = rpt.csv_row().split(",")
        assert len(fields) == len(CSV_HEADER.split(","))
        assert (int(fields[0]), fields[1], int(fields[2])) == (16, "iid", 3)
        assert float(fields[3]) == pytest.approx(rpt.l2)
        assert float(fields[4]) == pytest.approx(rpt.linf)
        assert int(fields[5]) == comb.term_count
        assert int(fields[6]) == comb.inner_sparsity_max
        assert rpt.l2 <= rpt.linf
