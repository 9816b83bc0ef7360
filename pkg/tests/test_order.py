import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ppn_atom.order import EXACT, FAIL, PASS, ScalingProbe, fit_slope, residual_order, richardson_limit


def test_taylor_remainder_slope():
    probe = ScalingProbe(
        "sqrt", 3,
        exact=lambda lam: math.sqrt(1 - 1 / lam),
        truncated=lambda lam: 1 - 0.5 / lam - 0.125 / lam**2,
        grid=(8.0, 16.0, 32.0, 64.0, 128.0, 256.0),
        slope_tol=0.1,
    )
    res = residual_order(probe)
    assert res.verdict == PASS
    assert res.slope == pytest.approx(-3.0, abs=0.1)


def test_identical_evaluators_exact():
    res = residual_order(ScalingProbe("same", 4, exact=lambda s: 1.0 / s, truncated=lambda s: 1.0 / s))
    assert res.verdict == EXACT and res.passed


def test_wrong_order_fails():
    res = residual_order(ScalingProbe("wrong", 4, residual=lambda s: s**-2.0))
    assert res.verdict == FAIL and not res.passed


def test_too_few_meaningful_points_fail():
    vals = {1.0: 1.0, 2.0: 1.0 / 16, 4.0: 0.0, 8.0: 0.0, 16.0: 0.0, 32.0: 0.0}
    assert residual_order(ScalingProbe("sparse", 4, residual=vals.get)).verdict == FAIL


def test_grid_validation():
    with pytest.raises(ValueError):
        ScalingProbe("short", 4, residual=lambda s: s, grid=(1, 2, 4))
    with pytest.raises(ValueError):
        ScalingProbe("dense", 4, residual=lambda s: s, grid=(1, 1.5, 2, 3, 4))
    with pytest.raises(ValueError):
        ScalingProbe("empty", 4)


def test_executor_matches_serial():
    from concurrent.futures import ThreadPoolExecutor

    probe = ScalingProbe("p", 2, residual=lambda s: 3.0 * s**-2 + 0.01 * s**-3)
    with ThreadPoolExecutor(2) as pool:
        assert residual_order(probe, pool).slope == residual_order(probe).slope


@given(st.floats(1e-6, 1e6), st.floats(0.5, 6.0))
def test_slope_scale_equivariant(scale, order):
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    y = x**-order * (1 + 0.1 / x)
    s1, r1 = fit_slope(x, y)
    s2, r2 = fit_slope(x, scale * y)
    assert s1 == pytest.approx(s2, abs=1e-9)
    assert r1 == pytest.approx(r2, abs=1e-9)


def test_richardson_limit():
    scales = [8.0, 16.0]
    values = [2.0 + 3.0 / s**2 for s in scales]
    assert richardson_limit(scales, values, 2) == pytest.approx(2.0, rel=1e-14)
