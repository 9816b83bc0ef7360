"""Truncation-order certification by log-log fits of residuals under parameter scaling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_GRID = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
EPS = np.finfo(float).eps

PASS = "PASS"
FAIL = "FAIL"
EXACT = "EXACT"  # residual at rounding level on the whole grid


@dataclass
class ScalingProbe:
    """A pair of evaluators compared over a geometric grid of scale factors.

    Either give ``exact`` and ``truncated`` (scalar functions of the scale
    factor) or give ``residual`` directly.  ``order`` is the claimed decay
    order: the residual should fall like scale**(-order).
    """

    name: str
    order: float
    exact: Callable[[float], float] | None = None
    truncated: Callable[[float], float] | None = None
    residual: Callable[[float], float] | None = None
    magnitude: Callable[[float], float] | None = None
    grid: Sequence[float] = DEFAULT_GRID
    slope_tol: float = 0.2
    min_r_squared: float = 0.99

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or len(grid) < 5:
            raise ValueError("scaling grid needs at least 5 points")
        if np.any(grid <= 0) or np.any(grid[1:] / grid[:-1] < 2.0 - 1e-12):
            raise ValueError("scaling grid must be positive, increasing, with ratio >= 2")
        if self.residual is None and (self.exact is None or self.truncated is None):
            raise ValueError("give either residual or both exact and truncated")
        self.grid = tuple(grid)


@dataclass
class OrderResult:
    name: str
    slope: float
    r_squared: float
    target: float
    verdict: str
    scales: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict in (PASS, EXACT)

    def row(self) -> dict:
        return {
            "name": self.name,
            "slope": self.slope,
            "target": self.target,
            "r_squared": self.r_squared,
            "verdict": self.verdict,
        }


def fit_slope(x, y) -> tuple[float, float]:
    """Least-squares slope of log|y| against log x, with r^2."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return float(slope), r2


def residual_order(probe: ScalingProbe, executor=None) -> OrderResult:
    """Evaluate the probe on its grid and fit the residual decay rate.

    ``executor`` may be any object with a ``map`` method (e.g. a
    ``concurrent.futures`` pool); grid points are independent.
    """
    mapper = map if executor is None else executor.map
    scales = list(probe.grid)
    if probe.residual is not None:
        residuals = [abs(float(r)) for r in mapper(probe.residual, scales)]
        if probe.magnitude is None:
            floors = [0.0] * len(scales)
        else:
            floors = [100.0 * EPS * abs(float(m)) for m in mapper(probe.magnitude, scales)]
    else:
        exact = list(mapper(probe.exact, scales))
        trunc = list(mapper(probe.truncated, scales))
        residuals = [abs(float(a) - float(b)) for a, b in zip(exact, trunc)]
        floors = [100.0 * EPS * max(abs(float(a)), abs(float(b))) for a, b in zip(exact, trunc)]

    target = -float(probe.order)
    meaningful = [r > f and r > 0.0 for r, f in zip(residuals, floors)]
    if not any(meaningful):
        return OrderResult(probe.name, math.nan, math.nan, target, EXACT, scales, residuals)
    if sum(meaningful) < 4:
        return OrderResult(probe.name, math.nan, math.nan, target, FAIL, scales, residuals)

    # points at rounding level carry no slope information
    xs = [s for s, ok in zip(scales, meaningful) if ok]
    ys = [r for r, ok in zip(residuals, meaningful) if ok]
    slope, r2 = fit_slope(xs, ys)
    ok = abs(slope - target) <= probe.slope_tol and r2 >= probe.min_r_squared
    return OrderResult(probe.name, slope, r2, target, PASS if ok else FAIL, scales, residuals)


def richardson_limit(scales, values, order: float) -> float:
    """Extrapolate values(scale) -> scale=inf assuming a scale**(-order) correction.

    Uses the two largest scales.
    """
    s1, s2 = scales[-2], scales[-1]
    v1, v2 = values[-2], values[-1]
    w = (s2 / s1) ** order
    return (w * v2 - v1) / (w - 1.0)
