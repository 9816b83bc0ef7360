import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ppn_atom.config import RunConfig
from ppn_atom.geometry import PpnContext, UnitSystem
from ppn_atom.sampling import sample_com_states

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def units():
    return UnitSystem()


@pytest.fixture
def ctx(units):
    return PpnContext(units, gamma=1.0, beta=1.0, phi=-1e-4 * units.c**2)


@pytest.fixture
def cfg():
    return RunConfig()


@pytest.fixture
def com_states(cfg):
    return sample_com_states(20, cfg.seed, cfg.m1, cfg.m2, cfg.e, cfg.c)


def rel(a, b, scale=None):
    s = max(abs(a), abs(b)) if scale is None else scale
    return abs(a - b) / s if s else 0.0


def vec(x):
    return np.asarray(x, dtype=float)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion; printed in the terminal summary."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        print(line)
        _ACCEPTANCE.append((number, line))
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
