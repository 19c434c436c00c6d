import math

import pytest
from hypothesis import given, strategies as st

from sidelinksim.metrics import (SweepPoint, assemble_sweep, confidence_interval, effective_prr,
                                 fingerprint)


def test_effective_prr_examples():
    assert effective_prr(1.0, 0.93) == 0.93
    assert effective_prr(0.5, 1.0) == 0.5
    assert effective_prr(0.7829, 0.90) == pytest.approx(0.7046, abs=1e-4)


def test_effective_prr_rejects_out_of_range():
    with pytest.raises(ValueError):
        effective_prr(1.2, 0.5)


@given(a=st.floats(0, 1), b=st.floats(0, 1))
def test_effective_bounded_by_both(a, b):
    e = effective_prr(a, b)
    assert 0 <= e <= min(a, b)


def test_confidence_interval():
    assert confidence_interval(0, 50) == 0
    assert confidence_interval(50, 50) == 0
    # 1.96 * sqrt(0.25 / 10000)
    assert confidence_interval(5000, 10000) == pytest.approx(0.0098)
    with pytest.raises(ValueError):
        confidence_interval(0, 0)


def point(ivd, retx=False, rate=10.0):
    return SweepPoint(ivd, rate, 100.0, retx, 0, False, 1, 1.0, 1.0, 0.9, 0.9, 0.01, 0.0)


def test_assemble_single():
    key = (10.0, 10.0, 100.0, False)
    r = assemble_sweep({key: point(10.0)}, [key], "cfg")
    assert len(r.points) == 1
    assert r.config_fingerprint == fingerprint("cfg")


def test_assemble_sorted_and_complete():
    ivds = [100.0, 3.0, 50.0, 5.0, 80.0, 10.0, 40.0, 20.0]
    grid = [(i, 10.0, 100.0, r) for r in (True, False) for i in ivds]
    cells = {k: point(k[0], k[3]) for k in grid}
    res = assemble_sweep(cells, grid, "x")
    assert [p.ivd_m for p in res.points[:8]] == sorted(ivds)
    assert [p.retx_enabled for p in res.points] == [False] * 8 + [True] * 8
    assert res.config_fingerprint == assemble_sweep(cells, grid, "x").config_fingerprint
    with pytest.raises(KeyError, match="missing"):
        assemble_sweep({}, grid[:1])
