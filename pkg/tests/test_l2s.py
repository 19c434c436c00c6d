import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidelinksim.l2s import (BlerQuery, Curve, L2sTable, TableError, bler_lookup, constant_table,
                             load_table, save_table, shannon_threshold_db, synth_table, waterfall)
from sidelinksim.traffic import McsTable

MCS = McsTable.default()
T1 = synth_table(MCS, 0.0, 0.0, "L2S-1")
T2 = synth_table(MCS, 0.0, 4.0, "L2S-2")


def simple():
    return L2sTable("t", {0: Curve(np.array([0.0, 10.0]), np.array([0.8, 0.2]))})


def test_lookup_grid_point_and_midpoint():
    t = simple()
    assert bler_lookup(t, BlerQuery(0, 0.0)) == 0.8
    assert bler_lookup(t, BlerQuery(0, 5.0)) == pytest.approx(0.5)


def test_constant_extrapolation():
    t = simple()
    assert bler_lookup(t, 0, -1000.0) == 0.8
    assert bler_lookup(t, 0, 1000.0) == 0.2


def test_unknown_mcs():
    with pytest.raises(KeyError, match="MCS 3"):
        bler_lookup(simple(), BlerQuery(3, 0.0))


def test_curve_invariants():
    with pytest.raises(TableError):
        Curve(np.array([0.0]), np.array([1.0]))
    with pytest.raises(TableError):
        Curve(np.array([0.0, 0.0]), np.array([1.0, 0.5]))
    with pytest.raises(TableError):
        Curve(np.array([0.0, 1.0]), np.array([0.5, 0.6]))


def test_load_table(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("# label: L2S-1\n# mcs,snr_db,bler\n3,-5,1.0\n3,20,0.001\n")
    t = load_table(f)
    assert t.label == "L2S-1"
    assert list(t.curves) == [3]
    assert t.curves[3].snr_db.tolist() == [-5.0, 20.0]


@pytest.mark.parametrize("body, match", [
    ("0,0,1.2\n0,1,0.5\n", ":1:.*outside"),
    ("0,0,0.5\n0,-1,0.4\n", ":2:.*increasing"),
    ("0,0,0.5\n0,1,0.6\n", ":2:.*increases"),
    ("0,0\n", ":1:"),
    ("0,x,0.5\n", ":1:"),
    ("0,0,0.5\n", "single point"),
])
def test_load_table_rejects(tmp_path, body, match):
    f = tmp_path / "bad.csv"
    f.write_text(body)
    with pytest.raises(TableError, match=match):
        load_table(f)


def test_save_load_roundtrip(tmp_path):
    a = tmp_path / "a.csv"
    save_table(T1, a)
    t = load_table(a)
    b = tmp_path / "b.csv"
    save_table(t, b)
    data = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("#")]
    assert data(a) == data(b)
    assert a.read_bytes() == b.read_bytes()
    for m in T1.curves:
        np.testing.assert_array_equal(t.curves[m].bler, T1.curves[m].bler)


def test_synth_anchor():
    assert shannon_threshold_db(1.0) == 0.0
    # at the anchor the generator gives 0.5 * exp(0)
    assert waterfall(0.0, 0.0) == pytest.approx(0.5)
    t = synth_table(McsTable([(0, 1.0), (1, 2.0)]), 0.0, 0.0, grid_db=[-10, 0, 10])
    assert bler_lookup(t, 0, 0.0) == pytest.approx(0.5)


def test_synth_thresholds_ordered():
    th = [shannon_threshold_db(se) for _, se in MCS]
    assert all(b > a for a, b in zip(th, th[1:]))


@settings(max_examples=1000)
@given(mcs=st.integers(0, 20), a=st.floats(-40, 60), b=st.floats(-40, 60))
def test_bler_nonincreasing_in_sinr(mcs, a, b):
    lo, hi = sorted((a, b))
    assert bler_lookup(T1, mcs, hi) <= bler_lookup(T1, mcs, lo)


@settings(max_examples=300)
@given(m1=st.integers(0, 20), m2=st.integers(0, 20), s=st.floats(-40, 60))
def test_bler_nondecreasing_in_mcs(m1, m2, s):
    lo, hi = sorted((m1, m2))
    assert bler_lookup(T1, lo, s) <= bler_lookup(T1, hi, s)


@settings(max_examples=300)
@given(mcs=st.integers(0, 20), s=st.floats(-40, 60))
def test_retx_curve_below_single(mcs, s):
    assert bler_lookup(T2, mcs, s) <= bler_lookup(T1, mcs, s)


def test_extremes_exact():
    for m, c in T1.curves.items():
        assert bler_lookup(T1, m, -1000.0) == c.bler[0]
        assert bler_lookup(T1, m, 1000.0) == c.bler[-1]


def test_constant_table():
    t = constant_table(range(3), 0.2)
    assert bler_lookup(t, 2, 17.0) == 0.2
