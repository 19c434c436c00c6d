import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidelinksim.channel import (LinkBudget, breakpoint_distance, combine_sinr_db, db_to_lin,
                                 dbm_to_mw, lin_to_db, mw_to_dbm, noise_power_mw, pathloss_db,
                                 sinr)
from sidelinksim.scenario import Vehicle

B = LinkBudget()


def oracle_pl(d, f_ghz=5.9, h=0.5):
    d = max(d, 3.0)
    dbp = 4 * h * h * f_ghz * 1e9 / 299792458.0
    if d <= dbp:
        return 22.7 * math.log10(d) + 41.0 + 20 * math.log10(f_ghz / 5.0)
    return 40 * math.log10(d) + 9.45 - 34.6 * math.log10(h) + 2.7 * math.log10(f_ghz / 5.0)


def veh(x, y=0.0, i=0):
    return Vehicle(i, 0, float(x), float(y), 0)


def test_pathloss_10m():
    # 22.7 + 41 + 20*log10(1.18)
    assert pathloss_db(10.0, B) == pytest.approx(65.1376, abs=1e-4)


def test_breakpoint_continuity():
    dbp = breakpoint_distance(B)
    assert dbp == pytest.approx(19.68, abs=0.01)
    near = 22.7 * math.log10(dbp) + 41 + 20 * math.log10(1.18)
    far = 40 * math.log10(dbp) + 9.45 - 34.6 * math.log10(0.5) + 2.7 * math.log10(1.18)
    assert abs(near - far) < 0.5


def test_slopes():
    assert pathloss_db(15.0, B) - pathloss_db(5.0, B) == pytest.approx(22.7 * math.log10(3))
    assert pathloss_db(1000.0, B) - pathloss_db(100.0, B) == pytest.approx(40.0)


def test_clamp_below_3m():
    assert pathloss_db(0.0, B) == pathloss_db(3.0, B) == pathloss_db(1.0, B)


@settings(max_examples=300)
@given(d=st.floats(0.0, 5000.0))
def test_pathloss_matches_oracle(d):
    assert pathloss_db(d, B) == pytest.approx(oracle_pl(d), abs=1e-9)


def test_pathloss_vectorised():
    d = np.array([5.0, 50.0, 500.0])
    np.testing.assert_allclose(pathloss_db(d, B), [oracle_pl(x) for x in d])


@pytest.mark.parametrize("bw, nf, dbm", [(10e6, 9, -95), (1, 0, -174), (10e6, 0, -104)])
def test_noise(bw, nf, dbm):
    b = LinkBudget(bandwidth_hz=bw, noise_figure_db=nf)
    assert mw_to_dbm(noise_power_mw(b)) == pytest.approx(dbm, abs=1e-9)


def test_sinr_snr_only():
    # put the receiver where signal equals the -95 dBm noise floor
    target_pl = 23 + 95
    d = 10 ** ((target_pl - 9.45 + 34.6 * math.log10(0.5) - 2.7 * math.log10(1.18)) / 40)
    s = sinr(veh(0), veh(d), [], B)
    assert s.signal_dbm == pytest.approx(-95.0)
    assert s.interference_mw == 0
    assert s.sinr_db == pytest.approx(0.0, abs=1e-9)


def test_sinr_equal_powers():
    b = LinkBudget(noise_figure_db=-100)
    s = sinr(veh(0), veh(50), [veh(100)], b)
    assert s.sinr_db == pytest.approx(0.0, abs=1e-6)


def test_sinr_hand_computed():
    tx, rx, it = veh(0), veh(100), veh(1100)
    sig = 23 - oracle_pl(100)
    intf = 23 - oracle_pl(1000)
    noise = -174 + 70 + 9
    expected = sig - 10 * math.log10(10 ** (intf / 10) + 10 ** (noise / 10))
    assert sinr(tx, rx, [it], B).sinr_db == pytest.approx(expected, abs=0.01)


@settings(max_examples=1000)
@given(x=st.floats(-300, 300), d1=st.floats(3, 3000), d2=st.floats(3, 3000))
def test_interference_antitone(x, d1, d2):
    rx = veh(0)
    near, far = sorted((d1, d2))
    s_near = sinr(veh(x), rx, [veh(near, 5)], B).sinr_db
    s_far = sinr(veh(x), rx, [veh(far, 5)], B).sinr_db
    assert s_near <= s_far + 1e-12


@settings(max_examples=300)
@given(xs=st.lists(st.floats(-2000, 2000), min_size=1, max_size=5))
def test_removing_interferer_never_hurts(xs):
    rx, tx = veh(0), veh(150)
    ints = [veh(x, 8) for x in xs]
    assert sinr(tx, rx, ints[1:], B).sinr_db >= sinr(tx, rx, ints, B).sinr_db - 1e-12


@settings(max_examples=1000)
@given(a=st.floats(3.0, 1e5), b=st.floats(3.0, 1e5))
def test_pathloss_monotone(a, b):
    lo, hi = sorted((a, b))
    assert pathloss_db(lo, B) <= pathloss_db(hi, B)


@settings(max_examples=1000)
@given(x=st.floats(-200, 100))
def test_db_mw_roundtrip(x):
    assert mw_to_dbm(dbm_to_mw(x)) == pytest.approx(x, rel=1e-9, abs=1e-12)
    lin = db_to_lin(x)
    assert db_to_lin(lin_to_db(lin)) == pytest.approx(lin, rel=1e-9)


def test_combine_linear_not_db():
    assert combine_sinr_db(10.0, 0.0) == pytest.approx(10 * math.log10(5.5))
    assert combine_sinr_db(7.0, 7.0) == pytest.approx(7.0)
