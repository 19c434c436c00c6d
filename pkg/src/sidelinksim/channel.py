"""Link budget, WINNER II B1 LOS pathloss and SINR bookkeeping.

All functions accept scalars or numpy arrays. Powers in dBm, interference and
noise in mW.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_HZ = -174.0
MIN_DISTANCE_M = 3.0
ENV_HEIGHT_M = 1.0


@dataclass(frozen=True)
class LinkBudget:
    eirp_dbm: float = 23.0
    carrier_hz: float = 5.9e9
    bandwidth_hz: float = 10e6
    noise_figure_db: float = 9.0
    antenna_height_m: float = 1.5
    shadowing_std_db: float = 0.0

    def __post_init__(self):
        if self.carrier_hz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("carrier_hz and bandwidth_hz must be positive")
        if self.antenna_height_m <= ENV_HEIGHT_M:
            raise ValueError("antenna_height_m must exceed the 1 m effective environment height")
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be non-negative")


@dataclass(frozen=True)
class SinrSample:
    signal_dbm: float
    interference_mw: float
    noise_mw: float
    sinr_db: float


def db_to_lin(x):
    return np.power(10.0, np.asarray(x, dtype=float) / 10.0)


def lin_to_db(x):
    return 10.0 * np.log10(x)


dbm_to_mw = db_to_lin
mw_to_dbm = lin_to_db


def breakpoint_distance(budget: LinkBudget) -> float:
    h = budget.antenna_height_m - ENV_HEIGHT_M
    return 4.0 * h * h * budget.carrier_hz / SPEED_OF_LIGHT


def pathloss_db(distance_m, budget: LinkBudget):
    """WINNER II B1 LOS two-slope pathloss in dB, distances clamped to >= 3 m."""
    d = np.maximum(np.asarray(distance_m, dtype=float), MIN_DISTANCE_M)
    f_ghz = budget.carrier_hz / 1e9
    h = budget.antenna_height_m - ENV_HEIGHT_M
    near = 22.7 * np.log10(d) + 41.0 + 20.0 * np.log10(f_ghz / 5.0)
    far = (40.0 * np.log10(d) + 9.45 - 2 * 17.3 * np.log10(h)
           + 2.7 * np.log10(f_ghz / 5.0))
    out = np.where(d <= breakpoint_distance(budget), near, far)
    return out if out.ndim else float(out)


def noise_power_mw(budget: LinkBudget) -> float:
    dbm = THERMAL_NOISE_DBM_HZ + 10.0 * np.log10(budget.bandwidth_hz) + budget.noise_figure_db
    return float(dbm_to_mw(dbm))


def distance(ax, ay, bx, by):
    return np.hypot(np.asarray(ax) - bx, np.asarray(ay) - by)


def received_dbm(distance_m, budget: LinkBudget):
    return budget.eirp_dbm - pathloss_db(distance_m, budget)


def sinr(tx, rx, interferers, budget: LinkBudget) -> SinrSample:
    """SINR at ``rx`` for a transmission from ``tx``.

    ``tx``, ``rx`` and each interferer only need ``x_m``/``y_m`` attributes.
    Interferers coinciding with ``tx`` or ``rx`` must be filtered by the caller.
    """
    signal = float(received_dbm(distance(tx.x_m, tx.y_m, rx.x_m, rx.y_m), budget))
    if interferers:
        ix = np.array([i.x_m for i in interferers])
        iy = np.array([i.y_m for i in interferers])
        interference = float(np.sum(dbm_to_mw(received_dbm(distance(ix, iy, rx.x_m, rx.y_m), budget))))
    else:
        interference = 0.0
    noise = noise_power_mw(budget)
    value = float(lin_to_db(dbm_to_mw(signal) / (interference + noise)))
    return SinrSample(signal, interference, noise, value)


def combine_sinr_db(*sinrs_db):
    """Linear-scale mean of per-transmission SINRs, returned in dB."""
    lin = np.mean([db_to_lin(s) for s in sinrs_db], axis=0)
    out = lin_to_db(lin)
    return out if np.ndim(out) else float(out)
