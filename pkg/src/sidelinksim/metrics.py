"""PRR aggregation: overload correction, binomial confidence intervals, sweep tables."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .engine import RunResult
from .traffic import LoadPlan


def effective_prr(prr_max: float, runtime_prr: float) -> float:
    """PRR seen by all UEs, dropped ones included: ``prr_max * runtime_prr``."""
    for name, v in (("prr_max", prr_max), ("runtime_prr", runtime_prr)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} outside [0, 1]")
    return prr_max * runtime_prr


def confidence_interval(received: int, evaluated: int, z: float = 1.96) -> float:
    """Normal-approximation binomial 95 % half-width."""
    if evaluated < 1:
        raise ValueError("evaluated must be >= 1")
    p = received / evaluated
    return z * math.sqrt(p * (1.0 - p) / evaluated)


@dataclass(frozen=True)
class SweepPoint:
    ivd_m: float
    message_rate_hz: float
    speed_kmh: float
    retx_enabled: bool
    selected_mcs: int
    overloaded: bool
    ue_per_bs: int
    data_volume_bps: float
    prr_max: float
    runtime_prr: float
    effective_prr: float
    ci95_halfwidth: float
    mean_sinr_db: float
    data_volume_mbps: float = 0.0
    received_total: int = 0
    evaluated_total: int = 0

    @property
    def sort_key(self):
        return (self.retx_enabled, self.message_rate_hz, self.speed_kmh, self.ivd_m)


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    config_fingerprint: str

    def series(self, message_rate_hz, retx_enabled, speed_kmh=None):
        return [p for p in self.points
                if p.message_rate_hz == message_rate_hz and p.retx_enabled == retx_enabled
                and (speed_kmh is None or p.speed_kmh == speed_kmh)]

    def point(self, ivd_m, message_rate_hz, speed_kmh, retx_enabled) -> SweepPoint:
        for p in self.points:
            if p.sort_key == (retx_enabled, message_rate_hz, speed_kmh, ivd_m):
                return p
        raise KeyError((ivd_m, message_rate_hz, speed_kmh, retx_enabled))


def make_point(ivd_m, message_rate_hz, speed_kmh, plan: LoadPlan, result: RunResult) -> SweepPoint:
    """Combine a load plan and its run into one sweep row.

    The runtime PRR only covers supported UEs; the effective PRR and its
    confidence half-width are scaled by the plan's PRR ceiling.
    """
    ci = confidence_interval(result.received_total, result.evaluated_total)
    return SweepPoint(
        ivd_m=float(ivd_m),
        message_rate_hz=float(message_rate_hz),
        speed_kmh=float(speed_kmh),
        retx_enabled=plan.retx_enabled,
        selected_mcs=plan.operating_mcs,
        overloaded=plan.overloaded,
        ue_per_bs=plan.ue_per_bs,
        data_volume_bps=plan.data_volume_bps,
        prr_max=plan.prr_max,
        runtime_prr=result.runtime_prr,
        effective_prr=effective_prr(plan.prr_max, result.runtime_prr),
        ci95_halfwidth=plan.prr_max * ci,
        mean_sinr_db=result.mean_sinr_db,
        data_volume_mbps=plan.data_volume_mbps,
        received_total=result.received_total,
        evaluated_total=result.evaluated_total,
    )


def fingerprint(config_text: str) -> str:
    return hashlib.sha256(config_text.encode("utf-8")).hexdigest()


def assemble_sweep(cells, grid, config_text: str = "") -> SweepResult:
    """Sort completed cells into a :class:`SweepResult`.

    ``cells`` maps ``(ivd_m, message_rate_hz, speed_kmh, retx)`` to a
    :class:`SweepPoint`; every key in ``grid`` must be present.
    """
    missing = [k for k in grid if k not in cells]
    if missing:
        raise KeyError(f"missing grid cells: {missing}")
    points = sorted((cells[k] for k in grid), key=lambda p: p.sort_key)
    return SweepResult(tuple(points), fingerprint(config_text))
