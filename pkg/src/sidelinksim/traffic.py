"""Load planning: per-BS UE counts, offered data volume, MCS choice and overload.

The planner works on aggregate load only. One MCS is chosen per scenario as the
most robust (lowest spectral efficiency) entry that can still carry the
offered traffic of all UEs controlled by a base station over the full band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import _floor_ratio


@dataclass(frozen=True)
class TrafficConfig:
    packet_size_bytes: int = 256
    message_rate_hz: float = 10.0
    bandwidth_hz: float = 10e6

    def __post_init__(self):
        if self.packet_size_bytes <= 0 or self.message_rate_hz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("traffic parameters must be positive")


# (modulation order, code rate x 1024) for MCS 0..20: QPSK up to MCS 10,
# 16QAM from MCS 11. Efficiencies are Qm * R / 1024 and were chosen to sit
# inside the intervals implied by the MCS columns of both load tables.
_DEFAULT_LADDER = (
    (2, 120), (2, 157), (2, 193), (2, 251), (2, 308), (2, 379), (2, 449),
    (2, 602), (2, 679), (2, 756), (2, 835),
    (4, 460), (4, 490), (4, 535), (4, 553), (4, 616), (4, 658), (4, 699),
    (4, 772), (4, 850), (4, 948),
)


class McsTable:
    """Ordered MCS index -> spectral efficiency (bit/s/Hz) map."""

    def __init__(self, entries):
        entries = [(int(i), float(se)) for i, se in entries]
        if not entries:
            raise ValueError("MCS table is empty")
        idx = [i for i, _ in entries]
        if idx != list(range(len(entries))):
            raise ValueError(f"MCS indices must run 0..{len(entries) - 1} in order, got {idx}")
        se = np.array([s for _, s in entries])
        if np.any(np.diff(se) <= 0):
            raise ValueError("spectral efficiency must increase strictly with MCS index")
        self.indices = np.array(idx)
        self.efficiency = se

    def __len__(self):
        return len(self.indices)

    def __getitem__(self, mcs: int) -> float:
        return float(self.efficiency[mcs])

    def __iter__(self):
        return iter(zip(self.indices.tolist(), self.efficiency.tolist()))

    def __eq__(self, other):
        return isinstance(other, McsTable) and np.array_equal(self.efficiency, other.efficiency)

    @property
    def max_index(self) -> int:
        return int(self.indices[-1])

    @property
    def max_efficiency(self) -> float:
        return float(self.efficiency[-1])

    @classmethod
    def default(cls) -> "McsTable":
        return cls((i, qm * r / 1024.0) for i, (qm, r) in enumerate(_DEFAULT_LADDER))

    @classmethod
    def from_file(cls, path) -> "McsTable":
        """Read ``index,spectral_efficiency`` lines; ``#`` starts a comment line."""
        entries = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'index,spectral_efficiency'")
            try:
                entries.append((int(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: cannot parse {line!r}") from None
        return cls(entries)


@dataclass(frozen=True)
class LoadPlan:
    ue_per_bs: int
    data_volume_bps: float
    selected_mcs: int | None
    overloaded: bool
    ue_supported: int
    prr_max: float
    retx_enabled: bool
    max_mcs: int

    @property
    def data_volume_mbps(self) -> float:
        """Load in Mbit/s as tabulated: the retransmission figure is twice the
        single-transmission figure after rounding that to 4 decimals."""
        factor = 2 if self.retx_enabled else 1
        return factor * round(self.data_volume_bps / factor / 1e6, 4)

    @property
    def operating_mcs(self) -> int:
        """MCS actually used on air; the highest one when overloaded."""
        return self.max_mcs if self.selected_mcs is None else self.selected_mcs


def ue_count_per_bs(isd_m: float, ivd_m: float, lanes: int) -> int:
    """UEs controlled by one base station, ``floor(isd / ivd * lanes)``."""
    if isd_m <= 0 or ivd_m <= 0 or lanes <= 0:
        raise ValueError("isd_m, ivd_m and lanes must be positive")
    return _floor_ratio(isd_m, ivd_m, lanes)


def _per_ue_rate(traffic: TrafficConfig, retx: bool) -> float:
    return traffic.packet_size_bytes * 8 * traffic.message_rate_hz * (2 if retx else 1)


def data_volume(traffic: TrafficConfig, ue_per_bs: int, retx: bool = False) -> float:
    """Offered load in bit/s; a blind retransmission doubles it."""
    if ue_per_bs < 1:
        raise ValueError("ue_per_bs must be >= 1")
    return _per_ue_rate(traffic, retx) * ue_per_bs


def select_mcs(mcs_table: McsTable, data_volume_bps: float, bandwidth_hz: float) -> int | None:
    """Lowest MCS whose spectral efficiency covers ``data_volume_bps / bandwidth_hz``.

    Returns ``None`` when even the top entry is insufficient (overload).
    """
    required = data_volume_bps / bandwidth_hz
    ok = np.flatnonzero(mcs_table.efficiency >= required)
    return int(mcs_table.indices[ok[0]]) if len(ok) else None


def prr_max(mcs_table: McsTable, traffic: TrafficConfig, ue_per_bs: int,
            retx: bool = False) -> tuple[int, float]:
    """Supported UEs and the PRR ceiling they imply.

    Under overload the band at the top MCS carries
    ``floor(bandwidth * SE_max / per-UE bit rate)`` UEs; the rest are dropped.
    """
    volume = data_volume(traffic, ue_per_bs, retx)
    if select_mcs(mcs_table, volume, traffic.bandwidth_hz) is not None:
        return ue_per_bs, 1.0
    capacity = traffic.bandwidth_hz * mcs_table.max_efficiency
    supported = math.floor(capacity / _per_ue_rate(traffic, retx))
    return supported, supported / ue_per_bs


def plan_load(isd_m: float, ivd_m: float, lanes: int, traffic: TrafficConfig,
              mcs_table: McsTable | None = None, retx: bool = False) -> LoadPlan:
    mcs_table = mcs_table or McsTable.default()
    n = ue_count_per_bs(isd_m, ivd_m, lanes)
    volume = data_volume(traffic, n, retx)
    mcs = select_mcs(mcs_table, volume, traffic.bandwidth_hz)
    supported, ceiling = prr_max(mcs_table, traffic, n, retx)
    return LoadPlan(
        ue_per_bs=n,
        data_volume_bps=volume,
        selected_mcs=mcs,
        overloaded=mcs is None,
        ue_supported=supported,
        prr_max=ceiling,
        retx_enabled=retx,
        max_mcs=mcs_table.max_index,
    )
