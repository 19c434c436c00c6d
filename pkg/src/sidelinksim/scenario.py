"""Highway geometry: lanes, vehicle placement and base stations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._rng import stream


def _floor_ratio(num: float, den: float, mult: int) -> int:
    # exact rational arithmetic so that e.g. 1732/3*6 floors to 3464, not 3463
    return math.floor(Fraction(num) * mult / Fraction(den))


def ue_count_highway(length_m: float, ivd_m: float, lanes: int) -> int:
    """Number of vehicles on the highway, ``floor(length / ivd * lanes)``."""
    if length_m <= 0 or ivd_m <= 0 or lanes <= 0:
        raise ValueError("length_m, ivd_m and lanes must be positive")
    return _floor_ratio(length_m, ivd_m, lanes)


@dataclass(frozen=True)
class ScenarioConfig:
    highway_length_m: float = 3464.0
    lane_count: int = 6
    lane_width_m: float = 4.0
    ivd_m: float = 50.0
    isd_m: float = 1732.0
    bs_count: int = 2
    antenna_height_m: float = 1.5
    comm_range_m: float = 400.0
    bs_offset_m: float = 35.0
    random_offsets: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.highway_length_m <= 0:
            raise ValueError("highway_length_m must be positive")
        if self.ivd_m <= 0:
            raise ValueError("ivd_m must be positive")
        if self.lane_count < 1:
            raise ValueError("lane_count must be >= 1")
        if self.lane_width_m <= 0:
            raise ValueError("lane_width_m must be positive")
        if self.bs_count < 2:
            raise ValueError("bs_count must be >= 2")
        if not 0 < self.comm_range_m < self.isd_m:
            raise ValueError("comm_range_m must lie in (0, isd_m)")


@dataclass(frozen=True)
class Vehicle:
    id: int
    lane: int
    x_m: float
    y_m: float
    controlling_bs: int


@dataclass(frozen=True)
class BaseStation:
    id: int
    x_m: float
    y_m: float


@dataclass(frozen=True, eq=False)
class Deployment:
    """Static snapshot of vehicles and base stations.

    Vehicle attributes are also held column-wise (``x``, ``y``, ``lane``,
    ``bs``) since the engine works on whole arrays.
    """

    x: np.ndarray
    y: np.ndarray
    lane: np.ndarray
    bs: np.ndarray
    base_stations: tuple[BaseStation, ...]
    eval_region: tuple[float, float]
    comm_range_m: float
    config: ScenarioConfig | None = None
    _vehicles: tuple[Vehicle, ...] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for arr in (self.x, self.y, self.lane, self.bs):
            arr.setflags(write=False)

    @classmethod
    def manual(cls, positions, stations, comm_range_m: float = 400.0,
               eval_region: tuple[float, float] | None = None) -> "Deployment":
        """Hand-placed deployment from ``(x, y)`` pairs and ``(x, y)`` BS sites.

        Vehicles attach to the nearest site. Without ``eval_region`` every
        transmitter is evaluated.
        """
        pos = np.asarray(positions, dtype=float).reshape(-1, 2)
        bss = tuple(BaseStation(i, float(bx), float(by)) for i, (bx, by) in enumerate(stations))
        if not len(pos) or not bss:
            raise ValueError("need at least one vehicle and one base station")
        x, y = pos[:, 0].copy(), pos[:, 1].copy()
        region = eval_region if eval_region is not None else (-np.inf, np.inf)
        return cls(x, y, np.zeros(len(x), dtype=int), nearest_bs(x, y, bss), bss,
                   region, float(comm_range_m))

    @property
    def n_vehicles(self) -> int:
        return len(self.x)

    @property
    def vehicles(self) -> tuple[Vehicle, ...]:
        if self._vehicles is None:
            vs = tuple(
                Vehicle(i, int(l), float(x), float(y), int(b))
                for i, (l, x, y, b) in enumerate(zip(self.lane, self.x, self.y, self.bs))
            )
            object.__setattr__(self, "_vehicles", vs)
        return self._vehicles

    def members(self, bs_id: int) -> np.ndarray:
        """Indices of the vehicles controlled by base station ``bs_id``."""
        return np.flatnonzero(self.bs == bs_id)

    def in_eval_region(self, idx) -> np.ndarray:
        lo, hi = self.eval_region
        x = self.x[idx]
        return (x >= lo) & (x <= hi)


def lane_centres(lane_count: int, lane_width_m: float) -> np.ndarray:
    """Lateral lane centre coordinates, symmetric about the median (y = 0)."""
    return (np.arange(lane_count) - (lane_count - 1) / 2.0) * lane_width_m


def base_station_positions(config: ScenarioConfig) -> tuple[BaseStation, ...]:
    centre = config.highway_length_m / 2.0
    first = centre - (config.bs_count - 1) * config.isd_m / 2.0
    half_width = config.lane_count * config.lane_width_m / 2.0
    y = half_width + config.bs_offset_m
    return tuple(BaseStation(i, first + i * config.isd_m, y) for i in range(config.bs_count))


def nearest_bs(x: np.ndarray, y: np.ndarray, stations) -> np.ndarray:
    bx = np.array([b.x_m for b in stations])
    by = np.array([b.y_m for b in stations])
    d2 = (x[:, None] - bx[None, :]) ** 2 + (y[:, None] - by[None, :]) ** 2
    # argmin returns the first minimum, i.e. ties go to the lower index
    return np.argmin(d2, axis=1)


def deploy(config: ScenarioConfig) -> Deployment:
    """Place vehicles lane by lane at a fixed spacing and attach them to base stations.

    Each lane ``l`` gets a leading offset drawn uniformly from ``[0, ivd)``
    (zero when ``random_offsets`` is off) and vehicles at
    ``offset + k * ivd`` up to the highway end.
    """
    rng = stream(config.rng_seed, "deployment")
    ys = lane_centres(config.lane_count, config.lane_width_m)
    xs, yy, lanes = [], [], []
    for l in range(config.lane_count):
        offset = rng.uniform(0.0, config.ivd_m) if config.random_offsets else 0.0
        n = math.floor((config.highway_length_m - offset) / config.ivd_m) + 2
        px = offset + np.arange(n) * config.ivd_m
        px = px[px <= config.highway_length_m]
        xs.append(px)
        yy.append(np.full(len(px), ys[l]))
        lanes.append(np.full(len(px), l))
    x = np.concatenate(xs)
    if len(x) == 0:
        raise ValueError("configuration produces no vehicles")
    y = np.concatenate(yy)
    lane = np.concatenate(lanes)
    stations = base_station_positions(config)
    bs = nearest_bs(x, y, stations)
    region = (stations[0].x_m, stations[-1].x_m)
    return Deployment(x, y, lane, bs, stations, region, config.comm_range_m, config)


def in_comm_range(tx: Vehicle, rx: Vehicle, comm_range_m: float) -> bool:
    return math.hypot(tx.x_m - rx.x_m, tx.y_m - rx.y_m) <= comm_range_m
