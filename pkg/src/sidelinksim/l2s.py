"""Link-to-system abstraction: per-MCS SNR -> BLER curves.

Tables are read from ``mcs,snr_db,bler`` text files or generated
synthetically. Lookups interpolate linearly between grid points and hold the
end values constant outside the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class TableError(ValueError):
    """Raised for malformed or inconsistent L2S table data."""


@dataclass(frozen=True)
class Curve:
    snr_db: np.ndarray
    bler: np.ndarray

    def __post_init__(self):
        if len(self.snr_db) < 2 or len(self.snr_db) != len(self.bler):
            raise TableError("a curve needs at least two (snr, bler) points")
        if np.any(np.diff(self.snr_db) <= 0):
            raise TableError("snr grid must be strictly increasing")
        if np.any((self.bler < 0) | (self.bler > 1)):
            raise TableError("bler must lie in [0, 1]")
        if np.any(np.diff(self.bler) > 0):
            raise TableError("bler must be non-increasing in snr")
        self.snr_db.setflags(write=False)
        self.bler.setflags(write=False)

    def __call__(self, sinr_db):
        # np.interp already holds the end values outside the grid
        return np.interp(sinr_db, self.snr_db, self.bler)


@dataclass(frozen=True)
class L2sTable:
    label: str
    curves: dict[int, Curve]
    channel: str = "EVA"
    speed_kmh: float = 100.0
    meta: dict = field(default_factory=dict, compare=False)

    def __contains__(self, mcs):
        return mcs in self.curves

    def curve(self, mcs: int) -> Curve:
        try:
            return self.curves[mcs]
        except KeyError:
            raise KeyError(f"MCS {mcs} not present in table {self.label!r}") from None


@dataclass(frozen=True)
class BlerQuery:
    mcs: int
    sinr_db: float


def bler_lookup(table: L2sTable, query: BlerQuery | int, sinr_db=None):
    """BLER for an MCS at the given effective SINR.

    Accepts either a :class:`BlerQuery` or ``(mcs, sinr_db)`` where
    ``sinr_db`` may be an array.
    """
    if isinstance(query, BlerQuery):
        mcs, sinr_db = query.mcs, query.sinr_db
    else:
        mcs = query
    out = table.curve(mcs)(sinr_db)
    return out if np.ndim(out) else float(out)


_HEADER_KEYS = ("label", "channel", "speed_kmh")


def load_table(source) -> L2sTable:
    """Parse a table file.

    Rows are ``mcs,snr_db,bler``. Lines starting with ``#`` are comments;
    ``# key: value`` comments for ``label``, ``channel`` and ``speed_kmh``
    set the table metadata.
    """
    path = Path(source)
    meta = {"label": path.stem, "channel": "EVA", "speed_kmh": 100.0}
    rows: dict[int, list[tuple[float, float]]] = {}
    linenos: dict[int, list[int]] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep and key.strip() in _HEADER_KEYS:
                meta[key.strip()] = value.strip()
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise TableError(f"{path}:{lineno}: expected 'mcs,snr_db,bler', got {line!r}")
        try:
            mcs, snr, bler = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise TableError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if not 0.0 <= bler <= 1.0:
            raise TableError(f"{path}:{lineno}: bler {bler} outside [0, 1]")
        if not np.isfinite(snr):
            raise TableError(f"{path}:{lineno}: snr must be finite")
        pts = rows.setdefault(mcs, [])
        if pts and snr <= pts[-1][0]:
            raise TableError(f"{path}:{lineno}: snr grid for MCS {mcs} not strictly increasing")
        if pts and bler > pts[-1][1]:
            raise TableError(f"{path}:{lineno}: bler for MCS {mcs} increases with snr")
        pts.append((snr, bler))
        linenos.setdefault(mcs, []).append(lineno)
    if not rows:
        raise TableError(f"{path}: no data rows")
    curves = {}
    for mcs, pts in sorted(rows.items()):
        if len(pts) < 2:
            raise TableError(f"{path}:{linenos[mcs][0]}: MCS {mcs} has a single point")
        arr = np.array(pts)
        curves[mcs] = Curve(arr[:, 0].copy(), arr[:, 1].copy())
    return L2sTable(str(meta["label"]), curves, str(meta["channel"]), float(meta["speed_kmh"]))


def save_table(table: L2sTable, path) -> None:
    lines = [
        f"# label: {table.label}",
        f"# channel: {table.channel}",
        f"# speed_kmh: {table.speed_kmh!r}",
        "# mcs,snr_db,bler",
    ]
    for mcs in sorted(table.curves):
        c = table.curves[mcs]
        lines.extend(f"{mcs},{s!r},{b!r}" for s, b in zip(c.snr_db.tolist(), c.bler.tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def waterfall(snr_db, snr50_db: float, slope: float = 3.0, floor: float = 1e-5):
    """Exponential waterfall anchored at 50 % BLER.

    ``bler = 0.5 * exp(-slope * (snr / snr50 - 1))`` in linear SNR, clipped to
    ``[floor, 1]``.
    """
    ratio = np.power(10.0, (np.asarray(snr_db, dtype=float) - snr50_db) / 10.0)
    return np.clip(0.5 * np.exp(-slope * (ratio - 1.0)), floor, 1.0)


def shannon_threshold_db(se: float) -> float:
    return float(10.0 * np.log10(2.0 ** se - 1.0))


def synth_table(mcs_table, channel_penalty_db: float = 0.0, diversity_gain_db: float = 0.0,
                label: str = "synthetic", slope: float = 3.0, grid_db=None,
                channel: str = "EVA", speed_kmh: float = 100.0) -> L2sTable:
    """Synthetic stand-in for link-level curves.

    Each MCS gets a waterfall centred at its Shannon threshold, shifted right by
    ``channel_penalty_db`` and left by ``diversity_gain_db``. Larger diversity
    gain therefore models the benefit of a blind retransmission.
    """
    if not (np.isfinite(channel_penalty_db) and np.isfinite(diversity_gain_db)):
        raise ValueError("penalties must be finite")
    grid = np.arange(-20.0, 40.0 + 1e-9, 0.25) if grid_db is None else np.asarray(grid_db, float)
    curves = {}
    for mcs, se in mcs_table:
        snr50 = shannon_threshold_db(se) + channel_penalty_db - diversity_gain_db
        curves[mcs] = Curve(grid.copy(), waterfall(grid, snr50, slope))
    meta = {"channel_penalty_db": channel_penalty_db, "diversity_gain_db": diversity_gain_db,
            "slope": slope}
    return L2sTable(label, curves, channel, speed_kmh, meta)


def constant_table(mcs_indices, bler: float, label: str = "constant") -> L2sTable:
    """Table whose every curve is flat at ``bler``; handy for calibration runs."""
    grid = np.array([-50.0, 50.0])
    return L2sTable(label, {int(m): Curve(grid.copy(), np.full(2, float(bler))) for m in mcs_indices})
