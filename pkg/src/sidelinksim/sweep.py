"""Configuration loading, sweep orchestration and CSV output.

Configuration files are INI-style::

    [scenario]
    highway_length_m = 3464
    lane_count = 6

    [sweep]
    ivd_m = 10, 20, 40
    retx = false, true

    [tables]
    100.noretx = synthetic
    100.retx = tables/eva100_retx.csv

Every section and key is optional; omitted values fall back to the baseline
highway (3464 m, 6 lanes, 2 BSs 1732 m apart, 400 m range, 256 B at 10 Hz over
10 MHz, 23 dBm EIRP, 1000 iterations).
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import engine, l2s, metrics, scenario, traffic
from .channel import LinkBudget

log = logging.getLogger(__name__)

SWEEP_HEADER = ("ivd_m", "message_rate_hz", "speed_kmh", "retx", "mcs", "ue_per_bs",
                "data_volume_mbps", "prr_max", "runtime_prr", "effective_prr", "ci95")
TABLE_GRID_IVD = (3.0, 5.0, 10.0, 20.0, 40.0, 50.0, 80.0, 100.0)


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""


@dataclass(frozen=True)
class SyntheticParams:
    """Synthetic link curves: offsets grow linearly with speed.

    The penalty grows faster than the retransmission gain, so both curve sets
    degrade with speed while the benefit of retransmitting still increases.
    """

    channel_penalty_db: float = -4.0
    penalty_per_100kmh_db: float = 1.0
    retx_gain_db: float = 4.5
    retx_gain_per_100kmh_db: float = 0.5
    slope: float = 3.0

    def penalty(self, speed_kmh: float) -> float:
        return self.channel_penalty_db + self.penalty_per_100kmh_db * speed_kmh / 100.0

    def gain(self, speed_kmh: float) -> float:
        return self.retx_gain_db + self.retx_gain_per_100kmh_db * speed_kmh / 100.0


@dataclass(frozen=True)
class SimSettings:
    iterations: int = 1000
    rng_seed: int = 0
    batch_size: int = 128


@dataclass(frozen=True)
class SweepSpec:
    ivd_m: tuple[float, ...] = TABLE_GRID_IVD
    message_rate_hz: tuple[float, ...] = (10.0,)
    speed_kmh: tuple[float, ...] = (100.0,)
    retx: tuple[bool, ...] = (False, True)

    def grid(self):
        return [(ivd, rate, speed, retx) for retx in self.retx for rate in self.message_rate_hz
                for speed in self.speed_kmh for ivd in self.ivd_m]


@dataclass(frozen=True)
class RootConfig:
    scenario: scenario.ScenarioConfig = field(default_factory=scenario.ScenarioConfig)
    traffic: traffic.TrafficConfig = field(default_factory=traffic.TrafficConfig)
    link_budget: LinkBudget = field(default_factory=LinkBudget)
    sim: SimSettings = field(default_factory=SimSettings)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    synthetic: SyntheticParams = field(default_factory=SyntheticParams)
    tables: tuple[tuple[tuple[float, bool], str], ...] = ()
    mcs_table: str | None = None
    output: str = "output"

    def table_source(self, speed_kmh: float, retx: bool) -> str:
        for (s, r), src in self.tables:
            if s == speed_kmh and r == retx:
                return src
        return "synthetic"

    def canonical_text(self) -> str:
        """Stable JSON rendering of the resolved configuration, file contents included."""
        data = dataclasses.asdict(self)
        data.pop("output")
        digests = {}
        for _, src in self.tables:
            if src != "synthetic":
                digests[src] = _file_digest(src)
        if self.mcs_table:
            digests[self.mcs_table] = _file_digest(self.mcs_table)
        data["file_digests"] = digests
        return json.dumps(data, sort_keys=True, default=str)


def _file_digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError:
        return "unreadable"


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on", "retx"):
        return True
    if v in ("0", "false", "no", "off", "noretx"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_list(conv):
    def parse(s):
        items = [p.strip() for p in s.replace(";", ",").split(",") if p.strip()]
        if not items:
            raise ValueError("empty list")
        return tuple(conv(p) for p in items)
    return parse


def _converter(tp):
    return {"int": lambda s: int(float(s)), "float": float, "bool": _parse_bool}[tp]


def _section_to_dataclass(cls, section, path: str):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, raw in section.items():
        if (path, key) in _DERIVED_KEYS:
            raise ConfigError(f"{path}.{key}: {_DERIVED_KEYS[path, key]}")
        if key not in fields:
            raise ConfigError(f"{path}.{key}: unknown key")
        tp = str(fields[key].type)
        try:
            if tp.startswith("tuple"):
                inner = tp[len("tuple["):].split(",")[0].strip()
                kwargs[key] = _parse_list(_converter(inner))(raw)
            else:
                kwargs[key] = _converter(tp)(raw)
        except ValueError as exc:
            raise ConfigError(f"{path}.{key}: {exc}") from None
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


_DERIVED_KEYS = {
    ("scenario", "ivd_m"): "set the IVD values in [sweep] ivd_m",
    ("scenario", "rng_seed"): "set the seed in [sim] rng_seed",
    ("traffic", "message_rate_hz"): "set the rates in [sweep] message_rate_hz",
}

_SECTIONS = {
    "scenario": scenario.ScenarioConfig,
    "traffic": traffic.TrafficConfig,
    "link_budget": LinkBudget,
    "sim": SimSettings,
    "sweep": SweepSpec,
    "synthetic": SyntheticParams,
}


def parse_config(text: str, base_dir: Path | str = ".") -> RootConfig:
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                       interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    base_dir = Path(base_dir)
    kwargs = {}
    if parser.defaults():
        raise ConfigError(f"DEFAULT: keys outside a section: {sorted(parser.defaults())}")
    for name in parser.sections():
        section = dict(parser.items(name, raw=True))
        if name in _SECTIONS:
            kwargs[name] = _section_to_dataclass(_SECTIONS[name], section, name)
        elif name == "tables":
            tables = []
            for key, src in section.items():
                if key == "mcs_table":
                    kwargs["mcs_table"] = str(base_dir / src)
                    continue
                speed, dot, mode = key.rpartition(".")
                try:
                    entry = ((float(speed), _parse_bool(mode)), src)
                except ValueError:
                    raise ConfigError(f"tables.{key}: expected '<speed_kmh>.<retx|noretx>'") from None
                if not dot:
                    raise ConfigError(f"tables.{key}: expected '<speed_kmh>.<retx|noretx>'")
                if src != "synthetic":
                    entry = (entry[0], str(base_dir / src))
                tables.append(entry)
            kwargs["tables"] = tuple(sorted(tables))
        elif name == "output":
            for key, value in section.items():
                if key != "directory":
                    raise ConfigError(f"output.{key}: unknown key")
                kwargs["output"] = value
        else:
            raise ConfigError(f"{name}: unknown section")
    cfg = RootConfig(**kwargs)
    for speed in cfg.sweep.speed_kmh:
        for retx in cfg.sweep.retx:
            src = cfg.table_source(speed, retx)
            if src != "synthetic" and not Path(src).is_file():
                raise ConfigError(f"tables.{speed:g}.{'retx' if retx else 'noretx'}: no such file {src}")
    return cfg


def load_config(path) -> RootConfig:
    """Read and validate a configuration file."""
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent)


def _cell_seed(root: int, *key: float) -> int:
    ss = np.random.SeedSequence([int(root) & 0xFFFFFFFF, *[int(round(k * 1000)) for k in key]])
    return int(ss.generate_state(1)[0])


def resolve_table(cfg: RootConfig, speed_kmh: float, retx: bool, mcs_table) -> l2s.L2sTable:
    src = cfg.table_source(speed_kmh, retx)
    if src == "synthetic":
        syn = cfg.synthetic
        gain = syn.gain(speed_kmh) if retx else 0.0
        label = f"L2S-{2 if retx else 1} synthetic {speed_kmh:g} km/h"
        return l2s.synth_table(mcs_table, syn.penalty(speed_kmh), gain, label,
                               slope=syn.slope, speed_kmh=speed_kmh)
    return l2s.load_table(src)


def run_cell(cfg: RootConfig, cell) -> tuple[metrics.SweepPoint, engine.RunResult]:
    """Deploy, plan and simulate one grid cell."""
    ivd, rate, speed, retx = cell
    mcs_table = traffic.McsTable.from_file(cfg.mcs_table) if cfg.mcs_table else traffic.McsTable.default()
    root = cfg.sim.rng_seed
    # geometry depends on IVD only; the run seed ignores retx so both modes share transmitter draws
    scen = dataclasses.replace(cfg.scenario, ivd_m=ivd, rng_seed=_cell_seed(root, ivd))
    dep = scenario.deploy(scen)
    tr = dataclasses.replace(cfg.traffic, message_rate_hz=rate)
    plan = traffic.plan_load(scen.isd_m, ivd, scen.lane_count, tr, mcs_table, retx)
    table = resolve_table(cfg, speed, retx, mcs_table)
    sim = engine.SimConfig(
        iterations=cfg.sim.iterations,
        retx_enabled=retx,
        rng_seed=_cell_seed(root, ivd, rate, speed),
        table_first=None if retx else table,
        table_retx=table if retx else None,
        budget=cfg.link_budget,
        batch_size=cfg.sim.batch_size,
    )
    result = engine.run(dep, plan, sim)
    return metrics.make_point(ivd, rate, speed, plan, result), result


def _run_cell_safe(args):
    cfg, cell = args
    try:
        point, result = run_cell(cfg, cell)
        return cell, point, result.sinr_histogram, None
    except Exception as exc:  # reported per cell, other cells proceed
        return cell, None, None, f"{type(exc).__name__}: {exc}"


def _fmt(x: float) -> str:
    return f"{x:g}"


def sweep_rows(result: metrics.SweepResult):
    for p in result.points:
        yield (_fmt(p.ivd_m), _fmt(p.message_rate_hz), _fmt(p.speed_kmh), int(p.retx_enabled),
               p.selected_mcs, p.ue_per_bs, f"{p.data_volume_mbps:.4f}", f"{p.prr_max:.4f}",
               f"{p.runtime_prr:.4f}", f"{p.effective_prr:.4f}", f"{p.ci95_halfwidth:.4f}")


def write_sweep_csv(result: metrics.SweepResult, path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(sweep_rows(result))
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _write_point(path, point: metrics.SweepPoint, hist) -> None:
    buf = io.StringIO()
    for f in dataclasses.fields(point):
        v = getattr(point, f.name)
        buf.write(f"# {f.name}: {v:.6g}\n" if isinstance(v, float) else f"# {f.name}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("sinr_low_db", "sinr_high_db", "count"))
    for lo, hi, c in zip(hist.bin_edges_db[:-1], hist.bin_edges_db[1:], hist.counts):
        w.writerow((_fmt(lo), _fmt(hi), int(c)))
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


@dataclass
class SweepOutcome:
    result: metrics.SweepResult
    errors: dict
    output_dir: Path

    @property
    def ok(self) -> bool:
        return not self.errors


def run_sweep(cfg: RootConfig, output_dir=None, parallel: bool = True,
              max_workers: int | None = None) -> SweepOutcome:
    """Run every grid cell and write ``sweep.csv`` plus per-cell and plot files.

    Cells are independent; a failing cell is logged and skipped, and its error
    is returned in ``SweepOutcome.errors``.
    """
    out = Path(output_dir or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.sweep.grid()
    jobs = [(cfg, cell) for cell in grid]
    if parallel and len(jobs) > 1:
        workers = max_workers or min(len(jobs), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_run_cell_safe, jobs))
    else:
        done = [_run_cell_safe(j) for j in jobs]
    cells, hists, errors = {}, {}, {}
    for cell, point, hist, err in done:
        if err is not None:
            log.error("cell %s failed: %s", cell, err)
            errors[cell] = err
        else:
            cells[cell], hists[cell] = point, hist
    ok_grid = [c for c in grid if c in cells]
    result = metrics.assemble_sweep(cells, ok_grid, cfg.canonical_text())
    write_sweep_csv(result, out / "sweep.csv")
    (out / "fingerprint.txt").write_text(result.config_fingerprint + "\n", encoding="utf-8")
    by_key = {cells[c].sort_key: c for c in ok_grid}
    for i, p in enumerate(result.points):
        _write_point(out / f"point-{i:03d}.csv", p, hists[by_key[p.sort_key]])
    emit_plot_data(result, out)
    return SweepOutcome(result, errors, out)


def series_name(rate: float, speed: float, retx: bool) -> str:
    return f"series-{_fmt(rate)}hz-{_fmt(speed)}kmh-{'retx' if retx else 'noretx'}.csv"


def emit_plot_data(result: metrics.SweepResult, output_dir) -> list[Path]:
    """One ``ivd_m,effective_prr,ci95`` file per (rate, speed, retx) series."""
    if not result.points:
        raise ValueError("empty sweep result")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups: dict = {}
    for p in result.points:
        groups.setdefault((p.message_rate_hz, p.speed_kmh, p.retx_enabled), []).append(p)
    paths = []
    for (rate, speed, retx), pts in groups.items():
        path = out / series_name(rate, speed, retx)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("ivd_m", "effective_prr", "ci95"))
        for p in sorted(pts, key=lambda q: q.ivd_m):
            w.writerow((_fmt(p.ivd_m), repr(p.effective_prr), repr(p.ci95_halfwidth)))
        path.write_text(buf.getvalue(), encoding="utf-8")
        paths.append(path)
    return paths


def read_series(path) -> list[tuple[float, float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [(float(r["ivd_m"]), float(r["effective_prr"]), float(r["ci95"])) for r in rows]
