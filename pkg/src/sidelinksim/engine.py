"""Monte Carlo loop for BS-scheduled sidelink broadcast.

Every iteration each base station schedules exactly one of its supported UEs.
Receivers are all (supported) UEs within communication range of a transmitter,
whichever BS controls them; interference at a receiver comes from the
transmitters scheduled by the other base stations. With a blind
retransmission the interfering transmitters are redrawn for the second slot,
and the two SINRs are averaged in linear scale before the BLER lookup.

Iterations are processed in vectorised batches. Random numbers come from named
substreams consumed in iteration order, so the outcome does not depend on the
batch size and toggling retransmission leaves transmitter selection untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel
from ._rng import stream
from .channel import LinkBudget
from .l2s import L2sTable
from .scenario import Deployment
from .traffic import LoadPlan

SINR_BINS_DB = np.arange(-30.0, 61.0, 1.0)


@dataclass(frozen=True)
class SimConfig:
    iterations: int = 1000
    retx_enabled: bool = False
    rng_seed: int = 0
    table_first: L2sTable | None = None
    table_retx: L2sTable | None = None
    budget: LinkBudget = field(default_factory=LinkBudget)
    keep_iterations: bool = False
    batch_size: int = 128

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.table_first is None and not self.retx_enabled:
            raise ValueError("table_first is required")
        if self.retx_enabled and self.table_retx is None:
            raise ValueError("retx_enabled requires table_retx")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    @property
    def active_table(self) -> L2sTable:
        return self.table_retx if self.retx_enabled else self.table_first


@dataclass(frozen=True)
class RxRecord:
    rx_id: int
    sinr_db_first: float
    sinr_db_second: float | None
    effective_sinr_db: float
    bler: float
    received: bool


@dataclass(frozen=True)
class BsOutcome:
    bs_id: int
    tx_id: int
    evaluated: bool
    receivers: tuple[RxRecord, ...]


@dataclass(frozen=True)
class IterationOutcome:
    index: int
    per_bs: tuple[BsOutcome, ...]
    retx_draw: tuple[int, ...] | None = None

    @property
    def received(self) -> int:
        return sum(r.received for b in self.per_bs for r in b.receivers)

    @property
    def evaluated(self) -> int:
        return sum(len(b.receivers) for b in self.per_bs)


@dataclass(frozen=True)
class SinrSummary:
    bin_edges_db: np.ndarray
    counts: np.ndarray
    mean_db: float
    p5_db: float
    p50_db: float


@dataclass(frozen=True)
class RunResult:
    runtime_prr: float
    received_total: int
    evaluated_total: int
    sinr_histogram: SinrSummary
    message_received: np.ndarray
    message_evaluated: np.ndarray
    per_iteration: list | None = None

    @property
    def mean_sinr_db(self) -> float:
        return self.sinr_histogram.mean_db


@dataclass
class LinkBatch:
    """Flattened (iteration, bs, rx) link records for a batch of iterations."""

    iteration: np.ndarray
    bs: np.ndarray
    tx: np.ndarray
    rx: np.ndarray
    sinr_first: np.ndarray
    sinr_second: np.ndarray | None

    @property
    def effective(self) -> np.ndarray:
        if self.sinr_second is None:
            return self.sinr_first
        return channel.combine_sinr_db(self.sinr_first, self.sinr_second)

    def __len__(self):
        return len(self.rx)


def supported_members(deployment: Deployment, plan: LoadPlan | None, rng=None) -> list[np.ndarray]:
    """Per-BS UEs that are allowed to transmit (and counted as receivers).

    Under overload each BS keeps ``plan.ue_supported`` of its UEs chosen
    uniformly at random; the rest are dropped for the whole run.
    """
    out = []
    for b in range(len(deployment.base_stations)):
        members = deployment.members(b)
        if plan is not None and plan.overloaded and len(members) > plan.ue_supported:
            rng = rng if rng is not None else np.random.default_rng(0)
            keep = rng.choice(len(members), size=plan.ue_supported, replace=False)
            members = np.sort(members[keep])
        out.append(members)
    return out


def select_transmitters(deployment: Deployment, supported, rng, size: int | None = None) -> np.ndarray:
    """One uniformly drawn transmitter per BS; shape ``(n_bs,)`` or ``(size, n_bs)``."""
    n_bs = len(deployment.base_stations)
    if len(supported) != n_bs:
        raise ValueError("supported must hold one index array per base station")
    for b, m in enumerate(supported):
        if len(m) == 0:
            raise ValueError(f"base station {b} has no supported UE to schedule")
    u = rng.random((1 if size is None else size, n_bs))
    tx = np.empty(u.shape, dtype=np.int64)
    for b, m in enumerate(supported):
        tx[:, b] = m[np.minimum((u[:, b] * len(m)).astype(np.int64), len(m) - 1)]
    return tx[0] if size is None else tx


def receive_decision(bler, rng):
    """Draw ``X ~ U[0, 1)``; the packet is received iff ``X >= bler``."""
    bler = np.asarray(bler, dtype=float)
    x = rng.random(bler.shape)
    out = x >= bler
    return bool(out) if out.ndim == 0 else out


def _interference_mw(deployment, budget, rx, interferers, shadow_rng=None):
    # interferers: (n_links, k) vehicle indices; the receiver's own transmission is skipped
    if interferers.shape[1] == 0:
        return np.zeros(len(rx))
    d = channel.distance(deployment.x[interferers], deployment.y[interferers],
                         deployment.x[rx][:, None], deployment.y[rx][:, None])
    p = channel.received_dbm(d, budget)
    if shadow_rng is not None:
        p = p + shadow_rng.normal(0.0, budget.shadowing_std_db, p.shape)
    mw = channel.dbm_to_mw(p)
    mw[interferers == rx[:, None]] = 0.0
    return mw.sum(axis=1)


def _sinr_db(signal_dbm, interference_mw, noise_mw):
    return channel.lin_to_db(channel.dbm_to_mw(signal_dbm) / (interference_mw + noise_mw))


def evaluate_links(deployment: Deployment, budget: LinkBudget, tx: np.ndarray,
                   tx_second: np.ndarray | None = None, rx_allowed: np.ndarray | None = None,
                   first_iteration: int = 0, shadow_rng=None) -> LinkBatch:
    """SINR of every evaluated (transmitter, receiver) link in a batch.

    ``tx`` has shape ``(batch, n_bs)``. ``tx_second`` holds the transmitters of
    the retransmission slot; only its other-BS entries matter, the wanted
    transmitter stays ``tx[:, b]``.
    """
    tx = np.atleast_2d(tx)
    n_iter, n_bs = tx.shape
    n = deployment.n_vehicles
    if rx_allowed is None:
        rx_allowed = np.ones(n, dtype=bool)
    noise = channel.noise_power_mw(budget)
    idx = np.arange(n)
    parts = []
    for b in range(n_bs):
        t = tx[:, b]
        evaluated = deployment.in_eval_region(t)
        d = channel.distance(deployment.x[t][:, None], deployment.y[t][:, None],
                             deployment.x[None, :], deployment.y[None, :])
        mask = (d <= deployment.comm_range_m) & rx_allowed[None, :]
        mask &= idx[None, :] != t[:, None]
        mask &= evaluated[:, None]
        it, rx = np.nonzero(mask)
        parts.append((it, np.full(len(it), b), t[it], rx, d[it, rx]))
    it = np.concatenate([p[0] for p in parts])
    bs = np.concatenate([p[1] for p in parts])
    txs = np.concatenate([p[2] for p in parts])
    rx = np.concatenate([p[3] for p in parts])
    dsig = np.concatenate([p[4] for p in parts])
    order = np.lexsort((rx, bs, it))
    it, bs, txs, rx, dsig = it[order], bs[order], txs[order], rx[order], dsig[order]

    signal = channel.received_dbm(dsig, budget)
    if shadow_rng is not None:
        signal = signal + shadow_rng.normal(0.0, budget.shadowing_std_db, signal.shape)
    others = np.array([[o for o in range(n_bs) if o != b] for b in range(n_bs)], dtype=np.int64)
    others = others.reshape(n_bs, n_bs - 1)

    def sinr_for(slot):
        interferers = slot[it[:, None], others[bs]]
        return _sinr_db(signal, _interference_mw(deployment, budget, rx, interferers, shadow_rng), noise)

    first = sinr_for(tx)
    second = None
    if tx_second is not None:
        second = sinr_for(np.atleast_2d(tx_second))
    return LinkBatch(it + first_iteration, bs, txs, rx, first, second)


class _Streams:
    def __init__(self, seed):
        self.tx = stream(seed, "tx-selection")
        self.retx = stream(seed, "retx-redraw")
        self.reception = stream(seed, "reception")
        self.shadowing = stream(seed, "shadowing")
        self.drop = stream(seed, "drop")


def _outcomes(batch: LinkBatch, tx, tx2, deployment, bler, received, start):
    out = []
    eff = batch.effective
    for k in range(len(tx)):
        per_bs = []
        for b in range(tx.shape[1]):
            sel = np.flatnonzero((batch.iteration == start + k) & (batch.bs == b))
            recs = tuple(
                RxRecord(int(batch.rx[j]), float(batch.sinr_first[j]),
                         None if batch.sinr_second is None else float(batch.sinr_second[j]),
                         float(eff[j]), float(bler[j]), bool(received[j]))
                for j in sel
            )
            per_bs.append(BsOutcome(b, int(tx[k, b]), bool(deployment.in_eval_region(tx[k, b])), recs))
        draw = None if tx2 is None else tuple(int(t) for t in tx2[k])
        out.append(IterationOutcome(start + k, tuple(per_bs), draw))
    return out


class Simulation:
    """Stateful driver holding the random streams of one run.

    ``run`` is the usual entry point; the class exists so that single
    iterations can be stepped for inspection.
    """

    def __init__(self, deployment: Deployment, plan: LoadPlan, sim: SimConfig):
        self.deployment = deployment
        self.plan = plan
        self.sim = sim
        self.mcs = plan.operating_mcs
        self.table = sim.active_table
        self.table.curve(self.mcs)
        self.streams = _Streams(sim.rng_seed)
        self.supported = supported_members(deployment, plan, self.streams.drop)
        self.rx_allowed = np.zeros(deployment.n_vehicles, dtype=bool)
        for m in self.supported:
            self.rx_allowed[m] = True
        self.n_done = 0

    def step(self, count: int):
        """Advance ``count`` iterations; returns (tx, tx2, LinkBatch, bler, received)."""
        s = self.streams
        tx = select_transmitters(self.deployment, self.supported, s.tx, size=count)
        tx2 = select_transmitters(self.deployment, self.supported, s.retx, size=count) \
            if self.sim.retx_enabled else None
        shadow = s.shadowing if self.sim.budget.shadowing_std_db > 0 else None
        batch = evaluate_links(self.deployment, self.sim.budget, tx, tx2, self.rx_allowed,
                               first_iteration=self.n_done, shadow_rng=shadow)
        bler = np.clip(self.table.curve(self.mcs)(batch.effective), 0.0, 1.0)
        received = receive_decision(bler, s.reception)
        self.n_done += count
        return tx, tx2, batch, bler, np.atleast_1d(received)


def run_iteration(deployment: Deployment, plan: LoadPlan, sim: SimConfig,
                  simulation: Simulation | None = None) -> IterationOutcome:
    """Run one iteration and return its per-receiver records."""
    simulation = simulation or Simulation(deployment, plan, sim)
    start = simulation.n_done
    tx, tx2, batch, bler, received = simulation.step(1)
    return _outcomes(batch, tx, tx2, deployment, bler, received, start)[0]


def run(deployment: Deployment, plan: LoadPlan, sim: SimConfig) -> RunResult:
    """Run ``sim.iterations`` iterations and accumulate the packet reception ratio.

    The runtime PRR is the ratio of the summed receptions to the summed
    in-range receiver counts over all evaluated messages.
    """
    simulation = Simulation(deployment, plan, sim)
    n_bs = len(deployment.base_stations)
    msg_rx = np.zeros((sim.iterations, n_bs), dtype=np.int64)
    msg_ev = np.zeros((sim.iterations, n_bs), dtype=np.int64)
    counts = np.zeros(len(SINR_BINS_DB) - 1, dtype=np.int64)
    sinr_sum = 0.0
    sinr_parts = []
    kept = [] if sim.keep_iterations else None
    done = 0
    while done < sim.iterations:
        count = min(sim.batch_size, sim.iterations - done)
        tx, tx2, batch, bler, received = simulation.step(count)
        cell = batch.iteration * n_bs + batch.bs
        np.add.at(msg_ev.reshape(-1), cell, 1)
        np.add.at(msg_rx.reshape(-1), cell, received.astype(np.int64))
        eff = batch.effective
        counts += np.histogram(np.clip(eff, SINR_BINS_DB[0], SINR_BINS_DB[-1]), SINR_BINS_DB)[0]
        sinr_sum += float(np.sum(eff))
        sinr_parts.append(eff.astype(np.float32))
        if kept is not None:
            kept.extend(_outcomes(batch, tx, tx2, deployment, bler, received, done))
        done += count
    evaluated = int(msg_ev.sum())
    if evaluated == 0:
        raise RuntimeError("no receiver was ever evaluated; check eval_region and comm_range")
    received_total = int(msg_rx.sum())
    allv = np.concatenate(sinr_parts)
    summary = SinrSummary(SINR_BINS_DB, counts, sinr_sum / len(allv),
                          float(np.percentile(allv, 5)), float(np.percentile(allv, 50)))
    mask = msg_ev.reshape(-1) > 0
    return RunResult(
        runtime_prr=received_total / evaluated,
        received_total=received_total,
        evaluated_total=evaluated,
        sinr_histogram=summary,
        message_received=msg_rx.reshape(-1)[mask],
        message_evaluated=msg_ev.reshape(-1)[mask],
        per_iteration=kept,
    )
