"""
One Monte Carlo run
===================

Deploy vehicles at 40 m spacing, plan the load, and run 1000 iterations with
and without a blind retransmission. The two runs share the deployment and the
transmitter draws, so the difference is down to the retransmission alone.
"""

import numpy as np

from sidelinksim.engine import SimConfig, run, run_iteration
from sidelinksim.l2s import synth_table
from sidelinksim.metrics import confidence_interval, effective_prr
from sidelinksim.scenario import ScenarioConfig, deploy
from sidelinksim.traffic import McsTable, TrafficConfig, plan_load

scen = ScenarioConfig(ivd_m=40, rng_seed=1)
dep = deploy(scen)
print(f"{dep.n_vehicles} vehicles, BSs at {[b.x_m for b in dep.base_stations]}, "
      f"evaluated Tx region {dep.eval_region}")

mcs = McsTable.default()
tables = {False: synth_table(mcs, -3.0, 0.0, "L2S-1"), True: synth_table(mcs, -3.0, 5.0, "L2S-2")}

# %%
for retx in (False, True):
    plan = plan_load(scen.isd_m, scen.ivd_m, scen.lane_count, TrafficConfig(), mcs, retx)
    sim = SimConfig(iterations=1000, retx_enabled=retx, rng_seed=7,
                    table_first=tables[False], table_retx=tables[True])
    r = run(dep, plan, sim)
    ci = confidence_interval(r.received_total, r.evaluated_total)
    print(f"retx={retx!s:5}  MCS {plan.operating_mcs:2d}  runtime PRR {r.runtime_prr:.4f} ± {ci:.4f}  "
          f"effective {effective_prr(plan.prr_max, r.runtime_prr):.4f}  "
          f"median SINR {r.sinr_histogram.p50_db:.1f} dB")

# %%
# Inspect a single iteration: who transmitted and how its receivers fared.
plan = plan_load(scen.isd_m, scen.ivd_m, scen.lane_count, TrafficConfig(), mcs, True)
out = run_iteration(dep, plan, SimConfig(retx_enabled=True, table_retx=tables[True], rng_seed=3))
for b in out.per_bs:
    recs = b.receivers
    if not recs:
        print(f"BS {b.bs_id}: Tx {b.tx_id} outside the evaluated region")
        continue
    eff = np.array([r.effective_sinr_db for r in recs])
    print(f"BS {b.bs_id}: Tx {b.tx_id} at x={dep.x[b.tx_id]:.0f} m, {len(recs)} receivers, "
          f"{sum(r.received for r in recs)} decoded, SINR {eff.min():.1f}..{eff.max():.1f} dB")
