"""
Load planning on the baseline highway
=====================================

How many vehicles each base station has to serve, how much traffic they
offer, which MCS the scheduler must pick to carry it, and where the system
runs out of capacity. No Monte Carlo here; everything is arithmetic.
"""

from sidelinksim.scenario import ue_count_highway
from sidelinksim.traffic import McsTable, TrafficConfig, plan_load

# %%
# The default MCS ladder: QPSK up to MCS 10, 16QAM above.
table = McsTable.default()
for mcs, se in table:
    print(f"MCS {mcs:2d}: {se:.4f} bit/s/Hz")

# %%
# Sweep the inter-vehicle distance with and without one blind retransmission.
# A retransmission doubles the offered load, so the required spectral
# efficiency doubles and a less robust MCS is needed.
traffic = TrafficConfig(packet_size_bytes=256, message_rate_hz=10, bandwidth_hz=10e6)
for retx in (False, True):
    print("\nwith retransmission" if retx else "\nsingle transmission")
    print(" IVD  UEs/highway  UEs/BS   Mbps      MCS  overload  PRR_max")
    for ivd in (3, 5, 10, 20, 40, 50, 80, 100):
        p = plan_load(1732, ivd, 6, traffic, table, retx)
        print(f"{ivd:4d}  {ue_count_highway(3464, ivd, 6):11d}  {p.ue_per_bs:6d}  "
              f"{p.data_volume_mbps:9.4f}  {p.operating_mcs:3d}  {str(p.overloaded):8s}  {p.prr_max:.4f}")

# %%
# Lower message rates push the overload point to denser traffic.
for rate in (2, 5, 10, 20):
    tr = TrafficConfig(message_rate_hz=rate)
    first_ok = next(ivd for ivd in range(1, 200) if not plan_load(1732, ivd, 6, tr, table, True).overloaded)
    print(f"{rate:2d} Hz with retx: smallest non-overloaded IVD = {first_ok} m")
