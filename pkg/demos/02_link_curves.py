"""
Link-to-system curves
=====================

The simulator never decodes bits. It maps an effective SINR to a block error
rate through per-MCS curves. The real curves come from a link-level simulator;
here we build the synthetic stand-ins, write them to disk in the exchange
format and read them back.
"""

import tempfile
from pathlib import Path

import numpy as np

from sidelinksim.l2s import bler_lookup, load_table, save_table, synth_table
from sidelinksim.traffic import McsTable

mcs = McsTable.default()
single = synth_table(mcs, channel_penalty_db=-3.0, diversity_gain_db=0.0, label="L2S-1")
retx = synth_table(mcs, channel_penalty_db=-3.0, diversity_gain_db=5.0, label="L2S-2")

# %%
# SINR needed for 10 % BLER, per MCS. The retransmission curves sit a few dB
# to the left.
for m in (0, 4, 7, 14, 20):
    grid = np.linspace(-20, 40, 6001)
    need1 = grid[np.argmax(bler_lookup(single, m, grid) <= 0.1)]
    need2 = grid[np.argmax(bler_lookup(retx, m, grid) <= 0.1)]
    print(f"MCS {m:2d}: {need1:6.2f} dB single, {need2:6.2f} dB with retx")

# %%
# Outside the tabulated SINR range the end values are held constant.
print(bler_lookup(single, 0, -500.0), bler_lookup(single, 0, 500.0))

# %%
# Round trip through the text format (mcs,snr_db,bler rows).
with tempfile.TemporaryDirectory() as d:
    path = Path(d) / "eva100_single.csv"
    save_table(single, path)
    print(path.read_text().splitlines()[:6])
    back = load_table(path)
    assert all(np.array_equal(back.curves[m].bler, single.curves[m].bler) for m in single.curves)

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    grid = np.linspace(-15, 20, 400)
    for m in range(0, 21, 4):
        ax.semilogy(grid, bler_lookup(single, m, grid), label=f"MCS {m}")
        ax.semilogy(grid, bler_lookup(retx, m, grid), "--", color=ax.lines[-1].get_color())
    ax.set(xlabel="SINR [dB]", ylabel="BLER", ylim=(1e-4, 1.1))
    ax.legend(fontsize=7)
    fig.savefig("link_curves.png", dpi=120, bbox_inches="tight")
    print("saved link_curves.png")
