"""
PRR versus inter-vehicle distance
=================================

Full grid of IVD values with and without retransmission, at two vehicle
speeds. Results go to ``demo_output/``: ``sweep.csv`` plus one plottable
series file per (rate, speed, retx) combination. This is the same code path
as the ``sidelinksim`` command.
"""

from pathlib import Path

from sidelinksim.sweep import load_config, run_sweep

cfg = load_config(Path(__file__).with_name("sweep.ini"))
outcome = run_sweep(cfg, "demo_output")
print((outcome.output_dir / "sweep.csv").read_text())

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for speed in cfg.sweep.speed_kmh:
        for retx in cfg.sweep.retx:
            pts = outcome.result.series(10.0, retx, speed)
            ax.errorbar([p.ivd_m for p in pts], [p.effective_prr for p in pts],
                        yerr=[p.ci95_halfwidth for p in pts], marker="o", capsize=2,
                        linestyle="--" if retx else "-",
                        label=f"{speed:g} km/h {'retx' if retx else 'no retx'}")
    ax.set(xlabel="IVD [m]", ylabel="effective PRR", ylim=(0, 1.02))
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    fig.savefig(outcome.output_dir / "prr_vs_ivd.png", dpi=120, bbox_inches="tight")
    print("saved", outcome.output_dir / "prr_vs_ivd.png")
