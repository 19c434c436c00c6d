"""System-level Monte Carlo simulator for BS-scheduled C-V2X sidelink broadcast
on a highway, with optional blind HARQ retransmission."""

from .channel import LinkBudget, SinrSample, noise_power_mw, pathloss_db, sinr
from .engine import RunResult, SimConfig, run, run_iteration
from .l2s import BlerQuery, L2sTable, bler_lookup, load_table, save_table, synth_table
from .metrics import SweepPoint, SweepResult, confidence_interval, effective_prr
from .scenario import Deployment, ScenarioConfig, deploy, in_comm_range, ue_count_highway
from .sweep import RootConfig, emit_plot_data, load_config, run_sweep
from .traffic import (LoadPlan, McsTable, TrafficConfig, data_volume, plan_load, prr_max,
                      select_mcs, ue_count_per_bs)

__version__ = "0.1.0"
