import textwrap

import pytest

from sidelinksim import cli
from sidelinksim.l2s import save_table, synth_table
from sidelinksim.sweep import (SWEEP_HEADER, ConfigError, RootConfig, emit_plot_data, load_config,
                               parse_config, read_series, run_sweep)
from sidelinksim.traffic import McsTable


def test_empty_config_gives_baseline():
    cfg = parse_config("")
    assert cfg == RootConfig()
    s = cfg.scenario
    assert (s.highway_length_m, s.lane_count, s.bs_count, s.isd_m, s.comm_range_m) == \
        (3464.0, 6, 2, 1732.0, 400.0)
    assert (cfg.traffic.packet_size_bytes, cfg.traffic.message_rate_hz, cfg.traffic.bandwidth_hz) == \
        (256, 10.0, 10e6)
    assert cfg.link_budget.eirp_dbm == 23.0 and cfg.link_budget.carrier_hz == 5.9e9
    assert cfg.sim.iterations == 1000


def test_sweep_list_parsing():
    cfg = parse_config("[sweep]\nivd_m = 10, 20, 40, 50, 80, 100\nretx = false\n")
    assert len(cfg.sweep.grid()) == 6


@pytest.mark.parametrize("text, match", [
    ("[scenario]\nlanes = 4\n", r"scenario\.lanes: unknown key"),
    ("[bogus]\nx = 1\n", "bogus: unknown section"),
    ("[scenario]\nlane_count = many\n", r"scenario\.lane_count"),
    ("[scenario]\nbs_count = 1\n", "scenario: bs_count"),
    ("[sweep]\nretx = maybe\n", r"sweep\.retx"),
    ("[scenario]\nivd_m = 5\n", r"scenario\.ivd_m: set the IVD"),
    ("[tables]\nfast = synthetic\n", "tables.fast"),
    ("[tables]\n100.retx = nope.csv\n", "no such file"),
    ("[output]\nfoo = x\n", r"output\.foo"),
    ("garbage", "parse error"),
])
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_table_file_resolution(tmp_path):
    save_table(synth_table(McsTable.default(), 0, 3, "L2S-2"), tmp_path / "t2.csv")
    (tmp_path / "c.ini").write_text("[tables]\n100.retx = t2.csv\n")
    cfg = load_config(tmp_path / "c.ini")
    assert cfg.table_source(100.0, True) == str(tmp_path / "t2.csv")
    assert cfg.table_source(100.0, False) == "synthetic"


SMALL = textwrap.dedent("""
    [sim]
    iterations = 30
    [sweep]
    ivd_m = 20, 50, 100
    retx = false, true
""")


def test_run_sweep_outputs(tmp_path):
    out = run_sweep(parse_config(SMALL), tmp_path, parallel=False)
    assert out.ok
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert len(lines) == 7
    assert len(list(tmp_path.glob("point-*.csv"))) == 6
    series = sorted(tmp_path.glob("series-*.csv"))
    assert [p.name for p in series] == ["series-10hz-100kmh-noretx.csv", "series-10hz-100kmh-retx.csv"]
    for p in series:
        rows = read_series(p)
        assert [r[0] for r in rows] == [20.0, 50.0, 100.0]


def test_parallel_equals_sequential(tmp_path):
    cfg = parse_config(SMALL)
    run_sweep(cfg, tmp_path / "a", parallel=False)
    run_sweep(cfg, tmp_path / "b", parallel=True, max_workers=2)
    assert (tmp_path / "a/sweep.csv").read_bytes() == (tmp_path / "b/sweep.csv").read_bytes()


def test_series_roundtrip(tmp_path):
    out = run_sweep(parse_config(SMALL), tmp_path, parallel=False)
    files = emit_plot_data(out.result, tmp_path / "plots")
    for f in files:
        retx = f.name.endswith("-retx.csv")
        pts = out.result.series(10.0, retx)
        assert read_series(f) == [(p.ivd_m, p.effective_prr, p.ci95_halfwidth) for p in pts]


def test_failing_cell_reported(tmp_path):
    # the retx table only covers MCS 5, so every retx cell fails its lookup
    bad = tmp_path / "bad.csv"
    bad.write_text("5,0,0.5\n5,1,0.4\n")
    (tmp_path / "c.ini").write_text(SMALL + "[tables]\n100.retx = bad.csv\n")
    out = run_sweep(load_config(tmp_path / "c.ini"), tmp_path / "o", parallel=False)
    assert not out.ok
    assert len(out.errors) == 3
    assert len(out.result.points) == 3


def test_cli(tmp_path, capsys):
    (tmp_path / "c.ini").write_text(SMALL)
    rc = cli.main(["--config", str(tmp_path / "c.ini"), "--output", str(tmp_path / "o"),
                   "--seed", "7", "--no-parallel"])
    assert rc == 0
    assert (tmp_path / "o/sweep.csv").exists()
    assert "wrote 6 points" in capsys.readouterr().out


def test_cli_bad_config(tmp_path, capsys):
    (tmp_path / "c.ini").write_text("[scenario]\nwhat = 1\n")
    assert cli.main(["--config", str(tmp_path / "c.ini")]) == 2
    assert "scenario.what" in capsys.readouterr().err


def test_seed_changes_results(tmp_path):
    (tmp_path / "c.ini").write_text(SMALL)
    cli.main(["--config", str(tmp_path / "c.ini"), "--output", str(tmp_path / "a"), "--no-parallel"])
    cli.main(["--config", str(tmp_path / "c.ini"), "--output", str(tmp_path / "b"), "--no-parallel",
              "--seed", "99"])
    assert (tmp_path / "a/sweep.csv").read_text() != (tmp_path / "b/sweep.csv").read_text()
