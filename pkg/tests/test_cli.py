import csv
import json

import pytest

from vrarcade.cli import EXIT_CONFIG, EXIT_OK, PRESETS, SweepSpec, main, parse_sweep
from vrarcade.config import ConfigError
from vrarcade.engine import CSV_COLUMNS

TINY = {"sim_duration": 0.1, "n_replications": 2, "n_players": 4, "pod_grid": [2, 2]}


@pytest.fixture()
def tiny_config(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(TINY), encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestSweepSpec:
    def test_parse(self):
        assert parse_sweep("n_players=4,8,16") == ("n_players", [4, 8, 16])
        assert parse_sweep("d_th=0.005,0.02") == ("d_th", [0.005, 0.02])

    def test_unknown_axis(self):
        with pytest.raises(ConfigError, match="bogus_axis"):
            parse_sweep("bogus_axis=1,2")

    def test_values_strictly_increasing(self):
        with pytest.raises(ConfigError, match="strictly increasing"):
            SweepSpec(axis="n_players", values=[4, 4], schemes=["Proposed"])
        with pytest.raises(ConfigError, match="non-empty"):
            SweepSpec(axis="n_players", values=[], schemes=["Proposed"])

    def test_unknown_scheme(self):
        with pytest.raises(ConfigError, match="Bogus"):
            SweepSpec(axis="n_players", values=[4], schemes=["Bogus"])


class TestMain:
    def test_sweep_cartesian_row_count(self, tiny_config, tmp_path):
        out = tmp_path / "r.csv"
        code = main(["--config", tiny_config, "--sweep", "n_players=2,3,4",
                     "--schemes", "Proposed,Baseline1", "--out", str(out), "--seed", "5"])
        assert code == EXIT_OK
        rows = read_rows(out)
        assert len(rows) == 6
        assert [r["scheme"] for r in rows] == ["Proposed"] * 3 + ["Baseline1"] * 3
        assert list(rows[0]) == CSV_COLUMNS

    def test_unknown_scheme_exits_config_error(self, tiny_config, tmp_path, capsys):
        code = main(["--config", tiny_config, "--schemes", "Bogus",
                     "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_CONFIG
        assert "Bogus" in capsys.readouterr().err

    def test_unknown_axis_exits_config_error(self, tiny_config, tmp_path, capsys):
        code = main(["--config", tiny_config, "--sweep", "nope=1,2",
                     "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_CONFIG
        assert "nope" in capsys.readouterr().err

    def test_unknown_preset_rejected_by_parser(self, tiny_config, tmp_path):
        code = main(["--config", tiny_config, "--preset", "fig9",
                     "--out", str(tmp_path / "r.csv")])
        assert code != EXIT_OK

    def test_unwritable_output_path(self, tiny_config):
        code = main(["--config", tiny_config, "--out", "/nonexistent-dir/deep/r.csv"])
        assert code != EXIT_OK

    def test_config_error_in_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n_players": 0}), encoding="utf-8")
        code = main(["--config", str(bad), "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_CONFIG

    def test_rerun_appends_identical_rows(self, tiny_config, tmp_path):
        out = tmp_path / "r.csv"
        argv = ["--config", tiny_config, "--schemes", "Baseline1",
                "--out", str(out), "--seed", "11"]
        assert main(argv) == EXIT_OK
        first = read_rows(out)
        assert main(argv) == EXIT_OK
        both = read_rows(out)
        assert both == first + first

    def test_sidecar_written_with_resolved_config(self, tiny_config, tmp_path):
        out = tmp_path / "r.csv"
        main(["--config", tiny_config, "--schemes", "Baseline1", "--out", str(out)])
        sidecar = json.loads((tmp_path / "r.csv.runs.json").read_text(encoding="utf-8"))
        assert len(sidecar) == 1
        cfg = sidecar[0]["config"]
        assert cfg["n_players"] == 4
        assert cfg["scheme"] == "Baseline1"
        assert "compute_demand" in cfg

    def test_preset_fig3_shape(self):
        p = PRESETS["fig3"]
        assert p["axis"] == "n_players"
        assert p["values"] == [4, 8, 12, 16]
        assert p["fixed"] == {"n_aps": 4, "n_servers": 8}
        assert set(p["schemes"]) == {"Proposed", "Baseline1", "Baseline2"}

    def test_preset_fixed_parameters(self):
        assert PRESETS["fig4"]["fixed"]["n_players"] == 16
        assert PRESETS["fig5a"]["fixed"]["n_players"] == 8
        assert PRESETS["fig5b"]["fixed"]["n_players"] == 16
        for p in PRESETS.values():
            assert p["fixed"]["n_aps"] == 4 and p["fixed"]["n_servers"] == 8

    def test_trace_files_emitted(self, tiny_config, tmp_path):
        out = tmp_path / "r.csv"
        code = main(["--config", tiny_config, "--schemes", "Baseline1", "--out", str(out),
                     "--trace", "links", "--trace", "matching", "--trace", "compute"])
        assert code == EXIT_OK
        traces = sorted(p.name for p in tmp_path.glob("r.trace_*.csv"))
        assert len(traces) == 3
        with open(tmp_path / traces[1], newline="", encoding="utf-8") as f:
            header = next(csv.reader(f))
        assert header == ["slot", "player", "ap", "blocked", "sinr_db", "rate_bps"]
