import json

import pytest

from swarmscale.cli import main
from swarmscale.config import load_config
from swarmscale.runner import batch_id_for

TINY_INI = """\
[arena]
width = 16
height = 8
num_blocks = 12

[experiment]
sizes = 1,2
runs = 2
duration = 200
master_seed = 424242
"""


@pytest.fixture()
def tiny_ini(tmp_path):
    path = tmp_path / "tiny.ini"
    path.write_text(TINY_INI)
    return path


class TestValidate:
    def test_ok(self, tiny_ini, capsys):
        assert main(["validate", str(tiny_ini)]) == 0
        assert "config OK" in capsys.readouterr().out

    def test_bad_field_value(self, tiny_ini):
        assert main(["validate", str(tiny_ini),
                     "--set", "experiment.runs=0"]) == 2

    def test_unknown_override_names_the_field(self, tiny_ini, capsys):
        assert main(["validate", str(tiny_ini),
                     "--set", "experiment.bogus=1"]) == 2
        assert "experiment.bogus" in capsys.readouterr().err

    def test_malformed_override(self, tiny_ini):
        assert main(["validate", str(tiny_ini), "--set", "no-equals"]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.ini")]) == 2


class TestRun:
    def test_happy_path(self, tiny_ini, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["run", str(tiny_ini), "--out", str(out)]) == 0
        cfg = load_config(tiny_ini)
        batch_dir = out / batch_id_for(cfg)
        assert (batch_dir / "manifest.json").exists()
        assert (batch_dir / "CRW" / "1" / "avg-cumulative.csv").exists()
        assert "CRW" in capsys.readouterr().out

    def test_override_lands_in_manifest(self, tiny_ini, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(tiny_ini), "--out", str(out),
                     "--set", "experiment.master_seed=7"]) == 0
        cfg = load_config(tiny_ini, {"experiment.master_seed": "7"})
        manifest = json.loads(
            (out / batch_id_for(cfg) / "manifest.json").read_text())
        assert manifest["config"]["master_seed"] == 7

    def test_existing_batch_without_force(self, tiny_ini, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(tiny_ini), "--out", str(out)]) == 0
        assert main(["run", str(tiny_ini), "--out", str(out)]) == 3
        assert main(["run", str(tiny_ini), "--out", str(out),
                     "--force"]) == 0

    def test_swarm_out_env(self, tiny_ini, tmp_path, monkeypatch):
        monkeypatch.setenv("SWARM_OUT", str(tmp_path / "envout"))
        assert main(["run", str(tiny_ini)]) == 0
        assert any((tmp_path / "envout").iterdir())


@pytest.fixture()
def stored_batch(tiny_ini, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(tiny_ini), "--out", str(out)]) == 0
    return out / batch_id_for(load_config(tiny_ini))


class TestMetrics:
    def test_default_families(self, stored_batch, tmp_path):
        rep_dir = tmp_path / "rep"
        assert main(["metrics", str(stored_batch), "--out",
                     str(rep_dir)]) == 0
        report = json.loads((rep_dir / "report.json").read_text())
        assert report["selforg"]  # (1, 2) ladder pair
        assert report["scalability"] == []  # no pair with N1 >= 2
        assert (rep_dir / "report.csv").read_text().startswith(
            "metric,controller,N1,N2,beta,value")

    def test_reactivity_requires_ideal(self, stored_batch, capsys):
        assert main(["metrics", str(stored_batch), "--which",
                     "reactivity"]) == 1
        assert "--ideal" in capsys.readouterr().err

    def test_not_a_batch_dir(self, tmp_path):
        assert main(["metrics", str(tmp_path)]) == 3


class TestPlotdata:
    def test_performance_table(self, stored_batch, tmp_path):
        out = tmp_path / "plots"
        assert main(["plotdata", "--figure", "performance", "--batch",
                     str(stored_batch), "--out", str(out)]) == 0
        lines = (out / "performance.csv").read_text().splitlines()
        assert lines[0] == "controller,N,t_seconds,value"
        assert len(lines) == 1 + 2 * 20  # two sizes x 20 intervals

    def test_selforg_table_from_report(self, stored_batch, tmp_path):
        rep_dir = tmp_path / "rep"
        main(["metrics", str(stored_batch), "--out", str(rep_dir)])
        out = tmp_path / "plots"
        assert main(["plotdata", "--figure", "selforg", "--report",
                     str(rep_dir / "report.json"), "--out", str(out)]) == 0
        lines = (out / "selforg.csv").read_text().splitlines()
        assert lines[0] == "controller,m_prev,m,Z"
        assert lines[1].startswith("CRW,1,2,")

    def test_unknown_figure(self, tmp_path):
        out = tmp_path / "plots"
        assert main(["plotdata", "--figure", "sankey", "--out",
                     str(out)]) == 1
        assert not out.exists()  # no partial output

    def test_missing_source_flag(self, stored_batch):
        assert main(["plotdata", "--figure", "performance"]) == 1

    def test_empty_figure_is_config_error(self, stored_batch, tmp_path):
        rep_dir = tmp_path / "rep"
        main(["metrics", str(stored_batch), "--out", str(rep_dir)])
        assert main(["plotdata", "--figure", "reactivity", "--report",
                     str(rep_dir / "report.json"), "--out",
                     str(tmp_path / "plots")]) == 2


class TestUsage:
    def test_no_command(self):
        assert main([]) == 1

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1
