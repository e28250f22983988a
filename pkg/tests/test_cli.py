import json
import subprocess
import sys

import pytest

from engagement_lab import cli, figures
from engagement_lab.output import read_csv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--p", "0.5", "--q", "0.5", "--v", "3", "--w", "1")
    assert code == 0
    assert "e_s=3 " in out and "e_t=3 " in out


def test_tree_worked_example_preset(capsys):
    code, out, _ = run(capsys, "tree", "--preset", "appendix-d", "--dmax", "5")
    assert code == 0 and out.strip() == "d_s=2 d_t=1"


def test_validation_exit_code_and_no_output(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, _, err = run(capsys, "eval", "--p", "1.2", "--q", "0.5", "--v", "3", "--out", str(target))
    assert code == 2 and "p must lie" in err
    assert not target.exists()
    code, _, _ = run(capsys, "eval", "--p", "0.2")
    assert code == 2


def test_unknown_command_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    from engagement_lab import tree

    monkeypatch.setattr(tree, "continuation_map", lambda c, g, v=None: g + 1.0)
    code, _, err = run(capsys, "tree", "--preset", "fig6", "--dmax", "2")
    assert code == 3 and "numerical" in err


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"p": 0.5, "q": 0.5, "v": 3, "w": 1}))
    code, out, _ = run(capsys, "eval", "--config", str(cfg))
    assert code == 0 and "e_s=3 " in out
    code, out, _ = run(capsys, "eval", "--config", str(cfg), "--p", "0")
    assert "e_s=4 " in out
    cfg.write_text(json.dumps({"p": 0.5, "colour": "red"}))
    code, _, err = run(capsys, "eval", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_simulate_json_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert run(capsys, "simulate", "--p", "0.5", "--q", "0.5", "--v", "3", "--replications", "20000",
                   "--seed", "4", "--out", str(target))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    summary = json.loads(a.read_text())["summary"]
    assert set(summary) == {"mean_t", "mean_s", "se_t", "se_s", "replications", "seed"}


def test_other_commands(capsys, tmp_path):
    assert run(capsys, "manifold", "--curve", "moreishness", "--q0", "0.5", "--v0", "3", "--out", str(tmp_path / "m.csv"))[0] == 0
    assert "classification=higher_moreishness" in run(capsys, "manifold", "--curve", "both", "--alpha", "1")[1]
    assert "t_star=2" in run(capsys, "gamma", "--p", "0", "--gamma", "0.5", "--v", "4")[1]
    out = run(capsys, "survey", "--p", "0.6", "--q", "0.3", "--v", "1.5", "--replications", "20000",
              "--out", str(tmp_path / "s.csv"))[1]
    assert "monotone=decreasing_all" in out
    meta, header, rows = read_csv(tmp_path / "s.csv")
    assert header[0] == "t" and meta["regime"] == "q_lt_p"
    assert "pr_use=0.8" in run(capsys, "population", "--p", "0.5", "--q", "0.5", "--v", "1.35")[1]
    assert run(capsys, "tree", "--p", "0.3", "--q", "0.5", "--values", "1:0.5,4:0.5", "--dmax", "4",
               "--out", str(tmp_path / "t.csv"))[0] == 0
    assert run(capsys, "tree", "--p", "0.3")[0] == 2
    assert run(capsys, "tree", "--p", "0.3", "--q", "0.5", "--values", "1:0.5,4")[0] == 2


def test_figure_list_and_output(capsys, tmp_path):
    code, out, _ = run(capsys, "figure", "--list")
    assert code == 0 and all(fid in out for fid in figures.PRESETS)
    code, _, _ = run(capsys, "figure", "--id", "fig4", "--out", str(tmp_path), "--seed", "7")
    meta, header, rows = read_csv(tmp_path / "fig4.csv")
    assert meta["seed"] == "7" and meta["preset"] == "fig4" and "version" in meta
    assert header == ["p", "q", "v_bar", "pr_use", "e_t_given_use", "e_t_total", "e_s_total"]
    side = json.loads((tmp_path / "fig4.json").read_text())
    assert {k: str(v) for k, v in side["meta"].items()} == meta and side["n_rows"] == len(rows)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "engagement_lab", "eval", "--p", "0", "--q", "0.5", "--v", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "e_s=4" in res.stdout
