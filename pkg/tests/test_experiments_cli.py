"""Experiment registry and command-line front end."""

import json
import sys
from fractions import Fraction

import pytest

from ocrskit.cli import ExperimentConfig, main
from ocrskit.distributions import load_zvector, twise_symmetric
from ocrskit.experiments import (EXPERIMENTS, ExperimentError, _coerce,
                                 run_experiment)

REGISTRY = [
    "almighty-ub", "cographic", "graphic", "graphic-tightness", "laminar",
    "multi-threshold-ub", "phi-table", "regular", "single-sample",
    "single-sqrt2", "transversal", "twise-quality", "uniform-crs",
    "uniform-simple", "uniform-two-bucket",
]


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def test_registry_names():
    assert sorted(EXPERIMENTS) == REGISTRY


def test_every_experiment_has_claim_and_defaults():
    for exp in EXPERIMENTS.values():
        assert exp.claim and isinstance(exp.defaults, dict)


def test_run_experiment_deterministic():
    a = run_experiment("graphic", {"b": "3/10"}, seed=7)
    b = run_experiment("graphic", {"b": "3/10"}, seed=7)
    assert a.to_csv() == b.to_csv()
    assert a.ok


def test_run_experiment_seed_in_header():
    res = run_experiment("phi-table", {"tmax": 4}, seed=5)
    head = res.to_csv()
    assert "# seed: 5" in head
    assert "# experiment: phi-table" in head
    assert "# result: pass" in head
    assert res.to_json()


def test_unknown_experiment_rejected():
    with pytest.raises(ExperimentError, match="unknown experiment"):
        run_experiment("nope")


def test_unknown_parameter_rejected():
    with pytest.raises(ExperimentError, match="valid keys"):
        run_experiment("graphic", {"bogus": 1})


def test_coerce_by_template():
    assert _coerce("3/10", Fraction(1, 2)) == Fraction(3, 10)
    assert _coerce("7", 1) == 7
    assert _coerce("0.25", 1.0) == 0.25
    assert _coerce("4 6 8", (1,)) == (4, 6, 8)
    assert _coerce("4,6", (1,)) == (4, 6)
    assert _coerce("yes", False) is True
    assert _coerce("abc", "s") == "abc"


def test_fast_experiments_pass():
    quick = {
        "uniform-simple": {},
        "graphic": {},
        "graphic-tightness": {"n": 5},
        "phi-table": {},
        "twise-quality": {"ts": "2", "ns": "16 32"},
        "almighty-ub": {"ns": "4 6"},
    }
    for name, overrides in quick.items():
        res = run_experiment(name, overrides, seed=0)
        assert res.ok, (name, res.notes)
        assert res.rows


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def test_config_from_file(tmp_path):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text("# comment\nseed = 9\nformat = json\ntmax = 5\n")
    cfg = ExperimentConfig.from_file(str(cfg_path))
    assert cfg.seed == 9
    assert cfg.format == "json"
    assert cfg.params == {"tmax": "5"}


def test_config_bad_line_reports_location(tmp_path):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("seed = 1\nthis is not a pair\n")
    with pytest.raises(ExperimentError, match="bad.cfg:2"):
        ExperimentConfig.from_file(str(cfg_path))


def test_config_rejects_bad_global(tmp_path):
    cfg_path = tmp_path / "bad2.cfg"
    cfg_path.write_text("seed = soon\n")
    with pytest.raises(ExperimentError):
        ExperimentConfig.from_file(str(cfg_path))


# ---------------------------------------------------------------------------
# CLI entry point
# ---------------------------------------------------------------------------

def run_cli(*argv):
    return main(list(argv))


def test_cli_list(capsys):
    assert run_cli("list") == 0
    out = capsys.readouterr().out
    for name in REGISTRY:
        assert name in out


def test_cli_run_ok(capsys, tmp_path):
    out_file = tmp_path / "res.csv"
    code = run_cli("run", "graphic", "--b", "3/10", "--seed", "7",
                   "--out", str(out_file))
    assert code == 0
    text = out_file.read_text()
    assert "# experiment: graphic" in text
    assert "# result: pass" in text


def test_cli_run_json_format(capsys):
    assert run_cli("run", "phi-table", "--tmax", "4",
                   "--format", "json") == 0
    payload = json.loads(capsys.readouterr().out)[0]
    assert payload["experiment"] == "phi-table"
    assert payload["ok"] is True


def test_cli_run_unknown_param(capsys):
    assert run_cli("run", "graphic", "--bogus", "1") == 2
    assert "error:" in capsys.readouterr().err


def test_cli_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("seed = 9\nformat = json\ntmax = 5\n")
    assert run_cli("--config", str(cfg), "run", "phi-table") == 0
    payload = json.loads(capsys.readouterr().out)[0]
    assert payload["seed"] == 9
    assert payload["params"]["tmax"] == "5"
    # explicit flags win over the file
    assert run_cli("--config", str(cfg), "run", "phi-table",
                   "--seed", "3", "--tmax", "4") == 0
    payload = json.loads(capsys.readouterr().out)[0]
    assert payload["seed"] == 3
    assert payload["params"]["tmax"] == "4"


def test_cli_dump_dist_roundtrip(capsys):
    assert run_cli("dump-dist", "twise", "6", "2") == 0
    z = load_zvector(capsys.readouterr().out)
    want = twise_symmetric(6, 2)
    assert z == dict(want.z)
    assert z[0] == Fraction(5, 12)


def test_cli_dump_pair_singleton(capsys):
    assert run_cli("dump-dist", "pair-singleton", "3") == 0
    text = capsys.readouterr().out
    from ocrskit.distributions import load_explicit_dist, pair_singleton_dist
    D = load_explicit_dist(text)
    want = pair_singleton_dist(3)
    assert dict(D.outcomes) == dict(want.outcomes)


def test_cli_dump_unknown_ctor(capsys):
    assert run_cli("dump-dist", "mystery") == 2


def test_cli_verify_small_scale(capsys):
    code = run_cli("verify", "--scale", "0.01", "--seed", "0")
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.splitlines() if "] criterion " in l]
    assert len(lines) == 11
    assert "0 fail" in out
    assert out.strip().splitlines()[-1].startswith("verify:")
