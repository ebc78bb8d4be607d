import csv
import json
from pathlib import Path

import pytest

import fraclab
from fraclab import cli
from fraclab.config import config_from_dict
from fraclab.verify import VerificationCase, VerificationReport

CONFIGS = Path(fraclab.__file__).parent / "configs"


def _small(**over):
    cfg = {
        "schema": 1,
        "domain": {"corner": [-2.0], "L": 4.0, "N": 32, "J": 3},
        "kernel": {"m": 2, "alpha": 0.5},
        "corpus": [[{"id": "indicator", "params": {"a": 0, "b": 1}},
                    {"id": "gaussian", "params": {"sigma": 0.5}}]],
        "params": {"delta": 0.4},
        "suites": [{"id": "sharp_estimate"}],
    }
    cfg.update(over)
    return cfg


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", "--config", _write(tmp_path, _small()), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"sharp_estimate.json", "results.csv", "summary.csv"}
    rows = _rows(out / "results.csv")
    assert rows[0] == ["name", "suite", "N", "label", "lhs", "rhs", "ratio", "flagged", "degenerate"]
    assert sorted({r[2] for r in rows[1:]}) == ["32", "64"]
    assert _rows(out / "summary.csv")[1][:3] == ["sharp_estimate", "sharp_estimate", "true"]
    assert "PASS sharp_estimate" in capsys.readouterr().out


def test_embedded_config_round_trips(tmp_path):
    out = tmp_path / "out"
    cli.main(["run", "--config", _write(tmp_path, _small()), "--out", str(out)])
    doc = json.loads((out / "sharp_estimate.json").read_text())
    again = config_from_dict(doc["config"])
    assert again.to_dict() == doc["config"]
    assert doc["report"]["passed"] is True
    assert VerificationReport.from_dict(doc["report"]).passed


def test_output_formats_respected(tmp_path):
    out = tmp_path / "out"
    cfg = _small(output={"formats": ["csv"]})
    cli.main(["run", "--config", _write(tmp_path, cfg), "--out", str(out)])
    assert {p.name for p in out.iterdir()} == {"results.csv", "summary.csv"}


def test_duplicate_suite_names_are_suffixed(tmp_path):
    out = tmp_path / "out"
    cfg = _small(suites=[{"id": "sharp_estimate"}, {"id": "sharp_estimate"}])
    assert cli.main(["run", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    assert (out / "sharp_estimate.json").exists() and (out / "sharp_estimate_2.json").exists()


def test_kernel_integrability_violation_exits_2(tmp_path, capsys):
    cfg = _small(kernel={"m": 1, "alpha": 0.5, "p0": 2.0})
    cfg["corpus"] = [[{"id": "indicator", "params": {"a": 0, "b": 1}}]]
    assert cli.main(["run", "--config", _write(tmp_path, cfg)]) == 2
    err = capsys.readouterr().err
    assert "kernel" in err and "p0'" in err


@pytest.mark.parametrize("mutate, path", [
    (lambda c: c.update(bogus=1), "bogus"),
    (lambda c: c.pop("schema"), "schema"),
    (lambda c: c.update(schema=2), "schema"),
    (lambda c: c.update(suites=[]), "suites"),
    (lambda c: c["domain"].update(N=0), "domain"),
    (lambda c: c["suites"][0].update(name="../x"), "suites.0.name"),
    (lambda c: c["params"].pop("delta"), "params.delta"),
])
def test_invalid_config_exits_2_with_path(tmp_path, capsys, mutate, path):
    cfg = _small()
    mutate(cfg)
    assert cli.main(["run", "--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2
    assert path in capsys.readouterr().err


def test_unreadable_and_malformed_config(tmp_path, capsys):
    assert cli.main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", "--config", str(bad)]) == 2
    bad.write_text("[1, 2]")
    assert cli.main(["run", "--config", str(bad)]) == 2
    assert "JSON object" in capsys.readouterr().err


def test_flagged_case_exits_1(tmp_path, monkeypatch):
    def flagged(*args, **kwargs):
        F = args[3]
        case = VerificationCase.build("sharp_estimate", "x", {}, 1.0, 0.0, N=F.grid.N)
        return VerificationReport("sharp_estimate", [case])
    monkeypatch.setattr(cli, "verify_sharp_estimate", flagged)
    out = tmp_path / "out"
    assert cli.main(["run", "--config", _write(tmp_path, _small()), "--out", str(out)]) == 1
    rows = _rows(out / "results.csv")
    assert rows[1][6:8] == ["inf", "true"]
    assert _rows(out / "summary.csv")[1][2] == "false"


def test_invalid_thread_setting_exits_2(tmp_path, monkeypatch):
    monkeypatch.setenv("FRACLAB_THREADS", "lots")
    assert cli.main(["run", "--config", _write(tmp_path, _small())]) == 2


def test_certify_kernel(tmp_path):
    out = tmp_path / "cert"
    cfg = {"schema": 1, "domain": {"corner": [-2.0], "L": 4.0, "N": 32},
           "kernel": {"m": 2, "alpha": 0.5}, "certify": {"K_max": 4, "nodes": 64}}
    assert cli.main(["certify-kernel", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    doc = json.loads((out / "certificate.json").read_text())
    assert doc["passed"] and 0.8 <= doc["decay_exponent"] <= 1.2
    rows = _rows(out / "certificate.csv")
    assert rows[0][:2] == ["k", "C_k"] and len(rows) == 5
    cfg["certify"]["K_max"] = 1
    assert cli.main(["certify-kernel", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 2
    del cfg["certify"]
    assert cli.main(["certify-kernel", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 2


def test_eval_operator_rows(tmp_path):
    out = tmp_path / "ev"
    cfg = _small(eval={"operator": {}})
    cfg["domain"]["N"] = 16
    assert cli.main(["eval", "--what", "operator", "--config", _write(tmp_path, cfg),
                     "--out", str(out)]) == 0
    rows = _rows(out / "operator.csv")
    assert rows[0] == ["x", "value"] and len(rows) == 17
    xs = [float(r[0]) for r in rows[1:]]
    assert xs == sorted(xs)
    assert cli.main(["eval", "--what", "maximal", "--config", _write(tmp_path, cfg)]) == 2


def test_eval_norms_of_zero(tmp_path):
    out = tmp_path / "ev"
    zero = {"id": "constant", "params": {"c": 0.0}}
    cfg = {"schema": 1, "domain": {"corner": [-2.0], "L": 4.0, "N": 32, "J": 3},
           "eval": {"norms": {"function": zero, "lp": [1, 2], "weak": [1], "bmo": True,
                              "luxemburg": [{"kind": "constant", "p": 2}]}}}
    assert cli.main(["eval", "--what", "norms", "--config", _write(tmp_path, cfg),
                     "--out", str(out)]) == 0
    rows = _rows(out / "norms.csv")
    assert [r[0] for r in rows[1:]] == ["lp:1.0", "lp:2.0", "weak:1.0", "bmo", "luxemburg:0"]
    assert all(float(r[1]) == 0.0 for r in rows[1:])


def test_eval_maximal(tmp_path):
    out = tmp_path / "ev"
    cfg = {"schema": 1, "domain": {"corner": [-2.0], "L": 4.0, "N": 32, "J": 3},
           "eval": {"maximal": {"function": {"id": "constant", "params": {"c": 3.0}}}}}
    assert cli.main(["eval", "--what", "maximal", "--config", _write(tmp_path, cfg),
                     "--out", str(out)]) == 0
    assert {float(r[1]) for r in _rows(out / "maximal.csv")[1:]} == {3.0}


def test_runs_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, _small())
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["run", "--config", cfg, "--out", str(a)])
    cli.main(["run", "--config", cfg, "--out", str(b)])
    for name in ("results.csv", "summary.csv", "sharp_estimate.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("name", sorted(p.stem for p in CONFIGS.glob("*.json")))
def test_shipped_configs_validate(name):
    config_from_dict(json.loads((CONFIGS / f"{name}.json").read_text()))
