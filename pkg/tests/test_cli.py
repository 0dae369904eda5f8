import json

import pytest

from nkverify.cli import main
from nkverify.errors import ConfigError
from nkverify.report import (
    CampaignConfig,
    canonical_json,
    load_config,
    run_certify_tamed,
    summary_from_records,
    validate_report,
)


def run(tmp_path, *args):
    out = tmp_path / "r.json"
    code = main([*args, "--json-out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_certify_tamed_passes(tmp_path):
    code, rep, _ = run(tmp_path, "certify-tamed", "--samples", "2", "--points", "2", "--seed", "3")
    assert code == 0
    validate_report(rep)
    assert rep["verdicts"]["passed"]
    assert rep["summary"]["verdict_counts"] == {"NonIntegrable": 4}
    assert len(rep["records"]) == 4


def test_summary_recomputable_from_records(tmp_path):
    _, rep, _ = run(tmp_path, "certify-tamed", "--samples", "2", "--points", "2", "--seed", "4")
    # 17 significant digits round-trip exactly
    assert summary_from_records("certify-tamed", rep["records"]) == rep["summary"]


def test_verify_nk_and_baseline(tmp_path):
    code, rep, _ = run(tmp_path, "verify-nk", "--points", "2", "--rotation", "random", "--samples", "2")
    assert code == 0 and len(rep["records"]) == 4
    assert rep["summary"]["min_lambda"] == pytest.approx(1.0, rel=1e-6)
    code, rep, _ = run(tmp_path, "nijenhuis-baseline", "--points", "2")
    assert code == 0
    assert rep["summary"]["calibrated_floor"] == pytest.approx(0.05 * rep["summary"]["frozen_baseline"], rel=1e-6)


def test_failed_certificate_exit_code(tmp_path):
    code, rep, _ = run(tmp_path, "certify-tamed", "--samples", "1", "--points", "1", "--tol", "nijenhuis_floor=1e6")
    assert code == 2
    assert rep["records"][0]["verdict"] == "Inconclusive"


def test_config_errors_exit_one(tmp_path, capsys):
    assert main(["certify-tamed", "--tol", "bogus=1"]) == 1
    assert main(["certify-tamed", "--rho", "1.5"]) == 1
    assert main(["certify-tamed", "--seed", "-1"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"seed": 1,\n')
    assert main(["verify-nk", "--config", str(bad)]) == 1
    assert "bad.json:2:1" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["certify-tamed", "--tol", "novalue"])


def test_config_file_merged_flags_win(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 5, "samples": 1, "points": 1, "rho": 0.3, "tolerances": {"omega_11": 1e-8}}))
    c = load_config(cfg, rho=0.6, tolerances={"domega30": 1e-5})
    assert (c.seed, c.rho) == (5, 0.6)
    assert c.tolerances == {"omega_11": 1e-8, "domega30": 1e-5}
    cfg.write_text(json.dumps({"unknown": 1}))
    with pytest.raises(ConfigError):
        load_config(cfg)


def test_rotation_file(tmp_path):
    import numpy as np

    rot = tmp_path / "rot.json"
    rot.write_text(json.dumps(np.eye(7).tolist()))
    code, rep, _ = run(tmp_path, "verify-nk", "--points", "1", "--rotation", str(rot))
    assert code == 0
    rot.write_text(json.dumps((2 * np.eye(7)).tolist()))
    assert main(["verify-nk", "--points", "1", "--rotation", str(rot)]) == 1


def test_zero_samples_empty_report(tmp_path):
    code, rep, _ = run(tmp_path, "certify-tamed", "--samples", "0")
    assert code == 0 and rep["records"] == [] and rep["verdicts"]["passed"]


def test_canonical_json_format():
    text = canonical_json({"b": 0.1, "a": [1.0, 2], "c": {"z": None, "y": True}})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text and "1.0" in text
    assert json.loads(text)["c"] == {"y": True, "z": None}


def test_same_seed_same_bytes(tmp_path):
    cfg = CampaignConfig(seed=9, samples=2, points=1)
    a = canonical_json(run_certify_tamed(cfg)[0])
    b = canonical_json(run_certify_tamed(cfg)[0])
    assert a == b
    c = canonical_json(run_certify_tamed(CampaignConfig(seed=10, samples=2, points=1))[0])
    assert a != c


def test_partial_report_on_sample_failure(tmp_path, monkeypatch):
    import nkverify.report as report
    from nkverify.errors import SingularOperatorError

    orig = report._certify_one

    def flaky(arg):
        if arg[1] == 1:
            raise SingularOperatorError("forced")
        return orig(arg)

    monkeypatch.setattr(report, "_certify_one", flaky)
    code, rep, _ = run(tmp_path, "certify-tamed", "--samples", "2", "--points", "1")
    assert code == 1
    validate_report(rep)
    assert [r["sample"] for r in rep["records"]] == [0]
    assert rep["errors"] == [{"index": 1, "error": "SingularOperatorError", "message": "forced"}]
    assert not rep["verdicts"]["passed"]
