from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from ampletheta.cli import main
from ampletheta.config import SUITES, loads
from ampletheta.report import (
    FAIL,
    PASS,
    Check,
    DiagnosticsReport,
    Residual,
    clean,
    emit_report,
)

# budgets small enough for unit tests; the acceptance suite uses the defaults
SMALL = {
    "lattice-exact": ("g = 3\nlattice_bound = 2\ninvolution_g_max = 4", 0),
    "theta-identities": ("random_inputs = 10", 0),
    "factorization": ("g = 2", 0),
    "limit": ("g = 2\nlimit_samples = 3", 1),
    "gluing": ("g = 2\ngluing_points = 20", 0),
    "bpf": ("g = 2\nd = 3\nsamples = 128\nrefine_starts = 2\nrefine_iterations = 100", 0),
    "product-bpf": ("g = 2\nd = 3\nproduct_samples = 256\nproduct_refine_starts = 2\n"
                    "product_iterations = 200", 0),
    "independence": ("g = 2\nd = 5\nsubsets = 10", 0),
    "injectivity": ("g = 2\nd = 5\nrestarts = 200\nstructured = 40\niterations = 20", 0),
    "immersion": ("g = 2\nd = 5\npoints_per_stratum = 4", 0),
    "divisibility": ("g_max = 6", 0),
}


def _run(tmp_path, suite, body, *extra):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(body + "\n")
    out = tmp_path / "report.json"
    code = main(["verify", suite, "--config", str(cfg), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def _numbers_have_context(obj):
    """Every float in a residual or the timing sits next to a tolerance key."""
    for c in obj["checks"]:
        for r in c["residuals"]:
            assert set(r) == {"name", "value", "tolerance", "relation", "passed"}
    assert set(obj["wall_time_s"]) == {"value", "tolerance", "relation"}


# ------------------------------------------------------------------ report

def test_empty_report_json():
    rep = DiagnosticsReport("divisibility", {})
    data = json.loads(emit_report(rep, "json"))
    assert data["version"] == 1 and data["checks"] == [] and data["verdict"] == PASS
    assert rep.exit_code == 0


def test_clean_values():
    assert clean(math.nan) is None and clean(math.inf) is None
    assert clean(1 / 3) == 0.333333333333
    assert clean(1 + 2j) == [1.0, 2.0]
    with pytest.raises(TypeError):
        clean(object())


def test_residual_relations():
    assert Residual("x", 1.0, 2.0).passed
    assert not Residual("x", math.nan, 2.0).passed
    assert Residual("x", 3.0, 2.0, ">").passed
    assert Residual("x", 3.0, None).passed is None


def test_informational_checks_do_not_gate():
    rep = DiagnosticsReport("x", {}, [Check("a", PASS, {}, ""),
                                      Check("b", FAIL, {}, "", mandatory=False)])
    assert rep.verdict == PASS
    rep.checks.append(Check("c", FAIL, {}, ""))
    assert rep.verdict == FAIL and rep.exit_code == 1
    with pytest.raises(ValueError):
        Check("d", "MAYBE", {}, "")


def test_emit_rejects_format(tmp_path):
    with pytest.raises(ValueError):
        emit_report(DiagnosticsReport("x", {}), "xml")


# --------------------------------------------------------------------- cli

@pytest.mark.parametrize("suite", sorted(SMALL))
def test_exit_code_per_suite(tmp_path, suite):
    body, expected = SMALL[suite]
    code, data = _run(tmp_path, suite, body)
    assert code == expected
    assert data["suite"] == suite and data["verdict"] == (PASS if expected == 0 else FAIL)
    assert data["config"]["suite"] == suite
    _numbers_have_context(data)


def test_forced_failure_carries_witness(tmp_path):
    body = SMALL["bpf"][0] + "\ndelta_bpf = 10"
    code, data = _run(tmp_path, "bpf", body)
    assert code == 1 and data["verdict"] == FAIL
    check = data["checks"][0]
    assert check["verdict"] == FAIL and check["witnesses"]
    assert check["witnesses"][0]["tolerance"] == {"delta_bpf": 10.0}


def test_text_format(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("g_max = 6\n")
    assert main(["verify", "divisibility", "--config", str(cfg), "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("suite divisibility: PASS") and "[PASS]" in out


def test_defaults_when_no_config(capsys):
    assert main(["verify", "divisibility"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == PASS


@pytest.mark.parametrize("argv", [
    ["verify", "nonsense"],
    ["verify", "bpf", "--seed", "-3"],
    ["verify", "bpf", "--format", "xml"],
    ["frobnicate"],
])
def test_usage_and_config_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 2


def test_bad_config_file_exit_2(tmp_path, capsys):
    for text in ("delta_coll = -1\n", "g = = 1\n", "nonsense = 1\n",
                 "g = 2\nd = 4\ntau_dprime = [[2.0, 0.0]]\n"):
        cfg = tmp_path / "bad.toml"
        cfg.write_text(text)
        assert main(["verify", "bpf", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "delta_coll" in err and "line 1" in err


def test_list_suites_and_defaults(capsys):
    assert main(["list-suites"]) == 0
    assert capsys.readouterr().out.split() == list(SUITES)
    assert main(["defaults", "--print"]) == 0
    assert loads(capsys.readouterr().out).suite == "full"


def test_reproducible_reports(tmp_path):
    body = SMALL["injectivity"][0]
    _, a = _run(tmp_path, "injectivity", body, "--seed", "11")
    _, b = _run(tmp_path, "injectivity", body, "--seed", "11")
    for d in (a, b):
        d.pop("wall_time_s")
        for c in d["checks"]:
            c["info"].pop("suite_wall_time_s")
    assert a == b


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ampletheta", "list-suites"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "divisibility" in out.stdout
