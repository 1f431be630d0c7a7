import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from levyfluct import harness as H
from levyfluct import presets
from levyfluct.cli import main as cli_main
from levyfluct.config import ExperimentConfig, load_config, parse_grid
from levyfluct.errors import ConfigError
from levyfluct.montecarlo import SimPlan

# every in-scope statement has exactly one registered checker
EXPECTED_CLAIMS = {
    "theorem-main", "cdf-sup-inf", "exit-upper", "product-bound",
    "kappa-identity", "kappa-scaling", "kappa-est", "v-scaling", "pruitt",
    "im-re", "ex3", "creeping", "linearity-large", "vigon-consistency",
    "closing-example",
}


def test_registry_completeness():
    assert set(H.CLAIMS) == EXPECTED_CLAIMS


def fast_cfg(spec_name, claims, outdir=None, **plan_kwargs):
    kwargs = dict(dt=2e-3, eps=2e-3, n_paths=4_000, seed=42)
    kwargs.update(plan_kwargs)
    return ExperimentConfig(
        spec=presets.preset(spec_name), spec_name=spec_name,
        claims=tuple(claims), plan=SimPlan(**kwargs), outdir=outdir,
        grids={"z": np.array([0.1, 1.0, 10.0]),
               "r": np.geomspace(1e-1, 1e1, 7)})


def test_gates_computed():
    g = H.compute_gates(presets.preset("stable15-sym"))
    assert g.zero_mean and g.wlsc_ok and g.unbounded_variation
    assert g.eta_lower == 0.5
    g = H.compute_gates(presets.preset("stable08"))
    assert not g.wlsc_ok         # alpha = 0.8
    assert g.mean is None        # first moment diverges


def test_gate_failure_skips_theorem_main():
    cfg = fast_cfg("stable08", ["theorem-main"])
    res = H.run_experiment(cfg)
    assert res[0].verdict == "skipped"
    assert "WLSC" in res[0].reason or "undefined" in res[0].reason


def test_empty_and_unknown_claims_error():
    with pytest.raises(ConfigError):
        H.run_experiment(fast_cfg("brownian", []))
    with pytest.raises(ConfigError):
        H.run_experiment(fast_cfg("brownian", ["not-a-claim"]))


def test_run_experiment_writes_outputs(tmp_path):
    cfg = fast_cfg("stable15-sym", ["kappa-identity", "product-bound"],
                   outdir=tmp_path / "out")
    res = H.run_experiment(cfg)
    assert all(r.verdict == "pass" for r in res)
    data = json.loads((tmp_path / "out" / "result.json").read_text())
    assert data["spec"] == "stable15-sym"
    assert data["claims"]["kappa-identity"]["verdict"] == "pass"
    assert (tmp_path / "out" / "kappa-identity.csv").exists()
    # wall time is console metadata only, never part of the summary
    assert "wall_time" not in json.dumps(data)


def test_result_json_deterministic(tmp_path):
    blobs = []
    for tag in ("a", "b"):
        cfg = fast_cfg("stable15-asym", ["kappa-identity", "theorem-main"],
                       outdir=tmp_path / tag)
        H.run_experiment(cfg)
        blobs.append((tmp_path / tag / "result.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_vigon_skip_reason():
    from levyfluct.model import CGMY
    spec = CGMY.zero_mean(0.0, 1.0, 2.0, 4.0, 1.4)
    cfg = ExperimentConfig(spec=spec, spec_name="spectral-neg-pure-jump",
                           claims=("vigon-consistency",), plan=SimPlan())
    res = H.run_experiment(cfg)
    assert res[0].verdict == "skipped"
    assert "degenerate" in res[0].reason


# -- config -------------------------------------------------------------------

def test_parse_grid():
    g = parse_grid("1e-2:1e2:5")
    assert np.allclose(g, np.geomspace(1e-2, 1e2, 5))
    assert np.allclose(parse_grid("0.1:0.9:5", log=False), np.linspace(0.1, 0.9, 5))
    with pytest.raises(ConfigError):
        parse_grid("nope")
    with pytest.raises(ConfigError):
        parse_grid("5:1:3")


def test_load_config_families(tmp_path):
    text = """
[process]
family = cgmy
c_plus = 0.7
c_minus = 1.3
g = 2.0
m = 4.0
y = 1.4

[simulation]
n_paths = 1234
seed = 7

[verify]
claims = kappa-identity
R = 2.0
"""
    p = tmp_path / "c.cfg"
    p.write_text(text)
    cfg = load_config(p)
    assert cfg.spec_name == "cgmy"
    assert cfg.plan.n_paths == 1234 and cfg.plan.seed == 7
    assert cfg.R == 2.0 and cfg.claims == ("kappa-identity",)
    assert abs(cfg.spec.mean()) < 1e-8


def test_load_config_errors(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("[process]\nfamily = nosuch\n")
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("[grids]\nr = 1:2:3\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


# -- CLI ------------------------------------------------------------------------

CFG = Path(__file__).resolve().parent.parent / "configs" / "stable15_sym.cfg"


def test_cli_model_show(capsys):
    assert cli_main(["model", "show", str(CFG)]) == 0
    out = capsys.readouterr().out
    assert "zero_mean=True" in out and "psi(1)" in out


def test_cli_compute_h(capsys):
    assert cli_main(["compute", "h", str(CFG), "--grid", "0.5:2:3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "r,h,b_r,sup_re_psi"
    assert len(lines) == 4


def test_cli_compute_psi_csv(tmp_path, capsys):
    out = tmp_path / "psi.csv"
    assert cli_main(["compute", "psi", str(CFG), "--grid", "1:10:3",
                     "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "xi,re_psi,im_psi"
    xi, re, im = map(float, rows[1].split(","))
    assert re == pytest.approx(xi ** 1.5)
    assert im == 0.0


def test_cli_compute_V_and_rho(capsys):
    assert cli_main(["compute", "V", str(CFG), "--grid", "0.5:2:3"]) == 0
    assert cli_main(["compute", "rho", str(CFG), "--grid", "0.5:2:3"]) == 0
    out = capsys.readouterr().out
    assert "V,V_hat" in out and "t,rho" in out


def test_cli_verify_and_report(tmp_path, capsys):
    code = cli_main(["verify", str(CFG), "--claims", "kappa-identity",
                     "--out", str(tmp_path / "v")])
    assert code == 0
    assert cli_main(["report", str(tmp_path / "v")]) == 0
    out = capsys.readouterr().out
    assert "kappa-identity" in out and "pass" in out


def test_cli_simulate_exit(tmp_path):
    cfg_text = (CFG.read_text()
                .replace("n_paths = 20000", "n_paths = 2000")
                .replace("x = 0.1:0.9:5", "x = 0.3:0.7:2"))
    p = tmp_path / "fast.cfg"
    p.write_text(cfg_text)
    assert cli_main(["simulate", "exit", str(p), "--out", str(tmp_path / "s")]) == 0
    rows = (tmp_path / "s" / "exit.csv").read_text().strip().splitlines()
    assert rows[0] == "x,R,estimate,std_error,censored_fraction"
    assert len(rows) == 3


def test_cli_usage_and_config_errors(tmp_path):
    assert cli_main(["verify", str(tmp_path / "nope.cfg")]) == 2
    assert cli_main(["compute", "h", str(CFG), "--grid", "bad"]) == 2
    assert cli_main(["nonsense"]) == 2


def test_cli_exit_code_propagates_failure(tmp_path, monkeypatch):
    # force a failing claim by shrinking the identity band to zero width
    import levyfluct.fluctuation as fl
    orig = fl.kappa_identity_report

    def strict(spec, z_grid=None, band=(0.999, 1.001)):
        return orig(spec, np.array([1.0, 2.0]), band=(1.0 + 1e-12, 1.0 + 2e-12))

    monkeypatch.setattr("levyfluct.harness.fl.kappa_identity_report", strict)
    assert cli_main(["verify", str(CFG), "--claims", "kappa-identity"]) == 1
