import json

import numpy as np
import pytest

from resilience_lab.cli import main
from resilience_lab.dynamics import basis_state
from resilience_lab.operators import OperatorSum, PauliString
from resilience_lab.perturbation import build_qimf_1d
from resilience_lab.scenarios import (
    DEFAULTS,
    ScenarioConfig,
    list_scenarios,
    one_segment_error,
    run_scenario,
)


def test_defaults_cover_every_runner():
    assert set(list_scenarios()) == set(DEFAULTS)


def test_config_parsing_with_comments_and_overrides():
    cfg = ScenarioConfig.from_text(
        """
        # comment line
        scenario = fig2_longtime
        n_sites = 6    # inline comment
        t_final = 3.0
        """
    )
    assert cfg.scenario == "fig2_longtime"
    assert cfg.params["n_sites"] == 6
    assert cfg.params["t_final"] == 3.0
    # untouched keys keep their defaults
    assert cfg.params["n_points"] == DEFAULTS["fig2_longtime"]["n_points"]


def test_config_parsing_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="line 2"):
        ScenarioConfig.from_text("scenario = fig2_longtime\nnot a pair\n")
    with pytest.raises(ValueError) as err:
        ScenarioConfig.from_text("scenario = fig2_longtime\nwrong_key = 3\n")
    assert "line 2" in str(err.value) and "wrong_key" in str(err.value)


def test_config_requires_known_scenario():
    with pytest.raises(ValueError, match="missing required key"):
        ScenarioConfig.from_text("n_sites = 4\n")
    with pytest.raises(ValueError, match="unknown scenario"):
        ScenarioConfig.from_text("scenario = fig99\n")
    with pytest.raises(ValueError):
        ScenarioConfig.defaults("fig99")


def test_config_value_types():
    cfg = ScenarioConfig.from_text(
        "scenario = fig4_crossterms\n"
        "times = [0.0, 1.0]\n"
        "initial_state = atypical\n"
    )
    assert cfg.params["times"] == [0.0, 1.0]
    assert cfg.params["initial_state"] == "atypical"


def test_digest_is_order_independent():
    a = ScenarioConfig.from_text("scenario = fig2_longtime\nn_sites = 6\nt_final = 2.0\n")
    b = ScenarioConfig.from_text("scenario = fig2_longtime\nt_final = 2.0\nn_sites = 6\n")
    assert a.digest() == b.digest()
    c = ScenarioConfig.from_text("scenario = fig2_longtime\nn_sites = 7\n")
    assert a.digest() != c.digest()


def test_one_segment_error_trivial_cases():
    h0 = build_qimf_1d(3)
    psi = basis_state(3)
    assert one_segment_error(h0, h0, psi, 0.1) == 0.0
    with pytest.raises(ValueError):
        one_segment_error(h0, h0, psi, 0.0)
    bump = h0 + OperatorSum.from_terms(
        3, [(0.1, PauliString.from_factors([(0, "X")]))]
    )
    assert one_segment_error(h0, bump, psi, 0.1) > 0.0


def small_fig4_config():
    return ScenarioConfig.from_text(
        "scenario = fig4_crossterms\nn_sites = 4\ntimes = [0.0, 0.5]\n"
    )


def test_run_scenario_writes_outputs_and_manifest(tmp_path):
    manifest = run_scenario(small_fig4_config(), output_root=tmp_path)
    outdir = tmp_path / "fig4_crossterms"
    assert (outdir / "manifest.json").exists()
    payload = json.loads((outdir / "manifest.json").read_text())
    assert payload["scenario"] == "fig4_crossterms"
    assert payload["config_hash"] == small_fig4_config().digest()
    for name, digest in manifest.outputs.items():
        assert (outdir / name).exists()
        assert len(digest) == 64


def test_run_scenario_deterministic(tmp_path):
    m1 = run_scenario(small_fig4_config(), output_root=tmp_path / "a")
    m2 = run_scenario(small_fig4_config(), output_root=tmp_path / "b")
    assert m1.outputs == m2.outputs


def test_cli_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == list_scenarios()


def test_cli_certify_lemma(capsys):
    assert main(["certify-lemma", "--trials", "20", "--seed", "3"]) == 0
    assert "20 trials, 0 violations" in capsys.readouterr().out


def test_cli_run_and_bad_config(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.txt"
    cfg_path.write_text("scenario = fig4_crossterms\nn_sites = 4\ntimes = [0.0]\n")
    assert main(["run", str(cfg_path), "--output-root", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "fig4_crossterms" / "manifest.json").exists()

    bad_path = tmp_path / "bad.txt"
    bad_path.write_text("scenario = nope\n")
    assert main(["run", str(bad_path)]) == 1
    assert "unknown scenario" in capsys.readouterr().err
