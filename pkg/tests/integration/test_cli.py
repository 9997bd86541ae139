"""Integration tests for the MCDW CLI."""
import json
import os
import subprocess
import sys

import pytest


@pytest.fixture
def run_cli(tmp_path):
    """Run the CLI as a subprocess with HOME pointed at a scratch directory."""
    env = {k: v for k, v in os.environ.items() if not k.startswith("MCDW_")}
    env["HOME"] = str(tmp_path)

    def _run(args):
        return subprocess.run(
            [sys.executable, "-m", "mcdw.cli.main"] + args,
            capture_output=True,
            text=True,
            check=False,
            env=env,
        )
    return _run


def test_construct_text(run_cli):
    result = run_cli(["construct", "--family", "J2", "--m", "1", "--ell", "1"])
    assert result.returncode == 0
    assert result.stdout.strip() == "J2(3): order 16, class 3"


def test_construct_trivial_macdonald_group_json(run_cli):
    result = run_cli(["construct", "--family", "G", "--beta", "0", "--json"])
    assert result.returncode == 0
    data = json.loads(result.stdout)
    assert data["label"] == "G(0)"
    assert data["order"] == 1
    assert data["class"] == 0


def test_construct_shows_presentation(run_cli):
    result = run_cli(["construct", "--family", "J2", "--m", "1", "--ell", "1", "--show-presentation"])
    assert result.returncode == 0
    assert "x, y | " in result.stdout


def test_construct_writes_cache(run_cli, tmp_path):
    result = run_cli(["construct", "--family", "G", "--beta", "3"])
    assert result.returncode == 0
    assert (tmp_path / ".mcdw" / "cache" / "G_b3.mcdw").exists()


def test_series_json(run_cli):
    result = run_cli(["series", "--family", "J2", "--m", "1", "--ell", "1", "--json"])
    assert result.returncode == 0
    data = json.loads(result.stdout)
    assert data["class"] == 3
    assert data["terms"][-1]["order"] == 16


def test_series_markdown(run_cli):
    result = run_cli(["series", "--family", "G", "--beta", "3"])
    assert result.returncode == 0
    assert "## Upper central series of G(3)" in result.stdout


def test_iso_explicit_map(run_cli):
    result = run_cli(["iso", "--family", "J1", "--p", "3", "--m", "1", "--ellA", "1", "--ellB", "4", "--json"])
    assert result.returncode == 0
    data = json.loads(result.stdout)
    assert data["method"] == "explicit"
    assert data["outcome"] == "found"
    assert data["certificate"]["checks"]["bijective"] is True


def test_iso_order_mismatch(run_cli):
    result = run_cli(["iso", "--family", "G", "--betaA", "3", "--betaB", "5"])
    assert result.returncode == 1
    assert "order mismatch" in result.stdout


def test_verify_check_passes(run_cli):
    result = run_cli(["verify", "--check", "lift-obstruction", "--family", "J2", "--m", "3", "--ell", "1"])
    assert result.returncode == 0
    assert "# MCDW Verification Report" in result.stdout
    assert "**1/1 checks passed.**" in result.stdout


def test_verify_json(run_cli):
    result = run_cli(["verify", "--check", "lift-obstruction", "--m", "3", "--ell", "1", "--json"])
    assert result.returncode == 0
    data = json.loads(result.stdout)
    assert data["summary"] == {"pass": 1}


def test_appendix_skipped_below_m3(run_cli):
    result = run_cli(["appendix", "--m", "2"])
    assert result.returncode == 2
    assert "Not decided" in result.stdout


def test_appendix_defaults_to_both_ells(run_cli):
    result = run_cli(["appendix", "--m", "2", "--json"])
    assert result.returncode == 2
    data = json.loads(result.stdout)
    assert data["summary"] == {"skipped": 2}


def test_verify_pair(run_cli):
    result = run_cli(["verify", "--check", "pair", "--family", "J1", "--p", "3", "--m", "1",
                      "--ell", "1", "--ell-prime", "4", "--json"])
    assert result.returncode == 0
    data = json.loads(result.stdout)
    assert data["summary"] == {"pass": 1}
    assert data["reports"][0]["evidence"]["method"] == "explicit"


@pytest.mark.parametrize("args", [
    [],
    ["construct", "--bogus"],
    ["construct", "--family", "J1", "--p", "3", "--m", "1", "--ell", "3"],
    ["construct", "--family", "G"],
    ["verify"],
    ["verify", "--check", "m2-map", "--m", "2", "--ell", "1"],
    ["--config", "/nonexistent/mcdw.yaml", "construct"],
])
def test_usage_errors(run_cli, args):
    result = run_cli(args)
    assert result.returncode == 3
