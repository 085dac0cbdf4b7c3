import json

import pytest

from cyclic_connections.cli import ConfigError, RunConfig, main


def test_spectrum_json(capsys) -> None:
    assert main(["spectrum", "--poly", "x^3", "--vars", "x", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["spectrum_shifted"] == ["-1/6", "1/6"]
    assert report["spectrum_classical"] == ["1/3", "2/3"]
    assert report["milnor"] == 2
    assert report["status"] == "pass"
    assert report["config"]["poly"] == "x^3"
    assert report["config"]["budget"] is None


def test_spectrum_text(capsys) -> None:
    assert main(["spectrum", "--poly", "x^2"]) == 0
    out = capsys.readouterr().out
    assert "Milnor number: 1" in out
    assert "Status: pass" in out


def test_spectrum_text_prints_plain_rationals(capsys) -> None:
    assert main(["spectrum", "--poly", "x^3"]) == 0
    out = capsys.readouterr().out
    assert "Spectrum (shifted): -1/6, 1/6" in out
    assert "Spectrum (classical): 1/3, 2/3" in out
    assert "Fraction(" not in out


def test_report_file(tmp_path, capsys) -> None:
    target = tmp_path / "reports" / "spectrum.json"
    assert main(["spectrum", "--poly", "x^2", "--format", "json", "--out", str(target)]) == 0
    assert json.loads(target.read_text())["spectrum_shifted"] == ["0"]
    assert "Report written" in capsys.readouterr().err


def test_verify_single_suite(capsys) -> None:
    assert main(["verify", "--algebra", "lambda", "--suite", "lemma-B3", "--max-length", "2",
                 "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert [s["suite"] for s in report["suites"]] == ["lemma-B3"]
    assert report["suites"][0]["status"] == "pass"


def test_hp_command(capsys) -> None:
    assert main(["hp", "--algebra", "lambda", "--max-length", "1", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert len(report["table"]) == 2


@pytest.mark.parametrize("argv", [
    ["verify", "--algebra", "nosuch"],
    ["verify", "--suite", "lemma-Z9"],
    ["verify", "--max-length", "0"],
    ["verify", "--sample-budget", "0"],
    ["spectrum", "--poly", "x*y^2"],
    ["spectrum", "--poly", "x + x^2"],
    ["spectrum", "--poly", "x^3 $"],
    ["spectrum"],
    ["mf", "--poly", "x^2", "--decomp", "x: x^2"],
    ["mf", "--poly", "x^2", "--suite", "mf-nothing"],
])
def test_input_errors(argv, capsys) -> None:
    assert main(argv) == 2
    assert "ERROR" in capsys.readouterr().err


def test_jobs_from_environment(monkeypatch, capsys) -> None:
    monkeypatch.setenv("CYCLO_JOBS", "many")
    assert main(["spectrum", "--poly", "x^2"]) == 2
    monkeypatch.setenv("CYCLO_JOBS", "2")
    assert main(["spectrum", "--poly", "x^2", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["jobs"] == 2


def test_run_config_validation() -> None:
    with pytest.raises(ConfigError):
        RunConfig(command="verify", u_precision=1)
    with pytest.raises(ConfigError):
        RunConfig(command="verify", format="yaml")


@pytest.mark.slow
def test_mf_command(capsys) -> None:
    code = main(["mf", "--poly", "x^2", "--vars", "x", "--max-length", "1", "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert report["derham_rank_matches_milnor"] is True
    assert report["spectrum"]["spectrum_classical"] == ["1/2"]
