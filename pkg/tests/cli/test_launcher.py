import json
import os

import pytest
from biothings.utils.configuration import ConfigurationError

import config_sim
from beamtrain.handlers import COMMANDS, TrainingMethod
from beamtrain.handlers.base import BaseCommandHandler
from beamtrain.launcher import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, load_settings, main


def run(*argv):
    return main(COMMANDS, config_sim, list(argv))


def test_01_training_method():
    assert TrainingMethod.mode_of("multi") is TrainingMethod.MULTI
    assert TrainingMethod.mode_of("") is TrainingMethod.NIL
    with pytest.raises(ValueError):
        TrainingMethod.mode_of("hash")
    with pytest.raises(ValueError):
        TrainingMethod.mode_of("nil")
    assert TrainingMethod.mode_of(" ALL ") is TrainingMethod.ALL
    assert TrainingMethod.parse(["rh", "Single"]).names() == ["single", "rh"]
    assert TrainingMethod.parse(["all"]).names() == ["single", "multi", "rh"]
    with pytest.raises(ConfigurationError):
        TrainingMethod.parse(["hash"])


def test_02_settings():
    settings = load_settings(config_sim)
    assert settings.DEFAULT_TRIALS == 1500
    assert settings.MAX_WORKERS >= 1
    assert load_settings({"LOG_LEVEL": "DEBUG"}).RESULT_CSV == "results.csv"


def test_03_dump_plan(capsys):
    assert run("dump-plan", "--nx", "32", "--m", "4") == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 16
    assert lines[0] == "1,1,1,9,17,25"
    assert lines[-1] == "3,4,4,16,20,32"


def test_04_dump_rh_plan(capsys):
    assert run("dump-plan", "--nx", "32", "--m", "4", "--rh", "--seed", "1", "--budget", "20") == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 20
    assert run("dump-plan", "--nx", "32", "--m", "4", "--budget", "20") == EXIT_CONFIG
    assert run("dump-plan", "--nx", "32", "--m", "3") == EXIT_CONFIG


def test_05_dump_codebook(capsys):
    assert run("dump-codebook", "--nx", "8") == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 9


def test_06_validate(scenarios_dir, tmp_path):
    assert run("validate", "--config", os.path.join(scenarios_dir, "smoke.json")) == EXIT_OK
    assert run("validate", "--config", str(tmp_path / "missing.json")) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"trials": 3, "colour": "red"}))
    assert run("validate", "--config", str(bad)) == EXIT_CONFIG
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run("validate", "--config", str(broken)) == EXIT_CONFIG


def test_07_run(scenarios_dir, tmp_path):
    out = tmp_path / "smoke"
    code = run("run", "--config", os.path.join(scenarios_dir, "smoke.json"),
               "--trials", "2", "--out", str(out), "--workers", "1", "--trace")
    assert code == EXIT_OK
    assert sorted(os.listdir(out)) == ["results.csv", "results.json", "trace.txt"]
    with open(out / "results.json") as file:
        doc = json.load(file)
    assert doc["config"]["trials"] == 2
    assert doc["config"]["trace"] is True


def test_08_run_overrides(tmp_path):
    out = tmp_path / "single"
    code = run("run", "--trials", "1", "--methods", "single", "--m", "2", "--seed", "5",
               "--out", str(out), "--workers", "1")
    assert code == EXIT_OK
    with open(out / "results.json") as file:
        doc = json.load(file)
    assert doc["seed"] == 5
    assert {row["method"] for row in doc["rows"]} == {"single"}


def test_09_run_errors(scenarios_dir, tmp_path):
    smoke = os.path.join(scenarios_dir, "smoke.json")
    out = tmp_path / "none"
    assert run("run", "--config", smoke, "--methods", "", "--out", str(out)) == EXIT_CONFIG
    assert not os.path.exists(out)
    assert run("run", "--config", smoke, "--methods", "hash", "--out", str(out)) == EXIT_CONFIG
    assert run("run", "--config", smoke, "--m", "3", "--out", str(out)) == EXIT_CONFIG
    blocked = tmp_path / "blocked"
    blocked.write_text("")
    assert run("run", "--config", smoke, "--trials", "1", "--workers", "1", "--out", str(blocked / "x")) == EXIT_RUNTIME


def test_10_usage_errors():
    with pytest.raises(SystemExit) as exc:
        run("plot")
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        run("dump-plan", "--nx", "32")


class BrokenHandler(BaseCommandHandler):
    name = "broken"
    kwargs = {"--key": {"default": "missing"}}

    def handle(self):
        return {}[self.args.key]


def test_11_unexpected_errors_exit_runtime(caplog):
    assert main(COMMANDS + [BrokenHandler], config_sim, ["broken"]) == EXIT_RUNTIME
    assert "broken failed unexpectedly" in caplog.text
