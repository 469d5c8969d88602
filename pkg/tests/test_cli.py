"""
Tests de l'interface en ligne de commande reserve-dyn
"""

import json

import pandas as pd
import pytest

from reservedyn.config.scenario.scenario_loader import ScenarioLoader
from reservedyn.controllers.command_controller import EXIT_CONFIG, EXIT_OK, build_parser, run


@pytest.fixture
def scenario_file(tmp_path, small_scenario_data):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(small_scenario_data), encoding="utf-8")
    return path


def test_parser_lists_subcommands():
    args = build_parser().parse_args(["evaluate", "--config", "x.json", "--variant", "all"])
    assert args.command == "evaluate"
    assert args.variant == "all"


def test_missing_config_file(tmp_path):
    assert run(["aggregate", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path / "out")]) == EXIT_CONFIG


def test_bad_arguments():
    assert run(["aggregate"]) == EXIT_CONFIG
    assert run(["evaluate", "--config", "x.json", "--variant", "CR"]) == EXIT_CONFIG
    assert run(["unknown"]) == EXIT_CONFIG


def test_time_outside_horizon(scenario_file, tmp_path):
    assert run(["multistate", "--config", str(scenario_file), "--at", "500",
                "--out", str(tmp_path / "out")]) == EXIT_CONFIG


def test_aggregate_writes_outputs(scenario_file, tmp_path):
    out = tmp_path / "out"
    assert run(["aggregate", "--config", str(scenario_file), "--out", str(out)]) == EXIT_OK
    aggregate = pd.read_csv(out / "aggregate.csv")
    assert aggregate["time_min"].iloc[-1] == pytest.approx(120.0)
    assert len(pd.read_csv(out / "clusters.csv")) == 2

    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "aggregate"
    assert {entry["file"] for entry in manifest["outputs"]} == {"aggregate.csv", "clusters.csv"}
    assert manifest["seeds"]["population"] == 5


def test_evaluate_summary(scenario_file, tmp_path):
    out = tmp_path / "out"
    assert run(["evaluate", "--config", str(scenario_file), "--variant", "WoOR", "--out", str(out)]) == EXIT_OK
    summary = pd.read_csv(out / "summary.csv")
    assert summary["variant"].tolist() == ["WoOR"] * 3
    assert (out / "lolp.csv").exists()
    assert (out / "states_60.csv").exists()


def test_seed_override_changes_manifest(scenario_file, tmp_path):
    out = tmp_path / "out"
    assert run(["aggregate", "--config", str(scenario_file), "--seed", "11", "--out", str(out)]) == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["seeds"] == {"population": 11, "oracle": 11}


def test_unit_manager_display_settings(tmp_path):
    """Préférences d'affichage : conversion, format et persistance dans unit_settings.json"""
    from reservedyn.core.unit_manager import PowerUnit, TimeUnit, get_unit_manager

    units = get_unit_manager()
    assert units is get_unit_manager()
    units.set_time_unit(TimeUnit.S)
    units.set_power_unit(PowerUnit.KW)
    try:
        assert units.format_time(0.5, 0) == "1800 s"
        assert units.format_power(1.25, 1) == "1250.0 kW"
        assert units.format_power(None) == "N/A"
        path = tmp_path / "unit_settings.json"
        units.save_settings(str(path))
        assert json.loads(path.read_text()) == {"time_unit": "s", "power_unit": "kW"}
    finally:
        units.set_time_unit(TimeUnit.MIN)
        units.set_power_unit(PowerUnit.MW)
    units.load_settings(str(path))
    assert units.time_unit is TimeUnit.S
    units.set_time_unit(TimeUnit.MIN)
    units.set_power_unit(PowerUnit.MW)


def _csv_bytes(folder):
    return {path.name: path.read_bytes() for path in sorted(folder.glob("*.csv"))}


@pytest.mark.parametrize("command", [["evaluate", "--variant", "all"], ["oracle", "--variant", "ORT"]])
def test_parallel_run_is_bit_identical(scenario_file, tmp_path, command):
    """Mêmes graines : CSV identiques octet pour octet en série et avec deux processus"""
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert run([*command, "--config", str(scenario_file), "--workers", "1", "--out", str(serial)]) == EXIT_OK
    assert run([*command, "--config", str(scenario_file), "--workers", "2", "--out", str(parallel)]) == EXIT_OK
    outputs = _csv_bytes(serial)
    assert outputs
    assert outputs == _csv_bytes(parallel)


def test_serialized_config_gives_same_manifest(scenario_file, tmp_path):
    """Scénario rechargé depuis to_dict : même empreinte de configuration et mêmes sorties"""
    reloaded = tmp_path / "reloaded.json"
    reloaded.write_text(json.dumps(ScenarioLoader().load(str(scenario_file)).to_dict()), encoding="utf-8")
    manifests = []
    for name, path in (("first", scenario_file), ("second", reloaded)):
        out = tmp_path / name
        assert run(["aggregate", "--config", str(path), "--out", str(out)]) == EXIT_OK
        manifests.append(json.loads((out / "manifest.json").read_text(encoding="utf-8")))
    assert manifests[0]["config_hash"] == manifests[1]["config_hash"]
    assert manifests[0]["outputs"] == manifests[1]["outputs"]
