from pathlib import Path

import pytest

from lb_lab.config import CONFIGS_DIR
from lb_lab.errors import ConfigError
from lb_lab.models.experiment import PRESETS, CriterionSpec, ExperimentSpec, Scenario, SimConfig
from lb_lab.models.partition import PartitionerKind
from lb_lab.services.config_loader import build_spec, load_config_file, load_spec


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "experiment.env"
    path.write_text(text, encoding="utf-8")
    return path


def test_config_file_keys_are_case_insensitive(tmp_path):
    path = _write(tmp_path, "# comment\nScenario=gravity\nN=300\np=8\nPARTITIONER=hsfc\ncriterion=auto\nC_MIG=2.5\nseed=11\n")
    spec = load_spec(config=path)
    assert spec.sim.scenario is Scenario.GRAVITY
    assert spec.sim.n_particles == 300
    assert spec.n_parts == 8
    assert spec.partitioner is PartitionerKind.HSFC
    assert spec.criterion.kind == "automatic"
    assert spec.cost_model.c_mig == 2.5
    assert spec.sim.rng_seed == 11


def test_command_line_overrides_config(tmp_path):
    path = _write(tmp_path, "N=300\nP=4\nPARTITIONER=rcb\nCRITERION=periodic:50\nSEED=1\n")
    spec = load_spec(config=path, overrides={"partitioner": "norcb", "criterion": "periodic:25", "seed": "9", "steps": None})
    assert spec.partitioner is PartitionerKind.NORCB
    assert spec.criterion == CriterionSpec(kind="periodic", period=25)
    assert spec.sim.rng_seed == 9


def test_unknown_key_is_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config_file(_write(tmp_path, "N=100\nWIDGETS=3\n"))


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_spec(config=tmp_path / "missing.env")


def test_invalid_values_are_reported_by_field():
    with pytest.raises(ConfigError, match="power-of-two"):
        build_spec({"p": "12", "partitioner": "rcb", "n": "100"})
    with pytest.raises(ConfigError, match="n_particles"):
        build_spec({"n": "zero"})
    with pytest.raises(ConfigError, match="criterion"):
        build_spec({"criterion": "sometimes"})
    with pytest.raises(ConfigError):
        build_spec({"partitioner": "kd-tree"})


def test_hsfc_accepts_any_part_count():
    spec = build_spec({"p": "12", "partitioner": "hsfc", "n": "100"})
    assert spec.n_parts == 12


def test_more_parts_than_particles_is_rejected():
    with pytest.raises(ConfigError):
        build_spec({"p": "128", "n": "100"})


def test_domain_parsing():
    spec = build_spec({"domain": "0,0,2,1", "n": "100", "p": "2"})
    assert spec.sim.domain == (0.0, 0.0, 2.0, 1.0)
    assert spec.sim.rect.width == 2.0
    with pytest.raises(ConfigError):
        build_spec({"domain": "0,0,1"})


def test_scaled_defaults():
    sim = SimConfig(sigma=0.004, scenario="gravity")
    assert sim.r_cut == pytest.approx(0.01)
    assert sim.min_separation == pytest.approx(2.0 ** (1.0 / 6.0) * 0.004)
    assert sim.force_strength == 0.3
    with pytest.raises(ValueError):
        SimConfig(sigma=0.01, r_cut=0.005)


def test_criterion_parsing():
    assert CriterionSpec.parse("auto").kind == "automatic"
    assert CriterionSpec.parse("Automatic").kind == "automatic"
    assert CriterionSpec.parse("periodic:600").period == 600
    assert CriterionSpec.parse("periodic").period == 600
    assert CriterionSpec.parse("periodic:40").describe() == "periodic:40"
    with pytest.raises(ValueError):
        CriterionSpec.parse("periodic:often")


def test_presets_load():
    for name in PRESETS:
        spec = load_spec(preset=name)
        assert isinstance(spec, ExperimentSpec)
    toy = load_spec(preset="contraction_toy")
    assert (toy.sim.n_particles, toy.n_parts, toy.sim.steps) == (5000, 16, 3000)
    assert toy.criterion == CriterionSpec(kind="periodic", period=600)
    full = load_spec(preset="contraction_toy_full")
    assert (full.sim.n_particles, full.n_parts, full.sim.steps) == (10000, 64, 5000)


def test_unknown_preset_and_double_source(tmp_path):
    with pytest.raises(ConfigError):
        load_spec(preset="tornado")
    with pytest.raises(ConfigError):
        load_spec(config=_write(tmp_path, "N=100\n"), preset="gravity")


@pytest.mark.parametrize("name", ["contraction_toy", "contraction", "gravity", "rotation_contraction"])
def test_shipped_config_files_are_valid(name):
    spec = load_spec(config=CONFIGS_DIR / f"{name}.env")
    assert spec.sim.scenario.value == name
