"""Tests for config parsing, override merging and columnar file I/O."""

import numpy as np
import pytest

from phasedoa.config import (SCHEMA, ConfigError, coerce, defaults,
                             help_lines, merge_overrides, parse_config,
                             resolve_noise_grid, resolve_workers)
from phasedoa.io import (load_ground_truth, load_observation,
                         save_ground_truth, save_observation)


def test_defaults_cover_schema():
    values = defaults()
    assert set(values) == set(SCHEMA)
    assert values["n_sensors"] == 256
    assert values["grid_size"] == 50
    assert values["spacing_ratio"] == 4.0
    assert values["a"] == 0.8
    assert values["seed"] == 1234


def test_parse_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# bench setup\n"
        "n_sensors = 64\n"
        "noise_var = 1e-3   # trailing comment\n"
        "\n"
        "k = 2\n"
        "k = 3\n"  # later assignment wins
        "phase_noise = off\n"
        "algorithms = beamforming, pavbem\n")
    values = parse_config(str(path))
    assert values["n_sensors"] == 64
    assert values["noise_var"] == 1e-3
    assert values["k"] == 3
    assert values["phase_noise"] is False
    assert values["algorithms"] == ("beamforming", "pavbem")
    # untouched keys keep their defaults
    assert values["grid_size"] == 50


def test_parse_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("n_sensor = 64\n")
    with pytest.raises(ConfigError, match="n_sensor"):
        parse_config(str(path))


def test_parse_config_rejects_bad_syntax(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("just a line\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config(str(path))


def test_parse_config_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/run.cfg")


def test_coerce_types():
    assert coerce("n_sensors", "128") == 128
    assert coerce("phase_noise", "yes") is True
    assert coerce("initial_noise_var", "auto") is None
    assert coerce("initial_noise_var", "0.5") == 0.5
    assert coerce("k_values", "2,5") == (2, 5)
    with pytest.raises(ConfigError, match="n_sensors"):
        coerce("n_sensors", "many")
    with pytest.raises(ConfigError, match="unknown config key"):
        coerce("sensors", "5")


def test_merge_overrides():
    values = defaults()
    merged = merge_overrides(values, {"k": 7, "seed": None})
    assert merged["k"] == 7
    assert merged["seed"] == 1234  # None means not given
    with pytest.raises(ConfigError):
        merge_overrides(values, {"bogus": 1})


def test_resolve_noise_grid_explicit_wins():
    values = defaults()
    values["noise_grid"] = (0.1, 0.2)
    assert resolve_noise_grid(values) == (0.1, 0.2)


def test_resolve_noise_grid_from_spec():
    values = defaults()
    grid = resolve_noise_grid(values)
    assert len(grid) == 8
    np.testing.assert_allclose(grid[0], 1e-3)
    np.testing.assert_allclose(grid[-1], 1.0)
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_resolve_noise_grid_bad_spec():
    values = defaults()
    for spec in ("linear:1:2:3", "log:1e-3:1", "log:0:1:4", "log:a:b:4"):
        values["noise_grid_spec"] = spec
        with pytest.raises(ConfigError):
            resolve_noise_grid(values)


def test_resolve_workers(monkeypatch):
    values = defaults()
    values["workers"] = 3
    assert resolve_workers(values) == 3
    values["workers"] = 0
    monkeypatch.delenv("PHASEDOA_WORKERS", raising=False)
    assert resolve_workers(values) == 1
    monkeypatch.setenv("PHASEDOA_WORKERS", "4")
    assert resolve_workers(values) == 4
    monkeypatch.setenv("PHASEDOA_WORKERS", "lots")
    with pytest.raises(ConfigError):
        resolve_workers(values)


def test_help_lines_cover_every_key():
    text = "\n".join(help_lines())
    for key in SCHEMA:
        assert key in text


class TestObservationFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        y = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        path = str(tmp_path / "obs.txt")
        save_observation(path, y)
        loaded, theta = load_observation(path)
        np.testing.assert_array_equal(loaded, y)
        assert theta is None

    def test_round_trip_with_theta(self, tmp_path):
        rng = np.random.default_rng(1)
        y = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        theta = rng.standard_normal(16)
        path = str(tmp_path / "obs.txt")
        save_observation(path, y, theta)
        loaded, loaded_theta = load_observation(path)
        np.testing.assert_array_equal(loaded, y)
        np.testing.assert_array_equal(loaded_theta, theta)

    def test_theta_length_checked(self, tmp_path):
        with pytest.raises(ValueError):
            save_observation(str(tmp_path / "o.txt"),
                             np.ones(4, dtype=complex), np.zeros(3))

    def test_ground_truth_round_trip(self, tmp_path):
        rng = np.random.default_rng(2)
        z = np.zeros(10, dtype=complex)
        z[[2, 7]] = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        path = str(tmp_path / "truth.txt")
        save_ground_truth(path, z)
        np.testing.assert_array_equal(load_ground_truth(path), z)

    def test_rejects_wrong_column_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1.0\n2.0\n")
        with pytest.raises(ValueError, match="columns"):
            load_observation(str(path))
