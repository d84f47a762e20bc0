"""Tests for configuration defaults, overrides and the output-directory setting."""

from pathlib import Path

import pytest

from mimo_prelog.exceptions import ConfigurationError
from mimo_prelog.utils.config import Config, OutputSettings, get_config


class TestConfig:
    def test_defaults(self):
        config = Config()
        assert config.nonsingular_tol == 1e-9
        assert config.witness_tol == 1e-6
        assert config.witness_retries == 16
        assert (config.knn_k, config.max_rl_for_knn, config.min_samples_per_k) == (4, 4, 100)
        assert (config.snr_start_db, config.snr_stop_db, config.snr_points) == (20.0, 40.0, 5)
        assert config.log_level == "WARNING"

    def test_cached(self):
        assert get_config() is get_config()

    def test_frozen(self):
        with pytest.raises(Exception):
            get_config().knn_k = 7

    def test_overrides_skip_none(self):
        config = Config().with_overrides(knn_k=6, chunk_size=None)
        assert config.knn_k == 6
        assert config.chunk_size == Config().chunk_size

    def test_invalid_override(self):
        with pytest.raises(ConfigurationError) as info:
            Config().with_overrides(nonsingular_tol=-1.0)
        assert info.value.details["config_key"] == "nonsingular_tol"

    def test_grid_must_ascend(self):
        with pytest.raises(ConfigurationError):
            Config().with_overrides(snr_start_db=50.0)

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError):
            Config().with_overrides(colour="blue")

    def test_to_dict(self):
        assert Config().to_dict()["rank_tol"] == 1e-10


class TestOutputSettings:
    def test_unset(self, monkeypatch):
        monkeypatch.delenv("PRELOG_OUTPUT_DIR", raising=False)
        assert OutputSettings().resolve(Path("a.json")) == Path("a.json")

    def test_relative_paths_resolve(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PRELOG_OUTPUT_DIR", str(tmp_path))
        settings = OutputSettings()
        assert settings.resolve(Path("sub/a.json")) == tmp_path / "sub" / "a.json"

    def test_absolute_paths_kept(self, monkeypatch, tmp_path):
        monkeypatch.setenv("PRELOG_OUTPUT_DIR", "/elsewhere")
        target = tmp_path / "a.json"
        assert OutputSettings().resolve(target) == target
