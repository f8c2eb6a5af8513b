import json

import pytest

from cartier_lab.errors import ConfigError
from cartier_lab.settings import CONFIG_ENV_VAR, JSON_ENV_VAR, LOG_LEVEL_ENV_VAR, Settings, load_settings


def test_built_in_defaults():
    settings = load_settings()
    assert settings.trunc_univariate == 12
    assert settings.witt_length == 8
    assert settings.universal_ceiling == 8
    assert settings.cartier_vbound == 13
    assert settings.verify_cases == 100
    assert settings.ghost_cases == 500
    assert settings.json_output is False


def test_json_override_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"witt_length": 5, "seed": 9}), encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    settings = load_settings()
    assert settings.witt_length == 5
    assert settings.seed == 9
    assert settings.trunc_univariate == 12


def test_explicit_path_beats_environment(tmp_path, monkeypatch):
    env_file = tmp_path / "env.json"
    env_file.write_text(json.dumps({"witt_length": 5}), encoding="utf-8")
    flag_file = tmp_path / "flag.json"
    flag_file.write_text(json.dumps({"witt_length": 6}), encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(env_file))
    assert load_settings(flag_file).witt_length == 6


@pytest.mark.parametrize("body", [{"witt_length": 0}, {"cartier_vbound": 1}, {"colour": "red"}, [1, 2]])
def test_invalid_overrides_raise(tmp_path, body):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(body), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_settings(path)


def test_missing_config_file(tmp_path, monkeypatch):
    monkeypatch.setenv(CONFIG_ENV_VAR, str(tmp_path / "absent.json"))
    with pytest.raises(ConfigError, match="missing file"):
        load_settings()


def test_environment_flags(monkeypatch):
    monkeypatch.setenv(JSON_ENV_VAR, "yes")
    monkeypatch.setenv(LOG_LEVEL_ENV_VAR, "debug")
    settings = load_settings()
    assert settings.json_output is True
    assert settings.log_level == "DEBUG"


def test_overrides_skip_unset_flags():
    settings = Settings()
    assert settings.with_overrides(json_output=None) is settings
    assert settings.with_overrides(json_output=True, seed=None).json_output is True
    with pytest.raises(ConfigError):
        settings.with_overrides(witt_length=-1)
