from __future__ import annotations

import pytest
from src.config import get_settings
from src.errors import ConfigurationError, InputError


def test_defaults_without_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "BIASBOOST_DIVERGENCE_GUARD",
        "BIASBOOST_DENSE_CHECKPOINTS",
        "BIASBOOST_CHECKPOINT_GROWTH",
        "BIASBOOST_TRACE_DENSE_LIMIT",
        "BIASBOOST_JOBS",
        "BIASBOOST_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)

    settings = get_settings()

    assert settings.divergence_guard == 1e6
    assert settings.dense_checkpoints == 200
    assert settings.checkpoint_growth == pytest.approx(1.1)
    assert settings.trace_dense_limit == 200
    assert settings.jobs == 1
    assert settings.log_level == "INFO"


def test_environment_overrides_are_read_once(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("BIASBOOST_DIVERGENCE_GUARD", "1e3")
    monkeypatch.setenv("BIASBOOST_LOG_LEVEL", "debug")
    settings = get_settings()
    assert settings.divergence_guard == 1e3
    assert settings.log_level == "DEBUG"

    monkeypatch.setenv("BIASBOOST_DIVERGENCE_GUARD", "5")
    assert get_settings() is settings


@pytest.mark.parametrize(
    ("name", "value"),
    [
        ("BIASBOOST_DIVERGENCE_GUARD", "lots"),
        ("BIASBOOST_DIVERGENCE_GUARD", "-1"),
        ("BIASBOOST_DENSE_CHECKPOINTS", "0"),
        ("BIASBOOST_CHECKPOINT_GROWTH", "1.0"),
        ("BIASBOOST_LOG_LEVEL", "chatty"),
    ],
)
def test_invalid_settings_raise(
    monkeypatch: pytest.MonkeyPatch, name: str, value: str
) -> None:
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigurationError):
        get_settings()


def test_configuration_error_is_an_input_error() -> None:
    assert issubclass(ConfigurationError, InputError)
