"""Tests for config loading."""

import pytest

from opdp.config import DEFAULT_MAX_ARITY, DEFAULT_MAX_DEGREE, Config
from opdp.errors import ParseError
from opdp.scalar import FieldSpec

ENV_VARS = (
    "OPDP_FIELD",
    "OPDP_MAX_ARITY",
    "OPDP_MAX_DEGREE",
    "OPDP_MAX_INDEX",
    "OPDP_SEED",
    "OPDP_THREADS",
    "OPDP_LOG_LEVEL",
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)


def test_config_from_env_defaults() -> None:
    config = Config.from_env()
    assert config.field == "q"
    assert config.max_arity == DEFAULT_MAX_ARITY
    assert config.max_degree == DEFAULT_MAX_DEGREE
    assert config.threads == 1
    assert config.log_level == "WARNING"
    assert config.field_spec() == FieldSpec.rationals()
    config.validate()


def test_config_from_env_values(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("OPDP_FIELD", " fp:3 ")
    monkeypatch.setenv("OPDP_MAX_DEGREE", "8")
    monkeypatch.setenv("OPDP_THREADS", "4")
    monkeypatch.setenv("OPDP_LOG_LEVEL", "debug")
    config = Config.from_env()
    assert config.field_spec() == FieldSpec.prime(3)
    assert config.max_degree == 8
    assert config.threads == 4
    assert config.log_level == "DEBUG"


def test_config_from_env_empty_field_uses_default(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("OPDP_FIELD", "  ")
    assert Config.from_env().field == "q"


def test_config_from_env_bad_integer(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("OPDP_MAX_ARITY", "many")
    with pytest.raises(ValueError):
        Config.from_env()


def test_with_overrides_skips_none() -> None:
    config = Config().with_overrides(field="fp:2", max_arity=None, seed=3)
    assert config.field == "fp:2"
    assert config.max_arity == DEFAULT_MAX_ARITY
    assert config.seed == 3


@pytest.mark.parametrize(
    ("overrides", "message"),
    [
        ({"max_arity": -1}, "max_arity must be between 0 and 8"),
        ({"max_degree": 13}, "max_degree must be between 0 and 12"),
        ({"max_index": 9}, "max_index must be between 0 and 8"),
        ({"threads": 0}, "threads must be at least 1"),
        ({"seed": -1}, "seed must be non-negative"),
    ],
)
def test_validate_rejects(overrides: dict[str, int], message: str) -> None:
    with pytest.raises(ValueError, match=message):
        Config().with_overrides(**overrides).validate()


def test_validate_rejects_bad_field() -> None:
    with pytest.raises(ParseError):
        Config(field="fp:6").validate()


def test_zero_bounds_are_valid() -> None:
    Config(max_arity=0, max_degree=0, max_index=0).validate()
