import pytest

from config.loader import DEFAULTS, ConfigLoader, merge_settings
from simulator.state import build_sim_config


def test_repository_settings_match_defaults(settings_path):
    loader = ConfigLoader(path=settings_path)
    loader.load()
    assert loader.get_settings() == merge_settings(None)
    assert loader.get_section("bar")["eps_bar"] == 0.2


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        ConfigLoader(config_dir="/nonexistent").load()


def test_unknown_section_and_key():
    with pytest.raises(ValueError, match="секция"):
        merge_settings({"plots": {}})
    with pytest.raises(ValueError, match="bar.width"):
        merge_settings({"bar": {"width": 1.0}})
    with pytest.raises(ValueError):
        merge_settings([1, 2])


def test_partial_override_keeps_defaults():
    settings = merge_settings({"sim": {"points": 1601}, "logging": None})
    assert settings["sim"]["points"] == 1601
    assert settings["sim"]["mu"] == DEFAULTS["sim"]["mu"]
    assert settings["logging"] == DEFAULTS["logging"]
    # значения по умолчанию не меняются
    assert DEFAULTS["sim"]["points"] == 801


def test_get_section_unknown(settings_path):
    loader = ConfigLoader(path=settings_path)
    loader.load()
    with pytest.raises(KeyError):
        loader.get_section("plots")


def test_sim_config_from_settings(settings):
    config = build_sim_config(settings)
    assert config.domain == settings["bar"]["length"]
    assert config.bar.body_force == (0.5,)
    settings["sim"]["geometry"] = "radial2d"
    with pytest.raises(ValueError):
        build_sim_config(settings)
    settings["sim"]["domain"] = 1.0
    settings["sim"]["mu"] = 0.01
    settings["sim"]["points"] = 501
    assert build_sim_config(settings).R0 == 0.25
