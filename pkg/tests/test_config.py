"""
Tests for scenario configuration.
"""

import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gfdm_toolkit.channel.generator import ChannelKind
from gfdm_toolkit.core.errors import ConfigError
from gfdm_toolkit.filters import FilterKind
from gfdm_toolkit.filters.constant_magnitude import phase_set
from gfdm_toolkit.sim.config import (
    Scenario,
    ScenarioConfig,
    apply_overrides,
    build_filter_spec,
    config_from_dict,
    load_config,
    parse_overrides,
    parse_snr_grid,
)
from gfdm_toolkit.core.types import GfdmParams

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "configs")


class TestScenario:

    def test_receivers_and_channels(self):
        assert Scenario.ZF_DFERF.receiver == "zf"
        assert Scenario.AMMSE_RF.receiver == "ammse"
        assert Scenario.MMSE_RF.channel_kind == ChannelKind.RAYLEIGH
        assert Scenario.ZF_DFERF.channel_kind == ChannelKind.DEEP_FADE_EXCLUDED
        assert Scenario.ZF_MP.channel_kind == ChannelKind.STATIC

    def test_parse(self):
        assert Scenario.parse("MMSE-AWGN") == Scenario.MMSE_AWGN
        with pytest.raises(ConfigError):
            Scenario.parse("zf_eva")


class TestScenarioConfig:

    def test_defaults(self):
        cfg = ScenarioConfig("zf_awgn", 8, 5)
        assert cfg.scenario == Scenario.ZF_AWGN
        assert cfg.cp_len == 10
        assert cfg.blocks == 10000
        assert cfg.filter == "cmcm"
        assert cfg.snr_db[0] == 0.0

    def test_snr_grid_string(self):
        cfg = ScenarioConfig("zf_awgn", 8, 5, snr_db="0:10:30")
        assert cfg.snr_db == (0.0, 10.0, 20.0, 30.0)

    @pytest.mark.parametrize("changes", [
        {"K": 0},
        {"filter": "gaussian"},
        {"blocks": 0},
        {"cp_len": 41},
        {"constellation": "64qam"},
        {"e_s": 0.0},
        {"filter": "static_optimal"},
    ])
    def test_invalid_fields(self, changes):
        values = {"scenario": "zf_awgn", "K": 8, "M": 5}
        values.update(changes)
        with pytest.raises(ConfigError):
            config_from_dict(values)

    def test_static_optimal_allowed_for_static_channel(self):
        cfg = ScenarioConfig("zf_mp", 8, 4, filter="static_optimal", phases="cmcm1_k8m4")
        assert cfg.filter_spec().kind == FilterKind.STATIC_OPTIMAL

    def test_unknown_and_missing_keys(self):
        with pytest.raises(ConfigError):
            config_from_dict({"scenario": "zf_awgn", "K": 8, "M": 5, "subcarriers": 8})
        with pytest.raises(ConfigError):
            config_from_dict({"scenario": "zf_awgn", "K": 8})

    def test_to_dict_round_trip(self):
        cfg = ScenarioConfig("mmse_rf", 8, 4, snr_db=(0.0, 15.0), seed=9)
        again = config_from_dict(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()


class TestFilterSpecs:

    def test_stored_phases(self):
        spec = build_filter_spec("cmcm", GfdmParams(8, 5), phases="cmcm2_k8m5")
        assert_allclose(spec.phases, phase_set("cmcm2_k8m5"))

    def test_random_phases_are_seeded(self):
        params = GfdmParams(4, 3)
        first = build_filter_spec("cmcm", params, phases="random", phase_seed=4)
        second = build_filter_spec("cmcm", params, phase_seed=4)
        assert_allclose(first.phases, second.phases)
        assert not np.allclose(build_filter_spec("cmcm", params, phase_seed=5).phases, first.phases)

    def test_rolloff_ignored_for_other_kinds(self):
        spec = build_filter_spec("dirichlet", GfdmParams(8, 5), rolloff=0.5)
        assert spec.rolloff is None

    def test_errors_become_config_errors(self):
        with pytest.raises(ConfigError):
            build_filter_spec("rc", GfdmParams(8, 5))
        with pytest.raises(ConfigError):
            build_filter_spec("cmcm", GfdmParams(8, 5), phases="unknown_set")


class TestParsing:

    def test_snr_range_is_inclusive(self):
        assert_allclose(parse_snr_grid("0:2.5:10"), [0.0, 2.5, 5.0, 7.5, 10.0])

    def test_snr_list(self):
        assert parse_snr_grid("3, 7,11") == (3.0, 7.0, 11.0)

    def test_snr_errors(self):
        with pytest.raises(ConfigError):
            parse_snr_grid("0:0:10")
        with pytest.raises(ConfigError):
            parse_snr_grid("low,high")

    def test_overrides(self):
        overrides = parse_overrides("blocks=200, rolloff=0.3,filter=rc,snr_db=0;10;20")
        assert overrides == {"blocks": 200, "rolloff": 0.3, "filter": "rc", "snr_db": (0.0, 10.0, 20.0)}
        assert parse_overrides("") == {}
        with pytest.raises(ConfigError):
            parse_overrides("blocks")

    def test_apply_overrides_revalidates(self):
        cfg = ScenarioConfig("zf_awgn", 8, 5)
        changed = apply_overrides(cfg, {"M": 4, "blocks": 50})
        assert changed.cp_len == 8
        assert changed.blocks == 50
        assert cfg.M == 5
        with pytest.raises(ConfigError):
            apply_overrides(cfg, {"colour": "blue"})
        with pytest.raises(ConfigError):
            apply_overrides(cfg, {"blocks": -1})

    def test_explicit_prefix_kept(self):
        cfg = ScenarioConfig("zf_awgn", 8, 5, cp_len=3)
        assert apply_overrides(cfg, {"blocks": 5}).cp_len == 3
        assert apply_overrides(cfg, {"M": 4, "cp_len": 2}).cp_len == 2


class TestLoadConfig:

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("scenario: zf_mp\nK: 8\nM: 4\nfilter: cmcm\nphases: cmcm1_k8m4\nsnr_db: [0, 20]\nblocks: 100\n")
        cfg = load_config(str(path))
        assert cfg.scenario == Scenario.ZF_MP
        assert cfg.snr_db == (0.0, 20.0)
        assert cfg.blocks == 100

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "absent.yaml"))

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("scenario: [zf_awgn\n")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_shipped_configs(self):
        for name in ("zf_awgn", "mmse_rf", "zf_mp"):
            cfg = load_config(os.path.join(CONFIG_DIR, f"{name}.yaml"))
            assert cfg.scenario.value == name
