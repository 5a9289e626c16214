import json

import numpy as np
import pytest

from vrarcade.config import ConfigError, load_scenario, validate_config


class TestDefaults:
    def test_empty_document_gets_arcade_defaults(self):
        sc = validate_config({})
        assert sc.n_aps == 4
        assert sc.n_servers == 4
        assert sc.n_players == 16
        assert sc.n_actions == 100
        assert sc.zipf_z == 0.8
        assert sc.tx_power == 10.0
        assert sc.carrier_freq == 60e9
        assert sc.rate_requirement == 2e9
        assert sc.d_th == 0.020
        assert sc.epsilon == 0.01
        assert sc.reliability_threshold == 10e-3
        assert sc.n_replications == 50

    def test_derived_quantities(self):
        sc = validate_config({})
        assert sc.compute_demand == pytest.approx(1 / sc.server_rate)
        assert sc.hd_size == pytest.approx(2e9 / 120)
        assert sc.mc_rate_threshold == sc.rate_requirement
        assert sc.frame_period_slots == round(1 / (120 * sc.slot_duration))

    def test_layout_materialized_deterministically(self):
        a = validate_config({})
        b = validate_config({})
        assert np.array_equal(a.ap_positions, b.ap_positions)
        assert np.array_equal(a.pod_centers, b.pod_centers)
        assert a.ap_positions.shape == (4, 3)
        assert a.pod_centers.shape == (16, 2)
        assert (a.ap_positions[:, 2] == a.ceiling_height).all()

    def test_explicit_ap_positions_respected(self):
        pos = [[1, 1, 3], [9, 9, 3]]
        sc = validate_config({"n_aps": 2, "ap_positions": pos})
        assert np.allclose(sc.ap_positions, pos)
        with pytest.raises(ConfigError, match="ap_positions"):
            validate_config({"n_aps": 3, "ap_positions": pos})


class TestRejections:
    def test_zero_players(self):
        with pytest.raises(ConfigError, match="n_players"):
            validate_config({"n_players": 0})

    def test_epsilon_open_interval(self):
        with pytest.raises(ConfigError, match="epsilon"):
            validate_config({"latency": {"epsilon": 0.0}})
        with pytest.raises(ConfigError, match="epsilon"):
            validate_config({"latency": {"epsilon": 1.0}})

    def test_unknown_field_caught(self):
        with pytest.raises(ConfigError, match="n_playerz"):
            validate_config({"n_playerz": 4})

    def test_unknown_nested_field_caught(self):
        with pytest.raises(ConfigError, match="latency"):
            validate_config({"latency": {"dth": 0.01}})

    @pytest.mark.parametrize("field,value", [
        ("zipf_z", -0.5),
        ("blockage_loss", 19.9),
        ("blockage_loss", 35.1),
        ("slot_duration", 0.0),
        ("action_intensity", -1),
        ("impact_density", 1.5),
        ("scheme", "Bogus"),
        ("n_aps", 0),
        ("server_rate", 0),
        ("cache_capacity", -1),
        ("warmup_frac", 1.0),
    ])
    def test_invariant_violations_name_the_field(self, field, value):
        with pytest.raises(ConfigError, match=field):
            validate_config({field: value})

    def test_d_th_positive(self):
        with pytest.raises(ConfigError, match="d_th"):
            validate_config({"latency": {"d_th": 0.0}})

    def test_pod_grid_capacity(self):
        with pytest.raises(ConfigError, match="pod_grid"):
            validate_config({"pod_grid": [2, 2], "n_players": 5})
        sc = validate_config({"pod_grid": [2, 2], "n_players": 4})
        assert sc.pod_centers.shape == (4, 2)

    def test_antenna_invariant(self):
        with pytest.raises(ConfigError, match="antenna"):
            validate_config({"antenna": {"mainlobe_gain_db": -20.0}})


class TestScenarioFile:
    def test_load_roundtrip(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"n_players": 8, "latency": {"d_th": 0.01}}), encoding="utf-8")
        sc = load_scenario(path)
        assert sc.n_players == 8
        assert sc.d_th == 0.01
        assert sc.epsilon == 0.01  # nested defaults survive partial overrides

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_scenario(path)

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "arr.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError, match="object"):
            load_scenario(path)

    def test_replace_revalidates(self):
        sc = validate_config({})
        sc2 = sc.replace(n_players=4, scheme="Baseline1")
        assert sc2.n_players == 4
        assert sc2.scheme == "Baseline1"
        assert sc2.n_aps == sc.n_aps
        with pytest.raises(ConfigError, match="n_players"):
            sc.replace(n_players=0)

    def test_raw_dict_roundtrip_is_stable(self):
        sc = validate_config({"n_players": 8, "cache_capacity": 16})
        again = validate_config(sc.to_raw_dict())
        assert again.to_raw_dict() == sc.to_raw_dict()
