"""Tests for unit conversion, steering vectors, and channel/target generation."""

import json

import numpy as np
import pytest

from isackld import (ScenarioParams, db_to_linear, dbm_to_watts, derive_rng,
                     gen_comm_channel, gen_target_response, steering)


class TestUnitConversion:
    def test_zero_db_is_unity(self):
        assert db_to_linear(0.0) == 1.0

    def test_30_dbm_is_one_watt(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-12)

    def test_minus_30_db(self):
        assert db_to_linear(-30.0) == pytest.approx(1e-3, rel=1e-12)


class TestSteering:
    def test_broadside_is_all_ones(self):
        assert np.allclose(steering(0.0, 4), np.ones(4))

    def test_endfire_two_elements(self):
        a = steering(90.0, 2, 0.5)
        assert np.allclose(a, [1.0, -1.0])

    @pytest.mark.parametrize("theta", [-63.0, 0.0, 17.5, 90.0])
    def test_squared_norm_is_m(self, theta):
        a = steering(theta, 8)
        assert np.linalg.norm(a) ** 2 == pytest.approx(8.0, abs=1e-12)

    @pytest.mark.parametrize("theta,m,delta", [(12.0, 5, 0.5), (-40.0, 16, 0.7)])
    def test_unit_modulus_entries(self, theta, m, delta):
        a = steering(theta, m, delta)
        assert np.allclose(np.abs(a), 1.0)

    def test_rejects_empty_array(self):
        with pytest.raises(ValueError):
            steering(0.0, 0)


class TestCommChannel:
    def test_pure_los_when_no_nlos(self):
        p = ScenarioParams(num_nlos=0)
        ch = gen_comm_channel(p, derive_rng(7, "channel"))
        assert np.array_equal(ch.h, ch.los)
        assert np.allclose(ch.h, steering(p.angle_comm_deg, p.num_antennas))

    def test_los_norm_is_m(self):
        p = ScenarioParams(num_antennas=12)
        ch = gen_comm_channel(p, derive_rng(3, "channel"))
        assert np.linalg.norm(ch.los) ** 2 == pytest.approx(12.0, abs=1e-12)

    def test_seed_determinism(self):
        p = ScenarioParams()
        a = gen_comm_channel(p, derive_rng(42, "channel"))
        b = gen_comm_channel(p, derive_rng(42, "channel"))
        assert np.array_equal(a.h, b.h)
        assert np.array_equal(a.nlos_angles, b.nlos_angles)

    def test_composite_equals_los_plus_weighted_paths(self):
        p = ScenarioParams()
        ch = gen_comm_channel(p, derive_rng(5, "channel"))
        rebuilt = ch.los.copy()
        for g, th in zip(ch.nlos_gains, ch.nlos_angles):
            rebuilt += g * steering(th, p.num_antennas, p.antenna_spacing)
        assert np.allclose(ch.h, rebuilt, atol=1e-14)

    def test_expected_channel_power(self):
        # E||h||^2 = M (1 + P * var); Monte-Carlo oracle over 10^4 draws.
        p = ScenarioParams(num_antennas=16, num_nlos=4, nlos_gain_var=0.1)
        rng = derive_rng(11, "channel")
        total = 0.0
        n = 10**4
        for _ in range(n):
            total += np.linalg.norm(gen_comm_channel(p, rng).h) ** 2
        expected = 16 * (1 + 4 * 0.1)
        assert total / n == pytest.approx(expected, rel=0.03)


class TestTargetResponse:
    def test_single_broadside_scatterer_all_ones(self):
        p = ScenarioParams(num_scatterers=1, scatterer_spread_deg=0.0,
                           angle_target_deg=0.0, num_antennas=4)
        t = gen_target_response(p, derive_rng(0, "target"))
        assert np.allclose(t.a_matrix, np.ones((4, 4)))
        assert np.linalg.matrix_rank(t.a_matrix) == 1

    def test_single_scatterer_top_eigenvalue_is_m_squared(self):
        p = ScenarioParams(num_scatterers=1, scatterer_spread_deg=0.0,
                           angle_target_deg=25.0, num_antennas=8)
        t = gen_target_response(p, derive_rng(1, "target"))
        top = np.linalg.eigvalsh(t.gram)[-1]
        assert top == pytest.approx(64.0, rel=1e-10)

    def test_rank_bounded_by_scatterer_count(self):
        p = ScenarioParams(num_scatterers=10, num_antennas=16)
        t = gen_target_response(p, derive_rng(2, "target"))
        assert np.linalg.matrix_rank(t.a_matrix) <= 10

    def test_gram_is_psd(self):
        for seed in range(5):
            p = ScenarioParams(num_antennas=8)
            t = gen_target_response(p, derive_rng(seed, "target"))
            eigs = np.linalg.eigvalsh(t.gram)
            assert eigs.min() >= -1e-10 * max(eigs.max(), 1.0)

    def test_seed_determinism(self):
        p = ScenarioParams()
        a = gen_target_response(p, derive_rng(9, "target"))
        b = gen_target_response(p, derive_rng(9, "target"))
        assert np.array_equal(a.a_matrix, b.a_matrix)


class TestScenarioParams:
    def test_defaults_match_reference_setup(self):
        p = ScenarioParams()
        assert p.tx_power_dbm == 30.0
        assert p.pathloss_ref_db == -30.0
        assert p.noise_comm_dbm == -80.0
        assert p.noise_radar_dbm == -100.0
        assert (p.dist_comm_m, p.dist_target_m) == (800.0, 1000.0)
        assert (p.num_nlos, p.num_scatterers) == (4, 10)
        assert p.angle_target_deg == 0.0

    def test_received_power_factors(self):
        p = ScenarioParams()
        assert p.comm_rx_power / p.noise_comm_w == pytest.approx(156.25, rel=1e-12)
        assert p.radar_rx_power == pytest.approx(1e-15, rel=1e-12)

    def test_json_round_trip(self):
        p = ScenarioParams(num_antennas=8, seed=77)
        q = ScenarioParams.from_json(p.to_json())
        assert p == q

    def test_unknown_json_keys_rejected(self):
        doc = ScenarioParams().to_dict()
        doc["bogus"] = 1
        with pytest.raises(ValueError, match="unknown"):
            ScenarioParams.from_dict(doc)

    @pytest.mark.parametrize("kwargs", [
        {"dist_comm_m": 0.0},
        {"num_antennas": 0},
        {"mod_order": 1},
        {"antenna_spacing": -0.5},
        {"tx_power_dbm": float("inf")},
    ])
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ScenarioParams(**kwargs)

    def test_json_field_names_are_exact(self):
        doc = json.loads(ScenarioParams().to_json())
        assert set(doc) == {
            "tx_power_dbm", "pathloss_ref_db", "noise_comm_dbm", "noise_radar_dbm",
            "dist_comm_m", "dist_target_m", "angle_comm_deg", "angle_target_deg",
            "num_antennas", "antenna_spacing", "num_nlos", "num_scatterers",
            "nlos_gain_var", "scatterer_spread_deg", "mod_order", "seed",
        }
