"""Tests for standard constellations, labeling, and the shaping optimizer."""

import numpy as np
import pytest

from isackld import (Constellation, OptimizerOptions, assign_labels, avg_power,
                     kld_new, make_apsk, make_psk, make_qam, min_pair_distance,
                     optimize_constellation)


def ring_adjacency_is_gray(const: Constellation) -> bool:
    """On a PSK ring (points in angular order) adjacent labels differ by one bit."""
    q = const.order
    for i in range(q):
        x = const.labels[i] ^ const.labels[(i + 1) % q]
        if bin(int(x)).count("1") != 1:
            return False
    return True


class TestPsk:
    def test_bpsk_is_antipodal(self):
        c = make_psk(2)
        assert np.allclose(c.points, [1.0, -1.0])

    def test_qpsk_min_distance(self):
        assert min_pair_distance(make_psk(4)) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("q", [2, 4, 8, 16, 32])
    def test_unit_average_power(self, q):
        assert avg_power(make_psk(q)) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("q", [4, 8, 16])
    def test_gray_labels_on_ring(self, q):
        assert ring_adjacency_is_gray(make_psk(q))

    def test_rejects_tiny_order(self):
        with pytest.raises(ValueError):
            make_psk(1)


class TestQam:
    def test_order_four_is_rotated_qpsk(self):
        c = make_qam(4)
        assert min_pair_distance(c) == pytest.approx(2.0, rel=1e-12)
        assert avg_power(c) == pytest.approx(1.0, rel=1e-12)
        assert np.allclose(np.abs(c.points), 1.0)

    def test_corner_amplitude_is_one(self):
        c = make_qam(16)
        assert np.abs(c.points).max() == pytest.approx(1.0, abs=1e-12)

    def test_min_distance_after_unit_scaling(self):
        c = make_qam(16)
        assert np.sqrt(min_pair_distance(c)) == pytest.approx(2 / (3 * np.sqrt(2)),
                                                              rel=1e-12)

    @pytest.mark.parametrize("q", [2, 8, 32, 15])
    def test_rejects_non_square_orders(self, q):
        with pytest.raises(ValueError):
            make_qam(q)


class TestApsk:
    def test_16apsk_amplitudes_bounded(self):
        c = make_apsk(16, ((4, 0.41), (12, 1.0)))
        assert np.all(np.abs(c.points) <= 1.0 + 1e-12)
        assert c.order == 16

    def test_single_ring_reduces_to_psk(self):
        c = make_apsk(8, ((8, 1.0),))
        assert np.allclose(c.points, make_psk(8).points)

    def test_two_equal_rings_average_power(self):
        c = make_apsk(16, ((8, 0.5), (8, 1.0)))
        assert avg_power(c) == pytest.approx(0.625, abs=1e-14)

    def test_rejects_inconsistent_ring_spec(self):
        with pytest.raises(ValueError, match="sum"):
            make_apsk(16, ((4, 0.5), (8, 1.0)))
        with pytest.raises(ValueError):
            make_apsk(8, ((8, 1.4),))

    def test_default_rings(self):
        assert make_apsk(16).order == 16
        assert make_apsk(32).order == 32


class TestAssignLabels:
    def test_qpsk_is_gray(self):
        pts = make_psk(4).points
        labels = assign_labels(pts)
        c = Constellation(points=pts, labels=labels, order=4)
        assert ring_adjacency_is_gray(c)

    def test_bpsk(self):
        assert assign_labels(np.array([1.0, -1.0])).tolist() == [0, 1]

    @pytest.mark.parametrize("q", [4, 8, 16])
    def test_permutation_property(self, q, rng):
        pts = rng.uniform(-1, 1, q) / 2 + 1j * rng.uniform(-1, 1, q) / 2
        labels = assign_labels(pts)
        assert sorted(labels.tolist()) == list(range(q))

    def test_deterministic_given_point_order(self, rng):
        pts = rng.uniform(-0.7, 0.7, 8) + 1j * rng.uniform(-0.7, 0.7, 8)
        assert np.array_equal(assign_labels(pts), assign_labels(pts))

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            assign_labels(np.array([1.0, -1.0, 1j]))


class TestDistanceAndPower:
    def test_qpsk_values(self):
        assert min_pair_distance(make_psk(4)) == pytest.approx(2.0)
        assert avg_power(make_psk(4)) == pytest.approx(1.0)

    def test_binary_example(self):
        pts = np.array([0.0, 1.0])
        assert min_pair_distance(pts) == 1.0
        assert avg_power(pts) == 0.5

    def test_quadratic_homogeneity(self, rng):
        pts = rng.uniform(-0.5, 0.5, 6) + 1j * rng.uniform(-0.5, 0.5, 6)
        t = 0.37
        assert min_pair_distance(t * pts) == pytest.approx(
            t**2 * min_pair_distance(pts), rel=1e-12)
        assert avg_power(t * pts) == pytest.approx(t**2 * avg_power(pts), rel=1e-12)


class TestOptimizer:
    def test_four_points_pure_distance_reaches_square_packing(self):
        # Grid-search oracle over equally-spaced ring layouts: the best
        # min squared distance for 4 points in the unit disk is 2.0.
        radii = np.linspace(0.0, 1.0, 2001)
        oracle = max(4 * np.sin(np.pi / 4) ** 2 * r**2 for r in radii)
        assert oracle == pytest.approx(2.0, abs=1e-12)
        c = optimize_constellation(4, 0.0)
        assert kld_new(c, 0.0) >= 1.99

    def test_pure_power_saturates_amplitudes(self):
        c = optimize_constellation(8, 1.0)
        assert np.abs(c.points).min() >= 0.999

    def test_amplitude_constraint_always_respected(self, quick_opts):
        for eta1 in (0.0, 0.5, 1.0):
            c = optimize_constellation(8, eta1, quick_opts)
            assert np.abs(c.points).max() <= 1.0 + 1e-9

    def test_determinism(self, quick_opts):
        a = optimize_constellation(8, 0.4, quick_opts)
        b = optimize_constellation(8, 0.4, quick_opts)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)

    def test_distance_shrinks_with_power_weighting(self):
        lo = optimize_constellation(16, 0.0)
        hi = optimize_constellation(16, 0.9)
        assert min_pair_distance(lo) > min_pair_distance(hi)

    @pytest.mark.parametrize("eta1", [0.0, 0.5, 1.0])
    def test_never_below_standard_baselines(self, eta1):
        for q in (4, 16):
            c = optimize_constellation(q, eta1)
            best_base = max(kld_new(make_psk(q), eta1), kld_new(make_qam(q), eta1))
            assert kld_new(c, eta1) >= best_base - 1e-12

    def test_degenerate_two_points_are_antipodal(self, quick_opts):
        c = optimize_constellation(2, 0.0, quick_opts)
        assert np.abs(c.points[0] + c.points[1]) < 1e-6
        assert np.abs(c.points).min() > 0.99

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            optimize_constellation(1, 0.5)
        with pytest.raises(ValueError):
            optimize_constellation(4, 1.5)

    def test_option_validation(self):
        with pytest.raises(ValueError):
            OptimizerOptions(restarts=0)
        with pytest.raises(ValueError):
            OptimizerOptions(softmin_temp_initial=0.01, softmin_temp_final=0.1)


class TestSerialization:
    def test_json_round_trip(self, tmp_path, quick_opts):
        c = optimize_constellation(8, 0.3, quick_opts)
        path = tmp_path / "c.json"
        c.save(path)
        d = Constellation.load(path)
        assert np.array_equal(c.points, d.points)
        assert np.array_equal(c.labels, d.labels)
        assert c.order == d.order

    def test_csv_export(self, tmp_path):
        c = make_psk(4)
        path = tmp_path / "c.csv"
        c.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "m,re,im,label"
        assert len(lines) == 5

    def test_invariants_enforced_on_load(self):
        with pytest.raises(ValueError, match="amplitudes"):
            Constellation.from_json_dict(
                {"order": 2, "points": [[1.5, 0.0], [0.0, 0.0]], "labels": [0, 1]})
        with pytest.raises(ValueError, match="permutation"):
            Constellation.from_json_dict(
                {"order": 2, "points": [[1.0, 0.0], [0.0, 0.0]], "labels": [0, 0]})
