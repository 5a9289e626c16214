import math

import numpy as np
import pytest

from vrarcade.channel import (AntennaPattern, LinkGeometry, achievable_rate, antenna_gain_db,
                              blockage_state, bodies_block_segments, noise_power_dbm,
                              path_loss_db, self_blockage, sinr_db, wrap_angle)

PATTERN = AntennaPattern(mainlobe_gain_db=15.0, sidelobe_gain_db=-10.0, beamwidth_deg=30.0)

# free-space reference at 1 m, 60 GHz: 20*log10(4*pi/lambda), lambda = c/60e9
FSPL_1M_60GHZ = 68.01080822955625


class TestPathLoss:
    def test_reference_distance(self):
        assert path_loss_db(1.0, 60e9) == pytest.approx(FSPL_1M_60GHZ, abs=1e-9)

    def test_doubling_distance_adds_6db(self):
        d1 = path_loss_db(3.0, 60e9)
        d2 = path_loss_db(6.0, 60e9)
        assert d2 - d1 == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_blockage_penalty_is_exact_offset(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            d = rng.uniform(0.2, 30.0)
            loss = rng.uniform(20, 35)
            los = path_loss_db(d, 60e9, blocked=False, blockage_loss_db=loss)
            nlos = path_loss_db(d, 60e9, blocked=True, blockage_loss_db=loss)
            assert nlos - los == pytest.approx(loss, abs=1e-9)

    def test_subreference_distances_clamped(self):
        assert path_loss_db(0.05, 60e9) == path_loss_db(1.0, 60e9)
        assert path_loss_db(-3.0, 60e9) == path_loss_db(1.0, 60e9)

    def test_vectorized(self):
        d = np.array([1.0, 2.0, 4.0])
        pl = path_loss_db(d, 60e9)
        assert pl.shape == (3,)
        assert pl[1] - pl[0] == pytest.approx(6.0206, abs=1e-3)


class TestAntennaGain:
    def test_boresight(self):
        assert antenna_gain_db(0.0, PATTERN) == 15.0

    def test_back_lobe(self):
        assert antenna_gain_db(math.pi, PATTERN) == -10.0

    def test_closed_boundary_at_half_beamwidth(self):
        half = math.radians(PATTERN.beamwidth_deg) / 2
        assert antenna_gain_db(half, PATTERN) == 15.0
        assert antenna_gain_db(-half, PATTERN) == 15.0
        assert antenna_gain_db(half + 1e-6, PATTERN) == -10.0

    def test_pattern_validation(self):
        with pytest.raises(ValueError):
            AntennaPattern(5.0, 5.0, 30.0)
        with pytest.raises(ValueError):
            AntennaPattern(15.0, -10.0, 360.0)


class TestBlockage:
    def link(self, ap, player, head=0.0):
        return LinkGeometry(ap_position=np.array(ap, dtype=float),
                            player_position=np.array(player, dtype=float),
                            head_azimuth=head)

    def test_empty_arena_front_ap_is_los(self):
        link = self.link([5, 0, 3], [0, 0, 1.7], head=0.0)
        assert blockage_state(link, np.zeros((0, 3)), 0.3, 120.0) is False

    def test_body_at_segment_midpoint_blocks(self):
        link = self.link([4, 0, 3], [0, 0, 1.7], head=0.0)
        others = np.array([[2.0, 0.1, 1.7]])
        assert blockage_state(link, others, 0.3, 120.0) is True

    def test_body_far_from_segment_does_not_block(self):
        link = self.link([4, 0, 3], [0, 0, 1.7], head=0.0)
        others = np.array([[2.0, 1.0, 1.7]])
        assert blockage_state(link, others, 0.3, 120.0) is False

    def test_self_blockage_cone(self):
        # facing +x; AP directly behind (offset pi from head azimuth), 120 deg cone
        link = self.link([-3, 0, 3], [0, 0, 1.7], head=0.0)
        assert blockage_state(link, np.zeros((0, 3)), 0.3, 120.0) is True

    def test_self_blockage_sampled_angles(self):
        # sweep AP directions: blocked iff within cone/2 of the rear direction
        cone = 120.0
        for deg in range(0, 360, 5):
            az = math.radians(deg)
            ap = [3 * math.cos(az), 3 * math.sin(az), 3.0]
            link = self.link(ap, [0, 0, 1.7], head=0.0)
            rear_offset = abs(float(wrap_angle(az - math.pi)))
            expected = rear_offset <= math.radians(cone / 2)
            assert blockage_state(link, np.zeros((0, 3)), 0.3, cone) is expected, deg

    def test_rotation_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            ap = rng.uniform(-5, 5, 2)
            player = rng.uniform(-5, 5, 2)
            head = rng.uniform(-math.pi, math.pi)
            bodies = rng.uniform(-5, 5, (6, 2))
            base = blockage_state(self.link([*ap, 3.0], [*player, 1.7], head),
                                  np.column_stack([bodies, np.full(6, 1.7)]), 0.3, 120.0)
            phi = rng.uniform(0, 2 * math.pi)
            rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
            rotated = blockage_state(
                self.link([*(rot @ ap), 3.0], [*(rot @ player), 1.7], head + phi),
                np.column_stack([bodies @ rot.T, np.full(6, 1.7)]), 0.3, 120.0)
            assert base == rotated

    def test_overhead_ap_never_self_blocked(self):
        mask = self_blockage(np.array([[0.0, 0.0]]), np.array([[0.0, 0.0]]),
                             np.array([0.0]), 120.0)
        assert not mask[0, 0]

    def test_own_body_excluded_via_mask(self):
        starts = np.array([[0.0, 0.0]])
        ends = np.array([[4.0, 0.0]])
        bodies = np.array([[0.0, 0.0], [2.0, 0.0]])
        exclude = np.array([[True, False]])
        assert bodies_block_segments(starts, ends, bodies, 0.3, exclude)[0]
        exclude_all = np.array([[True, True]])
        assert not bodies_block_segments(starts, ends, bodies, 0.3, exclude_all)[0]


class TestSinr:
    def test_single_ap_no_interference(self):
        noise = -70.0
        assert sinr_db([-40.0], [], noise) == pytest.approx(30.0, abs=1e-9)

    def test_two_equal_serving_gain_3db(self):
        one = sinr_db([-40.0], [], -70.0)
        two = sinr_db([-40.0, -40.0], [], -70.0)
        assert two - one == pytest.approx(10 * math.log10(2), abs=1e-12)

    def test_equal_interferer_zero_noise_limit(self):
        assert sinr_db([-40.0], [-40.0], -400.0) == pytest.approx(0.0, abs=1e-6)

    def test_empty_serving_rejected(self):
        with pytest.raises(ValueError):
            sinr_db([], [-40.0], -70.0)

    def test_moving_interferer_to_serving_never_decreases(self):
        rng = np.random.default_rng(17)
        for _ in range(10_000):
            powers = rng.uniform(-90, -30, size=4)
            noise = rng.uniform(-100, -60)
            before = sinr_db(powers[:1], powers[1:], noise)
            after = sinr_db(powers[:2], powers[2:], noise)
            assert after >= before - 1e-12


class TestRate:
    def test_zero_db_equals_bandwidth(self):
        assert achievable_rate(0.0, 2.16e9) == pytest.approx(2.16e9, rel=1e-12)

    def test_vanishing_snr(self):
        assert achievable_rate(-400.0, 2.16e9) == pytest.approx(0.0, abs=1e-3)

    def test_threshold_snr_for_2gbps(self):
        # numeric inversion oracle: bisect the smallest sinr giving >= 2e9 bit/s
        lo, hi = -30.0, 30.0
        for _ in range(200):
            mid = (lo + hi) / 2
            if achievable_rate(mid, 2.16e9) >= 2e9:
                hi = mid
            else:
                lo = mid
        assert hi == pytest.approx(10 * math.log10(2 ** (2 / 2.16) - 1), abs=1e-6)
        assert hi == pytest.approx(-0.45804197, abs=1e-6)

    def test_monotone_in_sinr_linear_in_bandwidth(self):
        rng = np.random.default_rng(23)
        for _ in range(500):
            s = sorted(rng.uniform(-20, 40, 2))
            assert achievable_rate(s[0], 1e9) < achievable_rate(s[1], 1e9)
            k = rng.uniform(0.1, 5)
            assert achievable_rate(s[0], k * 1e9) == pytest.approx(k * achievable_rate(s[0], 1e9), rel=1e-12)

    def test_bad_bandwidth(self):
        with pytest.raises(ValueError):
            achievable_rate(0.0, 0.0)


def test_noise_floor():
    # -174 dBm/Hz + 10log10(B) + NF
    assert noise_power_dbm(2.16e9, 9.0) == pytest.approx(-174 + 10 * math.log10(2.16e9) + 9, abs=1e-9)
