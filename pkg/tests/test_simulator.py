import math

import numpy as np
import pytest

from ssploc.fingerprints import SENTINEL_RSSI, Location
from ssploc.simulator import (
    EnvironmentSpec,
    PathLossParams,
    TrajectorySpec,
    build_training_set,
    generate_trajectory,
    grid_locations,
    inject_history_error,
    sample_csi_matrix,
    sample_scan,
    synth_radio_truth,
)


def small_env(**kw):
    defaults = dict(
        width=8.0,
        height=6.0,
        ap_positions=(Location(0.0, 0.0), Location(8.0, 6.0)),
        rp_grid_spacing=2.0,
        pathloss=PathLossParams(p0=-30.0, d0=1.0, exponent=3.0, shadowing_std=2.0),
        seed=7,
    )
    defaults.update(kw)
    return EnvironmentSpec(**defaults)


class TestRadioTruth:
    def test_reference_distance_gives_p0(self):
        env = small_env(ap_positions=(Location(0.0, 0.0),))
        truth = synth_radio_truth(env)
        assert truth.mean_rssi(Location(1.0, 0.0))[0] == pytest.approx(-30.0)

    def test_decade_drop(self):
        env = small_env(
            width=20.0, height=20.0, ap_positions=(Location(0.0, 0.0),),
            pathloss=PathLossParams(p0=-30.0, d0=1.0, exponent=3.0, shadowing_std=0.0),
        )
        truth = synth_radio_truth(env)
        assert truth.mean_rssi(Location(10.0, 0.0))[0] == pytest.approx(-60.0)

    def test_monotone_in_distance(self):
        env = small_env(ap_positions=(Location(0.0, 0.0),), width=50.0, height=1.0)
        truth = synth_radio_truth(env)
        vals = [truth.mean_rssi(Location(d, 0.0))[0] for d in np.linspace(0.0, 50.0, 60)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_inside_reference_distance_saturates(self):
        env = small_env(ap_positions=(Location(0.0, 0.0),))
        truth = synth_radio_truth(env)
        assert truth.mean_rssi(Location(0.0, 0.0))[0] == pytest.approx(-30.0)

    def test_feature_offsets_shift_means(self):
        env = small_env(
            ap_positions=(Location(0.0, 0.0), Location(0.0, 0.0)),
            feature_offsets=(0.0, -8.0),
        )
        truth = synth_radio_truth(env)
        means = truth.mean_rssi(Location(3.0, 3.0))
        assert means[1] == pytest.approx(means[0] - 8.0)


class TestSampleScan:
    def test_noiseless_equals_truth(self, rng):
        env = small_env(pathloss=PathLossParams(shadowing_std=0.0))
        truth = synth_radio_truth(env)
        loc = Location(3.0, 2.0)
        fv = sample_scan(truth, loc, env, rng)
        assert np.allclose(fv.values, truth.mean_rssi(loc))

    def test_shadowing_std_recovered(self):
        env = small_env(pathloss=PathLossParams(shadowing_std=2.0))
        truth = synth_radio_truth(env)
        rng = np.random.default_rng(99)
        loc = Location(4.0, 3.0)
        draws = np.array([sample_scan(truth, loc, env, rng).values for _ in range(10000)])
        assert draws[:, 0].std() == pytest.approx(2.0, rel=0.05)

    def test_clamped_at_sentinel(self, rng):
        env = small_env(pathloss=PathLossParams(p0=-99.0, exponent=6.0, shadowing_std=0.0))
        truth = synth_radio_truth(env)
        fv = sample_scan(truth, Location(8.0, 6.0), env, rng)
        assert fv.values[0] == SENTINEL_RSSI
        assert not fv.missing[0]


class TestTrainingSet:
    def test_grid_counting(self, rng):
        env = small_env(width=2.0, height=2.0, rp_grid_spacing=1.0)
        truth = synth_radio_truth(env)
        training = build_training_set(env, truth, s1=3, rng=rng)
        assert len(training) == 9

    def test_s1_scans_each(self, rng):
        env = small_env()
        truth = synth_radio_truth(env)
        training = build_training_set(env, truth, s1=5, rng=rng)
        assert all(t.scan_count == 5 for t in training)
        assert all(t.location is not None for t in training)

    def test_seeded_rerun_is_bit_identical(self):
        env = small_env()
        truth = synth_radio_truth(env)
        a = build_training_set(env, truth, 4, np.random.default_rng(5))
        b = build_training_set(env, truth, 4, np.random.default_rng(5))
        for sa, sb in zip(a, b):
            assert np.array_equal(sa.matrix(), sb.matrix())

    def test_rejects_zero_scans(self, rng):
        env = small_env()
        with pytest.raises(ValueError):
            build_training_set(env, synth_radio_truth(env), 0, rng)


class TestTrajectory:
    @pytest.mark.parametrize("policy", ["corridor_walk", "free_roam"])
    def test_forced_speed_gives_exact_displacements(self, policy):
        env = small_env()
        spec = TrajectorySpec(
            speed_min=1.0, speed_max=1.0, delta_t=1.0, n_steps=30, s2=1, policy=policy, seed=3
        )
        walk = generate_trajectory(spec, env)
        prev = None
        for loc, _ in walk:
            if prev is not None:
                d = math.hypot(loc.x - prev.x, loc.y - prev.y)
                assert d == pytest.approx(1.0, abs=1e-9)
            prev = loc

    @pytest.mark.parametrize("policy", ["corridor_walk", "free_roam"])
    def test_confined_to_site_and_speed_bounded(self, policy):
        env = small_env()
        spec = TrajectorySpec(
            speed_min=0.6, speed_max=3.0, delta_t=1.0, n_steps=120, s2=1, policy=policy, seed=11
        )
        walk = generate_trajectory(spec, env)
        prev = None
        for loc, _ in walk:
            assert 0.0 <= loc.x <= env.width
            assert 0.0 <= loc.y <= env.height
            if prev is not None:
                d = math.hypot(loc.x - prev.x, loc.y - prev.y)
                assert 0.6 * spec.delta_t - 1e-9 <= d <= 3.0 * spec.delta_t + 1e-9
            prev = loc

    def test_counts_and_scan_shape(self):
        env = small_env()
        spec = TrajectorySpec(n_steps=175, s2=2, seed=1)
        walk = generate_trajectory(spec, env)
        assert len(walk) == 175
        assert all(s.scan_count == 2 for _, s in walk)
        assert all(s.location is None for _, s in walk)

    def test_deterministic_per_seed(self):
        env = small_env()
        spec = TrajectorySpec(n_steps=20, s2=2, seed=42)
        a = generate_trajectory(spec, env)
        b = generate_trajectory(spec, env)
        for (la, sa), (lb, sb) in zip(a, b):
            assert la == lb
            assert np.array_equal(sa.matrix(), sb.matrix())

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            TrajectorySpec(speed_min=0.0)
        with pytest.raises(ValueError):
            TrajectorySpec(speed_min=3.0, speed_max=1.0)
        with pytest.raises(ValueError):
            TrajectorySpec(policy="teleport")


class TestHistoryError:
    def test_zero_error_is_identity(self, rng):
        loc = Location(3.0, 4.0)
        assert inject_history_error(loc, 0.0, rng) is loc

    def test_axis_std_split(self):
        rng = np.random.default_rng(17)
        e = 4.0
        draws = np.array(
            [
                (p.x, p.y)
                for p in (inject_history_error(Location(0, 0), e, rng) for _ in range(100000))
            ]
        )
        assert draws[:, 0].std() == pytest.approx(e / math.sqrt(2), rel=0.02)
        assert draws[:, 1].std() == pytest.approx(e / math.sqrt(2), rel=0.02)

    def test_mean_squared_radial_offset(self):
        rng = np.random.default_rng(23)
        e = 2.5
        sq = [
            p.x**2 + p.y**2
            for p in (inject_history_error(Location(0, 0), e, rng) for _ in range(100000))
        ]
        assert np.mean(sq) == pytest.approx(e**2, rel=0.03)

    def test_rejects_negative_error(self, rng):
        with pytest.raises(ValueError):
            inject_history_error(Location(0, 0), -1.0, rng)


class TestCsi:
    def test_shape_and_positivity(self, rng):
        env = small_env()
        truth = synth_radio_truth(env)
        m = sample_csi_matrix(truth, Location(2.0, 2.0), env, h=7, w=5, rng=rng)
        assert (m.h, m.w) == (7, 5)
        assert np.all(m.amplitudes >= 0)

    def test_closer_location_has_higher_power(self, rng):
        env = small_env(pathloss=PathLossParams(shadowing_std=0.0))
        truth = synth_radio_truth(env)
        near = sample_csi_matrix(truth, Location(1.0, 1.0), env, 40, 20, np.random.default_rng(1))
        far = sample_csi_matrix(truth, Location(8.0, 6.0), env, 40, 20, np.random.default_rng(1))
        assert near.amplitudes.mean() > far.amplitudes.mean()

    def test_grid_locations_inclusive(self):
        env = small_env(width=2.0, height=1.0, rp_grid_spacing=1.0)
        locs = grid_locations(env)
        assert len(locs) == 6


class TestStaticFields:
    def test_texture_off_by_default(self):
        env = small_env()
        assert env.texture_std == 0.0 and env.session_shift_std == 0.0

    def test_texture_is_deterministic_and_consistent(self):
        env = small_env(texture_std=3.0, texture_scale=4.0)
        a = synth_radio_truth(env)
        b = synth_radio_truth(env)
        loc = Location(3.3, 2.2)
        assert np.array_equal(a.mean_rssi(loc), b.mean_rssi(loc))
        # static: the same location always sees the same field
        assert np.array_equal(a.mean_rssi(loc), a.mean_rssi(loc))

    def test_texture_std_is_calibrated(self, rng):
        env = small_env(texture_std=3.0, texture_scale=3.0, width=60.0, height=60.0)
        truth = synth_radio_truth(env)
        base = synth_radio_truth(small_env(width=60.0, height=60.0))
        locs = rng.uniform(0, 60, size=(4000, 2))
        deltas = np.array(
            [truth.mean_rssi(Location(*p))[0] - base.mean_rssi(Location(*p))[0] for p in locs]
        )
        assert deltas.std() == pytest.approx(3.0, rel=0.25)

    def test_session_shift_only_affects_session_scans(self):
        env = small_env(session_shift_std=2.0)
        truth = synth_radio_truth(env)
        base = synth_radio_truth(small_env())
        loc = Location(4.0, 3.0)
        assert np.array_equal(truth.mean_rssi(loc), base.mean_rssi(loc))
        assert not np.array_equal(truth.mean_rssi(loc, session=True), truth.mean_rssi(loc))

    def test_trajectory_scans_use_session_conditions(self):
        env = small_env(session_shift_std=5.0, pathloss=PathLossParams(shadowing_std=0.0))
        truth = synth_radio_truth(env)
        spec = TrajectorySpec(speed_min=1.0, speed_max=1.0, n_steps=3, s2=1, seed=2)
        walk = generate_trajectory(spec, env)
        loc, scans = walk[0]
        assert np.allclose(scans.matrix()[0], truth.mean_rssi(loc, session=True))

    def test_rejects_negative_field_stds(self):
        with pytest.raises(ValueError):
            small_env(texture_std=-1.0)
        with pytest.raises(ValueError):
            small_env(session_shift_std=-0.5)


class TestEnvironmentSpec:
    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            small_env(width=-1.0)
        with pytest.raises(ValueError):
            small_env(ap_positions=())
        with pytest.raises(ValueError):
            small_env(feature_offsets=(1.0,))

    def test_ap_count_deduplicates_positions(self):
        env = small_env(
            ap_positions=(Location(0, 0), Location(0, 0), Location(1, 1)),
            feature_offsets=(0.0, -8.0, 0.0),
        )
        assert env.feature_count == 3
        assert env.ap_count == 2
