"""World: episode randomization, target motion, transitions and rewards."""
import math

import numpy as np
import pytest

from camtrack.config import ConfigError, EpisodeConfig
from camtrack.geometry import CameraPose, Obstacle, bearing_to, in_fov, wrap_angle
from camtrack.world import (
    Action,
    TargetState,
    Visibility,
    WorldState,
    advance_target,
    apply_action,
    desired_zoom,
    direction_reward,
    spawn_episode,
    step,
    visibility_of,
    zoom_reward,
)
from camtrack.rng import RngStream


class TestAction:
    def test_eleven_actions_with_stable_indices(self):
        assert len(Action) == 11
        assert [a.value for a in Action] == list(range(11))
        for a in Action:
            assert Action(int(a)) is a


class TestApplyAction:
    def test_keep_still_is_identity(self):
        pose = CameraPose(1.0, 2.0, 3.0, 10.0, 20.0, 1.5)
        assert apply_action(pose, Action.KEEP_STILL) == pose

    def test_right_wraps(self):
        pose = CameraPose(0, 0, 2, 0.0, 178.0, 1.0)
        assert apply_action(pose, Action.RIGHT).yaw_deg == -177.0

    def test_left_is_negative(self):
        pose = CameraPose(0, 0, 2, 0.0, 0.0, 1.0)
        assert apply_action(pose, Action.LEFT).yaw_deg == -5.0

    def test_zoom_clamps_at_upper_bound(self):
        pose = CameraPose(0, 0, 2, 0.0, 0.0, 3.25)
        assert apply_action(pose, Action.ZOOM_IN).zoom == 3.3

    def test_zoom_clamps_at_lower_bound(self):
        pose = CameraPose(0, 0, 2, 0.0, 0.0, 1.05)
        assert apply_action(pose, Action.ZOOM_OUT).zoom == 1.0

    def test_pitch_clamps(self):
        pose = CameraPose(0, 0, 2, 58.0, 0.0, 1.0)
        assert apply_action(pose, Action.UP).pitch_deg == 60.0
        pose = CameraPose(0, 0, 2, -58.0, 0.0, 1.0)
        assert apply_action(pose, Action.DOWN).pitch_deg == -60.0

    def test_diagonals_move_both_axes(self):
        pose = CameraPose(0, 0, 2, 0.0, 0.0, 1.0)
        tl = apply_action(pose, Action.TOP_LEFT)
        assert (tl.pitch_deg, tl.yaw_deg) == (5.0, -5.0)
        br = apply_action(pose, Action.BOTTOM_RIGHT)
        assert (br.pitch_deg, br.yaw_deg) == (-5.0, 5.0)


class TestSpawnEpisode:
    def test_same_seed_same_state(self):
        cfg = EpisodeConfig()
        assert spawn_episode(cfg, 123) == spawn_episode(cfg, 123)

    def test_different_seed_different_state(self):
        cfg = EpisodeConfig()
        assert spawn_episode(cfg, 1) != spawn_episode(cfg, 2)

    def test_zero_obstacles(self):
        assert spawn_episode(EpisodeConfig(n_obstacles=0), 9).obstacles == []

    def test_cameras_look_inward(self):
        cfg = EpisodeConfig()
        for seed in range(50):
            world = spawn_episode(cfg, seed)
            assert len(world.cameras) == 4
            for cam in world.cameras:
                to_center = bearing_to((cam.x, cam.y, 0.0), (0.0, 0.0, 0.0))
                off = abs(wrap_angle(cam.yaw_deg - to_center.yaw_deg))
                assert off <= 90.0
                assert off <= 30.0 + 1e-9

    def test_layout_invariants(self):
        cfg = EpisodeConfig()
        h = cfg.arena_half
        for seed in range(30):
            world = spawn_episode(cfg, seed)
            for cam in world.cameras:
                on_edge = (abs(abs(cam.x) - h) < 1e-12 or abs(abs(cam.y) - h) < 1e-12)
                assert on_edge
                assert 2.0 <= cam.z <= 3.0
                assert cam.pitch_deg == 0.0 and cam.zoom == 1.0
            t = world.target
            assert abs(t.x) <= h / 2 and abs(t.y) <= h / 2
            assert 0.05 <= t.speed <= 0.2
            assert len(world.obstacles) == 8
            for box in world.obstacles:
                assert box.min_x >= -h and box.max_x <= h
                assert box.min_y >= -h and box.max_y <= h
                assert 1.0 <= box.height <= 2.5
                assert 0.5 <= box.max_x - box.min_x <= 3.0
                assert not box.footprint_contains(t.x, t.y)

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            spawn_episode(EpisodeConfig(n_cameras=1), 0)


class TestAdvanceTarget:
    def _world(self, target, obstacles=(), seed=0):
        return WorldState([], target, list(obstacles), 0, 10.0, (0.05, 0.2),
                          RngStream(seed, 0))

    def test_pause_counts_down(self):
        t = TargetState(1.0, 2.0, 0.1, (5.0, 5.0), pause_steps_remaining=5)
        world = self._world(t)
        nxt = advance_target(world, world.rng)
        assert (nxt.x, nxt.y) == (1.0, 2.0)
        assert nxt.pause_steps_remaining == 4

    def test_arrival_redraws_waypoint(self):
        t = TargetState(0.0, 0.0, 0.1, (0.01, 0.0))
        world = self._world(t)
        nxt = advance_target(world, world.rng)
        assert (nxt.x, nxt.y) == (0.01, 0.0)
        assert nxt.waypoint != (0.01, 0.0)
        assert 0.05 <= nxt.speed <= 0.2

    def test_straight_step_toward_waypoint(self):
        t = TargetState(0.0, 0.0, 0.1, (10.0, 0.0))
        world = self._world(t)
        nxt = advance_target(world, world.rng)
        assert nxt.x == pytest.approx(0.1)
        assert nxt.y == 0.0
        assert nxt.waypoint == (10.0, 0.0)

    def test_footprint_truncation(self):
        box = Obstacle(1.0, -1.0, 2.0, 1.0, 2.0)
        t = TargetState(0.9, 0.0, 0.2, (5.0, 0.0))
        world = self._world(t, [box])
        nxt = advance_target(world, world.rng)
        assert nxt.x <= 1.0  # stopped at or before the boundary
        assert nxt.x == pytest.approx(1.0, abs=1e-8)
        assert nxt.waypoint != (5.0, 0.0)

    def test_long_run_never_enters_footprints(self):
        cfg = EpisodeConfig()
        world = spawn_episode(cfg, 77)
        for k in range(100_000):
            nxt = advance_target(world, world.rng)
            assert abs(nxt.x) <= cfg.arena_half and abs(nxt.y) <= cfg.arena_half
            for box in world.obstacles:
                inside = (box.min_x < nxt.x < box.max_x
                          and box.min_y < nxt.y < box.max_y)
                assert not inside, f"target entered a footprint at step {k}"
            world.target = nxt


class TestVisibility:
    def _world_with(self, cam, obstacles, target_xy=(10.0, 0.0)):
        target = TargetState(target_xy[0], target_xy[1], 0.1, (0.0, 0.0))
        return WorldState([cam], target, obstacles, 0, 10.0, (0.05, 0.2),
                          RngStream(0, 0))

    def test_behind_camera_is_out_of_view(self):
        cam = CameraPose(0, 0, 2, 0.0, 180.0, 1.0)
        world = self._world_with(cam, [])
        assert visibility_of(world, 0) is Visibility.OUT_OF_VIEW

    def test_box_on_sightline_occludes(self):
        cam = CameraPose(0, 0, 2, 0.0, 0.0, 1.0)
        box = Obstacle(4.0, -1.0, 6.0, 1.0, 2.5)
        world = self._world_with(cam, [box])
        assert visibility_of(world, 0) is Visibility.OCCLUDED

    def test_clear_line_is_visible(self):
        cam = CameraPose(0, 0, 2, 0.0, 0.0, 1.0)
        world = self._world_with(cam, [])
        assert visibility_of(world, 0) is Visibility.VISIBLE

    def test_out_of_view_wins_over_occlusion(self):
        cam = CameraPose(0, 0, 2, 0.0, 180.0, 1.0)
        box = Obstacle(4.0, -1.0, 6.0, 1.0, 2.5)
        world = self._world_with(cam, [box])
        assert visibility_of(world, 0) is Visibility.OUT_OF_VIEW


class TestRewards:
    def test_direction_visible_zero_error(self):
        assert direction_reward(Visibility.VISIBLE, 0.0, 0.0) == 1.0

    def test_direction_occluded_is_zero(self):
        assert direction_reward(Visibility.OCCLUDED, 12.0, 7.0) == 0.0

    def test_direction_substitution(self):
        assert direction_reward(Visibility.VISIBLE, 15.0, 22.5) == pytest.approx(0.0)

    def test_direction_out_of_view(self):
        assert direction_reward(Visibility.OUT_OF_VIEW, 0.0, 0.0) == -1.0

    def test_zoom_exact(self):
        assert zoom_reward(Visibility.VISIBLE, 2.0, 12.0) == 1.0

    def test_zoom_occluded_is_zero(self):
        assert zoom_reward(Visibility.OCCLUDED, 2.0, 12.0) == 0.0

    def test_zoom_clamped_desired(self):
        # desired zoom clamps to 3.3 at 19.8 m; error spans the whole range
        assert zoom_reward(Visibility.VISIBLE, 1.0, 19.8) == pytest.approx(0.0)

    def test_desired_zoom_clamps(self):
        assert desired_zoom(3.0) == 1.0
        assert desired_zoom(12.0) == 2.0
        assert desired_zoom(30.0) == 3.3


class TestStep:
    def test_paused_target_keep_still_only_advances_time(self):
        cfg = EpisodeConfig(n_obstacles=0)
        world = spawn_episode(cfg, 5)
        world.target.pause_steps_remaining = 10
        before = [(c.x, c.y, c.z, c.pitch_deg, c.yaw_deg, c.zoom)
                  for c in world.cameras]
        out = step(world, [Action.KEEP_STILL] * 4)
        after = [(c.x, c.y, c.z, c.pitch_deg, c.yaw_deg, c.zoom)
                 for c in out.state.cameras]
        assert after == before
        assert out.state.t == world.t + 1
        assert (out.state.target.x, out.state.target.y) == (world.target.x, world.target.y)

    def test_out_of_view_reward_is_exactly_minus_one(self):
        cfg = EpisodeConfig(n_obstacles=0)
        world = spawn_episode(cfg, 5)
        # point every camera straight away from the target
        for i, cam in enumerate(world.cameras):
            b = bearing_to((cam.x, cam.y, cam.z), world.target.point())
            world.cameras[i] = CameraPose(cam.x, cam.y, cam.z, 0.0,
                                          wrap_angle(b.yaw_deg + 180.0), cam.zoom)
        world.target.pause_steps_remaining = 10
        out = step(world, [Action.KEEP_STILL] * 4)
        assert all(v is Visibility.OUT_OF_VIEW for v in out.visibility)
        assert all(r == -1.0 for r in out.reward)

    def test_aligned_camera_reward_is_one(self):
        target = TargetState(10.0, 0.0, 0.1, (0.0, 0.0), pause_steps_remaining=5)
        b = bearing_to((0.0, 0.0, 2.0), target.point())
        dist = math.dist((0.0, 0.0, 2.0), target.point())
        cam = CameraPose(0.0, 0.0, 2.0, b.pitch_deg, b.yaw_deg, desired_zoom(dist))
        world = WorldState([cam], target, [], 0, 10.0, (0.05, 0.2), RngStream(0, 0))
        out = step(world, [Action.KEEP_STILL])
        assert out.visibility[0] is Visibility.VISIBLE
        assert out.reward[0] == 1.0  # pre-clip sum of 2 clips to 1

    def test_action_length_mismatch(self):
        world = spawn_episode(EpisodeConfig(), 0)
        with pytest.raises(ValueError):
            step(world, [Action.KEEP_STILL] * 3)

    def test_camera_positions_never_change(self):
        world = spawn_episode(EpisodeConfig(), 8)
        positions = [(c.x, c.y, c.z) for c in world.cameras]
        rng = np.random.default_rng(0)
        for _ in range(200):
            actions = [Action(int(a)) for a in rng.integers(0, 11, size=4)]
            world = step(world, actions).state
            assert [(c.x, c.y, c.z) for c in world.cameras] == positions

    def test_rewards_bounded_and_visible_implies_in_fov(self):
        world = spawn_episode(EpisodeConfig(), 21)
        rng = np.random.default_rng(1)
        for _ in range(500):
            actions = [Action(int(a)) for a in rng.integers(0, 11, size=4)]
            out = step(world, actions)
            world = out.state
            for i in range(4):
                assert -1.0 <= out.reward[i] <= 1.0
                if out.visibility[i] is Visibility.VISIBLE:
                    assert in_fov(world.cameras[i], world.target.point())
                if out.visibility[i] is Visibility.OCCLUDED:
                    assert out.reward[i] == 0.0

    def test_bit_exact_trajectory_replay(self):
        cfg = EpisodeConfig()

        def run():
            world = spawn_episode(cfg, 99)
            rng = np.random.default_rng(99)
            trail = []
            for _ in range(500):
                actions = [Action(int(a)) for a in rng.integers(0, 11, size=4)]
                out = step(world, actions)
                world = out.state
                trail.append((tuple(out.reward),
                              tuple(v.value for v in out.visibility),
                              world.target.x, world.target.y))
            return trail

        assert run() == run()
