"""Actor-critic training loop: determinism, logging, guards."""
import math

import numpy as np
import pytest

from camtrack import nn
from camtrack.config import ConfigError, EpisodeConfig, TrainConfig
from camtrack.training import train_pose_controller


def tiny_train_config(**overrides):
    base = dict(total_steps=400, n_envs=4, rollout_len=10, seed=0)
    base.update(overrides)
    return TrainConfig(**base)


class TestTrainPoseController:
    def test_zero_steps_leaves_params_at_init(self):
        cfg = tiny_train_config(total_steps=0)
        params, log = train_pose_controller(cfg, EpisodeConfig())
        init = nn.init_params(cfg.seed)
        for (_, a), (_, b) in zip(params.arrays(), init.arrays()):
            assert np.array_equal(a, b)
        assert log == []

    def test_same_seed_bit_identical(self):
        ep = EpisodeConfig()
        p1, log1 = train_pose_controller(tiny_train_config(), ep)
        p2, log2 = train_pose_controller(tiny_train_config(), ep)
        for (_, a), (_, b) in zip(p1.arrays(), p2.arrays()):
            assert np.array_equal(a, b)
        assert [(r.update_idx, r.mean_reward_g0, r.grad_norm) for r in log1] \
            == [(r.update_idx, r.mean_reward_g0, r.grad_norm) for r in log2]

    def test_different_seed_differs(self):
        ep = EpisodeConfig()
        p1, _ = train_pose_controller(tiny_train_config(seed=0), ep)
        p2, _ = train_pose_controller(tiny_train_config(seed=1), ep)
        assert not np.array_equal(p1.trunk1_w, p2.trunk1_w)

    def test_log_structure(self):
        cfg = tiny_train_config()
        params, log = train_pose_controller(cfg, EpisodeConfig())
        assert sum(r.n_g0 for r in log) >= cfg.total_steps
        for k, row in enumerate(log):
            assert row.update_idx == k + 1
            assert row.env_steps == (k + 1) * cfg.rollout_len * cfg.n_envs
            assert -1.0 <= row.mean_reward_g0 <= 1.0
            assert 0.0 <= row.entropy <= math.log(11) + 1e-9
            assert row.value_loss >= 0.0
            assert row.grad_norm >= 0.0
            assert row.n_g0 > 0

    def test_params_change_and_stay_finite(self):
        cfg = tiny_train_config(total_steps=2000)
        params, _ = train_pose_controller(cfg, EpisodeConfig())
        init = nn.init_params(cfg.seed)
        assert not np.array_equal(params.trunk1_w, init.trunk1_w)
        params.validate()

    def test_divergence_guard(self):
        cfg = tiny_train_config(total_steps=4000, learning_rate=1e9)
        with pytest.raises(RuntimeError):
            train_pose_controller(cfg, EpisodeConfig())

    def test_zero_p_pose_rejected(self):
        cfg = tiny_train_config(p_pose=0.0)
        with pytest.raises(ConfigError):
            train_pose_controller(cfg, EpisodeConfig())

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            train_pose_controller(tiny_train_config(gamma=1.5), EpisodeConfig())
