"""Synchronous advantage actor-critic training of the pose policy.

Several independent environments step in lockstep. At every step each
camera's switcher label is drawn at random; label-1 cameras act through the
groundtruth tracker, label-0 cameras act through the sampled policy, and only
label-0 camera-steps contribute gradients. Returns are discounted over each
camera's full reward sequence so that the credit a pose action receives also
reflects the steps where the tracker took over afterwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import nn
from .config import ConfigError, EpisodeConfig, TrainConfig
from .controllers import PoseMessage, random_switch, virtual_tracker_action
from .rng import RngStream
from .world import Action, spawn_episode, step

EPISODE_STEPS = 500  # environments re-randomize after this many steps


@dataclass
class Transition:
    """One pose-controller camera-step collected for learning. reward and
    done are filled once the step outcome / window boundary is known."""

    env: int
    cam: int
    pos: int  # index within the rollout window
    cache: nn.ForwardCache
    action: int
    log_prob: float
    value: float
    entropy: float
    reward: float = 0.0
    done: bool = False

    @property
    def features(self):
        return self.cache.features


@dataclass
class UpdateStats:
    """One row of the training log."""

    update_idx: int
    env_steps: int
    mean_reward_g0: float
    entropy: float
    value_loss: float
    grad_norm: float
    n_g0: int  # label-0 camera-steps in this update (not part of the CSV)


def _global_norm(grads: nn.PolicyParams) -> float:
    return math.sqrt(sum(float((arr * arr).sum()) for _, arr in grads.arrays()))


def train_pose_controller(train_cfg: TrainConfig, episode_cfg: EpisodeConfig
                          ) -> tuple[nn.PolicyParams, list[UpdateStats]]:
    """Train the pose policy; returns the final parameters and per-update log.

    Fully deterministic in (train_cfg.seed, configs): every environment and
    the action sampler own fixed derived rng streams, and updates are applied
    sequentially.
    """
    train_cfg.validate()
    episode_cfg.validate()
    if train_cfg.total_steps > 0 and train_cfg.p_pose <= 0.0:
        raise ConfigError("p_pose must be positive, otherwise no pose-controller "
                          "steps are ever collected")

    params = nn.init_params(train_cfg.seed)
    n_envs = train_cfg.n_envs
    n_cams = episode_cfg.n_cameras
    arena_half = episode_cfg.arena_half
    gamma = train_cfg.gamma

    reseed = [RngStream(train_cfg.seed, 1000 + e) for e in range(n_envs)]
    agent_rng = [RngStream(train_cfg.seed, 2000 + e) for e in range(n_envs)]
    worlds = [spawn_episode(episode_cfg, reseed[e].next_u64()) for e in range(n_envs)]
    # labels pre-drawn at the previous window's bootstrap, if any
    pending_labels: list[list[int] | None] = [None] * n_envs

    log: list[UpdateStats] = []
    collected = 0
    update_idx = 0
    while collected < train_cfg.total_steps:
        transitions: list[Transition] = []
        rewards = [[[] for _ in range(n_cams)] for _ in range(n_envs)]

        for pos in range(train_cfg.rollout_len):
            for e in range(n_envs):
                world = worlds[e]
                if pending_labels[e] is not None:
                    labels = pending_labels[e]
                    pending_labels[e] = None
                else:
                    labels = [random_switch(agent_rng[e], train_cfg.p_pose)
                              for _ in range(n_cams)]
                messages = [PoseMessage(i, world.cameras[i], labels[i])
                            for i in range(n_cams)]
                target_point = world.target.point()
                actions = []
                fresh: list[Transition] = []
                for i in range(n_cams):
                    if labels[i] == 1:
                        actions.append(virtual_tracker_action(world.cameras[i],
                                                              target_point))
                    else:
                        logits, value, cache = nn.policy_forward(
                            params, i, messages, arena_half)
                        logp = nn.log_softmax(logits)
                        probs = np.exp(logp)
                        a = nn.sample_action(probs, agent_rng[e].random())
                        ent = float(-(probs * np.where(probs > 0.0, logp, 0.0)).sum())
                        fresh.append(Transition(e, i, pos, cache, a,
                                                float(logp[a]), value, ent))
                        actions.append(Action(a))
                outcome = step(world, actions)
                worlds[e] = outcome.state
                for t in fresh:
                    t.reward = outcome.reward[t.cam]
                transitions.extend(fresh)
                for i in range(n_cams):
                    rewards[e][i].append(outcome.reward[i])

        # bootstrap with the value of the actual next observation (its labels
        # are drawn now and reused at the next window's first step); zero
        # across episode boundaries
        returns = [[None] * n_cams for _ in range(n_envs)]
        reset_envs = set()
        for e in range(n_envs):
            at_reset = worlds[e].t >= EPISODE_STEPS
            if at_reset:
                reset_envs.add(e)
                for i in range(n_cams):
                    returns[e][i] = nn.compute_returns(rewards[e][i], 0.0, gamma)
                worlds[e] = spawn_episode(episode_cfg, reseed[e].next_u64())
            else:
                labels = [random_switch(agent_rng[e], train_cfg.p_pose)
                          for _ in range(n_cams)]
                pending_labels[e] = labels
                msgs = [PoseMessage(j, worlds[e].cameras[j], labels[j])
                        for j in range(n_cams)]
                for i in range(n_cams):
                    feats = nn.build_features(params, i, msgs, arena_half)
                    _, boot, _ = nn.forward(params, feats)
                    returns[e][i] = nn.compute_returns(rewards[e][i], boot, gamma)

        if transitions:
            grad_sum = nn.zeros_like_params()
            reward_sum = 0.0
            entropy_sum = 0.0
            value_loss_sum = 0.0
            last_pos = train_cfg.rollout_len - 1
            for t in transitions:
                t.done = t.env in reset_envs and t.pos == last_pos
                ret = returns[t.env][t.cam][t.pos]
                advantage = ret - t.value
                g = nn.backward(params, t.cache, t.action, advantage, ret,
                                train_cfg.entropy_coeff, train_cfg.value_coeff)
                for name, arr in grad_sum.arrays():
                    arr += getattr(g, name)
                reward_sum += t.reward
                entropy_sum += t.entropy
                value_loss_sum += (t.value - ret) ** 2

            count = len(transitions)
            for _, arr in grad_sum.arrays():
                arr /= count
            grad_norm = _global_norm(grad_sum)
            scale = train_cfg.learning_rate
            if grad_norm > train_cfg.grad_clip:
                scale *= train_cfg.grad_clip / grad_norm
            for name, arr in params.arrays():
                arr -= scale * getattr(grad_sum, name)

            if params.mean_abs() > 1e3:
                raise RuntimeError("training diverged: mean |param| exceeded 1e3")

            collected += count
            update_idx += 1
            log.append(UpdateStats(
                update_idx=update_idx,
                env_steps=update_idx * train_cfg.rollout_len * n_envs,
                mean_reward_g0=reward_sum / count,
                entropy=entropy_sum / count,
                value_loss=value_loss_sum / count,
                grad_norm=grad_norm,
                n_g0=count,
            ))

    return params, log
