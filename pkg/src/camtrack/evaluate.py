"""Episode rollout under a chosen controller/switcher pair, tracking metrics,
and paired multi-seed system comparisons."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import nn
from .config import EpisodeConfig
from .controllers import (
    GeometricMemory,
    PoseMessage,
    noisy_switch,
    oracle_switch,
    random_switch,
    sv_baseline_action,
    system_action,
    virtual_tracker_action,
)
from .geometry import CameraPose
from .rng import RngStream
from .world import Action, Visibility, spawn_episode, step, visibility_of

CONTROLLERS = ("virtual", "geometric", "learned", "sv")
DEFAULT_EPISODE_STEPS = 500


@dataclass(slots=True)
class StepRecord:
    """Everything observable about one simulation step, per camera."""

    t: int
    target: tuple[float, float, float]
    poses: list[CameraPose]
    actions: list[int]
    visibility: list[Visibility]
    labels: list[int]
    rewards: list[float]
    d_alpha: list[float]
    d_beta: list[float]
    d_xi: list[float]


@dataclass
class EpisodeReport:
    per_camera_mean_error: list[float]
    per_camera_success_rate: list[float]
    mean_error: float
    success_rate: float
    episode_len: int


def parse_switcher(spec: str) -> tuple[str, float | None]:
    """Parse a switcher spec: "oracle", "random:P" or "noisy:E"."""
    if spec == "oracle":
        return "oracle", None
    kind, sep, arg = spec.partition(":")
    if sep and kind in ("random", "noisy"):
        try:
            p = float(arg)
        except ValueError:
            raise ValueError(f"bad switcher parameter in {spec!r}") from None
        if kind == "random" and not 0.0 <= p <= 1.0:
            raise ValueError(f"random switcher probability must be in [0, 1], got {p}")
        if kind == "noisy" and not 0.0 <= p <= 0.5:
            raise ValueError(f"noisy switcher flip rate must be in [0, 0.5], got {p}")
        return kind, p
    raise ValueError(f"unknown switcher {spec!r} (use oracle, random:P or noisy:E)")


def run_episode(config: EpisodeConfig, controller: str, switcher: str = "oracle",
                params: nn.PolicyParams | None = None, seed: int = 0,
                steps: int = DEFAULT_EPISODE_STEPS) -> list[StepRecord]:
    """Roll one episode and record every step.

    Per step: current visibility feeds the switcher, the switcher labels feed
    the controllers, the world advances, and the post-step state is recorded.
    Deterministic in seed.
    """
    if controller not in CONTROLLERS:
        raise ValueError(f"unknown controller {controller!r}")
    if controller == "learned" and params is None:
        raise ValueError("the learned controller requires policy params")
    switch_kind, switch_arg = parse_switcher(switcher)

    world = spawn_episode(config, seed)
    switch_rng = RngStream(seed, 1)
    n_cams = config.n_cameras
    memories = [GeometricMemory() for _ in range(n_cams)]

    records: list[StepRecord] = []
    for _ in range(steps):
        vis_now = [visibility_of(world, i) for i in range(n_cams)]
        if switch_kind == "oracle":
            labels = [oracle_switch(v) for v in vis_now]
        elif switch_kind == "random":
            labels = [random_switch(switch_rng, switch_arg) for _ in vis_now]
        else:
            labels = [noisy_switch(v, switch_rng, switch_arg) for v in vis_now]

        target_point = world.target.point()
        messages = [PoseMessage(i, world.cameras[i], labels[i])
                    for i in range(n_cams)]
        actions: list[Action] = []
        for i in range(n_cams):
            if controller == "virtual":
                actions.append(virtual_tracker_action(world.cameras[i], target_point))
            elif controller == "sv":
                actions.append(sv_baseline_action(world.cameras[i], vis_now[i],
                                                  target_point))
            else:
                actions.append(system_action(
                    i, target_point, messages, controller, params=params,
                    memory=memories[i], arena_half=config.arena_half,
                    mode="greedy"))

        outcome = step(world, actions)
        world = outcome.state
        records.append(StepRecord(
            t=world.t,
            target=world.target.point(),
            poses=list(world.cameras),
            actions=[int(a) for a in actions],
            visibility=outcome.visibility,
            labels=labels,
            rewards=outcome.reward,
            d_alpha=outcome.d_alpha,
            d_beta=outcome.d_beta,
            d_xi=outcome.d_xi,
        ))
    return records


def per_camera_mean_error(records: list[StepRecord]) -> list[float]:
    if not records:
        raise ValueError("metrics need at least one step record")
    n_cams = len(records[0].poses)
    # camera-major, time-minor, exactly rounded per camera
    return [math.fsum((r.d_alpha[i] + r.d_beta[i]) * 0.5 for r in records)
            / len(records)
            for i in range(n_cams)]


def per_camera_success_rate(records: list[StepRecord]) -> list[float]:
    if not records:
        raise ValueError("metrics need at least one step record")
    n_cams = len(records[0].poses)
    return [sum(1 for r in records if r.visibility[i] is not Visibility.OUT_OF_VIEW)
            / len(records)
            for i in range(n_cams)]


def mean_error(records: list[StepRecord]) -> float:
    """Average over cameras and steps of (pitch error + yaw error) / 2, degrees."""
    per_cam = per_camera_mean_error(records)
    return math.fsum(per_cam) / len(per_cam)


def success_rate(records: list[StepRecord]) -> float:
    """Fraction of camera-steps with the target inside the view frustum;
    occluded-but-in-view counts as success."""
    per_cam = per_camera_success_rate(records)
    return math.fsum(per_cam) / len(per_cam)


def episode_report(records: list[StepRecord]) -> EpisodeReport:
    me = per_camera_mean_error(records)
    sr = per_camera_success_rate(records)
    return EpisodeReport(me, sr,
                         math.fsum(me) / len(me),
                         math.fsum(sr) / len(sr),
                         len(records))


@dataclass
class SystemSummary:
    """Mean and sample standard deviation over paired seeds, per camera and
    overall, for one system."""

    name: str
    n_seeds: int
    per_camera_me: list[tuple[float, float]]
    per_camera_sr: list[tuple[float, float]]
    mean_error: tuple[float, float]
    success_rate: tuple[float, float]


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def compare_systems(config: EpisodeConfig, systems: list[str], n_seeds: int,
                    steps: int = DEFAULT_EPISODE_STEPS,
                    params: nn.PolicyParams | None = None,
                    switcher: str = "oracle", base_seed: int = 0,
                    burn_in: int = 0) -> list[SystemSummary]:
    """Run every system on the same seeds and summarize both metrics.

    Pairing the seeds removes layout variance from the comparison. burn_in
    steps at the start of each episode are excluded from the metrics.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    summaries = []
    for name in systems:
        episode_me: list[list[float]] = []
        episode_sr: list[list[float]] = []
        for k in range(n_seeds):
            records = run_episode(config, name, switcher=switcher, params=params,
                                  seed=base_seed + k, steps=steps)
            body = records[burn_in:]
            episode_me.append(per_camera_mean_error(body))
            episode_sr.append(per_camera_success_rate(body))
        n_cams = config.n_cameras
        per_cam_me = [_mean_std([ep[i] for ep in episode_me]) for i in range(n_cams)]
        per_cam_sr = [_mean_std([ep[i] for ep in episode_sr]) for i in range(n_cams)]
        overall_me = _mean_std([math.fsum(ep) / n_cams for ep in episode_me])
        overall_sr = _mean_std([math.fsum(ep) / n_cams for ep in episode_sr])
        summaries.append(SystemSummary(name, n_seeds, per_cam_me, per_cam_sr,
                                       overall_me, overall_sr))
    return summaries


def format_comparison(summaries: list[SystemSummary]) -> str:
    """Aligned plain-text table with one row per camera plus an overall row."""
    lines = [f"{'system':<12}{'scope':<10}{'mean_error_deg':>22}{'success_rate':>22}"]
    for s in summaries:
        rows = [(f"cam_{i + 1}", s.per_camera_me[i], s.per_camera_sr[i])
                for i in range(len(s.per_camera_me))]
        rows.append(("overall", s.mean_error, s.success_rate))
        for scope, me, sr in rows:
            lines.append(f"{s.name:<12}{scope:<10}"
                         f"{me[0]:>12.3f} ± {me[1]:<7.3f}"
                         f"{sr[0]:>12.4f} ± {sr[1]:<7.4f}")
    return "\n".join(lines)
