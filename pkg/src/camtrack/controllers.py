"""Per-camera decision policies.

Four ways to pick one of the 11 camera commands:
  * virtual_tracker_action - greedy oracle that reads the true target position;
    stands in for a working image tracker.
  * geometric_pose_action  - triangulates the target from the cameras that
    report successful tracking and steers toward the estimate.
  * learned_pose_action    - forward pass of the trained pose policy.
  * sv_baseline_action     - no collaboration: track when the target is
    visible, freeze otherwise.

Switchers produce the per-camera binary label (1 = tracking trusted) that
system_action uses to choose between the tracker and a pose controller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import nn
from .geometry import CameraPose, bearing_to, wrap_angle
from .rng import RngStream
from .world import (
    ACTION_DELTAS,
    ALPHA_MAX_DEG,
    BETA_MAX_DEG,
    TARGET_MID_HEIGHT,
    ZOOM_ERROR_NORM,
    Action,
    Visibility,
    desired_zoom,
)

TRIANGULATION_MAX_CONDITION = 1e6


@dataclass(frozen=True, slots=True)
class PoseMessage:
    """What one camera broadcasts: who it is, its pose, and its label."""

    index: int
    pose: CameraPose
    label: int  # 1 = tracking deemed successful, 0 = needs pose assistance


@dataclass(frozen=True, slots=True)
class TriangulationResult:
    """Ground-plane estimate or failure, plus the normal-matrix conditioning."""

    estimate: tuple[float, float] | None
    condition: float

    @property
    def ok(self) -> bool:
        return self.estimate is not None


@dataclass(slots=True)
class GeometricMemory:
    """One-slot memory of the last successful triangulation."""

    last_estimate: tuple[float, float] | None = None


def virtual_tracker_action(pose: CameraPose,
                           target: tuple[float, float, float]) -> Action:
    """Greedy one-step minimizer of the normalized pose error.

    Tries all 11 actions and returns the one whose resulting pose minimizes
    d_alpha/30 + d_beta/45 + d_xi/2.3; ties go to the lowest action index.
    """
    b = bearing_to((pose.x, pose.y, pose.z), target)
    distance = math.dist((pose.x, pose.y, pose.z), target)
    xi_star = desired_zoom(distance)

    best_idx = 0
    best_score = math.inf
    for idx, (dp, dy, dz) in enumerate(ACTION_DELTAS):
        # same clamping as apply_action; the camera position never changes,
        # so the bearing is shared by all candidates
        pitch = pose.pitch_deg + dp
        if pitch > 60.0:
            pitch = 60.0
        elif pitch < -60.0:
            pitch = -60.0
        zoom = pose.zoom + dz
        if zoom > 3.3:
            zoom = 3.3
        elif zoom < 1.0:
            zoom = 1.0
        d_alpha = abs(pitch - b.pitch_deg)
        d_beta = abs(wrap_angle(pose.yaw_deg + dy - b.yaw_deg))
        score = (d_alpha / ALPHA_MAX_DEG + d_beta / BETA_MAX_DEG
                 + abs(zoom - xi_star) / ZOOM_ERROR_NORM)
        if score < best_score:
            best_score = score
            best_idx = idx
    return Action(best_idx)


def triangulate(messages: list[PoseMessage]) -> TriangulationResult:
    """Least-squares ground-plane intersection of the label-1 cameras' yaw rays.

    Each contributing camera adds the line through (x, y) along
    (cos yaw, sin yaw); the normal equations sum the perpendicular projectors
    I - d d^T. Fails with fewer than two contributors or when the 2x2 normal
    matrix is ill-conditioned (near-parallel rays).
    """
    if not messages:
        raise ValueError("triangulate requires at least one pose message")
    m00 = m01 = m11 = 0.0
    r0 = r1 = 0.0
    contributors = 0
    for msg in messages:
        if msg.label != 1:
            continue
        yaw = math.radians(msg.pose.yaw_deg)
        dx, dy = math.cos(yaw), math.sin(yaw)
        a00 = 1.0 - dx * dx
        a01 = -dx * dy
        a11 = 1.0 - dy * dy
        m00 += a00
        m01 += a01
        m11 += a11
        r0 += a00 * msg.pose.x + a01 * msg.pose.y
        r1 += a01 * msg.pose.x + a11 * msg.pose.y
        contributors += 1

    normal = np.array([[m00, m01], [m01, m11]])
    singular_values = np.linalg.svd(normal, compute_uv=False)
    if singular_values[1] > 0.0:
        condition = float(singular_values[0] / singular_values[1])
    else:
        condition = math.inf
    if contributors < 2 or condition > TRIANGULATION_MAX_CONDITION:
        return TriangulationResult(None, condition)
    point = np.linalg.solve(normal, np.array([r0, r1]))
    return TriangulationResult((float(point[0]), float(point[1])), condition)


def geometric_pose_action(self_index: int, messages: list[PoseMessage],
                          memory: GeometricMemory) -> Action:
    """Steer toward the triangulated target; fall back to the remembered
    estimate, and keep still when there is no information at all."""
    result = triangulate(messages)
    if result.ok:
        memory.last_estimate = result.estimate
    point = memory.last_estimate
    if point is None:
        return Action.KEEP_STILL
    return virtual_tracker_action(messages[self_index].pose,
                                  (point[0], point[1], TARGET_MID_HEIGHT))


def learned_pose_action(self_index: int, messages: list[PoseMessage],
                        params: nn.PolicyParams, rng: RngStream | None,
                        mode: str, arena_half: float
                        ) -> tuple[Action, float, float]:
    """Run the pose policy for one camera.

    mode "sample" draws from the action distribution using rng; "greedy"
    takes the argmax (lowest index on ties). Returns (action, log-probability
    of that action, value estimate).
    """
    logits, value, _ = nn.policy_forward(params, self_index, messages, arena_half)
    logp = nn.log_softmax(logits)
    if mode == "greedy":
        idx = int(np.argmax(logp))
    elif mode == "sample":
        if rng is None:
            raise ValueError("sample mode requires an rng")
        idx = nn.sample_action(np.exp(logp), rng.random())
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Action(idx), float(logp[idx]), value


def oracle_switch(vis: Visibility) -> int:
    """Perfect switcher: trust tracking exactly when the target is visible."""
    return 1 if vis is Visibility.VISIBLE else 0


def random_switch(rng: RngStream, p_pose: float) -> int:
    """Label 0 (use the pose controller) with probability p_pose, else 1."""
    return 0 if rng.random() < p_pose else 1


def noisy_switch(vis: Visibility, rng: RngStream, eps: float) -> int:
    """Oracle switcher whose output flips with probability eps."""
    g = oracle_switch(vis)
    return 1 - g if rng.random() < eps else g


def sv_baseline_action(pose: CameraPose, vis: Visibility,
                       target: tuple[float, float, float]) -> Action:
    """Single-view baseline: track while the target is visible, otherwise
    hold still (a lost tracker has no signal and no help from peers)."""
    if vis is Visibility.VISIBLE:
        return virtual_tracker_action(pose, target)
    return Action.KEEP_STILL


def system_action(self_index: int, target: tuple[float, float, float],
                  messages: list[PoseMessage], kind: str,
                  params: nn.PolicyParams | None = None,
                  memory: GeometricMemory | None = None,
                  rng: RngStream | None = None,
                  arena_half: float | None = None,
                  mode: str = "greedy") -> Action:
    """Full per-camera system: cameras whose own label is 1 track directly,
    the rest defer to the pose controller selected by kind."""
    if messages[self_index].label == 1:
        return virtual_tracker_action(messages[self_index].pose, target)
    if kind == "geometric":
        if memory is None:
            raise ValueError("geometric controller needs a GeometricMemory")
        return geometric_pose_action(self_index, messages, memory)
    if kind == "learned":
        if params is None or arena_half is None:
            raise ValueError("learned controller needs params and arena_half")
        action, _, _ = learned_pose_action(self_index, messages, params, rng,
                                           mode, arena_half)
        return action
    raise ValueError(f"unknown pose controller kind {kind!r}")
