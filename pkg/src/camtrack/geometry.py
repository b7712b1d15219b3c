"""Angle arithmetic, bearings, field-of-view tests and ray-box intersection.

All angles are degrees. Yaw is measured counterclockwise from +x in the
ground plane and kept in (-180, 180]; pitch is positive upward. Everything
here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

PITCH_LIMIT_DEG = 60.0
ZOOM_MIN = 1.0
ZOOM_MAX = 3.3
BASE_H_FOV_DEG = 90.0
BASE_V_FOV_DEG = 60.0


@dataclass(frozen=True, slots=True)
class CameraPose:
    """Position, orientation and zoom of one fixed-position rotating camera."""

    x: float
    y: float
    z: float
    pitch_deg: float  # [-60, 60], positive up
    yaw_deg: float    # (-180, 180]
    zoom: float       # [1.0, 3.3]

    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def validate(self) -> None:
        if not -PITCH_LIMIT_DEG <= self.pitch_deg <= PITCH_LIMIT_DEG:
            raise ValueError(f"pitch {self.pitch_deg} outside [-60, 60]")
        if not -180.0 < self.yaw_deg <= 180.0:
            raise ValueError(f"yaw {self.yaw_deg} outside (-180, 180]")
        if not ZOOM_MIN <= self.zoom <= ZOOM_MAX:
            raise ValueError(f"zoom {self.zoom} outside [1.0, 3.3]")


@dataclass(frozen=True, slots=True)
class Bearing:
    """Direction from an observer point to a target point."""

    pitch_deg: float
    yaw_deg: float


@dataclass(frozen=True, slots=True)
class Obstacle:
    """Axis-aligned box standing on the ground plane (base at z = 0)."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float
    height: float

    def validate(self) -> None:
        if not (self.min_x < self.max_x and self.min_y < self.max_y):
            raise ValueError("obstacle min corner must be strictly below max corner")
        if not self.height > 0.0:
            raise ValueError("obstacle height must be positive")

    def footprint_contains(self, x: float, y: float) -> bool:
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y


def wrap_angle(a: float) -> float:
    """Reduce an angle to the interval (-180, 180]."""
    r = a % 360.0
    return r - 360.0 if r > 180.0 else r


def bearing_to(origin: tuple[float, float, float],
               target: tuple[float, float, float]) -> Bearing:
    """Bearing from origin toward target; raises for coincident points."""
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    dz = target[2] - origin[2]
    horizontal = math.hypot(dx, dy)
    if horizontal == 0.0 and dz == 0.0:
        raise ValueError("bearing undefined for coincident points")
    yaw = wrap_angle(math.degrees(math.atan2(dy, dx)))
    pitch = math.degrees(math.atan2(dz, horizontal))
    return Bearing(pitch, yaw)


def angle_error(pose: CameraPose,
                target: tuple[float, float, float]) -> tuple[float, float]:
    """Absolute (pitch, yaw) error between where the camera points and the
    bearing to the target. The yaw error is taken on the circle, so it never
    exceeds 180."""
    b = bearing_to((pose.x, pose.y, pose.z), target)
    d_alpha = abs(pose.pitch_deg - b.pitch_deg)
    d_beta = abs(wrap_angle(pose.yaw_deg - b.yaw_deg))
    return d_alpha, d_beta


def effective_fov(zoom: float) -> tuple[float, float]:
    """(horizontal, vertical) field of view in degrees at the given zoom.

    The base FOV of 90 x 60 degrees shrinks proportionally with zoom.
    """
    if not ZOOM_MIN <= zoom <= ZOOM_MAX:
        raise ValueError(f"zoom {zoom} outside [{ZOOM_MIN}, {ZOOM_MAX}]")
    return BASE_H_FOV_DEG / zoom, BASE_V_FOV_DEG / zoom


def in_fov(pose: CameraPose, target: tuple[float, float, float]) -> bool:
    """True when the target direction lies inside the camera frustum."""
    d_alpha, d_beta = angle_error(pose, target)
    h_fov, v_fov = effective_fov(pose.zoom)
    return d_beta <= 0.5 * h_fov and d_alpha <= 0.5 * v_fov


def segment_box_overlap(p0: tuple[float, float, float],
                        p1: tuple[float, float, float],
                        box: Obstacle) -> tuple[float, float] | None:
    """Parametric overlap of the closed segment p0->p1 with the box, via the
    slab method. Returns (t_enter, t_exit) within [0, 1], or None when the
    segment misses the box entirely."""
    t_min, t_max = 0.0, 1.0
    for a, b, lo, hi in (
        (p0[0], p1[0], box.min_x, box.max_x),
        (p0[1], p1[1], box.min_y, box.max_y),
        (p0[2], p1[2], 0.0, box.height),
    ):
        d = b - a
        if d == 0.0:
            if a < lo or a > hi:
                return None
        else:
            inv = 1.0 / d
            t0 = (lo - a) * inv
            t1 = (hi - a) * inv
            if t0 > t1:
                t0, t1 = t1, t0
            if t0 > t_min:
                t_min = t0
            if t1 < t_max:
                t_max = t1
            if t_min > t_max:
                return None
    return t_min, t_max


def segment_hits_box(p0: tuple[float, float, float],
                     p1: tuple[float, float, float],
                     box: Obstacle) -> bool:
    """True when the closed segment p0->p1 intersects the box (touching counts)."""
    return segment_box_overlap(p0, p1, box) is not None
