"""Barrier functions and exponential-CBF constraint rows for circular obstacles.

For a disk obstacle with center c(t) and radius r, the barrier is

    h = (x1 - c1)^2 + (x2 - c2)^2 - r^2

and the robot is safe iff h >= 0 for every obstacle. With the translational
speed fixed at v (the angular rate omega is the only decision variable) the
barrier has relative degree 2 in omega, and differentiating h twice along the
combined robot+obstacle flow gives

    dh/dt   = 2*d1*rho1 + 2*d2*rho2
    d2h/dt2 = 2*rho1^2 + 2*rho2^2 + 2*v*(d2*cos(theta) - d1*sin(theta)) * omega

where d = (x - c(t)) is the center offset and rho = (v*cos(theta) - c1dot,
v*sin(theta) - c2dot) the relative velocity. The exponential-CBF condition
d2h/dt2 + k2*dh/dt + k1*h >= 0 is therefore linear in omega and is returned
here as a ConstraintRow (a, b) meaning a*omega + b >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .dynamics import CircularObstacle, RobotState, obstacle_center_at

__all__ = [
    "CircularObstacle",
    "EcbfGains",
    "ConstraintRow",
    "barrier_value",
    "barrier_lie1",
    "ecbf_row",
    "constraint_rows",
    "is_safe",
]


@dataclass(frozen=True)
class EcbfGains:
    """Gains of the second-order barrier condition. Both must be positive so
    s^2 + k2*s + k1 is Hurwitz."""

    k1: float
    k2: float

    def __post_init__(self):
        if not (self.k1 > 0.0 and self.k2 > 0.0):
            raise ValueError(f"gains must be positive, got k1={self.k1}, k2={self.k2}")


@dataclass(frozen=True)
class ConstraintRow:
    """Half-line constraint on the angular rate: a*omega + b >= 0."""

    a: float
    b: float


def barrier_value(state: RobotState, obstacle: CircularObstacle, t: float) -> float:
    """Squared-distance margin to the obstacle disk at time t (>= 0 is safe)."""
    cx, cy = obstacle_center_at(obstacle, t)
    d1 = state.x1 - cx
    d2 = state.x2 - cy
    return d1 * d1 + d2 * d2 - obstacle.radius * obstacle.radius


def barrier_lie1(
    state: RobotState, v_const: float, obstacle: CircularObstacle, t: float
) -> float:
    """Total time derivative of the barrier along the robot+obstacle flow.

    Depends only on the fixed translational speed, not on omega (relative
    degree 2).
    """
    cx, cy = obstacle_center_at(obstacle, t)
    d1 = state.x1 - cx
    d2 = state.x2 - cy
    rho1 = v_const * math.cos(state.theta) - obstacle.velocity[0]
    rho2 = v_const * math.sin(state.theta) - obstacle.velocity[1]
    return 2.0 * d1 * rho1 + 2.0 * d2 * rho2


def ecbf_row(
    state: RobotState,
    v_const: float,
    obstacle: CircularObstacle,
    t: float,
    gains: EcbfGains,
) -> ConstraintRow:
    """Build the exponential-CBF row a*omega + b >= 0 for one obstacle.

    a is the omega coefficient of d2h/dt2; b collects the drift part of
    d2h/dt2 plus k1*h + k2*dh/dt. A row with a ~ 0 and b < 0 (head-on
    geometry) is infeasible for every omega; that verdict is left to the QP.
    """
    cx, cy = obstacle_center_at(obstacle, t)
    d1 = state.x1 - cx
    d2 = state.x2 - cy
    cos_t = math.cos(state.theta)
    sin_t = math.sin(state.theta)
    rho1 = v_const * cos_t - obstacle.velocity[0]
    rho2 = v_const * sin_t - obstacle.velocity[1]

    h = d1 * d1 + d2 * d2 - obstacle.radius * obstacle.radius
    h_dot = 2.0 * d1 * rho1 + 2.0 * d2 * rho2
    a = 2.0 * v_const * (d2 * cos_t - d1 * sin_t)
    b = 2.0 * (rho1 * rho1 + rho2 * rho2) + gains.k1 * h + gains.k2 * h_dot
    return ConstraintRow(a, b)


def constraint_rows(
    state: RobotState,
    v_const: float,
    obstacles: Sequence[CircularObstacle],
    t: float,
    gains: EcbfGains,
) -> list[ConstraintRow]:
    """One ECBF row per obstacle, in input order."""
    return [ecbf_row(state, v_const, obs, t, gains) for obs in obstacles]


def is_safe(
    state: RobotState, obstacles: Sequence[CircularObstacle], t: float
) -> bool:
    """True iff the state is outside (or on the boundary of) every disk at time t."""
    return all(barrier_value(state, obs, t) >= 0.0 for obs in obstacles)
