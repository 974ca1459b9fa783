"""Unicycle kinematics, obstacle motion, and fixed-step closed-loop integration.

State: x = [x1, x2, theta], control u = [v, omega]:

    dx1/dt    = v * cos(theta)
    dx2/dt    = v * sin(theta)
    dtheta/dt = omega

Obstacles are disks whose centers move at constant velocity. Integration is
classical fixed-step RK4 under zero-order-hold control: the controller is
queried once per node and its output held constant over the step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence


@dataclass(frozen=True)
class RobotState:
    """Unicycle configuration. theta is unnormalized (accumulates turns)."""

    x1: float
    x2: float
    theta: float

    def position(self) -> tuple[float, float]:
        return (self.x1, self.x2)


@dataclass(frozen=True)
class ControlInput:
    v: float
    omega: float


@dataclass(frozen=True)
class StateDerivative:
    dx1: float
    dx2: float
    dtheta: float


@dataclass(frozen=True)
class CircularObstacle:
    """Moving disk: center0 at t=0, constant velocity, fixed radius > 0."""

    center0: tuple[float, float]
    velocity: tuple[float, float]
    radius: float

    def is_static(self) -> bool:
        return self.velocity[0] == 0.0 and self.velocity[1] == 0.0


class TrajectorySample(NamedTuple):
    """One integration node. control is the input held on [t, t + dt); the
    final sample repeats the last applied control (nothing is applied after it)."""

    t: float
    state: RobotState
    control: ControlInput


@dataclass
class Trajectory:
    """Ordered samples with uniform dt spacing; the last interval may be
    shorter so the final timestamp lands exactly on the horizon."""

    samples: list[TrajectorySample]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def t0(self) -> float:
        return self.samples[0].t

    @property
    def t_end(self) -> float:
        return self.samples[-1].t

    def final_state(self) -> RobotState:
        return self.samples[-1].state

    def path_length(self) -> float:
        total = 0.0
        for a, b in zip(self.samples, self.samples[1:]):
            total += math.hypot(b.state.x1 - a.state.x1, b.state.x2 - a.state.x2)
        return total

    def min_goal_distance(self, goal: tuple[float, float]) -> float:
        return min(
            math.hypot(s.state.x1 - goal[0], s.state.x2 - goal[1]) for s in self.samples
        )


Controller = Callable[[RobotState, float], Optional[ControlInput]]


def unicycle_vector_field(state: RobotState, control: ControlInput) -> StateDerivative:
    """Right-hand side of the unicycle model at (state, control)."""
    return StateDerivative(
        control.v * math.cos(state.theta),
        control.v * math.sin(state.theta),
        control.omega,
    )


def obstacle_center_at(obstacle: CircularObstacle, t: float) -> tuple[float, float]:
    """Disk center at time t: constant-velocity extrapolation of center0 (exact)."""
    return (
        obstacle.center0[0] + obstacle.velocity[0] * t,
        obstacle.center0[1] + obstacle.velocity[1] * t,
    )


def rk4_step(state: RobotState, control: ControlInput, dt: float) -> RobotState:
    """One classical 4th-order Runge-Kutta step under zero-order-hold control."""
    x1, x2, th = state.x1, state.x2, state.theta
    v, w = control.v, control.omega

    # k_i evaluated inline; only theta varies across stages for this model.
    k1x = v * math.cos(th)
    k1y = v * math.sin(th)
    th2 = th + 0.5 * dt * w
    k2x = v * math.cos(th2)
    k2y = v * math.sin(th2)
    # k3 heading equals k2 heading (dtheta/dt is state-independent).
    th4 = th + dt * w
    k4x = v * math.cos(th4)
    k4y = v * math.sin(th4)

    return RobotState(
        x1 + dt / 6.0 * (k1x + 4.0 * k2x + k4x),
        x2 + dt / 6.0 * (k1y + 4.0 * k2y + k4y),
        th + dt * w,
    )


def integrate_closed_loop(
    initial: RobotState,
    t0: float,
    horizon: float,
    dt: float,
    controller: Controller,
) -> Optional[Trajectory]:
    """Integrate the closed loop over [t0, t0 + horizon] with step dt.

    The controller is queried at each node and may return None (e.g. an
    infeasible safety QP); in that case the whole trajectory is discarded and
    None is returned. Steps are uniform except the last, which is shortened
    so the final timestamp equals t0 + horizon exactly.

    Args:
        initial: state at t0.
        t0: start time.
        horizon: integration span (> 0).
        dt: step size (> 0).
        controller: maps (state, t) to a ControlInput, or None on failure.

    Returns:
        Trajectory with len = number of nodes, or None if the controller
        failed at any node.
    """
    if horizon <= 0.0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")

    n_full = int(math.floor(horizon / dt + 1e-9))
    remainder = horizon - n_full * dt
    has_tail = remainder > 1e-9 * max(1.0, abs(horizon))

    samples: list[TrajectorySample] = []
    state = initial
    t = t0
    n_steps = n_full + (1 if has_tail else 0)
    for k in range(n_steps):
        control = controller(state, t)
        if control is None:
            return None
        samples.append(TrajectorySample(t, state, control))
        step = dt if k < n_full else remainder
        state = rk4_step(state, control, step)
        # Reassign instead of accumulating so the final node is exact.
        t = t0 + horizon if k == n_steps - 1 else t0 + (k + 1) * dt
    last_control = samples[-1].control if samples else controller(state, t)
    if last_control is None:
        return None
    samples.append(TrajectorySample(t0 + horizon, state, last_control))
    return Trajectory(samples)


def min_obstacle_clearance(
    position: tuple[float, float], obstacles: Sequence[CircularObstacle], t: float
) -> float:
    """Smallest squared-distance margin h_i over all obstacles at time t (inf if none)."""
    best = math.inf
    for obs in obstacles:
        cx, cy = obstacle_center_at(obs, t)
        d1 = position[0] - cx
        d2 = position[1] - cy
        h = d1 * d1 + d2 * d2 - obs.radius * obs.radius
        if h < best:
            best = h
    return best
