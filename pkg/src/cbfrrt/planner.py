"""CBF-RRT: grow a time-stamped tree with QP-filtered safe steering.

Each expansion draws a tree vertex uniformly, resamples the free heading
toward the goal, picks a reference control, and integrates the closed loop
under the per-node safety QP for one fixed horizon. There is no
nearest-neighbor search anywhere in the loop. Edges are added only when
every QP along the way was feasible and the integrated edge clears every
disk with margin (see safe_steer for why QP feasibility alone is not
enough).

Vertices carry (state, time) because obstacles move: a vertex is only known
to be safe at its own timestamp. Headings stored on vertices are the arrival
headings; expansion overwrites them (the heading is a free variable, so edge
start states match their parent vertex in position and time, not heading).

Randomness is a single seeded generator per plan() call, consumed in a fixed
order (vertex draw, then heading draw, then reference draw, each iteration),
which makes runs bit-reproducible for a given Scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import (
    CircularObstacle,
    ControlInput,
    RobotState,
    Trajectory,
    integrate_closed_loop,
)
from .qp import ScalarQpProblem, solve_scalar_qp
from .safety import EcbfGains, barrier_value, constraint_rows, is_safe


@dataclass(frozen=True)
class PlannerParams:
    """Tunables of one planning run.

    omega_ref_range, when set, draws the reference angular rate uniformly
    from that interval each expansion instead of using the constant
    omega_ref.
    """

    t_h: float = 0.5
    dt: float = 0.02
    sigma2: float = 0.6
    epsilon: float = 0.15
    gains: EcbfGains = field(default_factory=lambda: EcbfGains(2.0, 4.0))
    v_const: float = 1.0
    omega_ref: float = 0.0
    # Wide enough that a near-head-on avoidance maneuver (|omega*| can reach
    # ~5.1 for a disk half a metre ahead and slightly off-axis) stays inside
    # the box; scenario files pin tighter, platform-specific limits.
    omega_bounds: tuple[float, float] = (-10.0, 10.0)
    max_iters: int = 10_000
    seed: int = 0
    omega_ref_range: Optional[tuple[float, float]] = None

    def validate(self):
        if not self.t_h > 0.0:
            raise ValueError(f"t_h must be > 0, got {self.t_h}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.dt > self.t_h:
            raise ValueError(f"dt must be <= t_h, got dt={self.dt}, t_h={self.t_h}")
        if self.sigma2 < 0.0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.omega_bounds[0] > self.omega_bounds[1]:
            raise ValueError(f"omega_bounds reversed: {self.omega_bounds}")


@dataclass(frozen=True)
class Scenario:
    """Full problem description: start, goal, obstacles, and parameters."""

    x_init: RobotState
    t_init: float
    x_goal: tuple[float, float]
    obstacles: tuple[CircularObstacle, ...]
    params: PlannerParams


@dataclass(frozen=True)
class Vertex:
    id: int
    state: RobotState
    time: float
    parent: Optional[int] = None
    edge: Optional[int] = None


class PlanTree:
    """Rooted tree of (state, time) vertices; edges are the steering
    trajectories linking parent to child. Edge ids equal their child's id."""

    def __init__(self, root_state: RobotState, root_time: float):
        self.vertices: dict[int, Vertex] = {0: Vertex(0, root_state, root_time)}
        self.edges: dict[int, Trajectory] = {}
        self._order: list[int] = [0]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def root(self) -> Vertex:
        return self.vertices[0]

    def vertex_ids(self) -> list[int]:
        return list(self._order)

    def add_child(self, parent_id: int, state: RobotState, time: float,
                  edge: Trajectory) -> Vertex:
        vid = len(self._order)
        vertex = Vertex(vid, state, time, parent=parent_id, edge=vid)
        self.vertices[vid] = vertex
        self.edges[vid] = edge
        self._order.append(vid)
        return vertex

    def depth(self, vertex_id: int) -> int:
        d = 0
        v = self.vertices[vertex_id]
        while v.parent is not None:
            v = self.vertices[v.parent]
            d += 1
        return d


@dataclass
class PlanResult:
    success: bool
    tree: PlanTree
    path: Optional[list[int]]
    controls: Optional[Trajectory]
    iterations: int


def vertices_sample(tree: PlanTree, rng: np.random.Generator) -> Vertex:
    """Draw a vertex uniformly from the tree (probability 1/N each)."""
    ids = tree.vertex_ids()
    return tree.vertices[ids[int(rng.integers(0, len(ids)))]]


def goal_heading(position: tuple[float, float], goal: tuple[float, float]) -> float:
    """Full-quadrant heading from position toward goal; 0 when they coincide."""
    dy = goal[1] - position[1]
    dx = goal[0] - position[0]
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return math.atan2(dy, dx)


def state_sample(
    vertex: Vertex,
    goal: tuple[float, float],
    sigma2: float,
    rng: np.random.Generator,
) -> Vertex:
    """Copy of vertex with the free heading redrawn ~ Normal(goal heading, sigma2)."""
    theta_goal = goal_heading(vertex.state.position(), goal)
    theta = float(rng.normal(theta_goal, math.sqrt(sigma2)))
    state = RobotState(vertex.state.x1, vertex.state.x2, theta)
    return Vertex(vertex.id, state, vertex.time, vertex.parent, vertex.edge)


def reference_sample(rng: np.random.Generator, params: PlannerParams) -> ControlInput:
    """Reference control for this expansion: constant (v_const, omega_ref)
    unless omega_ref_range requests a uniform draw for the angular rate."""
    if params.omega_ref_range is None:
        return ControlInput(params.v_const, params.omega_ref)
    lo, hi = params.omega_ref_range
    return ControlInput(params.v_const, float(rng.uniform(lo, hi)))


def safe_steer(
    vertex: Vertex,
    t_h: float,
    u_ref: ControlInput,
    obstacles: Sequence[CircularObstacle],
    params: PlannerParams,
) -> Optional[tuple[Trajectory, RobotState, float]]:
    """Steer from vertex for one horizon under the per-node safety QP.

    At every integration node the barrier rows are rebuilt for the current
    state and time and the scalar QP projects omega_ref onto the feasible
    set; v is held at u_ref.v throughout. Fails (None) as soon as any QP is
    infeasible — no partial edge is ever returned.

    A feasible QP at every node is necessary but not sufficient for the edge
    to stay clear of the disks: the resampled heading can start an edge
    pointed straight at a nearby obstacle (outside the exponential envelope
    the gains certify), and gain pairs with complex characteristic roots
    (k2^2 < 4 k1) let the barrier ring below zero while every row stays
    satisfiable. The edge is therefore accepted only if every node clears
    every disk by a margin large enough that linear interpolation between
    nodes cannot dip below -1e-6; otherwise the expansion fails like any
    other infeasible steering attempt.
    """
    gains = params.gains
    bounds = params.omega_bounds
    v = u_ref.v

    def controller(state: RobotState, t: float) -> Optional[ControlInput]:
        rows = constraint_rows(state, v, obstacles, t, gains)
        solution = solve_scalar_qp(
            ScalarQpProblem(omega_ref=u_ref.omega, bounds=bounds, rows=tuple(rows))
        )
        if solution is None:
            return None
        return ControlInput(v, solution.omega_star)

    trajectory = integrate_closed_loop(
        vertex.state, vertex.time, t_h, params.dt, controller
    )
    if trajectory is None:
        return None
    if not _edge_clears_obstacles(trajectory, obstacles, v, params.dt):
        return None
    return trajectory, trajectory.final_state(), vertex.time + t_h


def _edge_clears_obstacles(
    trajectory: Trajectory,
    obstacles: Sequence[CircularObstacle],
    v: float,
    dt: float,
) -> bool:
    """Require h >= margin at every node, where margin is the worst-case
    barrier drop of a straight chord between consecutive nodes: the relative
    robot-obstacle displacement over one step is at most (v + v_obs) * dt,
    and the chord midpoint loses at most (L/2)^2 in squared distance."""
    v_obs = max((math.hypot(*ob.velocity) for ob in obstacles), default=0.0)
    margin = 0.25 * ((v + v_obs) * dt) ** 2
    for sample in trajectory.samples:
        for obstacle in obstacles:
            if barrier_value(sample.state, obstacle, sample.t) < margin:
                return False
    return True


def goal_check(
    trajectory: Trajectory, goal: tuple[float, float], epsilon: float
) -> bool:
    """True iff any trajectory node lies within epsilon of the goal position."""
    eps2 = epsilon * epsilon
    for sample in trajectory.samples:
        d1 = sample.state.x1 - goal[0]
        d2 = sample.state.x2 - goal[1]
        if d1 * d1 + d2 * d2 <= eps2:
            return True
    return False


def extract_path(tree: PlanTree, goal_vertex: int) -> Trajectory:
    """Concatenate edge trajectories from the root to goal_vertex.

    Junction samples (each edge starts where its parent edge ended) are
    deduplicated, keeping the child edge's sample since it carries the
    control actually applied next. A root-only path yields an empty
    trajectory.
    """
    if goal_vertex not in tree.vertices:
        raise KeyError(f"unknown vertex id {goal_vertex}")
    chain: list[int] = []
    v = tree.vertices[goal_vertex]
    while v.parent is not None:
        chain.append(v.id)
        v = tree.vertices[v.parent]
    chain.reverse()

    out = []
    for vid in chain:
        edge = tree.edges[vid].samples
        if out and _same_node(out[-1], edge[0]):
            out[-1] = edge[0]  # keep the child's control at the junction
            out.extend(edge[1:])
        else:
            out.extend(edge)
    return Trajectory(out)


def _same_node(a, b) -> bool:
    return (
        abs(a.t - b.t) <= 1e-9
        and abs(a.state.x1 - b.state.x1) <= 1e-9
        and abs(a.state.x2 - b.state.x2) <= 1e-9
    )


def validate_scenario(scenario: Scenario):
    """Reject scenarios violating the planner's preconditions."""
    scenario.params.validate()
    gains = scenario.params.gains
    if not (gains.k1 > 0.0 and gains.k2 > 0.0):
        raise ValueError("ECBF gains must be positive")
    for f in (scenario.x_init.x1, scenario.x_init.x2, scenario.x_init.theta):
        if not math.isfinite(f):
            raise ValueError("x_init must be finite")
    if not is_safe(scenario.x_init, scenario.obstacles, scenario.t_init):
        raise ValueError("x_init lies inside an obstacle at t_init")


def plan(scenario: Scenario) -> PlanResult:
    """Run CBF-RRT on the scenario until the goal region is reached or the
    iteration budget is exhausted.

    Failed expansions (infeasible QP at any node, or an edge that does not
    clear every disk with margin) add nothing to the tree but still consume
    an iteration, so the loop always terminates.
    """
    validate_scenario(scenario)
    params = scenario.params
    goal = scenario.x_goal
    rng = np.random.default_rng(params.seed)
    tree = PlanTree(scenario.x_init, scenario.t_init)

    dx = scenario.x_init.x1 - goal[0]
    dy = scenario.x_init.x2 - goal[1]
    if math.hypot(dx, dy) <= params.epsilon:
        return PlanResult(True, tree, [0], extract_path(tree, 0), 0)

    for iteration in range(1, params.max_iters + 1):
        picked = vertices_sample(tree, rng)
        expanding = state_sample(picked, goal, params.sigma2, rng)
        u_ref = reference_sample(rng, params)
        steered = safe_steer(expanding, params.t_h, u_ref, scenario.obstacles, params)
        if steered is None:
            continue
        trajectory, x_new, t_new = steered
        child = tree.add_child(picked.id, x_new, t_new, trajectory)
        if goal_check(trajectory, goal, params.epsilon):
            path_ids = _root_path(tree, child.id)
            return PlanResult(True, tree, path_ids, extract_path(tree, child.id), iteration)
    return PlanResult(False, tree, None, None, params.max_iters)


def _root_path(tree: PlanTree, vertex_id: int) -> list[int]:
    ids = []
    v = tree.vertices[vertex_id]
    while True:
        ids.append(v.id)
        if v.parent is None:
            break
        v = tree.vertices[v.parent]
    ids.reverse()
    return ids
