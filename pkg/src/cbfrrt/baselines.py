"""Classic RRT / RRT* baselines with end-point-only collision checks.

These planners work in the 2-D workspace and steer along straight segments,
ignoring the unicycle heading — the comparison is about path-level behavior,
and straight-line steering is not exactly trackable by the unicycle anyway.
Collision checking is deliberately end-point-only: each candidate vertex is
tested against the disks, but the segment reaching it is not. With step sizes
comparable to obstacle size that check is unsound; edge_collision_audit is
the dense oracle used to expose it.

Baselines only support static obstacles (the comparison world is static).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import CircularObstacle
from .planner import Scenario

Point = tuple[float, float]


@dataclass(frozen=True)
class BaselineParams:
    delta_d: float = 0.25
    max_iters: int = 2_000
    seed: int = 0
    sample_bounds: tuple[tuple[float, float], tuple[float, float]] = (
        (-1.0, 3.0),
        (-1.0, 3.0),
    )
    rewire_gamma: float = 2.0
    goal_bias: float = 0.0

    def validate(self):
        if not self.delta_d > 0.0:
            raise ValueError(f"delta_d must be > 0, got {self.delta_d}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        (x_lo, x_hi), (y_lo, y_hi) = self.sample_bounds
        if x_lo > x_hi or y_lo > y_hi:
            raise ValueError(f"sample_bounds reversed: {self.sample_bounds}")
        if not 0.0 <= self.goal_bias < 1.0:
            raise ValueError(f"goal_bias must be in [0, 1), got {self.goal_bias}")
        if self.rewire_gamma < 0.0:
            raise ValueError(f"rewire_gamma must be >= 0, got {self.rewire_gamma}")


@dataclass(frozen=True)
class GeomVertex:
    id: int
    position: Point
    parent: Optional[int] = None
    cost: float = 0.0


class GeomTree:
    """Workspace tree with a flat position array for vectorized NN scans."""

    def __init__(self, root: Point, capacity: int):
        self._pos = np.empty((capacity, 2), dtype=float)
        self._pos[0] = root
        self.parents: list[Optional[int]] = [None]
        self.costs: list[float] = [0.0]
        self.children: list[list[int]] = [[]]
        self.n = 1

    def __len__(self) -> int:
        return self.n

    def position(self, vid: int) -> Point:
        return (float(self._pos[vid, 0]), float(self._pos[vid, 1]))

    def positions(self) -> np.ndarray:
        return self._pos[: self.n]

    def vertex(self, vid: int) -> GeomVertex:
        return GeomVertex(vid, self.position(vid), self.parents[vid], self.costs[vid])

    def add(self, position: Point, parent: int, cost: float) -> int:
        vid = self.n
        self._pos[vid] = position
        self.parents.append(parent)
        self.costs.append(cost)
        self.children.append([])
        self.children[parent].append(vid)
        self.n = vid + 1
        return vid

    def reparent(self, vid: int, new_parent: int, new_cost: float):
        """Move vid under new_parent and propagate the cost delta downward."""
        old_parent = self.parents[vid]
        if old_parent is not None:
            self.children[old_parent].remove(vid)
        self.parents[vid] = new_parent
        self.children[new_parent].append(vid)
        delta = new_cost - self.costs[vid]
        stack = [vid]
        while stack:
            w = stack.pop()
            self.costs[w] += delta
            stack.extend(self.children[w])

    def root_path(self, vid: int) -> list[int]:
        ids = [vid]
        while self.parents[ids[-1]] is not None:
            ids.append(self.parents[ids[-1]])
        ids.reverse()
        return ids


@dataclass
class BaselineResult:
    success: bool
    tree: GeomTree
    path: Optional[list[int]]
    iterations: int
    cost: Optional[float] = None
    first_solution_iteration: Optional[int] = None
    first_solution_cost: Optional[float] = None


def random_state(
    bounds: tuple[tuple[float, float], tuple[float, float]],
    rng: np.random.Generator,
) -> Point:
    """Uniform sample over the rectangle (degenerate sides allowed)."""
    (x_lo, x_hi), (y_lo, y_hi) = bounds
    return (float(rng.uniform(x_lo, x_hi)), float(rng.uniform(y_lo, y_hi)))


def nearest_neighbor(tree: GeomTree, sample: Point) -> GeomVertex:
    """Linear-scan nearest vertex; ties go to the lowest id (argmin order)."""
    d = tree.positions() - np.asarray(sample)
    vid = int(np.argmin(np.einsum("ij,ij->i", d, d)))
    return tree.vertex(vid)


def steer_straight(x_nn: Point, x_sample: Point, delta_d: float) -> Point:
    """Reached (return the sample) if within delta_d, else advance delta_d
    along the straight line from x_nn toward x_sample."""
    dx = x_sample[0] - x_nn[0]
    dy = x_sample[1] - x_nn[1]
    dist = math.hypot(dx, dy)
    if dist <= delta_d:
        return x_sample
    scale = delta_d / dist
    return (x_nn[0] + scale * dx, x_nn[1] + scale * dy)


def endpoint_collision_check(
    point: Point, obstacles: Sequence[CircularObstacle]
) -> bool:
    """True iff the point is outside (or exactly on) every disk boundary.

    This is the whole collision model of the baselines — the segment that
    reaches the point is never tested.
    """
    for obstacle in obstacles:
        dx = point[0] - obstacle.center0[0]
        dy = point[1] - obstacle.center0[1]
        if dx * dx + dy * dy < obstacle.radius * obstacle.radius:
            return False
    return True


def edge_collision_audit(
    p0: Point,
    p1: Point,
    obstacles: Sequence[CircularObstacle],
    resolution: float,
) -> bool:
    """Dense oracle: check points every `resolution` meters along the
    segment, plus both endpoints. True iff every probe is safe."""
    if not resolution > 0.0:
        raise ValueError(f"resolution must be > 0, got {resolution}")
    length = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
    n = int(length / resolution)
    for k in range(n + 1):
        s = k * resolution / length if length > 0.0 else 0.0
        probe = (p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1]))
        if not endpoint_collision_check(probe, obstacles):
            return False
    return endpoint_collision_check(p1, obstacles)


def _require_static(obstacles: Sequence[CircularObstacle]):
    for i, obstacle in enumerate(obstacles):
        if not obstacle.is_static():
            raise ValueError(
                f"baselines only support static obstacles; obstacles[{i}] moves"
            )


def _sample_point(
    goal: Point, params: BaselineParams, rng: np.random.Generator
) -> Point:
    # Only touch the RNG for the bias coin when bias is active, so the
    # default draw sequence is pure uniform sampling.
    if params.goal_bias > 0.0 and float(rng.uniform()) < params.goal_bias:
        return goal
    return random_state(params.sample_bounds, rng)


def rrt_plan(scenario: Scenario, params: BaselineParams) -> BaselineResult:
    """Classic RRT: sample, nearest, steer, end-point check, add; stop at the
    first vertex within epsilon of the goal."""
    params.validate()
    _require_static(scenario.obstacles)
    root = scenario.x_init.position()
    goal = scenario.x_goal
    eps2 = scenario.params.epsilon ** 2
    rng = np.random.default_rng(params.seed)
    tree = GeomTree(root, params.max_iters + 1)

    if (root[0] - goal[0]) ** 2 + (root[1] - goal[1]) ** 2 <= eps2:
        return BaselineResult(True, tree, [0], 0, cost=0.0,
                              first_solution_iteration=0, first_solution_cost=0.0)

    for iteration in range(1, params.max_iters + 1):
        sample = _sample_point(goal, params, rng)
        nn = nearest_neighbor(tree, sample)
        if sample == nn.position:
            continue
        x_new = steer_straight(nn.position, sample, params.delta_d)
        if not endpoint_collision_check(x_new, scenario.obstacles):
            continue
        step = math.hypot(x_new[0] - nn.position[0], x_new[1] - nn.position[1])
        vid = tree.add(x_new, nn.id, nn.cost + step)
        if (x_new[0] - goal[0]) ** 2 + (x_new[1] - goal[1]) ** 2 <= eps2:
            cost = tree.costs[vid]
            return BaselineResult(True, tree, tree.root_path(vid), iteration,
                                  cost=cost, first_solution_iteration=iteration,
                                  first_solution_cost=cost)
    return BaselineResult(False, tree, None, params.max_iters)


def rrt_star_plan(scenario: Scenario, params: BaselineParams) -> BaselineResult:
    """RRT* (choose-parent + rewire) with the same end-point-only checks.

    Runs the full iteration budget to keep refining cost; the first solution
    found is recorded alongside the final best path. Rewire radius is
    min(rewire_gamma * sqrt(log n / n), delta_d), so every edge in the tree
    keeps length <= delta_d.
    """
    params.validate()
    _require_static(scenario.obstacles)
    root = scenario.x_init.position()
    goal = scenario.x_goal
    eps2 = scenario.params.epsilon ** 2
    rng = np.random.default_rng(params.seed)
    tree = GeomTree(root, params.max_iters + 1)
    goal_ids: list[int] = []
    first_iter: Optional[int] = None
    first_cost: Optional[float] = None

    if (root[0] - goal[0]) ** 2 + (root[1] - goal[1]) ** 2 <= eps2:
        return BaselineResult(True, tree, [0], 0, cost=0.0,
                              first_solution_iteration=0, first_solution_cost=0.0)

    for iteration in range(1, params.max_iters + 1):
        sample = _sample_point(goal, params, rng)
        nn = nearest_neighbor(tree, sample)
        if sample == nn.position:
            continue
        x_new = steer_straight(nn.position, sample, params.delta_d)
        if not endpoint_collision_check(x_new, scenario.obstacles):
            continue

        n = len(tree)
        radius = min(params.rewire_gamma * math.sqrt(math.log(n) / n), params.delta_d) \
            if n > 1 else 0.0
        d = tree.positions() - np.asarray(x_new)
        dists = np.sqrt(np.einsum("ij,ij->i", d, d))
        near = np.flatnonzero(dists <= radius) if radius > 0.0 else np.empty(0, int)

        # choose-parent: cheapest connection among the near set (falling back
        # to the nearest vertex when the near set is empty)
        parent = nn.id
        step = float(dists[nn.id])
        best_cost = tree.costs[nn.id] + step
        for j in near:
            c = tree.costs[j] + float(dists[j])
            if c < best_cost - 1e-12:
                parent = int(j)
                best_cost = c
        vid = tree.add(x_new, parent, best_cost)

        # rewire: route near vertices through x_new when that is cheaper
        for j in near:
            if j == parent:
                continue
            c = best_cost + float(dists[j])
            if c < tree.costs[j] - 1e-12:
                tree.reparent(int(j), vid, c)

        if (x_new[0] - goal[0]) ** 2 + (x_new[1] - goal[1]) ** 2 <= eps2:
            goal_ids.append(vid)
            if first_iter is None:
                first_iter = iteration
                first_cost = tree.costs[vid]

    if not goal_ids:
        return BaselineResult(False, tree, None, params.max_iters)
    best = min(goal_ids, key=lambda g: tree.costs[g])
    return BaselineResult(True, tree, tree.root_path(best), params.max_iters,
                          cost=tree.costs[best], first_solution_iteration=first_iter,
                          first_solution_cost=first_cost)
