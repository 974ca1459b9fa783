import dataclasses
import math

import numpy as np
import pytest

from cbfrrt.dynamics import (
    CircularObstacle,
    ControlInput,
    RobotState,
    integrate_closed_loop,
)
from cbfrrt.planner import (
    PlannerParams,
    PlanTree,
    Scenario,
    Vertex,
    extract_path,
    goal_check,
    goal_heading,
    plan,
    reference_sample,
    safe_steer,
    state_sample,
    validate_scenario,
    vertices_sample,
)
from cbfrrt.qp import ScalarQpProblem, solve_scalar_qp
from cbfrrt.safety import EcbfGains, barrier_value, constraint_rows


def straight_edge(tree, parent_id, params):
    parent = tree.vertices[parent_id]
    out = safe_steer(parent, params.t_h, ControlInput(1.0, 0.0), (), params)
    traj, x_new, t_new = out
    return tree.add_child(parent_id, x_new, t_new, traj)


# ---------------------------------------------------------------- params


def test_params_validation():
    PlannerParams().validate()
    with pytest.raises(ValueError):
        PlannerParams(t_h=0.0).validate()
    with pytest.raises(ValueError):
        PlannerParams(dt=-0.1).validate()
    with pytest.raises(ValueError):
        PlannerParams(dt=0.6, t_h=0.5).validate()
    with pytest.raises(ValueError):
        PlannerParams(sigma2=-1.0).validate()
    with pytest.raises(ValueError):
        PlannerParams(epsilon=0.0).validate()
    with pytest.raises(ValueError):
        PlannerParams(max_iters=0).validate()
    with pytest.raises(ValueError):
        PlannerParams(omega_bounds=(1.0, -1.0)).validate()


# ---------------------------------------------------------------- sampling


def test_vertices_sample_single_vertex():
    tree = PlanTree(RobotState(0.0, 0.0, 0.0), 0.0)
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert vertices_sample(tree, rng).id == 0


def test_vertices_sample_uniform_frequencies():
    params = PlannerParams()
    tree = PlanTree(RobotState(0.0, 0.0, 0.0), 0.0)
    for _ in range(3):
        straight_edge(tree, len(tree) - 1, params)
    rng = np.random.default_rng(123)
    counts = np.zeros(4)
    for _ in range(10_000):
        counts[vertices_sample(tree, rng).id] += 1
    # binomial 3-sigma band around 2500
    assert np.all(np.abs(counts - 2500) <= 150)


def test_vertices_sample_deterministic():
    params = PlannerParams()
    tree = PlanTree(RobotState(0.0, 0.0, 0.0), 0.0)
    for _ in range(3):
        straight_edge(tree, len(tree) - 1, params)
    rng = np.random.default_rng(5)
    seq1 = [vertices_sample(tree, rng).id for _ in range(20)]
    rng = np.random.default_rng(5)
    seq2 = [vertices_sample(tree, rng).id for _ in range(20)]
    assert seq1 == seq2


def test_goal_heading_quadrants():
    assert goal_heading((0.0, 0.0), (1.0, 1.0)) == pytest.approx(math.pi / 4)
    # genuinely needs the two-argument arctangent
    assert goal_heading((0.0, 0.0), (-1.0, 0.0)) == pytest.approx(math.pi)
    assert goal_heading((0.0, 0.0), (0.0, -2.0)) == pytest.approx(-math.pi / 2)
    assert goal_heading((1.0, 1.0), (1.0, 1.0)) == 0.0


def test_state_sample_degenerate_variance():
    v = Vertex(0, RobotState(0.0, 0.0, 2.0), 0.7)
    out = state_sample(v, (1.0, 1.0), 0.0, np.random.default_rng(0))
    assert out.state.theta == pytest.approx(math.pi / 4)
    assert (out.state.x1, out.state.x2) == (0.0, 0.0)
    assert out.time == 0.7
    assert out.id == 0


def test_state_sample_mean():
    v = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)
    rng = np.random.default_rng(42)
    draws = [state_sample(v, (1.0, 1.0), 0.2, rng).state.theta for _ in range(10_000)]
    band = 3.0 * math.sqrt(0.2 / 10_000)
    assert abs(np.mean(draws) - math.pi / 4) <= band


def test_reference_sample_default_constant():
    params = PlannerParams()
    rng = np.random.default_rng(0)
    u = reference_sample(rng, params)
    assert (u.v, u.omega) == (1.0, 0.0)
    # constant reference must not consume randomness
    assert rng.uniform() == np.random.default_rng(0).uniform()


def test_reference_sample_uniform_hook():
    params = PlannerParams(omega_ref_range=(-1.0, 1.0))
    a = reference_sample(np.random.default_rng(3), params)
    b = reference_sample(np.random.default_rng(3), params)
    assert a == b
    assert -1.0 <= a.omega <= 1.0
    assert a.v == params.v_const


# ---------------------------------------------------------------- steering


def test_safe_steer_free_space_straight():
    params = PlannerParams()
    v0 = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)
    traj, x_new, t_new = safe_steer(v0, 0.5, ControlInput(1.0, 0.0), (), params)
    assert x_new.x1 == pytest.approx(0.5, abs=1e-9)
    assert x_new.x2 == pytest.approx(0.0, abs=1e-15)
    assert x_new.theta == 0.0
    assert t_new == 0.5
    assert len(traj) == 26  # 25 steps of 0.02 plus the terminal node


def test_safe_steer_head_on_fails_before_contact():
    params = PlannerParams()
    v0 = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)
    ob = CircularObstacle((1.0, 0.0), (0.0, 0.0), 0.2)
    assert safe_steer(v0, 0.5, ControlInput(1.0, 0.0), (ob,), params) is None


def test_safe_steer_swerves_around_offset_obstacle():
    params = PlannerParams()
    v0 = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)
    ob = CircularObstacle((0.5, 0.15), (0.0, 0.0), 0.2)
    out = safe_steer(v0, 0.5, ControlInput(1.0, 0.0), (ob,), params)
    assert out is not None
    traj, x_new, t_new = out
    assert x_new.theta != 0.0  # the filter had to steer
    assert min(barrier_value(s.state, ob, s.t) for s in traj.samples) >= 0.0
    assert t_new == 0.5
    # edge starts exactly at the vertex
    assert traj.samples[0].state == v0.state
    assert traj.samples[0].t == 0.0


def test_safe_steer_rejects_feasible_but_penetrating_edge():
    # with complex characteristic roots (k2^2 < 4 k1) the barrier rings below
    # zero while every per-node QP stays feasible; the raw closed loop drives
    # into the disk and the steering call must refuse the edge
    params = PlannerParams(gains=EcbfGains(0.6, 1.5), t_h=1.0)
    ob = CircularObstacle((0.6, 0.15), (0.0, 0.0), 0.2)
    v0 = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)

    def raw_controller(state, t):
        rows = constraint_rows(state, 1.0, (ob,), t, params.gains)
        sol = solve_scalar_qp(
            ScalarQpProblem(omega_ref=0.0, bounds=params.omega_bounds, rows=tuple(rows))
        )
        return None if sol is None else ControlInput(1.0, sol.omega_star)

    raw = integrate_closed_loop(v0.state, 0.0, params.t_h, params.dt, raw_controller)
    assert raw is not None  # every QP was feasible...
    assert min(barrier_value(s.state, ob, s.t) for s in raw.samples) < 0.0  # ...yet it collides
    assert safe_steer(v0, params.t_h, ControlInput(1.0, 0.0), (ob,), params) is None


def test_safe_steer_rejects_grazing_below_margin():
    # the disk is tangent to the path between two integration nodes: both
    # nodes are safe (h = +4e-5 at x = 0.24 and 0.26) yet the chord midpoint
    # is inside (h = -6e-5 at x = 0.25); only the node margin catches this
    params = PlannerParams()
    ob = CircularObstacle((0.25, 0.19985), (0.0, 0.0), 0.2)
    v0 = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)
    assert barrier_value(RobotState(0.24, 0.0, 0.0), ob, 0.0) > 0.0
    assert barrier_value(RobotState(0.25, 0.0, 0.0), ob, 0.0) < 0.0
    assert safe_steer(v0, 0.5, ControlInput(1.0, 0.0), (ob,), params) is None


# ---------------------------------------------------------------- goal / path


def test_goal_check():
    params = PlannerParams()
    v0 = Vertex(0, RobotState(1.9, 2.0, 0.0), 0.0)
    traj, _, _ = safe_steer(v0, 0.5, ControlInput(1.0, 0.0), (), params)
    assert goal_check(traj, (2.0, 2.0), 0.15)
    assert not goal_check(traj, (5.0, 5.0), 0.15)
    # interior node inside the goal disk counts even if the endpoint leaves it
    assert math.hypot(traj.final_state().x1 - 2.2, traj.final_state().x2 - 2.0) > 0.15
    assert goal_check(traj, (2.2, 2.0), 0.15)


def test_goal_check_interior_only():
    # straight edge passing through the disk and out the far side
    params = PlannerParams(t_h=1.0)
    v0 = Vertex(0, RobotState(0.0, 0.0, 0.0), 0.0)
    traj, x_new, _ = safe_steer(v0, 1.0, ControlInput(1.0, 0.0), (), params)
    assert math.hypot(x_new.x1 - 0.5, x_new.x2) > 0.15
    assert goal_check(traj, (0.5, 0.0), 0.15)


def test_extract_path_root_only():
    tree = PlanTree(RobotState(0.0, 0.0, 0.0), 0.0)
    assert len(extract_path(tree, 0)) == 0


def test_extract_path_two_edges():
    params = PlannerParams(dt=0.1)
    tree = PlanTree(RobotState(0.0, 0.0, 0.0), 0.0)
    v1 = straight_edge(tree, 0, params)
    v2 = straight_edge(tree, v1.id, params)
    path = extract_path(tree, v2.id)
    # 6 + 6 samples with the junction deduplicated
    assert len(path) == 11
    assert path.t0 == 0.0
    assert path.t_end == pytest.approx(1.0, abs=1e-12)
    ts = [s.t for s in path.samples]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_extract_path_unknown_vertex():
    tree = PlanTree(RobotState(0.0, 0.0, 0.0), 0.0)
    with pytest.raises(KeyError):
        extract_path(tree, 99)


# ---------------------------------------------------------------- plan


def test_validate_scenario_rejects_unsafe_start():
    params = PlannerParams()
    ob = CircularObstacle((0.0, 0.0), (0.0, 0.0), 0.2)
    sc = Scenario(RobotState(0.0, 0.0, 0.0), 0.0, (2.0, 2.0), (ob,), params)
    with pytest.raises(ValueError):
        validate_scenario(sc)


def test_gains_reject_nonpositive_values():
    # bad gains can never reach the planner: the dataclass refuses to build
    with pytest.raises(ValueError):
        EcbfGains(0.0, 4.0)
    with pytest.raises(ValueError):
        EcbfGains(2.0, -1.0)


def test_plan_reaches_goal_and_tree_is_consistent(example1_file):
    sc = example1_file.scenario
    result = plan(sc)
    assert result.success
    assert result.iterations >= 1
    tree = result.tree

    # single root, connected, acyclic; vertex times follow depth * t_h
    for vid in tree.vertex_ids():
        v = tree.vertices[vid]
        if vid == 0:
            assert v.parent is None
            continue
        assert v.parent in tree.vertices
        assert v.time == pytest.approx(
            sc.t_init + tree.depth(vid) * sc.params.t_h, abs=1e-9
        )
        edge = tree.edges[vid]
        parent = tree.vertices[v.parent]
        # edge endpoints must match parent (position, time) and child exactly
        assert edge.samples[0].t == pytest.approx(parent.time, abs=1e-9)
        assert edge.samples[0].state.x1 == pytest.approx(parent.state.x1, abs=1e-9)
        assert edge.samples[0].state.x2 == pytest.approx(parent.state.x2, abs=1e-9)
        assert edge.samples[-1].t == pytest.approx(v.time, abs=1e-9)
        assert edge.samples[-1].state == v.state
        # every applied control respects the box
        lo, hi = sc.params.omega_bounds
        for s in edge.samples:
            assert lo - 1e-12 <= s.control.omega <= hi + 1e-12
            assert s.control.v == sc.params.v_const

    # goal correctness on the extracted path
    assert result.controls.min_goal_distance(sc.x_goal) <= sc.params.epsilon
    assert result.path[0] == 0
    assert result.path[-1] == max(result.path)


def test_plan_edges_stay_safe(example1_file):
    sc = example1_file.scenario
    result = plan(sc)
    worst = min(
        barrier_value(s.state, ob, s.t)
        for edge in result.tree.edges.values()
        for s in edge.samples
        for ob in sc.obstacles
    )
    assert worst >= -1e-6


def test_plan_is_deterministic(example1_file):
    sc = example1_file.scenario
    a = plan(sc)
    b = plan(sc)
    assert a.iterations == b.iterations
    assert len(a.tree) == len(b.tree)
    assert a.tree.vertices[len(a.tree) - 1] == b.tree.vertices[len(b.tree) - 1]
    assert [s.t for s in a.controls.samples] == [s.t for s in b.controls.samples]


def test_plan_goal_already_reached():
    params = PlannerParams()
    sc = Scenario(RobotState(2.0, 2.05, 0.0), 0.0, (2.0, 2.0), (), params)
    result = plan(sc)
    assert result.success
    assert result.iterations == 0
    assert result.path == [0]
    assert len(result.controls) == 0


def test_plan_exhausts_budget(example1_file):
    sc = example1_file.scenario
    sc = dataclasses.replace(sc, params=dataclasses.replace(sc.params, max_iters=3))
    result = plan(sc)
    assert not result.success
    assert result.iterations == 3
    assert result.path is None
    assert result.controls is None


def test_failed_expansions_add_nothing():
    # boxed-in start: every expansion fails, the tree stays a lone root
    params = PlannerParams(max_iters=50, seed=1)
    obstacles = (
        CircularObstacle((0.45, 0.0), (0.0, 0.0), 0.2),
        CircularObstacle((-0.45, 0.0), (0.0, 0.0), 0.2),
        CircularObstacle((0.0, 0.45), (0.0, 0.0), 0.2),
        CircularObstacle((0.0, -0.45), (0.0, 0.0), 0.2),
    )
    sc = Scenario(RobotState(0.0, 0.0, 0.0), 0.0, (2.0, 2.0), obstacles, params)
    result = plan(sc)
    assert not result.success
    assert len(result.tree) == 1
