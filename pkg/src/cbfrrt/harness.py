"""Experiment harness: scenario files, runs, comparisons, safety audits.

A scenario JSON file fully describes a problem (start, goal, obstacles,
planner and baseline parameters); the seed comes from the caller so one file
drives a whole sweep. Every run re-audits its output trajectory against the
obstacles by dense interpolation — the report's audit_pass is always computed
here, never taken from planner-internal flags.

Reports are split into report.json (deterministic, byte-reproducible for a
fixed (scenario, algorithm, seed)) and timing.json (wall-clock, varies run to
run). All files are written atomically (temp + rename).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .baselines import (
    BaselineParams,
    BaselineResult,
    GeomTree,
    rrt_plan,
    rrt_star_plan,
)
from .dynamics import (
    CircularObstacle,
    ControlInput,
    RobotState,
    Trajectory,
    TrajectorySample,
    obstacle_center_at,
)
from .planner import PlannerParams, PlanResult, PlanTree, Scenario, plan
from .safety import EcbfGains, barrier_value

ALGORITHMS = ("cbf-rrt", "rrt", "rrt-star")

TRAJECTORY_HEADER = "t,x1,x2,theta,v,omega"

AUDIT_TOL = -1e-6


class ScenarioError(Exception):
    """Base for anything wrong with a scenario file (exit code 3)."""


class ScenarioParseError(ScenarioError):
    """File is not well-formed JSON."""


class ScenarioValidationError(ScenarioError):
    """Schema violation; message names the offending field path."""


class InfeasibleScenarioError(ScenarioError):
    """Scenario is well-formed but the problem itself is ill-posed."""


@dataclass(frozen=True)
class ScenarioFile:
    """Parsed scenario document: the planner Scenario plus everything the
    harness needs around it."""

    scenario: Scenario
    baseline: BaselineParams
    name: str
    goal_horizon: float
    metadata: dict


@dataclass
class RunReport:
    algorithm: str
    seed: int
    success: bool
    wall_time: float
    iterations: int
    vertices: int
    path_length: Optional[float]
    path_duration: Optional[float]
    min_barrier: Optional[float]
    audit_pass: Optional[bool]


# ---------------------------------------------------------------------------
# scenario files


def _fail(path: str, message: str):
    raise ScenarioValidationError(f"{path}: {message}")


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        _fail(f"{where}.{key}" if where else key, "missing required field")
    return doc[key]


def _finite(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        _fail(path, f"must be finite, got {value!r}")
    return value


def _vector(value, path: str, n: int) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        _fail(path, f"expected a list of {n} numbers, got {value!r}")
    return tuple(_finite(v, f"{path}[{i}]") for i, v in enumerate(value))


def _point_segment_distance(p: tuple[float, float], a: tuple[float, float],
                            b: tuple[float, float]) -> float:
    """Distance from point p to the segment a-b (closed form)."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = p[0] - a[0], p[1] - a[1]
    denom = abx * abx + aby * aby
    s = 0.0 if denom == 0.0 else max(0.0, min(1.0, (apx * abx + apy * aby) / denom))
    return math.hypot(apx - s * abx, apy - s * aby)


def load_scenario(path) -> ScenarioFile:
    """Parse and validate a scenario JSON file.

    Raises ScenarioParseError for malformed JSON, ScenarioValidationError
    (naming the field path) for schema violations, InfeasibleScenarioError
    when the problem is ill-posed (start inside an obstacle, or an obstacle
    sweeping through the goal disk within goal_horizon).
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, dict):
        _fail(str(path), "top level must be a JSON object")

    schema = doc.get("schema")
    if schema != 1:
        _fail("schema", f"unsupported schema version {schema!r} (expected 1)")

    x_init = _vector(_require(doc, "x_init", ""), "x_init", 3)
    x_goal = _vector(_require(doc, "x_goal", ""), "x_goal", 2)
    t_init = _finite(doc.get("t_init", 0.0), "t_init")
    goal_horizon = _finite(doc.get("goal_horizon", 20.0), "goal_horizon")
    if goal_horizon <= 0.0:
        _fail("goal_horizon", f"must be > 0, got {goal_horizon}")

    raw_obstacles = _require(doc, "obstacles", "")
    if not isinstance(raw_obstacles, list):
        _fail("obstacles", "expected a list")
    obstacles = []
    for i, entry in enumerate(raw_obstacles):
        where = f"obstacles[{i}]"
        if not isinstance(entry, dict):
            _fail(where, "expected an object")
        center = _vector(_require(entry, "center", where), f"{where}.center", 2)
        radius = _finite(_require(entry, "radius", where), f"{where}.radius")
        if radius <= 0.0:
            _fail(f"{where}.radius", f"must be > 0, got {radius}")
        velocity = _vector(entry.get("velocity", [0.0, 0.0]), f"{where}.velocity", 2)
        obstacles.append(CircularObstacle(center, velocity, radius))

    pdoc = doc.get("planner", {})
    if not isinstance(pdoc, dict):
        _fail("planner", "expected an object")
    defaults = PlannerParams()
    def pfield(key, fallback):
        return _finite(pdoc.get(key, fallback), f"planner.{key}")
    k1 = pfield("k1", 2.0)
    k2 = pfield("k2", 4.0)
    if k1 <= 0.0:
        _fail("planner.k1", f"must be > 0, got {k1}")
    if k2 <= 0.0:
        _fail("planner.k2", f"must be > 0, got {k2}")
    omega_bounds = _vector(pdoc.get("omega_bounds", list(defaults.omega_bounds)),
                           "planner.omega_bounds", 2)
    omega_ref_range = pdoc.get("omega_ref_range")
    if omega_ref_range is not None:
        omega_ref_range = _vector(omega_ref_range, "planner.omega_ref_range", 2)
    max_iters = pdoc.get("max_iters", defaults.max_iters)
    if isinstance(max_iters, bool) or not isinstance(max_iters, int):
        _fail("planner.max_iters", f"expected an integer, got {max_iters!r}")
    params = PlannerParams(
        t_h=pfield("t_h", defaults.t_h),
        dt=pfield("dt", defaults.dt),
        sigma2=pfield("sigma2", defaults.sigma2),
        epsilon=pfield("epsilon", defaults.epsilon),
        gains=EcbfGains(k1, k2),
        v_const=pfield("v_const", defaults.v_const),
        omega_ref=pfield("omega_ref", defaults.omega_ref),
        omega_bounds=(omega_bounds[0], omega_bounds[1]),
        max_iters=max_iters,
        omega_ref_range=omega_ref_range,
    )
    try:
        params.validate()
    except ValueError as e:
        raise ScenarioValidationError(f"planner: {e}") from e

    bdoc = doc.get("baseline", {})
    if not isinstance(bdoc, dict):
        _fail("baseline", "expected an object")
    bdefaults = BaselineParams()
    raw_bounds = bdoc.get("sample_bounds", [list(b) for b in bdefaults.sample_bounds])
    if not isinstance(raw_bounds, list) or len(raw_bounds) != 2:
        _fail("baseline.sample_bounds", "expected [[x_lo, x_hi], [y_lo, y_hi]]")
    sample_bounds = (
        _vector(raw_bounds[0], "baseline.sample_bounds[0]", 2),
        _vector(raw_bounds[1], "baseline.sample_bounds[1]", 2),
    )
    b_iters = bdoc.get("max_iters", bdefaults.max_iters)
    if isinstance(b_iters, bool) or not isinstance(b_iters, int):
        _fail("baseline.max_iters", f"expected an integer, got {b_iters!r}")
    baseline = BaselineParams(
        delta_d=_finite(bdoc.get("delta_d", bdefaults.delta_d), "baseline.delta_d"),
        max_iters=b_iters,
        sample_bounds=sample_bounds,
        rewire_gamma=_finite(bdoc.get("rewire_gamma", bdefaults.rewire_gamma),
                             "baseline.rewire_gamma"),
        goal_bias=_finite(bdoc.get("goal_bias", bdefaults.goal_bias),
                          "baseline.goal_bias"),
    )
    try:
        baseline.validate()
    except ValueError as e:
        raise ScenarioValidationError(f"baseline: {e}") from e

    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        _fail("metadata", "expected an object")

    scenario = Scenario(
        x_init=RobotState(*x_init),
        t_init=t_init,
        x_goal=(x_goal[0], x_goal[1]),
        obstacles=tuple(obstacles),
        params=params,
    )
    _check_feasibility(scenario, goal_horizon)
    return ScenarioFile(
        scenario=scenario,
        baseline=baseline,
        name=str(doc.get("name", path.stem)),
        goal_horizon=goal_horizon,
        metadata=metadata,
    )


def _check_feasibility(scenario: Scenario, goal_horizon: float):
    t0 = scenario.t_init
    for i, obstacle in enumerate(scenario.obstacles):
        if barrier_value(scenario.x_init, obstacle, t0) < 0.0:
            raise InfeasibleScenarioError(
                f"x_init lies inside obstacles[{i}] at t_init"
            )
        a = obstacle_center_at(obstacle, t0)
        b = obstacle_center_at(obstacle, t0 + goal_horizon)
        clearance = _point_segment_distance(scenario.x_goal, a, b)
        if clearance < scenario.params.epsilon + obstacle.radius:
            raise InfeasibleScenarioError(
                f"obstacles[{i}] enters the goal disk within goal_horizon "
                f"(clearance {clearance:.4f} m < "
                f"{scenario.params.epsilon + obstacle.radius:.4f} m)"
            )


def write_scenario(scenario_file: ScenarioFile, path):
    """Inverse of load_scenario; round-trips field-for-field."""
    s = scenario_file.scenario
    p = s.params
    doc = {
        "schema": 1,
        "name": scenario_file.name,
        "x_init": [s.x_init.x1, s.x_init.x2, s.x_init.theta],
        "t_init": s.t_init,
        "x_goal": list(s.x_goal),
        "goal_horizon": scenario_file.goal_horizon,
        "obstacles": [
            {"center": list(o.center0), "radius": o.radius,
             "velocity": list(o.velocity)}
            for o in s.obstacles
        ],
        "planner": {
            "t_h": p.t_h, "dt": p.dt, "sigma2": p.sigma2, "epsilon": p.epsilon,
            "k1": p.gains.k1, "k2": p.gains.k2, "v_const": p.v_const,
            "omega_ref": p.omega_ref, "omega_bounds": list(p.omega_bounds),
            "max_iters": p.max_iters,
        },
        "baseline": {
            "delta_d": scenario_file.baseline.delta_d,
            "max_iters": scenario_file.baseline.max_iters,
            "sample_bounds": [list(b) for b in scenario_file.baseline.sample_bounds],
            "rewire_gamma": scenario_file.baseline.rewire_gamma,
            "goal_bias": scenario_file.baseline.goal_bias,
        },
        "metadata": scenario_file.metadata,
    }
    if p.omega_ref_range is not None:
        doc["planner"]["omega_ref_range"] = list(p.omega_ref_range)
    _atomic_write(path, json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# auditing


def audit_trajectory(
    trajectory: Trajectory,
    obstacles: Sequence[CircularObstacle],
    dt_audit: float,
    tol: float = AUDIT_TOL,
) -> tuple[bool, Optional[float]]:
    """Independently verify a trajectory against the obstacles.

    Interpolates the trajectory linearly at dt_audit spacing (plus the exact
    final time) and evaluates every barrier at the matching obstacle time.
    Returns (pass, min_barrier); an empty trajectory trivially passes with
    min_barrier None.
    """
    if not dt_audit > 0.0:
        raise ValueError(f"dt_audit must be > 0, got {dt_audit}")
    samples = trajectory.samples
    if not samples or not obstacles:
        return True, None
    ts = np.array([s.t for s in samples])
    x1 = np.array([s.state.x1 for s in samples])
    x2 = np.array([s.state.x2 for s in samples])
    t0, t_end = float(ts[0]), float(ts[-1])
    taus = np.arange(t0, t_end, dt_audit)
    taus = np.append(taus, t_end)
    xi1 = np.interp(taus, ts, x1)
    xi2 = np.interp(taus, ts, x2)
    min_h = math.inf
    for obstacle in obstacles:
        c1 = obstacle.center0[0] + obstacle.velocity[0] * taus
        c2 = obstacle.center0[1] + obstacle.velocity[1] * taus
        h = (xi1 - c1) ** 2 + (xi2 - c2) ** 2 - obstacle.radius ** 2
        min_h = min(min_h, float(h.min()))
    return min_h >= tol, min_h


# ---------------------------------------------------------------------------
# running


def _polyline_trajectory(points: list[tuple[float, float]], t_init: float,
                         v_const: float, theta_init: float) -> Trajectory:
    """Synthesize a timed trajectory from a baseline polyline: constant speed
    along each segment, heading = segment direction, time = arclength / v."""
    if len(points) == 1:
        state = RobotState(points[0][0], points[0][1], theta_init)
        return Trajectory([TrajectorySample(t_init, state, ControlInput(0.0, 0.0))])
    samples = []
    t = t_init
    for k in range(len(points) - 1):
        p, q = points[k], points[k + 1]
        heading = math.atan2(q[1] - p[1], q[0] - p[0])
        samples.append(TrajectorySample(
            t, RobotState(p[0], p[1], heading), ControlInput(v_const, 0.0)))
        t += math.hypot(q[0] - p[0], q[1] - p[1]) / v_const
    last = points[-1]
    samples.append(TrajectorySample(
        t, RobotState(last[0], last[1], samples[-1].state.theta),
        ControlInput(v_const, 0.0)))
    return Trajectory(samples)


def execute(
    scenario_file: ScenarioFile,
    algorithm: str,
    seed: int,
    dt: Optional[float] = None,
    max_iters: Optional[int] = None,
):
    """Run one planner on the scenario. Returns (RunReport, trajectory, tree)
    where trajectory is None on failure and tree is the planner's tree object."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    scenario = scenario_file.scenario
    params = replace(scenario.params, seed=seed)
    if dt is not None:
        params = replace(params, dt=dt)
    if algorithm == "cbf-rrt" and max_iters is not None:
        params = replace(params, max_iters=max_iters)
    scenario = replace(scenario, params=params)

    dt_audit = params.dt / 4.0

    if algorithm == "cbf-rrt":
        start = time.perf_counter()
        result: PlanResult = plan(scenario)
        wall = time.perf_counter() - start
        trajectory = result.controls if result.success else None
        tree = result.tree
        iterations = result.iterations
        vertices = len(tree)
        if trajectory is not None:
            path_length = trajectory.path_length()
            path_duration = (trajectory.t_end - trajectory.t0
                             if trajectory.samples else 0.0)
        else:
            path_length = None
            path_duration = None
    else:
        baseline = replace(scenario_file.baseline, seed=seed)
        if max_iters is not None:
            baseline = replace(baseline, max_iters=max_iters)
        planner_fn = rrt_plan if algorithm == "rrt" else rrt_star_plan
        start = time.perf_counter()
        bresult: BaselineResult = planner_fn(scenario, baseline)
        wall = time.perf_counter() - start
        tree = bresult.tree
        iterations = bresult.iterations
        vertices = len(tree)
        if bresult.success:
            points = [tree.position(v) for v in bresult.path]
            trajectory = _polyline_trajectory(
                points, scenario.t_init, params.v_const, scenario.x_init.theta)
            path_length = bresult.cost
            path_duration = (bresult.cost / params.v_const
                             if params.v_const > 0 else None)
        else:
            trajectory = None
            path_length = None
            path_duration = None

    if trajectory is not None:
        audit_pass, min_barrier = audit_trajectory(
            trajectory, scenario.obstacles, dt_audit)
    else:
        audit_pass, min_barrier = None, None

    report = RunReport(
        algorithm=algorithm,
        seed=seed,
        success=trajectory is not None,
        wall_time=wall,
        iterations=iterations,
        vertices=vertices,
        path_length=path_length,
        path_duration=path_duration,
        min_barrier=min_barrier,
        audit_pass=audit_pass,
    )
    return report, trajectory, tree


def run(
    scenario_file: ScenarioFile,
    algorithm: str,
    seed: int,
    out_dir,
    dt: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> RunReport:
    """execute() plus artifacts: trajectory.csv, tree.json, report.json
    (deterministic) and timing.json (wall clock, volatile) in out_dir."""
    report, trajectory, tree = execute(scenario_file, algorithm, seed,
                                       dt=dt, max_iters=max_iters)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / "trajectory.csv", format_trajectory_csv(trajectory))
    _atomic_write(out / "tree.json", _format_tree_json(algorithm, tree))
    _atomic_write(out / "report.json", format_report_json(report))
    _atomic_write(out / "timing.json",
                  json.dumps({"wall_time_s": report.wall_time}, indent=2) + "\n")
    return report


# ---------------------------------------------------------------------------
# serialization


def _atomic_write(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def format_trajectory_csv(trajectory: Optional[Trajectory]) -> str:
    lines = [TRAJECTORY_HEADER]
    if trajectory is not None:
        for s in trajectory.samples:
            lines.append(
                f"{s.t!r},{s.state.x1!r},{s.state.x2!r},{s.state.theta!r},"
                f"{s.control.v!r},{s.control.omega!r}"
            )
    return "\n".join(lines) + "\n"


def read_trajectory_csv(path) -> Trajectory:
    path = Path(path)
    with path.open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TRAJECTORY_HEADER.split(","):
            raise ValueError(
                f"{path}: expected header {TRAJECTORY_HEADER!r}, got {header!r}")
        samples = []
        for row in reader:
            if not row:
                continue
            if len(row) != 6:
                raise ValueError(f"{path}: expected 6 columns, got {row!r}")
            t, x1, x2, theta, v, omega = map(float, row)
            samples.append(TrajectorySample(
                t, RobotState(x1, x2, theta), ControlInput(v, omega)))
    return Trajectory(samples)


def _format_tree_json(algorithm: str, tree) -> str:
    if isinstance(tree, PlanTree):
        vertices = [
            {"id": v.id, "x1": v.state.x1, "x2": v.state.x2,
             "theta": v.state.theta, "t": v.time, "parent": v.parent}
            for v in (tree.vertices[i] for i in tree.vertex_ids())
        ]
        edges = [
            {"id": eid, "parent": tree.vertices[eid].parent, "child": eid,
             "samples": [[s.t, s.state.x1, s.state.x2, s.state.theta,
                          s.control.v, s.control.omega]
                         for s in edge.samples]}
            for eid, edge in sorted(tree.edges.items())
        ]
    elif isinstance(tree, GeomTree):
        vertices = [
            {"id": i, "x": tree.position(i)[0], "y": tree.position(i)[1],
             "parent": tree.parents[i], "cost": tree.costs[i]}
            for i in range(len(tree))
        ]
        edges = [
            {"parent": tree.parents[i], "child": i}
            for i in range(1, len(tree))
        ]
    else:
        raise TypeError(f"unknown tree type {type(tree)!r}")
    return json.dumps(
        {"algorithm": algorithm, "vertices": vertices, "edges": edges}) + "\n"


def format_report_json(report: RunReport) -> str:
    # wall_time deliberately lives in timing.json: report.json must be
    # byte-identical across repeats of the same (scenario, algorithm, seed).
    doc = {
        "algorithm": report.algorithm,
        "seed": report.seed,
        "success": report.success,
        "iterations": report.iterations,
        "vertices": report.vertices,
        "path_length": report.path_length,
        "path_duration": report.path_duration,
        "min_barrier": report.min_barrier,
        "audit_pass": report.audit_pass,
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# comparison sweeps


def _apply_step(scenario_file: ScenarioFile, algorithm: str, step: float) -> ScenarioFile:
    """Interpret the sweep step for the given algorithm: steering horizon (s)
    for cbf-rrt, straight-line step delta_d (m) for the baselines."""
    if algorithm == "cbf-rrt":
        scenario = scenario_file.scenario
        params = replace(scenario.params, t_h=step)
        return replace(scenario_file, scenario=replace(scenario, params=params))
    return replace(scenario_file, baseline=replace(scenario_file.baseline, delta_d=step))


def _compare_task(scenario_file: ScenarioFile, algorithm: str, step: float,
                  seed: int):
    try:
        report, _, _ = execute(_apply_step(scenario_file, algorithm, step),
                               algorithm, seed)
        return (algorithm, step, seed, report, None)
    except Exception as e:  # propagate into the table, not up the stack
        return (algorithm, step, seed, None, f"{type(e).__name__}: {e}")


COMPARISON_HEADER = ("algorithm,step,seeds,successes,errors,"
                     "median_wall_time_s,median_vertices,audit_fail_rate")


def compare(
    scenario_file: ScenarioFile,
    sweep: Sequence[tuple[str, float]],
    seeds: Sequence[int],
    out_path,
    threads: Optional[int] = None,
) -> str:
    """Run the (algorithm, step) x seeds cross-product and write one
    aggregate CSV row per sweep entry.

    Runs may execute in parallel (capped by `threads`, the CBFRRT_THREADS
    env var, or the CPU count); results are sorted by (algorithm, step, seed)
    before aggregation so the table is deterministic either way. Per-run
    exceptions become the `errors` count instead of aborting the sweep.
    """
    if not seeds:
        raise ValueError("seeds list must not be empty")
    if not sweep:
        raise ValueError("sweep must not be empty")
    for algorithm, _step in sweep:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r} in sweep")

    tasks = [(algorithm, float(step), int(seed))
             for algorithm, step in sweep for seed in seeds]
    if threads is None:
        threads = int(os.environ.get("CBFRRT_THREADS", "0")) or os.cpu_count() or 1
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            results = list(pool.map(
                _compare_task,
                [scenario_file] * len(tasks),
                *zip(*tasks),
            ))
    else:
        results = [_compare_task(scenario_file, a, st, sd) for a, st, sd in tasks]
    results.sort(key=lambda r: (r[0], r[1], r[2]))

    rows = []
    for algorithm, step in sorted(set((a, s) for a, s, _ in tasks)):
        group = [r for r in results if r[0] == algorithm and r[1] == step]
        reports = [r[3] for r in group if r[3] is not None]
        errors = sum(1 for r in group if r[4] is not None)
        successes = sum(1 for r in reports if r.success)
        audited = [r for r in reports if r.success]
        med_wall = statistics.median(r.wall_time for r in reports) if reports else ""
        med_vertices = statistics.median(r.vertices for r in reports) if reports else ""
        fail_rate = (sum(1 for r in audited if not r.audit_pass) / len(audited)
                     if audited else "")
        rows.append({
            "algorithm": algorithm,
            "step": step,
            "seeds": len(group),
            "successes": successes,
            "errors": errors,
            "median_wall_time_s": med_wall,
            "median_vertices": med_vertices,
            "audit_fail_rate": fail_rate,
        })

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARISON_HEADER.split(","),
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buf.getvalue()
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(out_path, text)
    return text


def load_sweep(path) -> list[tuple[str, float]]:
    """Sweep file: JSON list of {"algorithm": ..., "step": ...} objects."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, list) or not doc:
        raise ScenarioValidationError(f"{path}: expected a non-empty JSON list")
    sweep = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            _fail(f"sweep[{i}]", "expected an object")
        algorithm = entry.get("algorithm")
        if algorithm not in ALGORITHMS:
            _fail(f"sweep[{i}].algorithm",
                  f"expected one of {ALGORITHMS}, got {algorithm!r}")
        step = _finite(_require(entry, "step", f"sweep[{i}]"), f"sweep[{i}].step")
        if step <= 0.0:
            _fail(f"sweep[{i}].step", f"must be > 0, got {step}")
        sweep.append((algorithm, step))
    return sweep
