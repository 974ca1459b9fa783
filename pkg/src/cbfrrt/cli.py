"""Command-line front end.

Exit codes (stable scripting contract):
  0  success
  1  a safety audit reported a violation (plan and audit subcommands)
  2  planner exhausted its iteration budget without reaching the goal
  3  invalid input (bad scenario/sweep/trajectory file, bad arguments)
  4  internal error
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from . import harness
from .harness import ScenarioError

EXIT_OK = 0
EXIT_AUDIT_FAIL = 1
EXIT_EXHAUSTED = 2
EXIT_INVALID_INPUT = 3
EXIT_INTERNAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbfrrt",
        description="CBF-RRT motion planner benchmark: plan with safety-filtered "
                    "steering, compare against RRT/RRT* baselines, audit "
                    "trajectories against obstacle disks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run one planner on a scenario and write artifacts")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--algorithm", default="cbf-rrt", choices=harness.ALGORITHMS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for artifacts")
    p.add_argument("--dt", type=float, default=None,
                   help="override the integration step (cbf-rrt)")
    p.add_argument("--max-iters", type=int, default=None,
                   help="override the iteration budget")

    c = sub.add_parser("compare", help="run an (algorithm, step) x seeds sweep")
    c.add_argument("--scenario", required=True)
    c.add_argument("--sweep", required=True,
                   help="JSON list of {algorithm, step} entries")
    c.add_argument("--seeds", required=True,
                   help="either a count N (seeds 0..N-1) or a comma list like 3,7,9")
    c.add_argument("--out", required=True, help="output directory")
    c.add_argument("--threads", type=int, default=None,
                   help="parallel runs (default: CBFRRT_THREADS or CPU count)")

    a = sub.add_parser("audit", help="re-check a trajectory CSV against a scenario")
    a.add_argument("--trajectory", required=True, help="trajectory CSV file")
    a.add_argument("--scenario", required=True)
    a.add_argument("--dt-audit", type=float, default=None,
                   help="audit sampling interval (default: scenario dt / 4)")
    return parser


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    try:
        if "," in text:
            return [int(part) for part in text.split(",") if part.strip() != ""]
        n = int(text)
    except ValueError as e:
        raise ScenarioError(f"--seeds: expected a count or comma list, got {text!r}") from e
    if n < 1:
        raise ScenarioError(f"--seeds: count must be >= 1, got {n}")
    return list(range(n))


def _cmd_plan(args) -> int:
    scenario_file = harness.load_scenario(args.scenario)
    if args.dt is not None and args.dt <= 0:
        raise ScenarioError(f"--dt must be > 0, got {args.dt}")
    if args.max_iters is not None and args.max_iters < 1:
        raise ScenarioError(f"--max-iters must be >= 1, got {args.max_iters}")
    report = harness.run(scenario_file, args.algorithm, args.seed, args.out,
                         dt=args.dt, max_iters=args.max_iters)
    if report.success:
        audit = "pass" if report.audit_pass else "FAIL"
        print(f"{args.algorithm} seed={args.seed}: reached goal in "
              f"{report.iterations} iterations ({report.vertices} vertices), "
              f"path {report.path_length:.3f} m / {report.path_duration:.3f} s, "
              f"min barrier {report.min_barrier:.6f} m^2, audit {audit}, "
              f"wall {report.wall_time:.3f} s")
        print(f"artifacts written to {Path(args.out).resolve()}")
        return EXIT_OK if report.audit_pass else EXIT_AUDIT_FAIL
    print(f"{args.algorithm} seed={args.seed}: exhausted after "
          f"{report.iterations} iterations ({report.vertices} vertices), "
          f"wall {report.wall_time:.3f} s")
    print(f"artifacts written to {Path(args.out).resolve()}")
    return EXIT_EXHAUSTED


def _cmd_compare(args) -> int:
    scenario_file = harness.load_scenario(args.scenario)
    sweep = harness.load_sweep(args.sweep)
    seeds = _parse_seeds(args.seeds)
    if args.threads is not None and args.threads < 1:
        raise ScenarioError(f"--threads must be >= 1, got {args.threads}")
    out_path = Path(args.out) / "comparison.csv"
    table = harness.compare(scenario_file, sweep, seeds, out_path,
                            threads=args.threads)
    sys.stdout.write(table)
    print(f"comparison written to {out_path.resolve()}")
    return EXIT_OK


def _cmd_audit(args) -> int:
    scenario_file = harness.load_scenario(args.scenario)
    try:
        trajectory = harness.read_trajectory_csv(args.trajectory)
    except (OSError, ValueError) as e:
        raise ScenarioError(f"--trajectory: {e}") from e
    dt_audit = args.dt_audit
    if dt_audit is None:
        dt_audit = scenario_file.scenario.params.dt / 4.0
    elif dt_audit <= 0:
        raise ScenarioError(f"--dt-audit must be > 0, got {dt_audit}")
    ok, min_barrier = harness.audit_trajectory(
        trajectory, scenario_file.scenario.obstacles, dt_audit)
    shown = "n/a" if min_barrier is None else f"{min_barrier:.9f}"
    print(f"audit {'pass' if ok else 'FAIL'}: min barrier {shown} m^2 "
          f"over {len(trajectory)} samples at dt_audit={dt_audit}")
    return EXIT_OK if ok else EXIT_AUDIT_FAIL


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_audit(args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
