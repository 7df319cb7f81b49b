"""Command-line front end.

Exit codes: 0 success, 2 input validation error, 3 instance too large for the
exact solver.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import secrets
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .adversary import EAConfig
from .bench import (
    SETUPS,
    best_per_pair,
    derive_seed,
    fmt,
    get_setup,
    run_adversarial_campaign,
    run_average_campaign,
    run_matrix_campaign,
    write_adversarial_outputs,
    write_matrix_csv,
    write_records_csv,
    write_summary_csv,
)
from .core import EXACT_CAP, InstanceError, InstanceTooLarge, assign, read_instance, solve_exact
from .solvers import SolverConfig, SolverKind, solve

DEFAULT_SEED = 20160101
EXIT_INPUT = 2
EXIT_TOO_LARGE = 3


class UsageError(Exception):
    pass


def _kinds(text: str) -> list[SolverKind]:
    try:
        return [SolverKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _kind(text: str) -> SolverKind:
    try:
        return SolverKind.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _solver_cfg(args, kind, seed) -> SolverConfig:
    return SolverConfig(
        kind,
        seed=seed,
        backtrack_max_steps=args.backtrack_max_steps,
        macqueen_max_iters=args.macqueen_max_iters,
        random_start=getattr(args, "random_start", False),
    )


def _executor(jobs: int):
    if jobs and jobs > 1:
        return ProcessPoolExecutor(max_workers=jobs)
    return contextlib.nullcontext()


def _emit(doc: dict, out) -> None:
    text = json.dumps(doc, indent=2)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def _solution_doc(inst, sol, extra: dict) -> dict:
    return {
        **extra,
        "k": inst.k,
        "centers": list(sol.centers),
        "center_coordinates": [list(inst.customers[c]) for c in sol.centers],
        "objective": sol.objective,
    }


# ---------------------------------------------------------------------------
# single-instance commands
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    cfg = _solver_cfg(args, _kind(args.solver), args.seed)
    sol, trace = solve(inst, cfg)
    doc = _solution_doc(inst, sol, {"solver": cfg.kind.value, "seed": cfg.seed})
    doc["trace"] = trace.to_json()
    _emit(doc, args.out)
    if args.plot:
        from .plotting import plot_solutions
        plot_solutions(inst, {cfg.kind.value: sol.centers}, args.plot)
    return 0


def cmd_exact(args) -> int:
    inst = read_instance(args.instance)
    sol = solve_exact(inst, cap=args.cap)
    _emit(_solution_doc(inst, sol, {"solver": "exact"}), args.out)
    return 0


def _read_solution(path, inst) -> list[int]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or "centers" not in doc:
        raise UsageError("solution file is missing field 'centers'")
    centers = doc["centers"]
    if not isinstance(centers, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in centers):
        raise UsageError("field 'centers' must be a list of integer customer indices")
    if not centers or len(set(centers)) != len(centers):
        raise UsageError("field 'centers' must be non-empty and hold distinct indices")
    bad = [c for c in centers if not 0 <= c < inst.n]
    if bad:
        raise UsageError(f"solution does not match instance: center indices {bad} out of range for {inst.n} customers")
    if "k" in doc and doc["k"] != inst.k:
        raise UsageError(f"solution does not match instance: solution k={doc['k']} but instance k={inst.k}")
    if len(centers) != inst.k:
        raise UsageError(f"solution does not match instance: {len(centers)} centers but instance k={inst.k}")
    return centers


def cmd_dump_geometry(args) -> int:
    inst = read_instance(args.instance)
    centers = _read_solution(args.solution, inst)
    a = assign(inst, centers)
    xy = inst.coords
    rows = [["record", "index", "x", "y", "owner", "owner_x", "owner_y", "distance"]]
    for i in range(inst.n):
        rows.append(["customer", i, fmt(xy[i, 0]), fmt(xy[i, 1]), "", "", "", ""])
    for c in sorted(centers):
        rows.append(["center", c, fmt(xy[c, 0]), fmt(xy[c, 1]), "", "", "", ""])
    for i in range(inst.n):
        o = int(a.owner[i])
        rows.append(["segment", i, fmt(xy[i, 0]), fmt(xy[i, 1]), o, fmt(xy[o, 0]), fmt(xy[o, 1]), fmt(a.dist[i])])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    finally:
        if args.out:
            fh.close()
    if args.plot:
        from .plotting import plot_solutions
        plot_solutions(inst, {Path(args.solution).stem: centers}, args.plot)
    return 0


# ---------------------------------------------------------------------------
# campaigns
# ---------------------------------------------------------------------------

def _resolve_seed(args) -> None:
    if args.entropy:
        args.seed = secrets.randbits(63)
        args.entropy = False


def _write_manifest(command: str, args, out_dir: Path, artifacts: list[str]) -> None:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    manifest = {
        "tool": "kcenter",
        "version": __version__,
        "command": command,
        "argv": _argv_for(command, params),
        "parameters": params,
        "master_seed": args.seed,
        "artifacts": artifacts,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _argv_for(command: str, params: dict) -> list[str]:
    argv = [command]
    for key, value in sorted(params.items()):
        if value is None or value is False or key in ("out",):
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            for v in value:
                argv += [flag, str(v)]
        else:
            argv += [flag, str(value)]
    return argv


def _setups(args, default=None):
    if args.customers is not None or args.centers is not None:
        if args.customers is None or args.centers is None:
            raise UsageError("--customers and --centers must be given together")
        return [get_setup(f"{args.customers}/{args.centers}")]
    names = args.setup or default or [s.label for s in SETUPS]
    try:
        return [get_setup(n) for n in names]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _ea_template(args, n: int, k: int, solver_seed: int) -> EAConfig:
    dummy = SolverConfig(SolverKind.DRAGOON, seed=solver_seed)
    return EAConfig(
        n_customers=n,
        k=k,
        challenger=dummy,
        challenged=dummy,
        population=args.population,
        generations=args.generations,
        mutation_sigma=args.sigma,
        recombination_prob=args.recombination_prob,
        recombination_alpha=args.alpha,
        tournament_size=args.tournament_size,
    )


def _run_seeds(args) -> list[int]:
    return [derive_seed(args.seed, run) for run in range(args.runs)]


def cmd_average(args) -> int:
    _resolve_seed(args)
    setups = _setups(args)
    challenged = _solver_cfg(args, _kind(args.challenged), args.solver_seed)
    challengers = [_solver_cfg(args, k, args.solver_seed) for k in _kinds(args.challengers)]
    if not challengers:
        raise UsageError("--challengers must name at least one solver")
    if len({c.kind for c in challengers}) != len(challengers):
        raise UsageError("--challengers contains duplicates")
    if args.instances < 1:
        raise UsageError("--instances must be >= 1")
    out = Path(args.out)
    artifacts = ["records.csv", "summary.csv"] + ([] if args.no_plots else ["summary.png"])
    _write_manifest("average", args, out, artifacts)

    summaries, records = [], []
    with _executor(args.jobs) as ex:
        for setup in setups:
            s = run_average_campaign(setup, challenged, challengers, args.instances, args.seed, ex)
            summaries.append(s)
            records.extend(s.records)
    write_records_csv(records, out / "records.csv")
    write_summary_csv(summaries, out / "summary.csv")
    if not args.no_plots:
        from .plotting import plot_average_summary
        plot_average_summary(summaries, out / "summary.png")

    for s in summaries:
        cells = "  ".join(f"{c}={st.mean:+.2f}" for c, st in s.stats.items())
        print(f"{s.setup.label:>4} {s.setup.name:>6}  {cells}")
    return 0


def cmd_adversary(args) -> int:
    _resolve_seed(args)
    setups = _setups(args, ["I"])
    if len(setups) != 1:
        raise UsageError("adversary runs on exactly one setup")
    setup = setups[0]
    challenged = _solver_cfg(args, _kind(args.challenged), args.solver_seed)
    challengers = [_solver_cfg(args, k, args.solver_seed) for k in _kinds(args.challenger)]
    if not challengers:
        raise UsageError("--challenger must name at least one solver")
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    ea = _ea_template(args, setup.customers, setup.centers, args.solver_seed)
    out = Path(args.out)
    _write_manifest("adversary", args, out, ["adversary.csv", "instances/"])

    with _executor(args.jobs) as ex:
        outcomes = run_adversarial_campaign(setup, [(c, challenged) for c in challengers], ea, _run_seeds(args), ex)
    write_adversarial_outputs(setup, outcomes, out)
    best = best_per_pair(outcomes)
    if not args.no_plots:
        from .plotting import plot_fitness_histories, plot_solutions
        plot_fitness_histories(outcomes, out / "fitness.png")
        for (a, b), o in best.items():
            inst = o.best_instance
            sols = {
                a: solve(inst, _solver_cfg(args, a, args.solver_seed))[0].centers,
                b: solve(inst, _solver_cfg(args, b, args.solver_seed))[0].centers,
            }
            plot_solutions(inst, sols, out / f"best_{a}_vs_{b}.png")
    for (a, b), o in best.items():
        print(f"{a} vs {b}: best dD = {o.best_delta:+.4f} (seed {o.seed})")
    return 0


def cmd_matrix(args) -> int:
    _resolve_seed(args)
    setups = _setups(args, ["V"])
    if len(setups) != 1:
        raise UsageError("matrix runs on exactly one setup")
    setup = setups[0]
    kinds = _kinds(args.kinds)
    if len(kinds) < 2:
        raise UsageError("--kinds needs at least two solvers")
    if len(set(kinds)) != len(kinds):
        raise UsageError(f"--kinds contains duplicates: {args.kinds}")
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    ea = _ea_template(args, setup.customers, setup.centers, args.solver_seed)
    out = Path(args.out)
    _write_manifest("matrix", args, out, ["matrix.csv"] + ([] if args.no_plots else ["matrix.png"]))

    with _executor(args.jobs) as ex:
        matrix = run_matrix_campaign(setup, kinds, ea, _run_seeds(args), ex, solver_seed=args.solver_seed)
    names = [k.value for k in kinds]
    write_matrix_csv(matrix, names, out / "matrix.csv")
    if not args.no_plots:
        from .plotting import plot_matrix
        plot_matrix(matrix, names, out / "matrix.png")
    print((out / "matrix.csv").read_text(), end="")
    return 0


def cmd_replay(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    try:
        command = manifest["command"]
        params = dict(manifest["parameters"])
    except (KeyError, TypeError):
        raise UsageError("manifest is missing 'command' or 'parameters'") from None
    if command not in CAMPAIGNS:
        raise UsageError(f"manifest command {command!r} cannot be replayed")
    params["out"] = args.out
    ns = argparse.Namespace(**params)
    return CAMPAIGNS[command](ns)


CAMPAIGNS = {"average": cmd_average, "adversary": cmd_adversary, "matrix": cmd_matrix}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_solver_flags(p) -> None:
    p.add_argument("--backtrack-max-steps", type=int, default=1000)
    p.add_argument("--macqueen-max-iters", type=int, default=500)


def _add_campaign_flags(p, default_out: str) -> None:
    p.add_argument("--setup", action="append",
                   help="setup label (I..VI) or 'customers/centers'; repeatable for average")
    p.add_argument("--customers", type=int)
    p.add_argument("--centers", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    p.add_argument("--entropy", action="store_true", help="draw the master seed from OS entropy")
    p.add_argument("--solver-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=default_out, help="output directory")
    p.add_argument("--no-plots", action="store_true")
    _add_solver_flags(p)


def _add_ea_flags(p) -> None:
    p.add_argument("--population", type=int, default=20)
    p.add_argument("--generations", type=int, default=100)
    p.add_argument("--sigma", type=float, default=0.05, help="mutation standard deviation")
    p.add_argument("--recombination-prob", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=0.5, help="arithmetic recombination weight")
    p.add_argument("--tournament-size", type=int, default=2)
    p.add_argument("--runs", type=int, default=10, help="independently seeded EA runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcenter", description="k-center heuristics and adversarial benchmarks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance file with a heuristic")
    p.add_argument("instance")
    p.add_argument("--solver", default="dragoon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-start", action="store_true", help="2-Approx: seeded random first center")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="also write the solution JSON here")
    p.add_argument("--plot", help="write a PNG of the solution")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="optimal solution by exhaustive enumeration")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=EXACT_CAP, help="maximum number of subsets to enumerate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("average", help="average delta-D over random instances")
    _add_campaign_flags(p, "results/average")
    p.add_argument("--challenged", default="dragoon")
    p.add_argument("--challengers", default="macqueen,two_approx,greedy,backtrack")
    p.add_argument("--instances", type=int, default=1000)
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("adversary", help="evolve instances where a challenger beats the challenged solver")
    _add_campaign_flags(p, "results/adversary")
    _add_ea_flags(p)
    p.add_argument("--challenger", default="macqueen,two_approx,greedy,backtrack")
    p.add_argument("--challenged", default="dragoon")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("matrix", help="adversarial search for every ordered solver pair")
    _add_campaign_flags(p, "results/matrix")
    _add_ea_flags(p)
    p.add_argument("--kinds", default="macqueen,backtrack,two_approx,greedy,dragoon")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("dump-geometry", help="points and segments of a solution as CSV")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--plot", help="write a PNG of the solution")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_dump_geometry)

    p = sub.add_parser("replay", help="rerun a campaign from its manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, help="output directory for the rerun")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("setups", help="list the built-in experiment setups")
    p.set_defaults(func=lambda args: print("\n".join(f"{s.label}\t{s.customers}\t{s.centers}" for s in SETUPS)) or 0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, UsageError, FileNotFoundError) as exc:
        print(f"kcenter: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InstanceTooLarge as exc:
        print(f"kcenter: error: {exc}; raise --cap to enumerate anyway", file=sys.stderr)
        return EXIT_TOO_LARGE
    except ValueError as exc:
        print(f"kcenter: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
