"""Node-placement heuristics for the k-center problem.

Every solver takes an :class:`~kcenter.core.Instance` and a
:class:`SolverConfig` and returns ``(Solution, SolveTrace)``. All randomness
comes from a generator seeded with ``cfg.seed``, so repeated calls agree
bit-for-bit.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import Instance, Solution, make_solution


class SolverKind(str, enum.Enum):
    DRAGOON = "dragoon"
    TWO_APPROX = "two_approx"
    MACQUEEN = "macqueen"
    GREEDY = "greedy"
    BACKTRACK = "backtrack"

    @classmethod
    def parse(cls, name: str) -> "SolverKind":
        key = name.strip().lower().replace("-", "_")
        aliases = {"2approx": "two_approx", "2_approx": "two_approx", "twoapprox": "two_approx"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown solver {name!r} (expected one of: {valid})") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SolverConfig:
    kind: SolverKind
    seed: int = 0
    backtrack_max_steps: int = 1000
    macqueen_max_iters: int = 500
    # 2-Approx starts from the 1-center node unless this is set
    random_start: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", SolverKind.parse(str(self.kind)))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.backtrack_max_steps < 1 or self.macqueen_max_iters < 1:
            raise ValueError("solver iteration caps must be >= 1")

    def with_seed(self, seed: int) -> "SolverConfig":
        return replace(self, seed=int(seed))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(int(self.seed))


@dataclass
class SolveTrace:
    stage_objectives: list[tuple[str, float]] = field(default_factory=list)
    iterations: int = 0

    def record(self, label: str, value: float) -> None:
        self.stage_objectives.append((label, float(value)))

    def to_json(self) -> dict:
        return {
            "stages": [[label, value] for label, value in self.stage_objectives],
            "iterations": self.iterations,
        }


def one_center(inst: Instance) -> int:
    """Customer index whose farthest customer is closest (lowest index on ties)."""
    return int(inst.dist.max(axis=0).argmin())


def _farthest_unused(nearest: np.ndarray, used: np.ndarray) -> int:
    masked = np.where(used, -1.0, nearest)
    return int(masked.argmax())


def _farthest_point_fill(inst: Instance, centers: list[int], nearest: np.ndarray) -> list[int]:
    """Extend ``centers`` by farthest-point placement until it holds k indices."""
    d = inst.dist
    used = np.zeros(inst.n, dtype=bool)
    used[centers] = True
    while len(centers) < inst.k:
        c = _farthest_unused(nearest, used)
        centers.append(c)
        used[c] = True
        nearest = np.minimum(nearest, d[:, c])
    return centers


def solve_two_approx(inst: Instance, cfg: SolverConfig) -> tuple[Solution, SolveTrace]:
    trace = SolveTrace()
    if cfg.random_start:
        first = int(cfg.rng().integers(inst.n))
    else:
        first = one_center(inst)
    centers = _farthest_point_fill(inst, [first], inst.dist[:, first].copy())
    sol = make_solution(inst, centers)
    trace.record("farthest_point", sol.objective)
    return sol, trace


def _nearest_without(d: np.ndarray, centers: list[int], slot: int) -> np.ndarray:
    others = centers[:slot] + centers[slot + 1:]
    if not others:
        return np.full(d.shape[0], np.inf)
    return d[:, others].min(axis=1)


def _relocation_objectives(d: np.ndarray, base: np.ndarray) -> np.ndarray:
    """Objective obtained by adding each customer as a center to the ``base`` nearest distances."""
    return np.minimum(base[:, None], d).max(axis=0)


def solve_dragoon(inst: Instance, cfg: SolverConfig) -> tuple[Solution, SolveTrace]:
    d = inst.dist
    trace = SolveTrace()

    virtual = one_center(inst)
    first = _farthest_unused(d[:, virtual], np.zeros(inst.n, dtype=bool))
    centers = _farthest_point_fill(inst, [first], d[:, first].copy())
    current = float(d[:, centers].min(axis=1).max())
    trace.record("stage2", current)

    # local improvement: first strictly improving node, nearest candidates first
    while True:
        moved = False
        centers.sort()
        for slot in range(len(centers)):
            c = centers[slot]
            base = _nearest_without(d, centers, slot)
            objs = _relocation_objectives(d, base)
            order = np.argsort(d[c], kind="stable")
            used = np.zeros(inst.n, dtype=bool)
            used[centers] = True
            cand = order[~used[order]]
            better = cand[objs[cand] < current]
            if better.size:
                centers[slot] = int(better[0])
                current = float(objs[better[0]])
                moved = True
        trace.iterations += 1
        trace.record(f"sweep{trace.iterations}", current)
        if not moved:
            break

    sol = make_solution(inst, centers)
    return sol, trace


def solve_macqueen(
    inst: Instance, cfg: SolverConfig, *, initial: Sequence[int] | None = None
) -> tuple[Solution, SolveTrace]:
    """k-means style relocation with every center snapped back onto a customer node.

    ``initial`` overrides the seeded random starting placement.
    """
    d = inst.dist
    xy = inst.coords
    n, k = inst.n, inst.k
    trace = SolveTrace()
    if initial is None:
        centers = [int(c) for c in cfg.rng().choice(n, size=k, replace=False)]
    else:
        centers = [int(c) for c in initial]
        if len(set(centers)) != k or not all(0 <= c < n for c in centers):
            raise ValueError(f"initial placement must be {k} distinct customer indices")

    for _ in range(cfg.macqueen_max_iters):
        trace.iterations += 1
        order = sorted(centers)
        owner_pos = d[:, order].argmin(axis=1)
        new = list(order)
        for slot in range(k):
            members = owner_pos == slot
            if not members.any():
                continue
            centroid = xy[members].mean(axis=0)
            gap = xy - centroid
            snap = np.sqrt(gap[:, 0] * gap[:, 0] + gap[:, 1] * gap[:, 1])
            taken = new[:slot] + new[slot + 1:]
            snap[taken] = np.inf
            new[slot] = int(snap.argmin())
        trace.record(f"iter{trace.iterations}", float(d[:, new].min(axis=1).max()))
        if set(new) == set(order):
            centers = new
            break
        centers = new

    return make_solution(inst, centers), trace


def solve_greedy(inst: Instance, cfg: SolverConfig) -> tuple[Solution, SolveTrace]:
    d = inst.dist
    rng = cfg.rng()
    trace = SolveTrace()
    used = np.zeros(inst.n, dtype=bool)
    nearest = np.full(inst.n, np.inf)
    centers: list[int] = []
    for _ in range(inst.k):
        objs = _relocation_objectives(d, nearest)
        objs[used] = np.inf
        ties = np.flatnonzero(objs == objs.min())
        c = int(ties[rng.integers(ties.size)]) if ties.size > 1 else int(ties[0])
        centers.append(c)
        used[c] = True
        nearest = np.minimum(nearest, d[:, c])
        trace.record(f"place{len(centers)}", float(objs[c]))
    return make_solution(inst, centers), trace


def solve_backtrack(inst: Instance, cfg: SolverConfig) -> tuple[Solution, SolveTrace]:
    d = inst.dist
    greedy, _ = solve_greedy(inst, cfg)
    trace = SolveTrace()
    centers = list(greedy.centers)
    current = greedy.objective
    trace.record("greedy", current)
    steps = 0

    while steps < cfg.backtrack_max_steps:
        moved = False
        centers.sort()
        for slot in range(len(centers)):
            if steps >= cfg.backtrack_max_steps:
                break
            base = _nearest_without(d, centers, slot)
            objs = _relocation_objectives(d, base)
            objs[centers] = np.inf
            c = int(objs.argmin())
            if objs[c] < current:
                centers[slot] = c
                current = float(objs[c])
                steps += 1
                moved = True
        trace.iterations += 1
        trace.record(f"sweep{trace.iterations}", current)
        if not moved:
            break

    return make_solution(inst, centers), trace


SOLVERS = {
    SolverKind.DRAGOON: solve_dragoon,
    SolverKind.TWO_APPROX: solve_two_approx,
    SolverKind.MACQUEEN: solve_macqueen,
    SolverKind.GREEDY: solve_greedy,
    SolverKind.BACKTRACK: solve_backtrack,
}


def solve(inst: Instance, cfg: SolverConfig) -> tuple[Solution, SolveTrace]:
    """Dispatch to the solver named by ``cfg.kind``."""
    return SOLVERS[cfg.kind](inst, cfg)
