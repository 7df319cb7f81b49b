"""Geometry, problem types and the k-center objective.

Centers always sit on customer locations (node placement), so a solution is
just a set of customer indices.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, NamedTuple, Sequence

import numpy as np

EXACT_CAP = 5_000_000


class InstanceError(ValueError):
    """Raised for malformed instance data."""


class InstanceTooLarge(ValueError):
    """Raised when exhaustive enumeration would exceed the subset cap."""


class Point(NamedTuple):
    x: float
    y: float


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    # same formula as Instance.dist so values agree bit-for-bit
    return math.sqrt(dx * dx + dy * dy)


@dataclass(frozen=True)
class Instance:
    """An ordered set of customer locations and the number of centers k."""

    customers: tuple[Point, ...]
    k: int

    def __post_init__(self):
        pts = tuple(Point(float(x), float(y)) for x, y in self.customers)
        object.__setattr__(self, "customers", pts)
        if not pts:
            raise InstanceError("customers must be non-empty")
        for i, p in enumerate(pts):
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InstanceError(f"customers[{i}] has a non-finite coordinate")
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise InstanceError(f"k must be an integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if not 1 <= self.k <= len(pts):
            raise InstanceError(f"k must satisfy 1 <= k <= {len(pts)}, got {self.k}")

    @property
    def n(self) -> int:
        return len(self.customers)

    @cached_property
    def coords(self) -> np.ndarray:
        a = np.array(self.customers, dtype=float).reshape(-1, 2)
        a.flags.writeable = False
        return a

    @cached_property
    def dist(self) -> np.ndarray:
        """Pairwise distance matrix, ``dist[i, j] = distance(customer i, customer j)``."""
        c = self.coords
        dx = c[:, 0][:, None] - c[:, 0][None, :]
        dy = c[:, 1][:, None] - c[:, 1][None, :]
        d = np.sqrt(dx * dx + dy * dy)
        d.flags.writeable = False
        return d

    @classmethod
    def from_array(cls, coords, k: int) -> "Instance":
        return cls(tuple(map(tuple, np.asarray(coords, dtype=float).reshape(-1, 2))), k)

    def to_json(self) -> dict:
        return {"k": self.k, "customers": [[p.x, p.y] for p in self.customers]}

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)


@dataclass(frozen=True)
class Solution:
    centers: tuple[int, ...]
    objective: float


@dataclass(frozen=True)
class Assignment:
    owner: np.ndarray = field(repr=False)
    dist: np.ndarray = field(repr=False)

    @property
    def objective(self) -> float:
        return float(self.dist.max())


def _check_centers(inst: Instance, centers: Iterable[int]) -> list[int]:
    cs = [int(c) for c in centers]
    if not cs:
        raise ValueError("no centers")
    for c in cs:
        if not 0 <= c < inst.n:
            raise ValueError(f"center index {c} out of range for {inst.n} customers")
    return cs


def evaluate_objective(inst: Instance, centers: Iterable[int]) -> float:
    """Largest distance from any customer to its nearest center."""
    cs = _check_centers(inst, centers)
    return float(inst.dist[:, cs].min(axis=1).max())


def assign(inst: Instance, centers: Iterable[int]) -> Assignment:
    """Nearest-center assignment; ties go to the lowest center index."""
    cs = sorted(set(_check_centers(inst, centers)))
    sub = inst.dist[:, cs]
    pos = sub.argmin(axis=1)  # first minimum, i.e. lowest index among ties
    owner = np.asarray(cs)[pos]
    d = sub[np.arange(inst.n), pos]
    return Assignment(owner=owner, dist=d)


def make_solution(inst: Instance, centers: Iterable[int]) -> Solution:
    cs = tuple(sorted(int(c) for c in centers))
    if len(set(cs)) != len(cs):
        raise ValueError(f"duplicate center indices in {cs}")
    return Solution(cs, evaluate_objective(inst, cs))


def solve_exact(inst: Instance, cap: int = EXACT_CAP, chunk: int = 50_000) -> Solution:
    """Optimal node-placement solution by enumerating every k-subset.

    Subsets are scanned in lexicographic order and only strictly better ones
    replace the incumbent, so the smallest co-optimal index set is returned.
    """
    n, k = inst.n, inst.k
    total = comb(n, k)
    if total > cap:
        raise InstanceTooLarge(
            f"instance too large for exact solver: C({n},{k}) = {total} subsets exceeds cap {cap}"
        )
    d = inst.dist
    best_val = math.inf
    best = None
    it = itertools.combinations(range(n), k)
    while True:
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(it, chunk)), dtype=np.intp
        )
        if block.size == 0:
            break
        block = block.reshape(-1, k)
        vals = d[:, block].min(axis=2).max(axis=0)
        j = int(vals.argmin())
        if vals[j] < best_val:
            best_val = float(vals[j])
            best = tuple(int(c) for c in block[j])
    return Solution(best, evaluate_objective(inst, best))


def load_instance(data: dict) -> Instance:
    """Build an Instance from its JSON document, naming the offending field on error."""
    if not isinstance(data, dict):
        raise InstanceError("instance document must be a JSON object")
    if "k" not in data:
        raise InstanceError("missing field 'k'")
    if "customers" not in data:
        raise InstanceError("missing field 'customers'")
    k = data["k"]
    if isinstance(k, bool) or not isinstance(k, int):
        raise InstanceError(f"field 'k' must be an integer, got {k!r}")
    raw = data["customers"]
    if not isinstance(raw, list) or not raw:
        raise InstanceError("field 'customers' must be a non-empty list of [x, y] pairs")
    pts = []
    for i, p in enumerate(raw):
        if (
            not isinstance(p, (list, tuple))
            or len(p) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)
        ):
            raise InstanceError(f"field 'customers[{i}]' must be a pair of numbers")
        pts.append((float(p[0]), float(p[1])))
    if k > len(pts):
        raise InstanceError(f"field 'k' ({k}) exceeds the number of customers ({len(pts)})")
    return Instance(tuple(pts), k)


def read_instance(path) -> Instance:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: not valid JSON ({exc})") from None
    return load_instance(data)


def write_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_json(), fh, indent=1)
        fh.write("\n")
