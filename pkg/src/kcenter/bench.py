"""Random instances, the experiment setups and the three comparison campaigns."""
from __future__ import annotations

import csv
import hashlib
import statistics
from concurrent.futures import Executor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .adversary import EAConfig, EvolutionResult, evolve
from .core import Instance, write_instance
from .solvers import SolverConfig, SolverKind, solve


@dataclass(frozen=True)
class SetupSpec:
    customers: int
    centers: int
    label: str

    @property
    def name(self) -> str:
        return f"{self.customers}/{self.centers}"


# Setup V is 49/4; some average-case tables print that row as "64 / 4".
SETUPS = (
    SetupSpec(10, 2, "I"),
    SetupSpec(25, 4, "II"),
    SetupSpec(36, 4, "III"),
    SetupSpec(49, 9, "IV"),
    SetupSpec(49, 4, "V"),
    SetupSpec(64, 16, "VI"),
)


def get_setup(name: str) -> SetupSpec:
    """Look up a setup by roman label (``"II"``) or by ``"customers/centers"``."""
    key = name.strip().upper()
    for s in SETUPS:
        if key == s.label or key.replace(" ", "") == s.name:
            return s
    if "/" in key:
        n, k = (int(v) for v in key.split("/", 1))
        if not 1 <= k <= n:
            raise ValueError(f"invalid custom setup {name!r}: need 1 <= centers <= customers")
        return SetupSpec(n, k, f"{n}/{k}")
    raise ValueError(f"unknown setup {name!r}")


@dataclass(frozen=True)
class ComparisonRecord:
    instance_id: str
    setup_label: str
    challenger: str
    challenged: str
    d_challenger: float
    d_challenged: float
    delta_d: float
    instance_index: int = -1


@dataclass
class ChallengerStats:
    mean: float
    min: float
    max: float
    count: int


@dataclass
class CampaignSummary:
    setup: SetupSpec
    challenged: str
    stats: dict[str, ChallengerStats]
    records: list[ComparisonRecord] = field(default_factory=list, repr=False)


def instance_id(inst: Instance) -> str:
    return hashlib.sha256(inst.canonical_json().encode()).hexdigest()[:16]


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed from integer parts."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0])


def random_instance(setup: SetupSpec, rng: np.random.Generator) -> Instance:
    """Customers uniform in the open square (0, 100)^2."""
    xy = rng.random((setup.customers, 2))
    while np.any(xy == 0.0):
        zero = xy == 0.0
        xy[zero] = rng.random(int(zero.sum()))
    return Instance.from_array(100.0 * xy, setup.centers)


def campaign_instance(setup: SetupSpec, master_seed: int, index: int) -> Instance:
    return random_instance(setup, np.random.default_rng(derive_seed(master_seed, index)))


def _solver_for(cfg: SolverConfig, master_seed: int, index: int) -> SolverConfig:
    # solvers sharing cfg.seed share the per-instance stream (keeps Backtrack >= Greedy comparable)
    return cfg.with_seed(derive_seed(master_seed, index, cfg.seed, 1))


def _average_task(args) -> list[ComparisonRecord]:
    setup, challenged, challengers, master_seed, index = args
    inst = campaign_instance(setup, master_seed, index)
    iid = instance_id(inst)
    d_ref = solve(inst, _solver_for(challenged, master_seed, index))[0].objective
    out = []
    for ch in challengers:
        d = solve(inst, _solver_for(ch, master_seed, index))[0].objective
        out.append(
            ComparisonRecord(iid, setup.label, ch.kind.value, challenged.kind.value, d, d_ref, d - d_ref, index)
        )
    return out


def _summarize(setup, challenged, challengers, records) -> CampaignSummary:
    stats = {}
    for ch in challengers:
        deltas = [r.delta_d for r in records if r.challenger == ch.kind.value]
        stats[ch.kind.value] = ChallengerStats(
            mean=statistics.fmean(deltas), min=min(deltas), max=max(deltas), count=len(deltas)
        )
    return CampaignSummary(setup, challenged.kind.value, stats, records)


def run_average_campaign(
    setup: SetupSpec,
    challenged: SolverConfig,
    challengers: Sequence[SolverConfig],
    n_instances: int,
    seed: int,
    executor: Executor | None = None,
) -> CampaignSummary:
    """Compare every challenger against ``challenged`` on ``n_instances`` random instances."""
    if n_instances < 1:
        raise ValueError("n_instances must be >= 1")
    if not challengers:
        raise ValueError("at least one challenger is required")
    kinds = [c.kind for c in challengers]
    if len(set(kinds)) != len(kinds):
        raise ValueError("duplicate challenger kinds")
    tasks = [(setup, challenged, tuple(challengers), seed, i) for i in range(n_instances)]
    mapper = map if executor is None else executor.map
    records = [r for chunk in mapper(_average_task, tasks) for r in chunk]
    return _summarize(setup, challenged, challengers, records)


@dataclass
class AdversarialOutcome:
    challenger: str
    challenged: str
    seed: int
    best_delta: float
    best_instance: Instance
    result: EvolutionResult = field(repr=False)


def _ea_for(template: EAConfig, setup: SetupSpec, challenger: SolverConfig, challenged: SolverConfig, seed: int) -> EAConfig:
    return replace(
        template,
        n_customers=setup.customers,
        k=setup.centers,
        challenger=challenger,
        challenged=challenged,
        seed=int(seed),
    )


def run_adversarial_campaign(
    setup: SetupSpec,
    pairs: Sequence[tuple[SolverConfig, SolverConfig]],
    ea: EAConfig,
    seeds: Sequence[int],
    executor: Executor | None = None,
) -> list[AdversarialOutcome]:
    """Evolve adversarial instances for every (challenger, challenged) pair and seed."""
    if not pairs or not seeds:
        raise ValueError("pairs and seeds must be non-empty")
    out = []
    for challenger, challenged in pairs:
        for s in seeds:
            res = evolve(_ea_for(ea, setup, challenger, challenged, s), executor)
            out.append(
                AdversarialOutcome(
                    challenger.kind.value, challenged.kind.value, int(s), res.best_fitness, res.best_instance, res
                )
            )
    return out


def best_per_pair(outcomes: Iterable[AdversarialOutcome]) -> dict[tuple[str, str], AdversarialOutcome]:
    best: dict[tuple[str, str], AdversarialOutcome] = {}
    for o in outcomes:
        key = (o.challenger, o.challenged)
        if key not in best or o.best_delta < best[key].best_delta:
            best[key] = o
    return best


def run_matrix_campaign(
    setup: SetupSpec,
    kinds: Sequence[SolverKind | str],
    ea: EAConfig,
    seeds: Sequence[int],
    executor: Executor | None = None,
    solver_seed: int = 0,
) -> dict[tuple[str, str], float]:
    """Best delta-D found for every ordered pair of distinct solver kinds."""
    parsed = [SolverKind.parse(str(k)) for k in kinds]
    if len(parsed) < 2:
        raise ValueError("matrix campaign needs at least two solver kinds")
    if len(set(parsed)) != len(parsed):
        raise ValueError(f"duplicate solver kinds in {[k.value for k in parsed]}")
    pairs = [
        (SolverConfig(a, seed=solver_seed), SolverConfig(b, seed=solver_seed))
        for a in parsed
        for b in parsed
        if a != b
    ]
    best = best_per_pair(run_adversarial_campaign(setup, pairs, ea, seeds, executor))
    return {key: o.best_delta for key, o in best.items()}


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def fmt(value: float) -> str:
    """Shortest round-trip decimal, independent of locale."""
    return repr(float(value))


RECORD_FIELDS = ["instance_id", "setup_label", "challenger", "challenged", "d_challenger", "d_challenged", "delta_d"]


def write_records_csv(records: Iterable[ComparisonRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([
                r.instance_id, r.setup_label, r.challenger, r.challenged,
                fmt(r.d_challenger), fmt(r.d_challenged), fmt(r.delta_d),
            ])


def write_summary_csv(summaries: Sequence[CampaignSummary], path) -> None:
    """One row per setup, one mean delta-D column per challenger."""
    columns: list[str] = []
    for s in summaries:
        columns.extend(c for c in s.stats if c not in columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["setup", "customers", "centers", "challenged", "instances"] + columns)
        for s in summaries:
            counts = {st.count for st in s.stats.values()}
            w.writerow(
                [s.setup.label, s.setup.customers, s.setup.centers, s.challenged, max(counts)]
                + [fmt(s.stats[c].mean) if c in s.stats else "" for c in columns]
            )


def write_adversarial_outputs(setup: SetupSpec, outcomes: Sequence[AdversarialOutcome], out_dir) -> Path:
    """Persist each best instance as JSON and a report CSV listing them."""
    out_dir = Path(out_dir)
    inst_dir = out_dir / "instances"
    inst_dir.mkdir(parents=True, exist_ok=True)
    report = out_dir / "adversary.csv"
    with open(report, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["setup", "challenger", "challenged", "seed", "best_delta_d", "instance_id", "instance_file"])
        for o in outcomes:
            name = f"{o.challenger}_vs_{o.challenged}_seed{o.seed}.json"
            write_instance(o.best_instance, inst_dir / name)
            w.writerow([
                setup.label, o.challenger, o.challenged, o.seed, fmt(o.best_delta),
                instance_id(o.best_instance), f"instances/{name}",
            ])
    return report


def write_matrix_csv(matrix: dict[tuple[str, str], float], kinds: Sequence[str], path) -> None:
    """Rows are challengers, columns challenged; the diagonal is left empty."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["challenger"] + list(kinds))
        for a in kinds:
            w.writerow([a] + ["" if a == b else fmt(matrix[(a, b)]) for b in kinds])
