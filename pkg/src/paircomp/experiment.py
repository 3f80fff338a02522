"""Whole-experiment orchestration: pick instances, sample, test, diagnose.

The flow for one experiment:

1. compute the required number of instances for the design;
2. if the pool is smaller, warn with the power actually achievable at the
   pool size;
3. draw that many instances uniformly without replacement (deterministic
   under the master seed), or take the whole pool when requested;
4. adaptively sample both algorithms on each chosen instance;
5. run the designated paired test on the per-instance differences and
   attach normality diagnostics.

Per-instance seeds come from the master seed through a counter scheme
(see :mod:`paircomp.seeding`), so results are bit-reproducible and the
k-th instance's runs never depend on how many instances follow it.
Instances may be sampled concurrently when every runner declares itself
safe for concurrent invocation; the journal is written by the calling
thread only.  After each instance completes, its row is appended to a
newline-delimited checkpoint journal so an interrupted experiment can
resume without re-running finished instances.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path

from .design import (ComparisonDesign, TestFamily, calc_instances,
                     calc_power, validate_design)
from .errors import ConfigError, ExperimentAbortedError
from .estimators import DiffKind, PairedDifference, SEMethod
from .hypotests import (DiagnosticsBundle, TestReport, build_diagnostics,
                        paired_t_test, sign_test, wilcoxon_signed_rank)
from .runners import AlgorithmSpec, InstanceRef, make_runner
from .sampler import SamplingConfig, SamplingOutcome, calc_nreps
from .seeding import (DIAGNOSTICS_STREAM, INSTANCE_STREAM, SELECTION_STREAM,
                      derive_seed, make_generator)

__all__ = ["ExperimentPlan", "run_experiment"]

_JOURNAL_VERSION = 1


@dataclass(frozen=True)
class ExperimentPlan:
    design: ComparisonDesign
    sampling: SamplingConfig
    instance_pool: tuple[InstanceRef, ...]
    algorithms: tuple[AlgorithmSpec, AlgorithmSpec]
    master_seed: int
    use_all_instances: bool = False
    workers: int = 1
    sigma_phi_bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "instance_pool", tuple(self.instance_pool))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.instance_pool:
            raise ValueError("the instance pool must be nonempty")
        ids = [i.id for i in self.instance_pool]
        if len(set(ids)) != len(ids):
            raise ValueError("instance ids must be unique within the pool")
        a1, a2 = self.algorithms
        if a1.alias == a2.alias:
            raise ValueError("the two algorithm aliases must be distinct")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers!r}")


def _plan_fingerprint(plan: ExperimentPlan) -> str:
    payload = {
        "design": {k: (v.value if hasattr(v, "value") else v)
                   for k, v in asdict(plan.design).items()},
        "sampling": {k: (v.value if hasattr(v, "value") else v)
                     for k, v in asdict(plan.sampling).items()},
        "algorithms": [asdict(a) for a in plan.algorithms],
        "pool_ids": [i.id for i in plan.instance_pool],
        "master_seed": plan.master_seed,
        "use_all_instances": plan.use_all_instances,
    }
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _select_instances(plan: ExperimentPlan, n_required: int) -> list[InstanceRef]:
    pool = plan.instance_pool
    if plan.use_all_instances:
        return list(pool)
    count = min(n_required, len(pool))
    rng = make_generator(derive_seed(plan.master_seed, SELECTION_STREAM))
    idx = rng.choice(len(pool), size=count, replace=False)
    return [pool[int(i)] for i in idx]


def _diff_to_row(diff: PairedDifference) -> dict:
    return {
        "kind": "instance",
        "instance_id": diff.instance_id,
        "phi": diff.phi_hat,
        "se": diff.se_hat,
        "n1": diff.n1,
        "n2": diff.n2,
        "diff_kind": diff.diff_kind.value,
        "se_method": diff.se_method.value,
        "budget_exhausted": diff.budget_exhausted,
    }


def _row_to_diff(row: dict) -> PairedDifference:
    return PairedDifference(
        instance_id=row["instance_id"],
        phi_hat=float(row["phi"]),
        se_hat=float(row["se"]),
        n1=int(row["n1"]),
        n2=int(row["n2"]),
        diff_kind=DiffKind(row["diff_kind"]),
        se_method=SEMethod(row["se_method"]),
        budget_exhausted=bool(row["budget_exhausted"]),
    )


class _Journal:
    """Append-only newline-delimited record file keyed by instance id."""

    def __init__(self, path: Path, fingerprint: str, resume: bool):
        self.path = Path(path)
        self.fingerprint = fingerprint
        self.completed: dict[str, PairedDifference] = {}
        if resume and self.path.exists():
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            header = {"kind": "header", "version": _JOURNAL_VERSION,
                      "fingerprint": fingerprint}
            self.path.write_text(json.dumps(header) + "\n")

    def _load(self) -> None:
        lines = [ln for ln in self.path.read_text().splitlines() if ln.strip()]
        if not lines:
            raise ConfigError(f"checkpoint journal {self.path} is empty")
        header = json.loads(lines[0])
        if header.get("kind") != "header":
            raise ConfigError(f"checkpoint journal {self.path} has no header line")
        if header.get("fingerprint") != self.fingerprint:
            raise ConfigError(
                f"checkpoint journal {self.path} belongs to a different "
                f"experiment configuration; refusing to resume")
        for ln in lines[1:]:
            row = json.loads(ln)
            if row.get("kind") == "instance":
                self.completed[row["instance_id"]] = _row_to_diff(row)

    def append(self, diff: PairedDifference) -> None:
        with self.path.open("a") as fh:
            fh.write(json.dumps(_diff_to_row(diff)) + "\n")
        self.completed[diff.instance_id] = diff


def _run_test(family: TestFamily, phis, design: ComparisonDesign) -> TestReport:
    if family is TestFamily.T_TEST:
        return paired_t_test(phis, design.mu0, design.alpha, design.alternative)
    if family is TestFamily.WILCOXON:
        return wilcoxon_signed_rank(phis, design.mu0, design.alpha,
                                    design.alternative)
    return sign_test(phis, design.mu0, design.alpha, design.alternative)


def run_experiment(plan: ExperimentPlan, checkpoint_path: str | Path | None = None,
                   resume: bool = False) -> tuple[TestReport, DiagnosticsBundle]:
    """Execute the full comparison described by ``plan``.

    With a ``checkpoint_path``, each completed instance is journaled and
    ``resume=True`` skips instances already journaled under an identical
    configuration.  A failing instance aborts the experiment; the journal
    keeps everything completed so far.
    """
    warnings = validate_design(plan.design, plan.sampling, plan.sigma_phi_bound)
    size_result = calc_instances(plan.design)
    pool_size = len(plan.instance_pool)
    if size_result.n_instances > pool_size:
        if pool_size >= 2:
            achievable = calc_power(pool_size, plan.design.mres_d, plan.design)
            warnings.append(
                f"the design asks for {size_result.n_instances} instances but the "
                f"pool only has {pool_size}; power at the pool size is "
                f"{achievable:.6g} (target {plan.design.power_target:g}) -- "
                f"consider relaxing the design or adding instances")
        else:
            warnings.append(
                f"the design asks for {size_result.n_instances} instances but the "
                f"pool only has {pool_size}; no power is computable for a "
                f"single instance")

    selected = _select_instances(plan, size_result.n_instances)
    seeds = [derive_seed(plan.master_seed, INSTANCE_STREAM, k)
             for k in range(len(selected))]

    journal = None
    if checkpoint_path is not None:
        journal = _Journal(Path(checkpoint_path), _plan_fingerprint(plan), resume)

    runner1, runner2 = (make_runner(s) for s in plan.algorithms)
    workers = plan.workers
    if not (runner1.concurrent_safe and runner2.concurrent_safe):
        workers = 1

    completed: dict[str, PairedDifference] = dict(journal.completed) if journal else {}
    pending = [(inst, seed) for inst, seed in zip(selected, seeds)
               if inst.id not in completed]

    outcomes: dict[str, SamplingOutcome] = {}

    def sample_one(inst: InstanceRef, seed: int) -> SamplingOutcome:
        return calc_nreps(runner1, runner2, inst, plan.sampling, seed)

    try:
        if workers == 1 or len(pending) <= 1:
            for inst, seed in pending:
                outcome = sample_one(inst, seed)
                outcomes[inst.id] = outcome
                completed[inst.id] = outcome.diff
                if journal:
                    journal.append(outcome.diff)
        else:
            # journal rows land as instances complete, so an interrupt
            # loses at most the in-flight instances
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(sample_one, inst, seed): inst
                           for inst, seed in pending}
                try:
                    for fut in as_completed(futures):
                        outcome = fut.result()
                        inst = futures[fut]
                        outcomes[inst.id] = outcome
                        completed[inst.id] = outcome.diff
                        if journal:
                            journal.append(outcome.diff)
                except BaseException:
                    for fut in futures:
                        fut.cancel()
                    raise
    except Exception as exc:
        raise ExperimentAbortedError(
            exc, checkpoint_path=journal.path if journal else None,
            completed=len(completed)) from exc

    all_seeds = [s for oc in outcomes.values() for s in oc.seed_ledger]
    if len(set(all_seeds)) != len(all_seeds):
        raise RuntimeError("internal error: a run seed was reused within the "
                           "experiment")

    diffs = [completed[inst.id] for inst in selected]
    phis = [d.phi_hat for d in diffs]
    report = _run_test(plan.design.test_family, phis, plan.design)
    report.per_instance = diffs
    report.warnings = warnings + report.warnings
    diagnostics = build_diagnostics(
        phis, resamples=plan.sampling.bootstrap.resamples,
        seed=derive_seed(plan.master_seed, DIAGNOSTICS_STREAM))
    return report, diagnostics
