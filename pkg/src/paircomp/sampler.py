"""Adaptive within-instance run allocation.

Both algorithms get ``n0`` initial runs on the instance; afterwards, while
the standard error of the paired-difference estimate exceeds the budget
``se_max`` and fewer than ``n_max`` total runs have been spent, one more
run goes to the algorithm whose share is below the optimal allocation
ratio (ties go to the second algorithm).  The loop is inherently
sequential: every allocation decision depends on all runs so far.

Run seeds are derived deterministically from the instance seed and the
(algorithm index, run index) pair, so outcomes are bit-reproducible and
re-running an instance never changes earlier draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import (AssumptionViolationError, DegenerateRatioError, RunnerError)
from .estimators import (BootstrapConfig, DiffKind, InstanceSample,
                         PairedDifference, SEMethod, bootstrap_se, phi_percent,
                         phi_simple, optimal_ratio_percent,
                         optimal_ratio_simple, se_percent, se_simple)
from .seeding import BOOTSTRAP_STREAM, derive_seed, run_seed

__all__ = ["SamplingConfig", "SamplingOutcome", "calc_nreps"]


@dataclass(frozen=True)
class SamplingConfig:
    """Budget and method knobs for sampling one instance.

    ``n_max`` caps the *total* number of runs n1+n2.  ``batch`` adds that
    many runs to the chosen algorithm per iteration (clipped at the
    budget); the default of 1 matches the per-run allocation rule and is
    the right choice unless runs are extremely cheap.  ``force_balance``
    alternates the two algorithms regardless of the ratio, for
    experimenters who want equal sample sizes.
    """

    se_max: float
    n0: int = 15
    n_max: int = 200
    diff_kind: DiffKind = DiffKind.SIMPLE
    se_method: SEMethod = SEMethod.PARAMETRIC
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    force_balance: bool = False
    batch: int = 1

    def __post_init__(self):
        object.__setattr__(self, "diff_kind", DiffKind(self.diff_kind))
        object.__setattr__(self, "se_method", SEMethod(self.se_method))
        if not (self.se_max > 0.0 and math.isfinite(self.se_max)):
            raise ValueError(f"se_max must be a positive finite real, got {self.se_max!r}")
        if self.n0 < 2:
            raise ValueError(f"n0 must be at least 2, got {self.n0!r}")
        if self.n_max < 2 * self.n0:
            raise ValueError(f"n_max={self.n_max!r} must be at least 2*n0={2 * self.n0}")
        if self.batch < 1:
            raise ValueError(f"batch must be at least 1, got {self.batch!r}")


@dataclass
class SamplingOutcome:
    """Result of adaptively sampling two algorithms on one instance."""
    samples: tuple[InstanceSample, InstanceSample]
    diff: PairedDifference
    iterations: int
    se_trace: list[tuple[int, int, float]]
    events: list[str] = field(default_factory=list)
    seed_ledger: list[int] = field(default_factory=list)


def calc_nreps(runner1, runner2, instance, cfg: SamplingConfig, seed: int) -> SamplingOutcome:
    """Sample two algorithms on one instance until the SE budget is met.

    Returns when the standard error of the paired difference drops to
    ``cfg.se_max`` or the total-run budget ``cfg.n_max`` is exhausted
    (flagged on the result).  If the parametric percent-difference SE
    degenerates (zero mean gap), the instance falls back to the bootstrap
    estimate and the switch is recorded in ``events``.
    """
    samples = (InstanceSample(), InstanceSample())
    runners = (runner1, runner2)
    ledger: list[int] = []
    events: list[str] = []
    se_method = cfg.se_method
    boot_cfg = replace(cfg.bootstrap, rng_seed=derive_seed(seed, BOOTSTRAP_STREAM))

    def do_run(algo_index: int) -> None:
        sample = samples[algo_index]
        rs = run_seed(seed, algo_index, sample.n)
        try:
            result = runners[algo_index].run(instance, rs)
        except RunnerError as exc:
            raise RunnerError(
                exc.message,
                alias=getattr(runners[algo_index], "alias", None) or exc.alias,
                instance_id=getattr(instance, "id", None),
                seed=rs,
                output_excerpt=exc.output_excerpt,
            ) from exc
        sample.add(result.value)
        ledger.append(rs)

    def current_se() -> float:
        nonlocal se_method
        s1, s2 = samples
        if cfg.diff_kind is DiffKind.PERCENT and s1.mean <= 0.0:
            raise AssumptionViolationError(
                f"instance {getattr(instance, 'id', '?')}: baseline mean "
                f"{s1.mean:g} is not strictly positive, percent differences do "
                f"not apply; use simple differences")
        if se_method is SEMethod.BOOTSTRAP:
            return bootstrap_se(s1, s2, cfg.diff_kind, boot_cfg)
        if cfg.diff_kind is DiffKind.SIMPLE:
            return se_simple(s1, s2)
        try:
            se, _ = se_percent(s1, s2)
            return se
        except DegenerateRatioError:
            se_method = SEMethod.BOOTSTRAP
            events.append(
                f"parametric percent SE degenerate at n1={s1.n}, n2={s2.n}; "
                f"switched to bootstrap SE")
            return bootstrap_se(s1, s2, cfg.diff_kind, boot_cfg)

    def allocation_ratio() -> float:
        s1, s2 = samples
        if cfg.diff_kind is DiffKind.SIMPLE:
            return optimal_ratio_simple(s1, s2)
        try:
            return optimal_ratio_percent(s1, s2)
        except DegenerateRatioError:
            return optimal_ratio_simple(s1, s2)

    for _ in range(cfg.n0):
        do_run(0)
    for _ in range(cfg.n0):
        do_run(1)

    trace: list[tuple[int, int, float]] = []
    se = current_se()
    trace.append((samples[0].n, samples[1].n, se))

    iterations = 0
    while se > cfg.se_max and samples[0].n + samples[1].n < cfg.n_max:
        iterations += 1
        if cfg.force_balance:
            chosen = 0 if samples[0].n <= samples[1].n else 1
        else:
            # tie goes to the second algorithm
            chosen = 0 if samples[0].n / samples[1].n < allocation_ratio() else 1
        chunk = min(cfg.batch, cfg.n_max - (samples[0].n + samples[1].n))
        for _ in range(chunk):
            do_run(chosen)
        se = current_se()
        trace.append((samples[0].n, samples[1].n, se))

    s1, s2 = samples
    phi = phi_simple(s1, s2) if cfg.diff_kind is DiffKind.SIMPLE else phi_percent(s1, s2)
    diff = PairedDifference(
        instance_id=str(getattr(instance, "id", "")),
        phi_hat=phi,
        se_hat=se,
        n1=s1.n,
        n2=s2.n,
        diff_kind=cfg.diff_kind,
        se_method=se_method,
        budget_exhausted=se > cfg.se_max,
    )
    return SamplingOutcome(samples=samples, diff=diff, iterations=iterations,
                           se_trace=trace, events=events, seed_ledger=ledger)
