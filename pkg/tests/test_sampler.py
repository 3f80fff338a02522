import math

import numpy as np
import pytest

from paircomp.errors import AssumptionViolationError, RunnerError
from paircomp.estimators import BootstrapConfig, DiffKind, SEMethod
from paircomp.runners import (AlgorithmKind, AlgorithmSpec, InstanceRef,
                              RunResult, build_tsp_instance, make_runner)
from paircomp.sampler import SamplingConfig, calc_nreps


def normal_spec(alias, mu, sigma):
    return AlgorithmSpec(alias=alias, kind=AlgorithmKind.SYNTHETIC_NORMAL,
                         params={"mu": mu, "sigma": sigma})


def normal_runners(mu1, sd1, mu2, sd2):
    return make_runner(normal_spec("a1", mu1, sd1)), make_runner(normal_spec("a2", mu2, sd2))


INSTANCE = InstanceRef(id="inst-0")


class ScriptedRunner:
    """Replays a fixed sequence of values, cycling; ignores seeds."""

    alias = "scripted"
    concurrent_safe = True

    def __init__(self, values):
        self.values = list(values)
        self.calls = 0

    def run(self, instance, seed):
        v = self.values[self.calls % len(self.values)]
        self.calls += 1
        return RunResult(value=v, wall_time=0.0, seed_used=seed)


class FailingRunner:
    alias = "broken"
    concurrent_safe = True

    def run(self, instance, seed):
        raise RunnerError("solver crashed", alias=self.alias, output_excerpt="boom")


class TestStoppingBehavior:
    def test_generous_budget_stops_at_n0(self):
        r1, r2 = normal_runners(10, 1, 12, 1)
        cfg = SamplingConfig(se_max=5.0, n0=15, n_max=100)
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=1)
        assert (out.samples[0].n, out.samples[1].n) == (15, 15)
        assert out.iterations == 0
        assert not out.diff.budget_exhausted
        assert out.diff.se_hat == pytest.approx(math.sqrt(2 / 15), rel=0.5)

    def test_unreachable_budget_exhausts_n_max(self):
        r1, r2 = normal_runners(10, 1, 12, 1)
        cfg = SamplingConfig(se_max=0.001, n0=15, n_max=40)
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=1)
        assert out.diff.budget_exhausted
        assert out.samples[0].n + out.samples[1].n == 40

    def test_se_contract_when_not_exhausted(self):
        r1, r2 = normal_runners(10, 2, 12, 1)
        cfg = SamplingConfig(se_max=0.5, n0=5, n_max=400)
        for seed in range(10):
            out = calc_nreps(r1, r2, INSTANCE, cfg, seed=seed)
            assert not out.diff.budget_exhausted
            assert out.diff.se_hat <= 0.5
            n1, n2, se = out.se_trace[-1]
            assert se == out.diff.se_hat
            assert (n1, n2) == (out.samples[0].n, out.samples[1].n)
            if out.iterations > 0:
                # extra runs shrank the uncertainty below the starting level
                assert out.se_trace[-1][2] < out.se_trace[0][2]

    def test_trace_totals_increase_by_one(self):
        r1, r2 = normal_runners(0, 1, 0.5, 1)
        cfg = SamplingConfig(se_max=0.3, n0=5, n_max=200)
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=3)
        totals = [n1 + n2 for n1, n2, _ in out.se_trace]
        assert totals[0] == 10
        assert all(b - a == 1 for a, b in zip(totals, totals[1:]))


class TestAllocation:
    def test_ratio_tracks_spread_ratio(self):
        # spread ratio 2: terminal allocation should sit near n1/n2 = 2
        ratios = []
        n1_ge_n2 = 0
        for seed in range(100):
            r1, r2 = normal_runners(10, 2, 10, 1)
            cfg = SamplingConfig(se_max=0.2, n0=10, n_max=600)
            out = calc_nreps(r1, r2, INSTANCE, cfg, seed=seed)
            ratios.append(out.samples[0].n / out.samples[1].n)
            n1_ge_n2 += out.samples[0].n >= out.samples[1].n
        assert 1.6 <= float(np.median(ratios)) <= 2.4
        assert n1_ge_n2 >= 90

    def test_forced_balance_keeps_counts_even(self):
        r1, r2 = normal_runners(10, 3, 10, 1)
        cfg = SamplingConfig(se_max=0.4, n0=5, n_max=400, force_balance=True)
        for seed in range(5):
            out = calc_nreps(r1, r2, INSTANCE, cfg, seed=seed)
            assert abs(out.samples[0].n - out.samples[1].n) <= 1

    def test_batch_factor_respects_budget(self):
        r1, r2 = normal_runners(10, 1, 12, 1)
        cfg = SamplingConfig(se_max=0.0011, n0=5, n_max=37, batch=5)
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=1)
        assert out.samples[0].n + out.samples[1].n == 37
        assert out.diff.budget_exhausted


class TestDeterminism:
    def test_identical_inputs_identical_outcomes(self):
        cfg = SamplingConfig(se_max=0.3, n0=5, n_max=100)
        outs = []
        for _ in range(2):
            r1, r2 = normal_runners(10, 2, 11, 1)
            outs.append(calc_nreps(r1, r2, INSTANCE, cfg, seed=77))
        a, b = outs
        assert a.samples[0].observations == b.samples[0].observations
        assert a.samples[1].observations == b.samples[1].observations
        assert a.se_trace == b.se_trace
        assert a.diff == b.diff
        assert a.seed_ledger == b.seed_ledger

    def test_seed_ledger_unique(self):
        r1, r2 = normal_runners(10, 2, 11, 1)
        cfg = SamplingConfig(se_max=0.2, n0=10, n_max=300)
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=5)
        assert len(set(out.seed_ledger)) == len(out.seed_ledger)
        assert len(out.seed_ledger) == out.samples[0].n + out.samples[1].n


class TestPercentKind:
    def test_percent_se_contract(self):
        r1, r2 = normal_runners(100, 5, 105, 5)
        cfg = SamplingConfig(se_max=0.01, n0=10, n_max=500,
                             diff_kind=DiffKind.PERCENT)
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=11)
        assert not out.diff.budget_exhausted
        assert out.diff.se_hat <= 0.01
        assert out.diff.diff_kind is DiffKind.PERCENT

    def test_nonpositive_baseline_names_instance(self):
        r1, r2 = normal_runners(-5, 1, 5, 1)
        cfg = SamplingConfig(se_max=0.01, n0=5, n_max=50,
                             diff_kind=DiffKind.PERCENT)
        with pytest.raises(AssumptionViolationError, match="inst-0"):
            calc_nreps(r1, r2, INSTANCE, cfg, seed=1)

    def test_zero_gap_falls_back_to_bootstrap(self):
        # identical means with spread: the parametric percent SE degenerates
        r1 = ScriptedRunner([1.0, 3.0, 2.0, 2.0])
        r2 = ScriptedRunner([3.0, 1.0, 2.0, 2.0])
        cfg = SamplingConfig(se_max=0.4, n0=4, n_max=60,
                             diff_kind=DiffKind.PERCENT,
                             bootstrap=BootstrapConfig(resamples=200, rng_seed=0))
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=1)
        assert out.diff.se_method is SEMethod.BOOTSTRAP
        assert any("bootstrap" in e for e in out.events)

    def test_bootstrap_method_from_start(self):
        r1, r2 = normal_runners(100, 5, 105, 5)
        cfg = SamplingConfig(se_max=0.02, n0=10, n_max=400,
                             diff_kind=DiffKind.PERCENT,
                             se_method=SEMethod.BOOTSTRAP,
                             bootstrap=BootstrapConfig(resamples=300, rng_seed=0))
        out = calc_nreps(r1, r2, INSTANCE, cfg, seed=2)
        assert out.diff.se_method is SEMethod.BOOTSTRAP
        assert out.diff.se_hat <= 0.02 or out.diff.budget_exhausted


class TestFailuresAndValidation:
    def test_runner_failure_carries_context(self):
        r1 = FailingRunner()
        _, r2 = normal_runners(0, 1, 0, 1)
        cfg = SamplingConfig(se_max=0.1, n0=5, n_max=50)
        with pytest.raises(RunnerError) as err:
            calc_nreps(r1, r2, INSTANCE, cfg, seed=1)
        assert err.value.instance_id == "inst-0"
        assert err.value.seed is not None

    @pytest.mark.parametrize("kwargs", [
        dict(se_max=0.0), dict(se_max=-1.0), dict(n0=1),
        dict(n0=20, n_max=30), dict(batch=0),
    ])
    def test_invalid_config_rejected(self, kwargs):
        base = dict(se_max=0.1, n0=5, n_max=100)
        base.update(kwargs)
        with pytest.raises(ValueError):
            SamplingConfig(**base)


class TestAnnealingDemo:
    def test_two_temperatures_meet_percent_budget(self):
        # scenario shape: one distance matrix, two annealing temperatures
        instance = build_tsp_instance("tsp21", n_cities=21, layout_seed=4)
        r1 = make_runner(AlgorithmSpec(alias="cool", kind=AlgorithmKind.DEMO_SANN_TSP,
                                       params={"temp": 2000.0, "budget": 1500}))
        r2 = make_runner(AlgorithmSpec(alias="hot", kind=AlgorithmKind.DEMO_SANN_TSP,
                                       params={"temp": 4000.0, "budget": 1500}))
        cfg = SamplingConfig(se_max=0.01, n0=20, n_max=200,
                             diff_kind=DiffKind.PERCENT)
        out = calc_nreps(r1, r2, instance, cfg, seed=1234)
        assert out.diff.se_hat <= 0.01 or out.diff.budget_exhausted
        assert out.samples[0].n >= 20 and out.samples[1].n >= 20
        assert out.samples[0].n + out.samples[1].n <= 200
