"""Scenarios, payoffs, mixed strategies, and adaptive-value oracles.

A scenario removes exactly gamma arcs.  The arc-based payoff is the largest
flow re-routable inside the committed arc flow once the removed arcs are
gone; the path-based payoff is the committed path flow surviving removal
(a path dies if any of its arcs is removed).  Both are evaluated exactly.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from statistics import fmean
from typing import Union

from .graph import (
    ArcFlow,
    Instance,
    PathFlow,
    as_fraction,
    cut_count,
    iter_cuts,
    max_flow,
    top_sum,
)

DEFAULT_SCENARIO_LIMIT = 20000
DEFAULT_CUT_LIMIT = 4096  # node_count - 2 <= 12


class ScenarioLimitExceeded(Exception):
    """The scenario count puts exact enumeration out of desk-scale range."""


class CutLimitExceeded(Exception):
    """Too many s-t cuts for exhaustive cut enumeration."""


@dataclass(frozen=True)
class Scenario:
    """A set of exactly gamma removed arc ids, kept sorted."""

    removed: tuple[int, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.removed))
        if len(set(ordered)) != len(ordered):
            raise ValueError("scenario arcs must be distinct")
        object.__setattr__(self, "removed", ordered)

    @property
    def removed_set(self) -> frozenset[int]:
        return frozenset(self.removed)

    def survives(self, arc_id: int) -> bool:
        return arc_id not in self.removed


@dataclass(frozen=True)
class MixedStrategy:
    """Probability distribution over scenarios with finite support."""

    support: tuple[tuple[Scenario, float], ...]

    def __post_init__(self):
        seen = set()
        total = 0.0
        for scenario, prob in self.support:
            if scenario in seen:
                raise ValueError("duplicate scenario in support")
            seen.add(scenario)
            if prob < -1e-12:
                raise ValueError("negative probability")
            total += prob
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @classmethod
    def normalized(cls, pairs) -> "MixedStrategy":
        """Merge duplicates, clip tiny negatives, rescale to total 1."""
        merged: dict[Scenario, float] = {}
        for scenario, prob in pairs:
            merged[scenario] = merged.get(scenario, 0.0) + float(prob)
        kept = {s: p for s, p in merged.items() if p > 1e-12}
        total = sum(kept.values())
        if total <= 0:
            raise ValueError("no probability mass")
        items = sorted(kept.items(), key=lambda item: item[0].removed)
        return cls(tuple((s, p / total) for s, p in items))

    @classmethod
    def degenerate(cls, scenario: Scenario) -> "MixedStrategy":
        return cls(((scenario, 1.0),))


def scenario_count(instance: Instance) -> int:
    return math.comb(instance.arc_count, instance.gamma)


def scenarios(
    instance: Instance, limit: int = DEFAULT_SCENARIO_LIMIT
) -> list[Scenario]:
    """All removal sets, lexicographic over sorted arc-id tuples."""
    count = scenario_count(instance)
    if count > limit:
        raise ScenarioLimitExceeded(
            f"{count} scenarios exceed the limit of {limit}"
        )
    ids = list(instance.arc_ids())
    return [Scenario(combo) for combo in itertools.combinations(ids, instance.gamma)]


def payoff_arc(instance: Instance, scenario: Scenario, flow: ArcFlow) -> Fraction:
    """Largest flow routable within the committed flow after removal:
    a max flow with capacities x_e on surviving arcs and 0 on removed ones."""
    caps = {
        aid: Fraction(0) if aid in scenario.removed_set else flow.get(aid)
        for aid in instance.arc_ids()
    }
    value, _ = max_flow(instance, caps)
    return value


def payoff_arc_flow(
    instance: Instance, scenario: Scenario, flow: ArcFlow
) -> tuple[Fraction, ArcFlow]:
    """As payoff_arc, but also return the surviving flow attaining it."""
    caps = {
        aid: Fraction(0) if aid in scenario.removed_set else flow.get(aid)
        for aid in instance.arc_ids()
    }
    return max_flow(instance, caps)


def payoff_path(instance: Instance, scenario: Scenario, flow: PathFlow) -> Fraction:
    """Committed path flow that still reaches the sink: each path counts
    with weight max(0, 1 - number of removed arcs on it)."""
    removed = scenario.removed_set
    total = Fraction(0)
    for path, amount in flow.entries:
        hits = sum(1 for aid in path if aid in removed)
        total += max(0, 1 - hits) * amount
    return total


def _payoff(instance, scenario, flow):
    if isinstance(flow, ArcFlow):
        return payoff_arc(instance, scenario, flow)
    return payoff_path(instance, scenario, flow)


def adaptive_value(
    instance: Instance,
    flow: ArcFlow,
    scenario_limit: int = DEFAULT_SCENARIO_LIMIT,
) -> Fraction:
    """min over all scenarios of the arc-based payoff, by full enumeration."""
    best = None
    for scenario in scenarios(instance, limit=scenario_limit):
        value = payoff_arc(instance, scenario, flow)
        if best is None or value < best:
            best = value
    return best


def adaptive_value_by_cuts(
    instance: Instance,
    flow: ArcFlow,
    cut_limit: int = DEFAULT_CUT_LIMIT,
) -> Fraction:
    """Cut-based cross-check of adaptive_value: min over cuts of the
    crossing flow minus its gamma largest arc values."""
    if cut_count(instance) > cut_limit:
        raise CutLimitExceeded(
            f"{cut_count(instance)} cuts exceed the limit of {cut_limit}"
        )
    best = None
    for _, crossing in iter_cuts(instance):
        loads = [flow.get(aid) for aid in crossing]
        value = sum(loads, start=Fraction(0)) - top_sum(loads, instance.gamma)
        if best is None or value < best:
            best = value
    return best


def expected_payoff(
    instance: Instance,
    alpha: MixedStrategy,
    flow: Union[ArcFlow, PathFlow],
) -> Fraction:
    """Exact probability-weighted payoff over the support."""
    total = Fraction(0)
    for scenario, prob in alpha.support:
        total += as_fraction(prob) * _payoff(instance, scenario, flow)
    return total


def estimate_expected_payoff(
    instance: Instance,
    alpha: MixedStrategy,
    flow: Union[ArcFlow, PathFlow],
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of expected_payoff: (mean, standard error).

    Scenarios are drawn i.i.d. from alpha by inverse CDF over the support
    order, using Python's stdlib Mersenne Twister (`random.Random(seed)`),
    whose float stream is stable across platforms; runs are fully
    deterministic per seed.  Payoffs are evaluated once per support
    scenario.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cumulative = []
    acc = 0.0
    for _, prob in alpha.support:
        acc += prob
        cumulative.append(acc)
    payoffs = [float(_payoff(instance, s, flow)) for s, _ in alpha.support]
    rng = random.Random(seed)
    draws = []
    for _ in range(samples):
        u = rng.random()
        idx = 0
        while idx < len(cumulative) - 1 and u >= cumulative[idx]:
            idx += 1
        draws.append(payoffs[idx])
    mean = fmean(draws)
    if samples == 1:
        return mean, 0.0
    var = sum((d - mean) ** 2 for d in draws) / (samples - 1)
    return mean, math.sqrt(var / samples)
