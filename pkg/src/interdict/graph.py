"""Directed multigraph instances and exact flow primitives.

Capacities and flows are `fractions.Fraction` values throughout, so max-flow,
min-cut, decomposition, and payoff evaluations are exact whenever the inputs
are rational (floats convert exactly to binary rationals).  Unbounded
capacities are materialized as a finite big-M chosen so it can never bind.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Optional, Sequence, Union

Numeric = Union[int, float, Fraction]
ArcId = int


class PathLimitExceeded(Exception):
    """s-t path enumeration would exceed the requested limit."""


def as_fraction(value: Numeric) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    capacity: Optional[Fraction]  # None means unbounded

    def __post_init__(self):
        if self.capacity is not None:
            cap = as_fraction(self.capacity)
            if cap < 0:
                raise ValueError("arc capacity must be nonnegative")
            object.__setattr__(self, "capacity", cap)


@dataclass(frozen=True)
class Instance:
    """A capacitated directed multigraph with a removal budget.

    Nodes are 1-based integers.  Arcs are identified by their 1-based
    position in ``arcs`` (stable across parsing, serialization, and all
    solver output).  Parallel arcs are permitted.  No arc may enter the
    source or leave the sink.
    """

    node_count: int
    source: int
    sink: int
    arcs: tuple[Arc, ...]
    gamma: int

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if self.node_count < 2:
            raise ValueError("need at least two nodes")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for v in (self.source, self.sink):
            if not 1 <= v <= self.node_count:
                raise ValueError(f"node id {v} out of range")
        for arc in self.arcs:
            for v in (arc.tail, arc.head):
                if not 1 <= v <= self.node_count:
                    raise ValueError(f"arc endpoint {v} out of range")
            if arc.head == self.source:
                raise ValueError("no arc may enter the source")
            if arc.tail == self.sink:
                raise ValueError("no arc may leave the sink")
        if not 1 <= self.gamma <= len(self.arcs):
            raise ValueError("gamma must lie in [1, arc count]")

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def arc(self, arc_id: ArcId) -> Arc:
        return self.arcs[arc_id - 1]

    def arc_ids(self) -> range:
        return range(1, len(self.arcs) + 1)

    @cached_property
    def big_m(self) -> Fraction:
        """Stand-in for unbounded capacity; exceeds any achievable flow."""
        return 1 + sum(
            (a.capacity for a in self.arcs if a.capacity is not None),
            start=Fraction(0),
        )

    def effective_capacity(self, arc_id: ArcId) -> Fraction:
        cap = self.arc(arc_id).capacity
        return self.big_m if cap is None else cap

    @cached_property
    def _adjacency(self) -> tuple[dict, dict]:
        out: dict[int, list[ArcId]] = {v: [] for v in range(1, self.node_count + 1)}
        inc: dict[int, list[ArcId]] = {v: [] for v in range(1, self.node_count + 1)}
        for aid in self.arc_ids():
            arc = self.arc(aid)
            out[arc.tail].append(aid)
            inc[arc.head].append(aid)
        return out, inc

    def out_ids(self, node: int) -> Sequence[ArcId]:
        return self._adjacency[0][node]

    def in_ids(self, node: int) -> Sequence[ArcId]:
        return self._adjacency[1][node]

    def internal_nodes(self) -> list[int]:
        return [
            v
            for v in range(1, self.node_count + 1)
            if v not in (self.source, self.sink)
        ]


@dataclass(frozen=True)
class ArcFlow:
    """Flow on arcs; ``value`` is the net flow into the sink."""

    values: Mapping[ArcId, Fraction]
    value: Fraction

    @classmethod
    def from_values(
        cls, instance: Instance, values: Mapping[ArcId, Numeric]
    ) -> "ArcFlow":
        clean = {aid: as_fraction(x) for aid, x in values.items() if x}
        val = sum(
            (clean.get(aid, Fraction(0)) for aid in instance.in_ids(instance.sink)),
            start=Fraction(0),
        )
        return cls(values=clean, value=val)

    def get(self, arc_id: ArcId) -> Fraction:
        return self.values.get(arc_id, Fraction(0))


@dataclass(frozen=True)
class PathFlow:
    """Flow on explicit s-t paths; each entry is (arc-id path, amount)."""

    entries: tuple[tuple[tuple[ArcId, ...], Fraction], ...]

    @property
    def value(self) -> Fraction:
        return sum((amount for _, amount in self.entries), start=Fraction(0))

    def arc_loads(self) -> dict[ArcId, Fraction]:
        loads: dict[ArcId, Fraction] = {}
        for path, amount in self.entries:
            for aid in path:
                loads[aid] = loads.get(aid, Fraction(0)) + amount
        return loads


@dataclass(frozen=True)
class CutReport:
    """An s-t cut, optionally evaluated under the capped capacities u(theta)."""

    s_side: frozenset[int]
    crossing: tuple[ArcId, ...]
    capacity: Fraction
    theta: Optional[Fraction] = None
    capacity_at_theta: Optional[Fraction] = None
    tight_at_or_below: frozenset[ArcId] = frozenset()  # theta <= u_e
    strictly_below: frozenset[ArcId] = frozenset()  # theta <  u_e


@dataclass(frozen=True)
class Violation:
    kind: str  # "capacity" | "conservation" | "negative" | "path"
    where: str
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def resolve_capacities(
    instance: Instance,
    capacities: Optional[Mapping[ArcId, Numeric]] = None,
    theta: Optional[Numeric] = None,
) -> list[Fraction]:
    """1-indexed capacity vector, defaulting to the instance capacities."""
    caps = [Fraction(0)] * (instance.arc_count + 1)
    for aid in instance.arc_ids():
        if capacities is not None:
            base = as_fraction(capacities.get(aid, 0))
        else:
            base = instance.effective_capacity(aid)
        if theta is not None:
            base = min(base, as_fraction(theta))
        caps[aid] = base
    return caps


def _augmenting_path(instance, caps, flows):
    """Shortest augmenting path in the residual graph, scanning arcs in id
    order (forward arcs before backward) for reproducible flows."""
    source, sink = instance.source, instance.sink
    parent: dict[int, tuple[int, ArcId, bool]] = {}
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for aid in instance.out_ids(u):
            if flows[aid] < caps[aid]:
                v = instance.arc(aid).head
                if v not in seen:
                    seen.add(v)
                    parent[v] = (u, aid, True)
                    if v == sink:
                        return parent
                    queue.append(v)
        for aid in instance.in_ids(u):
            if flows[aid] > 0:
                v = instance.arc(aid).tail
                if v not in seen:
                    seen.add(v)
                    parent[v] = (u, aid, False)
                    if v == sink:
                        return parent
                    queue.append(v)
    return None


def _max_flow_state(instance, caps):
    flows = [Fraction(0)] * (instance.arc_count + 1)
    while True:
        parent = _augmenting_path(instance, caps, flows)
        if parent is None:
            break
        bottleneck = None
        v = instance.sink
        while v != instance.source:
            u, aid, forward = parent[v]
            room = caps[aid] - flows[aid] if forward else flows[aid]
            bottleneck = room if bottleneck is None else min(bottleneck, room)
            v = u
        v = instance.sink
        while v != instance.source:
            u, aid, forward = parent[v]
            flows[aid] += bottleneck if forward else -bottleneck
            v = u
    return flows


def _residual_reachable(instance, caps, flows) -> frozenset[int]:
    seen = {instance.source}
    queue = deque([instance.source])
    while queue:
        u = queue.popleft()
        for aid in instance.out_ids(u):
            v = instance.arc(aid).head
            if v not in seen and flows[aid] < caps[aid]:
                seen.add(v)
                queue.append(v)
        for aid in instance.in_ids(u):
            v = instance.arc(aid).tail
            if v not in seen and flows[aid] > 0:
                seen.add(v)
                queue.append(v)
    return frozenset(seen)


def max_flow(
    instance: Instance,
    capacities: Optional[Mapping[ArcId, Numeric]] = None,
) -> tuple[Fraction, ArcFlow]:
    """Maximum s-t flow under the given (default: instance) capacities.

    Returns the exact value and a feasible flow attaining it.  The
    augmenting order is fixed, so the returned flow is reproducible.
    """
    caps = resolve_capacities(instance, capacities)
    flows = _max_flow_state(instance, caps)
    values = {aid: flows[aid] for aid in instance.arc_ids() if flows[aid]}
    flow = ArcFlow.from_values(instance, values)
    return flow.value, flow


def min_cut(
    instance: Instance,
    capacities: Optional[Mapping[ArcId, Numeric]] = None,
    theta: Optional[Numeric] = None,
) -> CutReport:
    """Source-side-minimal minimum cut, optionally under u(theta).

    The cut is the set of nodes reachable from the source in the final
    residual graph, which makes the report canonical and deterministic.
    When ``theta`` is given, capacities become min(u_e, theta) and the
    report carries the sets of crossing arcs with theta <= u_e and
    theta < u_e.
    """
    base = resolve_capacities(instance, capacities)
    capped = resolve_capacities(instance, capacities, theta)
    flows = _max_flow_state(instance, capped)
    s_side = _residual_reachable(instance, capped, flows)
    crossing = tuple(
        aid
        for aid in instance.arc_ids()
        if instance.arc(aid).tail in s_side and instance.arc(aid).head not in s_side
    )
    capacity = sum((base[aid] for aid in crossing), start=Fraction(0))
    if theta is None:
        return CutReport(s_side=s_side, crossing=crossing, capacity=capacity)
    th = as_fraction(theta)
    cap_theta = sum((capped[aid] for aid in crossing), start=Fraction(0))
    a_set = frozenset(aid for aid in crossing if th <= base[aid])
    b_set = frozenset(aid for aid in crossing if th < base[aid])
    return CutReport(
        s_side=s_side,
        crossing=crossing,
        capacity=capacity,
        theta=th,
        capacity_at_theta=cap_theta,
        tight_at_or_below=a_set,
        strictly_below=b_set,
    )


def decompose(instance: Instance, flow: ArcFlow) -> PathFlow:
    """Split an arc flow into at most |E| s-t path flows; any circulation
    left over carries no s-t value and is discarded."""
    remaining = {aid: flow.get(aid) for aid in instance.arc_ids() if flow.get(aid) > 0}
    entries = []
    while True:
        parent: dict[int, ArcId] = {}
        seen = {instance.source}
        queue = deque([instance.source])
        while queue:
            u = queue.popleft()
            if u == instance.sink:
                break
            for aid in instance.out_ids(u):
                if remaining.get(aid, Fraction(0)) > 0:
                    v = instance.arc(aid).head
                    if v not in seen:
                        seen.add(v)
                        parent[v] = aid
                        queue.append(v)
        if instance.sink not in seen:
            break
        path = []
        v = instance.sink
        while v != instance.source:
            aid = parent[v]
            path.append(aid)
            v = instance.arc(aid).tail
        path.reverse()
        amount = min(remaining[aid] for aid in path)
        for aid in path:
            remaining[aid] -= amount
            if remaining[aid] == 0:
                del remaining[aid]
        entries.append((tuple(path), amount))
    return PathFlow(entries=tuple(entries))


def enumerate_paths(instance: Instance, limit: int) -> list[tuple[ArcId, ...]]:
    """All node-simple s-t paths as arc-id tuples, in lexicographic order.

    Raises PathLimitExceeded as soon as the count would pass ``limit``,
    signalling that the instance is too large for path-based solvers.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    paths: list[tuple[ArcId, ...]] = []
    stack_path: list[ArcId] = []
    on_path = {instance.source}

    def visit(u: int):
        if u == instance.sink:
            if len(paths) >= limit:
                raise PathLimitExceeded(f"more than {limit} s-t paths")
            paths.append(tuple(stack_path))
            return
        for aid in instance.out_ids(u):
            v = instance.arc(aid).head
            if v in on_path:
                continue
            on_path.add(v)
            stack_path.append(aid)
            visit(v)
            stack_path.pop()
            on_path.remove(v)

    visit(instance.source)
    return paths


def _check_arc_flow(instance, flow: ArcFlow, tol: float) -> list[Violation]:
    out = []
    for aid in instance.arc_ids():
        x = flow.get(aid)
        cap = instance.effective_capacity(aid)
        if x < 0 and float(-x) > tol:
            out.append(Violation("negative", f"arc {aid}", float(-x)))
        excess = x - cap
        if excess > 0 and float(excess) > tol * (1 + float(cap)):
            out.append(Violation("capacity", f"arc {aid}", float(excess)))
    for v in instance.internal_nodes():
        inflow = sum((flow.get(a) for a in instance.in_ids(v)), start=Fraction(0))
        outflow = sum((flow.get(a) for a in instance.out_ids(v)), start=Fraction(0))
        gap = abs(inflow - outflow)
        scale = 1 + max(float(inflow), float(outflow))
        if float(gap) > tol * scale:
            out.append(Violation("conservation", f"node {v}", float(gap)))
    return out


def _check_path_flow(instance, flow: PathFlow, tol: float) -> list[Violation]:
    out = []
    for idx, (path, amount) in enumerate(flow.entries):
        if amount < 0 and float(-amount) > tol:
            out.append(Violation("negative", f"path {idx}", float(-amount)))
        nodes = [instance.source]
        ok = bool(path)
        for aid in path:
            arc = instance.arc(aid)
            if arc.tail != nodes[-1]:
                ok = False
                break
            nodes.append(arc.head)
        if not ok or nodes[-1] != instance.sink or len(set(nodes)) != len(nodes):
            out.append(Violation("path", f"path {idx}", 0.0))
    loads = flow.arc_loads()
    for aid, load in sorted(loads.items()):
        cap = instance.effective_capacity(aid)
        excess = load - cap
        if excess > 0 and float(excess) > tol * (1 + float(cap)):
            out.append(Violation("capacity", f"arc {aid}", float(excess)))
    return out


def validate_flow(
    instance: Instance,
    flow: Union[ArcFlow, PathFlow],
    tolerance: float = 1e-6,
) -> ValidationReport:
    """List every capacity/conservation violation; empty report iff the
    flow is feasible within the relative tolerance.  Violations are data,
    not errors."""
    if isinstance(flow, ArcFlow):
        found = _check_arc_flow(instance, flow, tolerance)
    else:
        found = _check_path_flow(instance, flow, tolerance)
    return ValidationReport(violations=tuple(found))


def cut_count(instance: Instance) -> int:
    return 1 << (instance.node_count - 2)


def iter_cuts(instance: Instance) -> Iterator[tuple[frozenset[int], tuple[ArcId, ...]]]:
    """Every s-t cut as (source side, crossing arc ids), in a fixed order.

    There are 2^(n-2) cuts; callers enforce their own size limits.
    """
    internal = instance.internal_nodes()
    out_of = {aid: instance.arc(aid) for aid in instance.arc_ids()}
    for mask in range(1 << len(internal)):
        s_side = {instance.source}
        for i, v in enumerate(internal):
            if mask >> i & 1:
                s_side.add(v)
        crossing = tuple(
            aid
            for aid, arc in out_of.items()
            if arc.tail in s_side and arc.head not in s_side
        )
        yield frozenset(s_side), crossing


def top_sum(values: Sequence[Fraction], k: int) -> Fraction:
    """Sum of the min(k, len) largest values."""
    if k <= 0:
        return Fraction(0)
    return sum(sorted(values, reverse=True)[:k], start=Fraction(0))
