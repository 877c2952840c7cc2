"""Core data model: time-cost tradeoff instances, layers, solutions, feasibility.

All quantities are exact rationals (`fractions.Fraction`); the distinguished
value INF (`math.inf`) sits above every rational and marks alternatives that
can never be bought (infinite cost) or never finish on a binding chain
(infinite delay).  Every operation here is a pure function and every type is
treated as immutable after construction.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

INF = math.inf

#: A delay/cost value: an exact rational, or INF.
Q = Fraction | float


class InstanceError(ValueError):
    """An instance or solution violates a structural requirement."""


class CycleError(InstanceError):
    """The precedence relation contains a directed cycle."""


class InfeasibleError(RuntimeError):
    """No finite-cost feasible solution exists."""


class CapExceededError(RuntimeError):
    """An exact computation exceeded its configured size cap."""


class IterationLimitError(RuntimeError):
    """Row generation exceeded its cut budget."""


def to_rational(value) -> Q:
    """Parse a numeric field: int, float, Fraction, "p/q" / decimal string, or "inf"."""
    if isinstance(value, bool):
        raise InstanceError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise InstanceError("NaN is not a valid value")
        if math.isinf(value):
            if value < 0:
                raise InstanceError("negative infinity is not a valid value")
            return INF
        return Fraction(repr(value))
    if isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"cannot parse rational {value!r}") from exc
    raise InstanceError(f"cannot parse rational {value!r}")


def rational_to_json(value: Q):
    """Encode a rational for JSON: int when integral, "p/q" otherwise, "inf" for INF."""
    if is_inf(value):
        return "inf"
    if value.denominator == 1:
        return int(value)
    return str(value)


def is_inf(value: Q) -> bool:
    return isinstance(value, float) and math.isinf(value)


def topological_order(jobs, edges) -> list[str]:
    """Kahn's algorithm with a lexicographic tie-break; raises CycleError."""
    succ = {v: [] for v in jobs}
    indeg = {v: 0 for v in jobs}
    for u, w in edges:
        succ[u].append(w)
        indeg[w] += 1
    ready = [v for v in jobs if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != len(jobs):
        raise CycleError("precedence relation contains a cycle")
    return order


@dataclass(frozen=True)
class TctInstance:
    """A time-cost tradeoff instance.

    jobs:         job identifiers (opaque strings, iterated lexicographically)
    edges:        precedence as a directed acyclic edge list
    alternatives: per job, a nonempty tuple of (delay, cost) pairs
    deadline:     the common project deadline, a positive rational
    """

    jobs: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    alternatives: dict[str, tuple[tuple[Q, Q], ...]]
    deadline: Fraction

    def __post_init__(self):
        seen = set()
        for v in self.jobs:
            if not isinstance(v, str) or not v:
                raise InstanceError(f"job ids must be nonempty strings, got {v!r}")
            if v in seen:
                raise InstanceError(f"duplicate job id {v!r}")
            seen.add(v)
        for u, w in self.edges:
            if u not in seen or w not in seen:
                raise InstanceError(f"edge ({u!r}, {w!r}) references unknown job")
            if u == w:
                raise CycleError(f"self-precedence on {u!r}")
        topological_order(self.jobs, self.edges)
        if set(self.alternatives) != seen:
            raise InstanceError("alternatives must cover exactly the job set")
        for v, alts in self.alternatives.items():
            if not alts:
                raise InstanceError(f"job {v!r} has an empty alternative set")
            for t, c in alts:
                if (not is_inf(t) and t < 0) or (not is_inf(c) and c < 0):
                    raise InstanceError(f"negative delay/cost on job {v!r}")
        if is_inf(self.deadline) or self.deadline <= 0:
            raise InstanceError("deadline must be a positive rational")

    def predecessors(self) -> dict[str, list[str]]:
        pred = {v: [] for v in self.jobs}
        for u, w in self.edges:
            pred[w].append(u)
        for v in pred:
            pred[v].sort()
        return pred

    def successors(self) -> dict[str, list[str]]:
        succ = {v: [] for v in self.jobs}
        for u, w in self.edges:
            succ[u].append(w)
        for v in succ:
            succ[v].sort()
        return succ


def make_instance(jobs, edges, alternatives, deadline) -> TctInstance:
    """Build a validated instance, coercing all numeric fields to rationals."""
    alts = {
        v: tuple((to_rational(t), to_rational(c)) for t, c in pairs)
        for v, pairs in alternatives.items()
    }
    dl = to_rational(deadline)
    if is_inf(dl):
        raise InstanceError("deadline must be finite")
    return TctInstance(
        jobs=tuple(jobs),
        edges=tuple((u, w) for u, w in edges),
        alternatives=alts,
        deadline=dl,
    )


@dataclass(frozen=True)
class NormalizedInstance:
    """An instance whose every job has alternatives {(0, c), (t, 0)}.

    slow_delay[v] is the free execution time t_v, fast_cost[v] the price c_v of
    finishing instantly.  origin_map, when present, maps each job back to
    (original job, alternative rank) in `source`.
    """

    base: TctInstance
    slow_delay: dict[str, Q]
    fast_cost: dict[str, Q]
    origin_map: dict[str, tuple[str, int]] | None = None
    source: TctInstance | None = None

    @property
    def jobs(self) -> tuple[str, ...]:
        return self.base.jobs

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self.base.edges

    @property
    def deadline(self) -> Fraction:
        return self.base.deadline

    @classmethod
    def from_instance(cls, instance: TctInstance, origin_map=None, source=None):
        """Interpret a two-alternative instance as normalized; validates shape."""
        slow, fast = {}, {}
        for v, alts in instance.alternatives.items():
            if len(alts) != 2:
                raise InstanceError(f"job {v!r}: normalized jobs need exactly 2 alternatives")
            fast_pair = next((p for p in alts if not is_inf(p[0]) and p[0] == 0), None)
            slow_pair = next(
                (p for p in alts if p is not fast_pair and not is_inf(p[1]) and p[1] == 0),
                None,
            )
            if fast_pair is None or slow_pair is None:
                raise InstanceError(
                    f"job {v!r}: alternatives must be one zero-delay and one zero-cost pair"
                )
            slow[v] = slow_pair[0]
            fast[v] = fast_pair[1]
        if origin_map is not None and set(origin_map) != set(instance.jobs):
            raise InstanceError("origin_map must cover every job")
        return cls(base=instance, slow_delay=slow, fast_cost=fast,
                   origin_map=origin_map, source=source)


@dataclass(frozen=True)
class LayeredView:
    """The canonical depth partition V_1, ..., V_d with level function l."""

    layers: tuple[tuple[str, ...], ...]
    level: dict[str, int]
    depth: int


@dataclass(frozen=True)
class AccelerationSet:
    """An integral solution: the set of jobs executed fast, with its total cost."""

    fast: frozenset[str]
    cost: Q


@dataclass(frozen=True)
class FractionalCover:
    """A vector x in [0,1]^V with its objective value and solve quality.

    quality is "exact", "approx" (with eps set) or "heuristic" for hand-built
    covers that carry no optimality claim.
    """

    x: dict[str, Fraction]
    objective: Q
    quality: str
    eps: Fraction | None = None


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    max_delay: Q
    witness: tuple[str, ...] | None


def compute_depth(instance: TctInstance) -> int:
    """Maximum number of jobs on any chain (longest path vertex count)."""
    return layer(instance).depth


def layer(instance) -> LayeredView:
    """Canonical earliest-level layering: l(v) = max vertices on a path ending in v."""
    if isinstance(instance, NormalizedInstance):
        instance = instance.base
    order = topological_order(instance.jobs, instance.edges)
    pred = instance.predecessors()
    level = {}
    for v in order:
        level[v] = 1 + max((level[p] for p in pred[v]), default=0)
    depth = max(level.values(), default=0)
    buckets = [[] for _ in range(depth)]
    for v in sorted(level):
        buckets[level[v] - 1].append(v)
    return LayeredView(
        layers=tuple(tuple(b) for b in buckets),
        level=level,
        depth=depth,
    )


def _max_chain_delay(norm: NormalizedInstance, fast: frozenset):
    """Topological DP for the maximum total slow delay over chains.

    Accelerated jobs contribute 0.  Returns (max_delay, witness chain) where
    the witness attains the max; ties break toward lexicographically smaller
    end jobs and predecessors.
    """
    order = topological_order(norm.jobs, norm.edges)
    pred = norm.base.predecessors()
    delay = lambda v: 0 if v in fast else norm.slow_delay[v]
    dist: dict[str, Q] = {}
    parent: dict[str, str | None] = {}
    for v in order:
        best, arg = 0, None
        for p in pred[v]:
            if dist[p] > best:
                best, arg = dist[p], p
        dist[v] = best + delay(v)
        parent[v] = arg
    if not dist:
        return Fraction(0), ()
    top = max(dist.values())
    end = min(v for v in dist if dist[v] == top)
    chain = []
    v: str | None = end
    while v is not None:
        chain.append(v)
        v = parent[v]
    chain.reverse()
    return top, tuple(chain)


def check_feasible(norm: NormalizedInstance, sol) -> FeasibilityResult:
    """Decide whether accelerating `sol` meets the deadline on every chain.

    `sol` may be an AccelerationSet or any iterable of job ids.  When
    infeasible, the witness is a maximizing chain (accelerated members
    dropped, so its slow delays alone exceed the deadline).
    """
    fast = sol.fast if isinstance(sol, AccelerationSet) else frozenset(sol)
    unknown = fast - set(norm.jobs)
    if unknown:
        raise InstanceError(f"solution references unknown jobs: {sorted(unknown)[:3]}")
    top, chain = _max_chain_delay(norm, fast)
    if top <= norm.deadline:
        return FeasibilityResult(True, top, None)
    witness = tuple(v for v in chain if v not in fast)
    return FeasibilityResult(False, top, witness)


def solution_cost(norm: NormalizedInstance, sol) -> Q:
    """Total fast cost of an acceleration set."""
    fast = sol.fast if isinstance(sol, AccelerationSet) else frozenset(sol)
    total = Fraction(0)
    for v in sorted(fast):
        if v not in norm.fast_cost:
            raise InstanceError(f"unknown job id {v!r}")
        total = total + norm.fast_cost[v]
    return total


def accelerate(norm: NormalizedInstance, fast) -> AccelerationSet:
    """Build an AccelerationSet with its cost recomputed from the instance."""
    fast = frozenset(fast)
    return AccelerationSet(fast=fast, cost=solution_cost(norm, fast))


# --- JSON instance/solution schema -----------------------------------------
#
# {"jobs":[{"id":str,"alternatives":[[delay,cost],...]}],
#  "edges":[[src,dst],...], "deadline":num}
# with "inf" as the INFINITE literal; rationals as numbers or "p/q" strings.
# Solutions: {"fast":[ids],"cost":num}.


def instance_to_json(instance) -> dict:
    if isinstance(instance, NormalizedInstance):
        instance = instance.base
    return {
        "jobs": [
            {
                "id": v,
                "alternatives": [
                    [rational_to_json(t), rational_to_json(c)]
                    for t, c in instance.alternatives[v]
                ],
            }
            for v in instance.jobs
        ],
        "edges": [[u, w] for u, w in instance.edges],
        "deadline": rational_to_json(instance.deadline),
    }


def instance_from_json(data: dict) -> TctInstance:
    try:
        jobs = [entry["id"] for entry in data["jobs"]]
        alternatives = {entry["id"]: entry["alternatives"] for entry in data["jobs"]}
        edges = data.get("edges", [])
        deadline = data["deadline"]
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance JSON: {exc}") from exc
    return make_instance(jobs, edges, alternatives, deadline)


def solution_to_json(sol: AccelerationSet, **extra) -> dict:
    out = {"fast": sorted(sol.fast), "cost": rational_to_json(sol.cost)}
    out.update(extra)
    return out


def solution_from_json(data: dict) -> tuple[frozenset, Q]:
    try:
        fast = frozenset(data["fast"])
        cost = to_rational(data["cost"])
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed solution JSON: {exc}") from exc
    return fast, cost
