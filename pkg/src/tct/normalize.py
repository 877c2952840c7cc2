"""Normalization: reduce arbitrary instances to two-alternative form and back.

Each original job v with nondominated pairs t_1 < ... < t_r, c_1 > ... > c_r
becomes copies v#0, ..., v#r with alternatives {(0, c_i - c_{i+1}), (t_{i+1}, 0)}
where c_0 = INF, c_{r+1} = 0, t_{r+1} = INF.  The copies share v's predecessors
and successors and are mutually incomparable, so depth is preserved.
"""

from __future__ import annotations

from fractions import Fraction

from .model import (
    INF,
    AccelerationSet,
    InstanceError,
    NormalizedInstance,
    TctInstance,
    accelerate,
    is_inf,
)


def copy_id(job: str, rank: int) -> str:
    return f"{job}#{rank}"


def nondominated_pairs(alts) -> list[tuple]:
    """Sorted (t, c) pairs with dominated ones removed; t ascending, c descending.

    A pair is dominated when another is at least as fast and at least as cheap.
    Infinite-cost pairs are unusable and dropped whenever a finite-cost pair
    exists.
    """
    finite_cost = [p for p in alts if not is_inf(p[1])]
    if not finite_cost:
        raise InstanceError("job has no finite-cost alternative")
    ordered = sorted(set(finite_cost), key=lambda p: (p[0], p[1]))
    kept: list[tuple] = []
    for t, c in ordered:
        if kept and kept[-1][1] <= c:
            continue  # slower and not cheaper
        kept.append((t, c))
    return kept


def normalize(instance: TctInstance) -> NormalizedInstance:
    """Expand every job into its chain-free copy gadget; records the origin map."""
    jobs: list[str] = []
    alternatives: dict[str, tuple] = {}
    origin: dict[str, tuple[str, int]] = {}
    copies: dict[str, list[str]] = {}
    for v in instance.jobs:
        pairs = nondominated_pairs(instance.alternatives[v])
        r = len(pairs)
        ts = [None] + [p[0] for p in pairs] + [INF]   # t_1 .. t_r, t_{r+1} = INF
        cs = [INF] + [p[1] for p in pairs] + [Fraction(0)]  # c_0 = INF, .. c_{r+1} = 0
        ids = []
        for i in range(r + 1):
            cid = copy_id(v, i)
            fast_cost = cs[i] if is_inf(cs[i]) else cs[i] - cs[i + 1]
            alternatives[cid] = ((Fraction(0), fast_cost), (ts[i + 1], Fraction(0)))
            origin[cid] = (v, i)
            jobs.append(cid)
            ids.append(cid)
        copies[v] = ids
    edges = []
    for u, w in instance.edges:
        for cu in copies[u]:
            for cw in copies[w]:
                edges.append((cu, cw))
    base = TctInstance(
        jobs=tuple(jobs),
        edges=tuple(edges),
        alternatives=alternatives,
        deadline=instance.deadline,
    )
    return NormalizedInstance.from_instance(base, origin_map=origin, source=instance)


def denormalize_solution(norm: NormalizedInstance, sol) -> dict[str, int]:
    """Translate an acceleration set back to per-original-job alternative choices.

    The set is first canonicalized per original job: zero-cost copies are added
    for free, and payments on copies below the slowest unaccelerated one are
    dropped (they buy no delay reduction).  The result maps each original job
    to an index into its alternative list; its cost never exceeds the set's.
    """
    if norm.origin_map is None or norm.source is None:
        raise InstanceError("instance carries no origin map; nothing to denormalize")
    fast = sol.fast if isinstance(sol, AccelerationSet) else frozenset(sol)
    source = norm.source

    by_job: dict[str, list[str]] = {}
    for cid, (v, i) in norm.origin_map.items():
        by_job.setdefault(v, []).append(cid)
    for v in by_job:
        by_job[v].sort(key=lambda cid: norm.origin_map[cid][1])

    choice: dict[str, int] = {}
    for v in source.jobs:
        ids = by_job[v]
        r = len(ids) - 1
        pairs = nondominated_pairs(source.alternatives[v])
        selected = set()
        for cid in ids:
            rank = norm.origin_map[cid][1]
            if cid in fast:
                if rank == 0:
                    raise InstanceError(
                        f"solution buys the infinite-cost copy {cid!r}"
                    )
                selected.add(rank)
            elif norm.fast_cost[cid] == 0:
                selected.add(rank)  # free closure
        unaccelerated = [i for i in range(r + 1) if i not in selected]
        j = max(unaccelerated) + 1  # rank 0 never selectable, so list is nonempty
        if j > r:
            raise InstanceError(
                f"job {v!r}: slowest copy left slow; solution is infeasible"
            )
        t, c = pairs[j - 1]
        choice[v] = source.alternatives[v].index((t, c))
    return choice


def choice_cost(instance: TctInstance, choice: dict[str, int]):
    """Total cost of a per-job alternative choice vector."""
    total = Fraction(0)
    for v in instance.jobs:
        total = total + instance.alternatives[v][choice[v]][1]
    return total


def choice_feasible(instance: TctInstance, choice: dict[str, int]) -> bool:
    """Check a choice vector against the deadline by the chain-delay DP."""
    from .model import topological_order

    order = topological_order(instance.jobs, instance.edges)
    pred = instance.predecessors()
    dist = {}
    for v in order:
        t = instance.alternatives[v][choice[v]][0]
        dist[v] = max((dist[p] for p in pred[v]), default=Fraction(0)) + t
    top = max(dist.values(), default=Fraction(0))
    return top <= instance.deadline
