"""Brute-force ground truth at desk scale.

Everything here is exact: minimal violated chains are enumerated explicitly,
optima come from branch-and-bound over that cut list, and the LP oracle runs
the exact rational kernel over the fully enumerated constraint set.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .generators import DvdInstance
from .model import (
    AccelerationSet,
    CapExceededError,
    FractionalCover,
    InfeasibleError,
    InstanceError,
    NormalizedInstance,
    accelerate,
    is_inf,
    topological_order,
)

DEFAULT_JOB_CAP = 25


def _reachability(jobs, edges):
    """Bitmask transitive closure; jobs indexed in sorted order."""
    order = topological_order(jobs, edges)
    idx = {v: i for i, v in enumerate(jobs)}
    succ = {v: [] for v in jobs}
    for u, w in edges:
        succ[u].append(w)
    reach = {v: 0 for v in jobs}
    for v in reversed(order):
        mask = 0
        for w in succ[v]:
            mask |= reach[w] | (1 << idx[w])
        reach[v] = mask
    return idx, reach


def enumerate_blocker(
    norm: NormalizedInstance,
    *,
    max_jobs: int = DEFAULT_JOB_CAP,
    max_nodes: int = 2_000_000,
    max_cuts: int = 100_000,
):
    """All minimal chains whose total slow delay exceeds the deadline.

    Minimality: removing any single member drops the chain to the deadline or
    below (smaller subsets only shrink further).  Zero-delay jobs never occur
    in a minimal violated chain and are skipped outright.
    """
    t = norm.slow_delay
    deadline = norm.deadline
    relevant = sorted(v for v in norm.jobs if t[v] > 0)
    if len(relevant) > max_jobs:
        raise CapExceededError(
            f"{len(relevant)} delay-bearing jobs exceed the cap of {max_jobs}"
        )
    idx, reach = _reachability(norm.jobs, norm.edges)
    rel_set = set(relevant)
    succ_rel = {
        v: [w for w in norm.jobs if w in rel_set and reach[v] >> idx[w] & 1]
        for v in relevant
    }
    for v in succ_rel:
        succ_rel[v].sort()

    # max chain delay reachable from v (v included), for pruning
    tail: dict[str, object] = {}
    order = topological_order(norm.jobs, norm.edges)
    for v in reversed(order):
        if v not in rel_set:
            continue
        best = max((tail[w] for w in succ_rel[v]), default=Fraction(0))
        tail[v] = t[v] + best

    cuts: list[tuple[str, ...]] = []
    nodes = 0

    def extend(chain, total, min_delay):
        nonlocal nodes
        last = chain[-1]
        for w in succ_rel[last]:
            nodes += 1
            if nodes > max_nodes:
                raise CapExceededError("blocker enumeration exceeded node cap")
            tw = t[w]
            new_total = total + tw
            if new_total > deadline:
                if new_total - min(min_delay, tw) <= deadline:
                    cuts.append(chain + (w,))
                    if len(cuts) > max_cuts:
                        raise CapExceededError("blocker larger than cut cap")
                continue  # supersets of a violated chain are never minimal
            if new_total + _tail_after(w) > deadline:
                extend(chain + (w,), new_total, min(min_delay, tw))

    def _tail_after(v):
        return max((tail[w] for w in succ_rel[v]), default=Fraction(0))

    for v in relevant:
        tv = t[v]
        if tv > deadline:
            cuts.append((v,))
            continue
        if tv + _tail_after(v) > deadline:
            extend((v,), tv, tv)
    cuts.sort(key=lambda c: (len(c), c))
    return cuts


def min_cost_hitting_set(costs, sets, *, max_nodes: int = 5_000_000):
    """Exact minimum-cost hitting set by branch and bound.

    costs: element -> cost (INF marks unusable elements); sets: iterables of
    elements.  Zero-cost elements that occur in some set are taken for free.
    Branching fixes one uncovered set and tries each affordable member in
    lexicographic order, excluding earlier ones in later branches; the bound
    greedily charges pairwise-disjoint uncovered sets their cheapest member.
    """
    sets = [tuple(sorted(set(s))) for s in sets]
    for s in sets:
        if not any(not is_inf(costs[e]) for e in s):
            raise InfeasibleError("a required set has no affordable member")
    free = set()
    for s in sets:
        for e in s:
            if not is_inf(costs[e]) and costs[e] == 0:
                free.add(e)
    uncovered = [s for s in sets if not set(s) & free]
    if not uncovered:
        return frozenset(free & {e for s in sets for e in s}), Fraction(0)

    best_cost: list = [None]
    best_set: list = [None]
    nodes = [0]

    def candidates(s, forbidden):
        return [e for e in s if not is_inf(costs[e]) and e not in forbidden]

    def greedy_bound(uncov, forbidden):
        used = set()
        bound = Fraction(0)
        for s in uncov:
            if set(s) & used:
                continue
            cand = candidates(s, forbidden)
            if not cand:
                return None  # dead branch
            bound += min(costs[e] for e in cand)
            used.update(cand)
        return bound

    def rec(uncov, chosen, cost, forbidden):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise CapExceededError("hitting-set search exceeded node cap")
        if not uncov:
            if best_cost[0] is None or cost < best_cost[0]:
                best_cost[0] = cost
                best_set[0] = frozenset(chosen)
            return
        bound = greedy_bound(uncov, forbidden)
        if bound is None:
            return
        if best_cost[0] is not None and cost + bound >= best_cost[0]:
            return
        target = min(uncov, key=lambda s: (len(candidates(s, forbidden)), s))
        cand = candidates(target, forbidden)
        banned = set(forbidden)
        for e in cand:
            rec(
                [s for s in uncov if e not in s],
                chosen + [e],
                cost + costs[e],
                banned,
            )
            banned = banned | {e}

    rec(uncovered, [], Fraction(0), frozenset())
    if best_set[0] is None:
        raise InfeasibleError("no hitting set exists within the affordable jobs")
    chosen = set(best_set[0])
    chosen |= {e for e in free if any(e in s for s in sets)}
    return frozenset(chosen), best_cost[0]


def exact_tct_opt(norm: NormalizedInstance, *, max_jobs: int = DEFAULT_JOB_CAP,
                  max_nodes: int = 5_000_000) -> AccelerationSet:
    """Minimum-cost feasible acceleration set (exhaustive, deterministic)."""
    cuts = enumerate_blocker(norm, max_jobs=max_jobs)
    if not cuts:
        return accelerate(norm, ())
    chosen, _ = min_cost_hitting_set(norm.fast_cost, cuts, max_nodes=max_nodes)
    return accelerate(norm, chosen)


def enumerate_k_paths(dvd: DvdInstance, *, max_paths: int = 200_000):
    """All directed paths with exactly k vertices."""
    k = dvd.k
    succ = dvd.successors()
    paths: list[tuple[str, ...]] = []

    def extend(path):
        if len(path) == k:
            paths.append(tuple(path))
            if len(paths) > max_paths:
                raise CapExceededError("too many k-vertex paths")
            return
        for w in succ[path[-1]]:
            path.append(w)
            extend(path)
            path.pop()

    for v in sorted(dvd.vertices):
        extend([v])
    return paths


def exact_dvd_opt(dvd: DvdInstance, *, max_vertices: int = DEFAULT_JOB_CAP,
                  max_nodes: int = 5_000_000) -> frozenset:
    """Minimum vertex set meeting every k-vertex path (exhaustive)."""
    if len(dvd.vertices) > max_vertices:
        raise CapExceededError(
            f"{len(dvd.vertices)} vertices exceed the cap of {max_vertices}"
        )
    paths = enumerate_k_paths(dvd)
    if not paths:
        return frozenset()
    costs = {v: Fraction(1) for v in dvd.vertices}
    chosen, _ = min_cost_hitting_set(costs, paths, max_nodes=max_nodes)
    return chosen


def exact_lp_opt(norm: NormalizedInstance, *, max_jobs: int = DEFAULT_JOB_CAP):
    """Exact covering-LP optimum over the fully enumerated blocker."""
    from .lp import solve_lp

    cover, _pool = solve_lp(norm, exact=True, blocker_job_cap=max_jobs)
    return cover
