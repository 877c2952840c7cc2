"""Shared brute-force oracles for the test suite.

These deliberately avoid the library's own DP/enumeration code paths: chains
come from itertools over an independently computed comparability relation,
and feasibility checks use a recursive longest-path evaluation.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest


def reachable_pairs(vertices, edges):
    """Comparability relation u < w computed by plain DFS per vertex."""
    succ = {v: set() for v in vertices}
    for u, w in edges:
        succ[u].add(w)
    pairs = set()
    for start in vertices:
        stack, seen = [start], set()
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        for w in seen:
            pairs.add((start, w))
    return pairs


def all_chains(vertices, edges, max_size=None):
    """Every set of pairwise comparable vertices (the empty set excluded)."""
    comp = reachable_pairs(vertices, edges)
    vs = sorted(vertices)
    chains = []
    top = max_size or len(vs)
    for size in range(1, top + 1):
        for combo in itertools.combinations(vs, size):
            ok = all(
                (a, b) in comp or (b, a) in comp
                for a, b in itertools.combinations(combo, 2)
            )
            if ok:
                chains.append(combo)
    return chains


def oracle_max_chain_delay(jobs, edges, delay):
    """Recursive longest weighted path; delay: job -> value."""
    succ = {v: [] for v in jobs}
    for u, w in edges:
        succ[u].append(w)
    memo = {}

    def down(v):
        if v not in memo:
            memo[v] = delay(v) + max((down(w) for w in succ[v]), default=0)
        return memo[v]

    return max((down(v) for v in jobs), default=0)


def oracle_blocker(norm):
    """Minimal violated chains by full chain enumeration (small n only)."""
    chains = all_chains(norm.jobs, norm.edges)
    t, T = norm.slow_delay, norm.deadline
    violated = [c for c in chains if sum(t[v] for v in c) > T]
    vio_sets = {frozenset(c) for c in violated}
    minimal = []
    for c in violated:
        fs = frozenset(c)
        if not any(o < fs for o in vio_sets):
            minimal.append(c)
    return sorted(minimal, key=lambda c: (len(c), c))


def oracle_tct_opt_cost(norm, max_jobs=16):
    """Min-cost feasible acceleration by subset enumeration."""
    jobs = list(norm.jobs)
    assert len(jobs) <= max_jobs, "oracle too slow beyond this size"
    t, T = norm.slow_delay, norm.deadline
    best = None
    for size in range(len(jobs) + 1):
        for combo in itertools.combinations(jobs, size):
            fast = set(combo)
            cost = Fraction(0)
            usable = True
            for v in fast:
                c = norm.fast_cost[v]
                if isinstance(c, float) and math.isinf(c):
                    usable = False
                    break
                cost += c
            if not usable or (best is not None and cost >= best):
                continue
            top = oracle_max_chain_delay(
                norm.jobs, norm.edges, lambda v: 0 if v in fast else t[v]
            )
            if top <= T:
                best = cost
    return best


def oracle_choice_opt_cost(instance):
    """Min-cost alternative choice by full product enumeration."""
    jobs = list(instance.jobs)
    options = [range(len(instance.alternatives[v])) for v in jobs]
    best = None
    for combo in itertools.product(*options):
        cost = Fraction(0)
        usable = True
        for v, i in zip(jobs, combo):
            c = instance.alternatives[v][i][1]
            if isinstance(c, float) and math.isinf(c):
                usable = False
                break
            cost += c
        if not usable or (best is not None and cost >= best):
            continue
        picked = dict(zip(jobs, combo))
        top = oracle_max_chain_delay(
            jobs, instance.edges, lambda v: instance.alternatives[v][picked[v]][0]
        )
        if top <= instance.deadline:
            best = cost
    return best


def oracle_dvd_opt(dvd, max_vertices=12):
    """Minimum deletion set by subset enumeration over increasing size."""
    assert len(dvd.vertices) <= max_vertices
    for size in range(len(dvd.vertices) + 1):
        for combo in itertools.combinations(sorted(dvd.vertices), size):
            deleted = set(combo)
            keep = [v for v in dvd.vertices if v not in deleted]
            edges = [(u, w) for u, w in dvd.edges if u not in deleted and w not in deleted]
            depth = oracle_max_chain_delay(keep, edges, lambda v: 1)
            if depth < dvd.k:
                return set(combo)
    return set()
