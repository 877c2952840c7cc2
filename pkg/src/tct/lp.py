"""Covering LP engine: separation oracles and row generation.

The LP minimizes sum c_v x_v subject to sum_{v in P} x_v >= 1 for every
minimal chain P whose total slow delay exceeds the deadline, and 0 <= x <= 1.
Constraints are generated lazily: a kernel solve over the current cut pool
alternates with a separation oracle until the oracle accepts.

Two modes:

* exact  - separation scans the fully enumerated minimal-cut list and the
  kernel runs on exact rationals; the result is the exact LP optimum.
* approx - separation quantizes x to multiples of eps/(2*depth) and runs a
  knapsack-style DP; on acceptance (1+eps)*x (clipped to 1) is exactly
  feasible, so the returned cover is a true (1+eps)-approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import (
    INF,
    AccelerationSet,
    CapExceededError,
    FeasibilityResult,
    FractionalCover,
    InfeasibleError,
    InstanceError,
    IterationLimitError,
    LayeredView,
    NormalizedInstance,
    check_feasible,
    is_inf,
    layer,
    topological_order,
)
from . import simplex


@dataclass
class CutPool:
    """Violated chains collected during row generation.

    Every cut is a chain whose total slow delay exceeds the deadline; origins
    records which oracle produced each cut.  kernel_objectives traces the
    kernel optimum after each solve (diagnostics; nondecreasing).
    """

    cuts: list[tuple[str, ...]] = field(default_factory=list)
    origins: list[str] = field(default_factory=list)
    kernel_objectives: list = field(default_factory=list)


def separate_integral(norm: NormalizedInstance, sol) -> FeasibilityResult:
    """Linear-time separation for integral vectors: the feasibility check."""
    return check_feasible(norm, sol)


def _scaled_delays(norm):
    """Common-denominator integer delays, or None when scaling is unreasonable.

    Infinite delays are capped at deadline+1: any chain containing one is
    violated either way, so verdicts are unchanged.
    """
    denoms = {norm.deadline.denominator}
    for t in norm.slow_delay.values():
        if not is_inf(t):
            denoms.add(Fraction(t).denominator)
    scale = 1
    for q in denoms:
        scale = scale * q // math.gcd(scale, q)
        if scale > 10**9:
            return None
    deadline = int(norm.deadline * scale)
    cap = deadline + 1
    delays = {}
    for v, t in norm.slow_delay.items():
        delays[v] = cap if is_inf(t) else min(int(Fraction(t) * scale), cap)
    if cap * (len(delays) + 1) > 2**62:
        return None
    return delays, deadline


def _closure_predecessors(norm) -> dict[str, list[str]]:
    """Predecessors in the partial order (transitive closure), sorted.

    Chains may skip over intermediate jobs, so the separation DP must be able
    to step from any comparable predecessor, not only edge predecessors.
    """
    order = topological_order(norm.jobs, norm.edges)
    idx = {v: i for i, v in enumerate(order)}
    pred_edges = norm.base.predecessors()
    below = {v: 0 for v in norm.jobs}
    for v in order:
        mask = 0
        for p in pred_edges[v]:
            mask |= below[p] | (1 << idx[p])
        below[v] = mask
    out = {}
    for v in norm.jobs:
        mask = below[v]
        preds = []
        while mask:
            low = mask & -mask
            preds.append(order[low.bit_length() - 1])
            mask ^= low
        preds.sort()
        out[v] = preds
    return out


def separate_fractional(norm, layered, x, eps):
    """Quantized separation: None to accept, else a violated witness chain.

    Components are rounded up to multiples of eps/(2d); a chain is accepted as
    covered when its rounded sum reaches 1.  A returned witness P satisfies
    sum_P t_v > deadline and sum_P x_v < 1 exactly.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InstanceError("eps must be positive")
    if eps > 1:
        raise InstanceError("eps must be at most 1")
    if layered is None:
        layered = layer(norm.base)
    d = max(layered.depth, 1)
    cap = math.ceil(Fraction(2 * d, eps))  # q-sum meaning "covered"
    q = {}
    for v in norm.jobs:
        xv = Fraction(x[v])
        if xv < 0 or xv > 1:
            raise InstanceError(f"x[{v!r}] outside [0, 1]")
        q[v] = min(math.ceil(2 * d * xv / eps), cap)

    scaled = _scaled_delays(norm)
    if scaled is not None:
        witness = _separate_dp_int(norm, q, cap, *scaled)
    else:
        witness = _separate_dp_exact(norm, q, cap)
    return witness


def _separate_dp_int(norm, q, cap, delays, deadline):
    """Vectorized DP over (job, capped q-sum) maximizing chain delay."""
    order = topological_order(norm.jobs, norm.edges)
    pred = _closure_predecessors(norm)
    width = cap + 1
    best = {}
    idx = np.arange(width)
    for v in order:
        qv = q[v]
        shifted = np.minimum(idx + qv, cap)
        incoming = None
        for p in pred[v]:
            incoming = best[p] if incoming is None else np.maximum(incoming, best[p])
        arr = np.full(width, -1, dtype=np.int64)
        arr[min(qv, cap)] = delays[v]  # the chain {v} itself
        if incoming is not None:
            np.maximum.at(arr, shifted, np.where(incoming >= 0, incoming + delays[v], -1))
        best[v] = arr

    top, end, end_s = -1, None, None
    for v in sorted(best):
        arr = best[v]
        uncovered = arr[:cap]
        m = int(uncovered.max(initial=-1))
        if m > deadline and m > top:
            top, end, end_s = m, v, int(np.argmax(uncovered))
    if end is None:
        return None

    chain = [end]
    v, s, val = end, end_s, top
    while True:
        qv = q[v]
        if val == delays[v] and s == min(qv, cap):
            break  # the singleton chain {v} explains this state
        rest_val = val - delays[v]
        found = None
        for p in sorted(pred[v]):
            arr = best[p]
            for sp in range(cap + 1):
                if min(sp + qv, cap) == s and arr[sp] == rest_val:
                    found = (p, sp)
                    break
            if found:
                break
        if found is None:
            break
        v, s = found
        val = rest_val
        chain.append(v)
    chain.reverse()
    return tuple(chain)


def _separate_dp_exact(norm, q, cap):
    """Fraction-valued fallback DP; same contract as the vectorized path."""
    order = topological_order(norm.jobs, norm.edges)
    pred = _closure_predecessors(norm)
    deadline = norm.deadline
    # Infinite delays capped at deadline+1: verdicts unchanged, sums stay exact.
    t = {
        v: (deadline + 1 if is_inf(tv) else min(Fraction(tv), deadline + 1))
        for v, tv in norm.slow_delay.items()
    }
    best: dict[str, dict[int, object]] = {}
    for v in order:
        qv = q[v]
        cell: dict[int, object] = {min(qv, cap): t[v]}
        for p in pred[v]:
            for sp, val in best[p].items():
                s = min(sp + qv, cap)
                cand = val + t[v]
                if s not in cell or cand > cell[s]:
                    cell[s] = cand
        best[v] = cell

    top, end, end_s = None, None, None
    for v in sorted(best):
        for s, val in sorted(best[v].items()):
            if s < cap and val > deadline and (top is None or val > top):
                top, end, end_s = val, v, s
    if end is None:
        return None
    chain = [end]
    v, s, val = end, end_s, top
    while True:
        qv = q[v]
        if val == t[v] and s == min(qv, cap):
            break  # the singleton chain {v} explains this state
        rest_val = val - t[v]
        found = None
        for p in sorted(pred[v]):
            for sp, pv in sorted(best[p].items()):
                if min(sp + qv, cap) == s and pv == rest_val:
                    found = (p, sp)
                    break
            if found:
                break
        if found is None:
            break
        v, s = found
        val = rest_val
        chain.append(v)
    chain.reverse()
    return tuple(chain)


def shrink_cut(norm, chain):
    """Greedy minimality pass: drop zero-delay members, then trim the ends
    (back first) while the remaining slow delay still exceeds the deadline."""
    t = norm.slow_delay
    deadline = norm.deadline
    members = [v for v in chain if t[v] > 0]
    infinite = [v for v in members if is_inf(t[v])]
    if infinite:
        return (infinite[0],)  # a single never-finishing job already blocks
    total = sum((t[v] for v in members), Fraction(0))
    changed = True
    while changed:
        changed = False
        if len(members) > 1 and total - t[members[-1]] > deadline:
            total -= t[members[-1]]
            members.pop()
            changed = True
        if len(members) > 1 and total - t[members[0]] > deadline:
            total -= t[members[0]]
            members.pop(0)
            changed = True
    return tuple(members)


def _chain_delay(norm, chain):
    total = Fraction(0)
    for v in chain:
        t = norm.slow_delay[v]
        if is_inf(t):
            return INF
        total += t
    return total


def solve_lp(
    norm: NormalizedInstance,
    layered: LayeredView | None = None,
    *,
    exact: bool = False,
    eps=Fraction(1, 20),
    max_cuts: int | None = None,
    final_exact: bool | None = None,
    blocker_job_cap: int | None = None,
):
    """Row generation for the covering LP.  Returns (FractionalCover, CutPool).

    exact=True enumerates the minimal violated chains up front and returns the
    exact optimum.  Otherwise the quantized oracle drives the loop and the
    result is (1+eps)*x clipped to [0,1], exactly feasible, with objective at
    most (1+eps) times the LP value whenever the final kernel solve is exact
    (final_exact defaults to instance size <= 30).
    """
    if layered is None:
        layered = layer(norm.base)
    eps = Fraction(eps)
    variables = [v for v in norm.jobs if not is_inf(norm.fast_cost[v])]
    index = {v: i for i, v in enumerate(variables)}
    costs = [Fraction(norm.fast_cost[v]) for v in variables]
    if max_cuts is None:
        max_cuts = 50 * max(len(norm.jobs), 1)
    if final_exact is None:
        final_exact = len(variables) <= 30

    blocker = None
    if exact:
        from .exact import enumerate_blocker

        if blocker_job_cap is None:
            blocker = enumerate_blocker(norm)
        else:
            blocker = enumerate_blocker(norm, max_jobs=blocker_job_cap)

    pool = CutPool()
    seen: set[tuple[str, ...]] = set()
    pool_idx: list[list[int]] = []

    def kernel(use_exact):
        if not pool.cuts:
            xs = [Fraction(0)] * len(variables)
            pool.kernel_objectives.append(Fraction(0))
            return xs
        if use_exact:
            xs, obj = simplex.solve_cover_lp_exact(costs, pool_idx)
        else:
            raw, obj = simplex.solve_cover_lp_float(costs, pool_idx)
            xs = [min(Fraction(1), max(Fraction(0), Fraction(val))) for val in raw]
        pool.kernel_objectives.append(obj)
        return xs

    def separate(xs):
        xmap = {v: Fraction(0) for v in norm.jobs}
        for v, val in zip(variables, xs):
            xmap[v] = val
        if exact:
            best, best_gap = None, None
            for cut in blocker:
                total = sum((xmap[v] for v in cut), Fraction(0))
                if total < 1 and (best_gap is None or total < best_gap):
                    best, best_gap = cut, total
            return best
        return separate_fractional(norm, layered, xmap, eps)

    def add_cut(chain, origin):
        cut = shrink_cut(norm, chain)
        if not exact:
            delay = _chain_delay(norm, cut)
            if not delay > norm.deadline:
                raise RuntimeError("separation returned a non-violated chain")
        members = [v for v in cut if v in index]
        if not members:
            raise InfeasibleError(
                "a violated chain contains only infinite-cost jobs; "
                "instance is infeasible even with all affordable jobs fast"
            )
        if cut in seen:
            return False
        seen.add(cut)
        pool.cuts.append(cut)
        pool.origins.append(origin)
        pool_idx.append([index[v] for v in members])
        return True

    use_exact_kernel = exact
    xs = kernel(use_exact_kernel)
    while True:
        if len(pool.cuts) > max_cuts:
            raise IterationLimitError(
                f"cut budget exceeded: {len(pool.cuts)} cuts, last objective "
                f"{pool.kernel_objectives[-1]}"
            )
        witness = separate(xs)
        if witness is None:
            if exact or use_exact_kernel or not final_exact:
                break
            # polish: re-solve the final pool exactly, then re-separate
            use_exact_kernel = True
            xs = kernel(True)
            continue
        origin = "enumerated" if exact else "fractional"
        if add_cut(witness, origin):
            use_exact_kernel = exact
            xs = kernel(use_exact_kernel)
        else:
            # float kernel drift re-produced a pooled cut: re-solve exactly
            if use_exact_kernel:
                raise RuntimeError("exact kernel violated a pooled cut")
            use_exact_kernel = True
            xs = kernel(True)

    x_out: dict[str, Fraction] = {v: Fraction(0) for v in norm.jobs}
    if exact:
        for v, val in zip(variables, xs):
            x_out[v] = val
        quality, eps_out = "exact", None
    else:
        grow = 1 + eps
        for v, val in zip(variables, xs):
            x_out[v] = min(Fraction(1), grow * val)
        quality, eps_out = "approx", eps
    objective = sum(
        (Fraction(norm.fast_cost[v]) * x_out[v] for v in variables), Fraction(0)
    )
    cover = FractionalCover(x=x_out, objective=objective, quality=quality, eps=eps_out)
    return cover, pool
