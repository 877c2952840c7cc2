"""Threshold rounding of fractional covers in layered instances.

Every algorithm here turns a fractional cover x into an acceleration set by
choosing one threshold per layer and buying the jobs whose x-value clears
their layer's threshold.  Feasibility rests on the thresholds summing to at
most 1: a chain meets each layer at most once, so a chain with total x-mass
at least 1 must clear some threshold.

Provided variants:

* round_randomized        - random interval thresholds, expected cost d/2 * obj
* round_deterministic     - derandomized via an assignment step plus per-group
                            enumeration of cut levels; cost <= d/2 * obj
* round_slack_randomized  - reclaims unused threshold slack, expected cost
                            <= (d/2 - d/(64 n)) * obj, needs depth >= 4
* round_slack_deterministic - knapsack-style derandomization of the above,
                            cost <= (d/2 - d/(128 n)) * obj, needs depth >= 4
* round_naive             - buy everything with x >= 1/d (factor d)
* bar_yehuda_even         - primal-dual baseline on the integral oracle
                            (factor d, no fractional cover needed)

Randomized variants take an explicit `random.Random`; outputs are pure
functions of (instance, x, seed).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .assignment import min_cost_assignment
from .model import (
    AccelerationSet,
    FractionalCover,
    InfeasibleError,
    InstanceError,
    LayeredView,
    NormalizedInstance,
    accelerate,
    check_feasible,
    is_inf,
    layer,
)

#: Digits kept by the base-3 samplers; granularity 3**-40, tails closed with
#: their conditional expectation so that threshold sums come out exact.
SAMPLE_DIGITS = 40

_PERMS3 = tuple(permutations((0, 1, 2)))


def sample_triple(rng, digits: int = SAMPLE_DIGITS):
    """One draw of (x, y, z) with x+y+z = 1 exactly and uniform marginals on
    [0, 2/9], [2/9, 4/9], [4/9, 6/9].

    Three base-3 numbers receive a random permutation of {0,1,2} as their
    i-th digit; after `digits` rounds each tail is closed with its expected
    value (half a trailing unit).  Their sorted order is decided by the first
    digit, and scaling by 2/3 yields the stated intervals.
    """
    units = [0, 0, 0]
    for _ in range(digits):
        p = _PERMS3[rng.randrange(6)]
        for k in range(3):
            units[k] = units[k] * 3 + p[k]
    base = Fraction(2, 3 ** (digits + 1))  # 2/3 * 3**-digits
    vals = sorted(Fraction(2 * u + 1, 1) for u in units)
    half = Fraction(1, 2)
    return tuple(v * base * half for v in vals)


def _uniform_unit(rng, digits: int = SAMPLE_DIGITS) -> Fraction:
    """Uniform on the midpoint grid of [0, 1] with step 3**-digits."""
    u = rng.randrange(3**digits)
    return Fraction(2 * u + 1, 2 * 3**digits)


def sample_thresholds(d: int, rng, digits: int = SAMPLE_DIGITS):
    """Threshold values a_1..a_d by interval position, plus the group partition.

    a_j is uniform on [2(j-1)/d^2, 2j/d^2], the a_j sum to 1 exactly, and
    positions in different groups use disjoint randomness (groups are pairs,
    plus one leading triple when d is odd).
    """
    if d < 2:
        raise InstanceError("threshold sampling needs depth >= 2")
    dd = d * d
    a: dict[int, Fraction] = {}
    groups: list[tuple[int, ...]] = []
    start = 1
    if d % 2 == 1:
        x, y, z = sample_triple(rng, digits)
        a[1] = 9 * x / dd
        a[2] = 9 * y / dd
        a[3] = 9 * z / dd
        groups.append((1, 2, 3))
        start = 4
    for j in range(start, d, 2):
        lo = Fraction(2 * (j - 1), dd)
        width = Fraction(2, dd)
        a[j] = lo + width * _uniform_unit(rng, digits)
        a[j + 1] = Fraction(4 * j, dd) - a[j]
        groups.append((j, j + 1))
    values = tuple(a[j] for j in range(1, d + 1))
    return values, tuple(groups)


@dataclass(frozen=True)
class ThresholdAssignment:
    """A sampled rounding configuration.

    sigma[i-1] is the interval position assigned to layer i; a[i-1] the layer's
    threshold (drawn from position sigma(i)'s interval); groups the partition
    of interval positions into the independently sampled pairs/triples.
    """

    sigma: tuple[int, ...]
    a: tuple[Fraction, ...]
    groups: tuple[tuple[int, ...], ...]

    def group_of_position(self, position: int) -> tuple[int, ...]:
        for g in self.groups:
            if position in g:
                return g
        raise ValueError(f"position {position} out of range")


def sample_threshold_assignment(d: int, rng) -> ThresholdAssignment:
    """Random permutation + position thresholds, composed per layer."""
    perm = list(range(1, d + 1))
    rng.shuffle(perm)
    by_position, groups = sample_thresholds(d, rng)
    a = tuple(by_position[perm[i] - 1] for i in range(d))
    return ThresholdAssignment(sigma=tuple(perm), a=a, groups=groups)


def _x_map(norm, x) -> dict[str, Fraction]:
    xm = x.x if isinstance(x, FractionalCover) else x
    for v in norm.jobs:
        if is_inf(norm.fast_cost[v]) and xm[v] > 0:
            raise InstanceError(
                f"fractional cover puts mass on unbuyable job {v!r}"
            )
    return xm


def _round_with_thresholds(norm, layered, xm, thresholds) -> AccelerationSet:
    fast = {v for v in norm.jobs if xm[v] >= thresholds[layered.level[v] - 1]}
    return accelerate(norm, fast)


def round_randomized(norm, layered, x, rng) -> AccelerationSet:
    """Buy v iff x_v clears its layer's random interval threshold.

    For an LP-feasible x the output is always feasible, each job is bought
    with probability min(1, (d/2) x_v), and the expected cost is at most
    (d/2) * objective.
    """
    if layered is None:
        layered = layer(norm.base)
    xm = _x_map(norm, x)
    d = layered.depth
    if d == 0:
        return accelerate(norm, ())
    if d == 1:
        # Singleton chains force x_v >= 1 on every binding job.
        return _round_with_thresholds(norm, layered, xm, (Fraction(1),))
    assignment = sample_threshold_assignment(d, rng)
    return _round_with_thresholds(norm, layered, xm, assignment.a)


def _interval(d: int, position: int) -> tuple[Fraction, Fraction]:
    dd = d * d
    return Fraction(2 * (position - 1), dd), Fraction(2 * position, dd)


def _expected_indicator(xv: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    """P[a <= x] for a uniform on [lo, hi]; the interval has length 2/d^2."""
    if xv < lo:
        return Fraction(0)
    if xv > hi:
        return Fraction(1)
    return (xv - lo) / (hi - lo)


def round_deterministic(norm, layered, x) -> AccelerationSet:
    """Derandomized threshold rounding, cost <= (d/2) * objective.

    Stage 1 matches layers to interval positions minimizing the total
    conditional expected cost (exact assignment problem).  Stage 2 scans, per
    independence group, all cut levels w with sum(w) strictly below the
    group's threshold budget and keeps the cheapest; jobs with x_v > w are
    bought.
    """
    if layered is None:
        layered = layer(norm.base)
    xm = _x_map(norm, x)
    d = layered.depth
    if d == 0:
        return accelerate(norm, ())
    if d == 1:
        return _round_with_thresholds(norm, layered, xm, (Fraction(1),))

    costs = norm.fast_cost
    layer_jobs = [
        [v for v in lay if not is_inf(costs[v])] for lay in layered.layers
    ]

    rho = []
    for i in range(d):
        row = []
        for j in range(1, d + 1):
            lo, hi = _interval(d, j)
            total = Fraction(0)
            for v in layer_jobs[i]:
                total += Fraction(costs[v]) * _expected_indicator(xm[v], lo, hi)
            row.append(total)
        rho.append(row)
    assignment, _ = min_cost_assignment(rho)
    sigma = [assignment[i] + 1 for i in range(d)]  # layer i -> position sigma[i]

    if d % 2 == 1:
        groups = [(1, 2, 3)] + [(j, j + 1) for j in range(4, d, 2)]
    else:
        groups = [(j, j + 1) for j in range(1, d, 2)]
    budget = {
        g: sum((_interval(d, j)[0] + _interval(d, j)[1] for j in g), Fraction(0)) / 2
        for g in groups
    }  # pair (j, j+1): 4j/d^2; triple (1,2,3): 9/d^2 -- the fixed group sums

    fast: set[str] = set()
    for g in groups:
        layers_of = [sigma.index(j) for j in g]  # zero-based layer indices
        cand_lists = []
        for li, j in zip(layers_of, g):
            lo, hi = _interval(d, j)
            xs = sorted({xm[v] for v in layer_jobs[li]})
            cands = sorted({lo} | {xv for xv in xs if lo <= xv < hi})
            by_cand = []
            for w in cands:
                bought = [v for v in layer_jobs[li] if xm[v] > w]
                c = sum((Fraction(costs[v]) for v in bought), Fraction(0))
                by_cand.append((w, c, bought))
            cand_lists.append(by_cand)
        best = None
        if len(g) == 2:
            combos = (
                (p, q) for p in cand_lists[0] for q in cand_lists[1]
            )
        else:
            combos = (
                (p, q, r)
                for p in cand_lists[0]
                for q in cand_lists[1]
                for r in cand_lists[2]
            )
        for combo in combos:
            wsum = sum((entry[0] for entry in combo), Fraction(0))
            if wsum >= budget[g]:
                continue
            csum = sum((entry[1] for entry in combo), Fraction(0))
            if best is None or csum < best[0]:
                best = (csum, combo)
        if best is None:
            raise RuntimeError("no admissible cut-level combination (cannot happen)")
        for entry in best[1]:
            fast.update(entry[2])
    return accelerate(norm, fast)


@dataclass(frozen=True)
class SlackVector:
    """Per layer: how far its threshold could drop without changing the
    rounded set, capped at 1/d."""

    s: tuple[Fraction, ...]


def compute_slacks(layered, x, assignment: ThresholdAssignment) -> SlackVector:
    xm = x.x if isinstance(x, FractionalCover) else x
    d = layered.depth
    cap = Fraction(1, d)
    out = []
    for i in range(d):
        a = assignment.a[i]
        below = [xm[v] for v in layered.layers[i] if xm[v] < a]
        s = min(cap, a) if not below else min(cap, a, a - max(below))
        out.append(s)
    return SlackVector(s=tuple(out))


def round_slack_randomized(norm, layered, x, rng) -> AccelerationSet:
    """Slack-boosted randomized rounding (depth >= 4).

    After drawing thresholds, one layer is picked uniformly and its threshold
    is raised by the total slack of the layers outside its independence group;
    expected cost <= (d/2 - d/(64 n)) * objective, feasibility unconditional
    for LP-feasible x.
    """
    if layered is None:
        layered = layer(norm.base)
    d = layered.depth
    if d < 4:
        raise InstanceError("slack rounding needs depth >= 4")
    xm = _x_map(norm, x)
    assignment = sample_threshold_assignment(d, rng)
    slacks = compute_slacks(layered, xm, assignment)
    lam = rng.randrange(1, d + 1)  # layer index, 1-based
    group = assignment.group_of_position(assignment.sigma[lam - 1])
    in_group = {i for i in range(1, d + 1) if assignment.sigma[i - 1] in group}
    raise_by = sum(
        (slacks.s[i - 1] for i in range(1, d + 1) if i not in in_group), Fraction(0)
    )
    thresholds = list(assignment.a)
    thresholds[lam - 1] += raise_by
    return _round_with_thresholds(norm, layered, xm, thresholds)


def round_slack_deterministic(norm, layered, x) -> AccelerationSet:
    """Derandomized slack rounding (depth >= 4), cost <= (d/2 - d/(128 n)) * obj.

    Costs are floored to multiples of d*obj/(128 n^2); a knapsack-style DP over
    layers picks, per layer, either a cut value theta (buy {x >= theta},
    threshold budget = largest x below theta, attainable) or NOTHING (buy
    nothing, budget = layer maximum, attainable only strictly above).  A
    combination is admissible when its budget total stays below 1, or equals
    1 using attainable budgets only; the cheapest admissible one is returned.
    """
    if layered is None:
        layered = layer(norm.base)
    d = layered.depth
    if d < 4:
        raise InstanceError("slack rounding needs depth >= 4")
    xm = _x_map(norm, x)
    n = len(norm.jobs)
    objective = sum(
        (Fraction(norm.fast_cost[v]) * xm[v]
         for v in norm.jobs if not is_inf(norm.fast_cost[v])),
        Fraction(0),
    )
    if objective == 0:
        result = check_feasible(norm, frozenset())
        if not result.feasible:
            raise InstanceError("zero-objective cover is not LP-feasible")
        return accelerate(norm, ())

    unit = Fraction(d, 128 * n * n) * objective
    cap_units = 64 * n * n
    big = cap_units + 1

    def quantized(v) -> int:
        c = norm.fast_cost[v]
        if is_inf(c):
            return big
        return min(int(Fraction(c) / unit), big)

    # Per-layer choices: (units, budget, attainable, bought-set key)
    layer_choices = []
    for i in range(d):
        jobs = sorted(layered.layers[i])
        xs = sorted({xm[v] for v in jobs})
        choices = []
        for theta in xs:
            bought = [v for v in jobs if xm[v] >= theta]
            units = sum(quantized(v) for v in bought)
            below = [xv for xv in xs if xv < theta]
            if below:
                choices.append((min(units, big), max(below), False, theta))
            else:
                choices.append((min(units, big), Fraction(0), True, theta))
        # NOTHING: buy no job of this layer
        if jobs:
            choices.append((0, max(xs), False, None))
        else:
            choices.append((0, Fraction(0), True, None))
        choices.sort(key=lambda ch: (ch[0], ch[1]))
        layer_choices.append(choices)

    # DP state: (accumulated units, all budgets attainable) -> min budget sum
    # plus the per-layer choice trail.  Open budgets need strict room (< 1);
    # all-attainable combos may reach exactly 1.
    frontier: dict[tuple[int, bool], tuple[Fraction, tuple]] = {
        (0, True): (Fraction(0), ()),
    }
    for i in range(d):
        nxt: dict[tuple[int, bool], tuple[Fraction, tuple]] = {}
        for (units, closed), (budget, trail) in frontier.items():
            for ch_units, ch_budget, ch_closed, theta in layer_choices[i]:
                u2 = units + ch_units
                if u2 > cap_units:
                    continue
                b2 = budget + ch_budget
                if b2 > 1:
                    continue
                key = (u2, closed and ch_closed)
                cand = (b2, trail + (theta,))
                if key not in nxt or cand[0] < nxt[key][0]:
                    nxt[key] = cand
        frontier = nxt
        if not frontier:
            raise InfeasibleError("no admissible threshold combination")

    def trail_key(trail):
        return tuple((1,) if th is None else (0, th) for th in trail)

    best = None
    for (units, closed), (budget, trail) in frontier.items():
        if budget < 1 or (budget == 1 and closed):
            cand = (units, budget, not closed, trail_key(trail), trail)
            if best is None or cand[:4] < best[:4]:
                best = cand
    if best is None:
        raise InfeasibleError("no admissible threshold combination")
    trail = best[4]

    fast: set[str] = set()
    for i, theta in enumerate(trail):
        if theta is None:
            continue
        for v in layered.layers[i]:
            if xm[v] >= theta:
                fast.add(v)
    return accelerate(norm, fast)


def round_naive(norm, layered, x) -> AccelerationSet:
    """Factor-d rounding: buy everything with x >= 1/d."""
    if layered is None:
        layered = layer(norm.base)
    xm = _x_map(norm, x)
    d = max(layered.depth, 1)
    cut = Fraction(1, d)
    return accelerate(norm, {v for v in norm.jobs if xm[v] >= cut})


def bar_yehuda_even(norm) -> AccelerationSet:
    """Primal-dual covering baseline: repeatedly pick a violated chain and pay
    down the residual costs of its slow jobs; cost <= depth * LP value.

    Requires that accelerating every finite-cost job is feasible.
    """
    affordable = frozenset(
        v for v in norm.jobs if not is_inf(norm.fast_cost[v])
    )
    sanity = check_feasible(norm, affordable)
    if not sanity.feasible:
        raise InfeasibleError(
            "instance infeasible even with every finite-cost job fast"
        )
    residual = {v: norm.fast_cost[v] for v in norm.jobs}
    fast = {v for v in norm.jobs if residual[v] == 0}
    while True:
        result = check_feasible(norm, fast)
        if result.feasible:
            break
        on_chain = [v for v in result.witness if v not in fast]
        payable = [v for v in on_chain if not is_inf(residual[v])]
        if not payable:
            raise InfeasibleError("violated chain where no job is affordable")
        delta = min(residual[v] for v in payable)
        for v in on_chain:
            if not is_inf(residual[v]):
                residual[v] -= delta
                if residual[v] == 0:
                    fast.add(v)
    return accelerate(norm, fast)
