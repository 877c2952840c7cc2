"""Exact min-cost assignment via successive shortest augmenting paths.

The classic O(n^3) Hungarian scheme with row/column potentials, run on exact
rationals (no divisions, so Fraction costs stay exact).  Used to pick the
layer-to-interval permutation in the deterministic rounding stage.
"""

from __future__ import annotations

import math
from fractions import Fraction


def min_cost_assignment(cost):
    """cost: square matrix (rows = agents, cols = slots) of exact rationals.

    Returns (assignment, total) where assignment[i] is the column of row i.
    """
    n = len(cost)
    if any(len(row) != n for row in cost):
        raise ValueError("cost matrix must be square")
    if n == 0:
        return [], Fraction(0)
    INF = math.inf
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based; 0 = none)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0, delta, j1 = p[j0], INF, 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                elif minv[j] is not INF:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            p[j0] = p[way[j0]]
            j0 = way[j0]
    assignment = [0] * n
    for j in range(1, n + 1):
        assignment[p[j] - 1] = j - 1
    total = sum((cost[i][assignment[i]] for i in range(n)), Fraction(0))
    return assignment, total
