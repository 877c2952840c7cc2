"""Dense LP kernel for covering programs.

Solves   min c.x   s.t.  sum_{v in cut} x_v >= 1 for every cut,  0 <= x <= 1.

Two backends share the calling convention:

* `solve_cover_lp_exact` - a self-contained two-phase tableau simplex on
  exact rationals with Bland's pivoting rule (termination guaranteed, no
  tolerances).  Rows are the cuts plus the upper-bound rows x_v + u_v = 1;
  phase 1 drives artificials on the cut rows to zero.
* `solve_cover_lp_float` - scipy's HiGHS solver; fast, approximate.  Callers
  that need exact statements must recheck feasibility/optimality exactly.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import linprog


class SimplexError(RuntimeError):
    pass


class LpInfeasibleError(SimplexError):
    pass


def solve_cover_lp_exact(costs, cuts):
    """Exact optimum of the covering LP.  costs: list of Fraction; cuts: index lists.

    Returns (x, objective) as Fractions.  Raises LpInfeasibleError when some cut
    is empty (uncoverable).
    """
    n = len(costs)
    costs = [Fraction(c) for c in costs]
    cuts = [sorted(set(cut)) for cut in cuts]
    for cut in cuts:
        if not cut:
            raise LpInfeasibleError("empty cut cannot be covered")
    m = len(cuts)
    if m == 0:
        return [Fraction(0)] * n, Fraction(0)

    # Columns: x_0..x_{n-1} | s_0..s_{m-1} (surplus) | u_0..u_{n-1} (bound
    # slacks) | a_0..a_{m-1} (artificials) | rhs.
    s0, u0, a0 = n, n + m, n + m + n
    ncols = a0 + m + 1
    zero, one = Fraction(0), Fraction(1)

    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    for i, cut in enumerate(cuts):
        row = [zero] * ncols
        for j in cut:
            row[j] = one
        row[s0 + i] = -one
        row[a0 + i] = one
        row[-1] = one
        tableau.append(row)
        basis.append(a0 + i)
    for j in range(n):
        row = [zero] * ncols
        row[j] = one
        row[u0 + j] = one
        row[-1] = one
        tableau.append(row)
        basis.append(u0 + j)

    def reduced_cost_row(cost_of):
        row = [Fraction(cost_of(j)) for j in range(ncols - 1)] + [zero]
        for r, b in enumerate(basis):
            cb = cost_of(b)
            if cb:
                cb = Fraction(cb)
                for j in range(ncols):
                    row[j] -= cb * tableau[r][j]
        return row

    def pivot(r, c):
        piv = tableau[r][c]
        if piv != 1:
            inv = 1 / piv
            tableau[r] = [val * inv for val in tableau[r]]
        for rr in range(len(tableau)):
            if rr != r and tableau[rr][c]:
                f = tableau[rr][c]
                tableau[rr] = [a - f * b for a, b in zip(tableau[rr], tableau[r])]
        if cost_row[c]:
            f = cost_row[c]
            cost_row[:] = [a - f * b for a, b in zip(cost_row, tableau[r])]
        basis[r] = c

    def run(allowed):
        # Bland's rule: smallest eligible entering column, smallest basis
        # variable on ratio ties.  No cycling, exact arithmetic.
        while True:
            enter = next(
                (j for j in range(ncols - 1) if allowed(j) and cost_row[j] < 0), None
            )
            if enter is None:
                return
            leave, best = None, None
            for r in range(len(tableau)):
                coef = tableau[r][enter]
                if coef > 0:
                    ratio = tableau[r][-1] / coef
                    if best is None or ratio < best or (
                        ratio == best and basis[r] < basis[leave]
                    ):
                        best, leave = ratio, r
            if leave is None:
                raise SimplexError("unbounded covering LP (cannot happen)")
            pivot(leave, enter)

    # Phase 1: minimize the artificial sum.
    cost_row = reduced_cost_row(lambda j: one if j >= a0 else zero)
    run(lambda j: True)
    if cost_row[-1] != 0:  # -objective; zero iff artificials eliminated
        raise LpInfeasibleError("covering LP infeasible")
    for r, b in enumerate(basis):
        if b >= a0:  # degenerate artificial at zero: pivot it out if possible
            c = next(
                (j for j in range(a0) if tableau[r][j] != 0), None
            )
            if c is not None:
                pivot(r, c)

    # Phase 2: original costs, artificial columns banned.
    cost_row = reduced_cost_row(lambda j: costs[j] if j < n else zero)
    run(lambda j: j < a0)

    x = [zero] * n
    for r, b in enumerate(basis):
        if b < n:
            x[b] = tableau[r][-1]
    obj = sum((costs[j] * x[j] for j in range(n)), zero)
    return x, obj


def solve_cover_lp_float(costs, cuts):
    """HiGHS optimum of the covering LP; floats, no exactness guarantee."""
    n = len(costs)
    cuts = [sorted(set(cut)) for cut in cuts]
    for cut in cuts:
        if not cut:
            raise LpInfeasibleError("empty cut cannot be covered")
    if not cuts:
        return [0.0] * n, 0.0
    a_ub = np.zeros((len(cuts), n))
    for i, cut in enumerate(cuts):
        a_ub[i, cut] = -1.0
    b_ub = -np.ones(len(cuts))
    c = np.array([float(v) for v in costs])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=(0.0, 1.0), method="highs")
    if not res.success:
        raise SimplexError(f"LP solver failed: {res.message}")
    return list(res.x), float(res.fun)
