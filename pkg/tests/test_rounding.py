import math
import random
from fractions import Fraction

import pytest

import tct
from tct.model import InstanceError
from tct.rounding import (
    SAMPLE_DIGITS,
    bar_yehuda_even,
    compute_slacks,
    round_deterministic,
    round_naive,
    round_randomized,
    round_slack_deterministic,
    round_slack_randomized,
    sample_threshold_assignment,
    sample_thresholds,
    sample_triple,
)


class FixedDigitRng:
    """Feeds a constant permutation index to the triple sampler."""

    def __init__(self, index):
        self.index = index

    def randrange(self, n):
        return self.index


def test_triple_sums_to_one_exactly():
    rng = random.Random(3)
    for _ in range(200):
        x, y, z = sample_triple(rng)
        assert x + y + z == 1


def test_triple_extreme_digit_path():
    # permutation (0,1,2) every round drives the limit point (0, 1/3, 2/3)
    x, y, z = sample_triple(FixedDigitRng(0))
    lim = (Fraction(0), Fraction(1, 3), Fraction(2, 3))
    for got, want in zip((x, y, z), lim):
        assert abs(got - want) <= Fraction(1, 3**(SAMPLE_DIGITS - 1))
    assert x + y + z == 1


def test_triple_interval_membership():
    rng = random.Random(11)
    for _ in range(300):
        x, y, z = sample_triple(rng)
        assert Fraction(0) <= x <= Fraction(2, 9)
        assert Fraction(2, 9) <= y <= Fraction(4, 9)
        assert Fraction(4, 9) <= z <= Fraction(6, 9)


def test_triple_means_match_uniform_interval_means():
    rng = random.Random(5)
    n = 20000
    sums = [Fraction(0)] * 3
    for _ in range(n):
        t = sample_triple(rng)
        for i in range(3):
            sums[i] += t[i]
    means = [float(s) / n for s in sums]
    # uniform means 1/9, 3/9, 5/9; interval width 2/9 -> sd ~ w/sqrt(12)
    sd = (2 / 9) / math.sqrt(12 * n)
    for got, want in zip(means, (1 / 9, 3 / 9, 5 / 9)):
        assert abs(got - want) < 4 * sd


def test_thresholds_d2():
    rng = random.Random(0)
    for _ in range(50):
        vals, groups = sample_thresholds(2, rng)
        assert vals[0] + vals[1] == 1
        assert Fraction(0) <= vals[0] <= Fraction(1, 2)
        assert groups == ((1, 2),)


def test_thresholds_d4_pair_identities():
    rng = random.Random(1)
    for _ in range(50):
        vals, groups = sample_thresholds(4, rng)
        assert groups == ((1, 2), (3, 4))
        assert vals[0] + vals[1] == Fraction(4, 16)
        assert vals[2] + vals[3] == Fraction(12, 16)
        assert sum(vals) == 1


def test_thresholds_d5_triple_plus_pair():
    rng = random.Random(2)
    for _ in range(50):
        vals, groups = sample_thresholds(5, rng)
        assert groups == ((1, 2, 3), (4, 5))
        assert vals[0] + vals[1] + vals[2] == Fraction(9, 25)
        assert vals[3] + vals[4] == Fraction(16, 25)
        assert sum(vals) == 1


def test_thresholds_interval_membership():
    rng = random.Random(9)
    for d in (2, 3, 4, 5, 6, 7):
        for _ in range(30):
            vals, _ = sample_thresholds(d, rng)
            for j, a in enumerate(vals, 1):
                assert Fraction(2 * (j - 1), d * d) <= a <= Fraction(2 * j, d * d)


def test_threshold_assignment_applies_permutation():
    rng = random.Random(4)
    ta = sample_threshold_assignment(5, rng)
    assert sorted(ta.sigma) == [1, 2, 3, 4, 5]
    for i, pos in enumerate(ta.sigma):
        lo = Fraction(2 * (pos - 1), 25)
        hi = Fraction(2 * pos, 25)
        assert lo <= ta.a[i] <= hi


def gap_cover(d, k):
    norm, cover = tct.gen_gap_instance(d, k)
    return norm, tct.layer(norm.base), cover


def test_round_randomized_all_ones():
    norm, lay, _ = gap_cover(3, 2)
    x = {v: Fraction(1) for v in norm.jobs}
    sol = round_randomized(norm, lay, x, random.Random(0))
    assert sol.fast == frozenset(norm.jobs)


def test_round_randomized_high_mass_always_bought():
    norm, lay, _ = gap_cover(4, 2)
    rng = random.Random(1)
    x = {v: Fraction(0) for v in norm.jobs}
    vip = "1,2"
    x[vip] = Fraction(1, 2)  # = 2/d for d = 4
    for _ in range(100):
        sol = round_randomized(norm, lay, x, rng)
        assert vip in sol.fast


def test_round_randomized_marginal_law_spot():
    norm, lay, _ = gap_cover(4, 1)
    x = {v: Fraction(0) for v in norm.jobs}
    probe = "2,1"
    x[probe] = Fraction(3, 10)
    rng = random.Random(7)
    n = 20000
    hits = sum(probe in round_randomized(norm, lay, x, rng).fast for _ in range(n))
    p = min(1.0, 2 * 0.3)  # d/2 * x
    sd = math.sqrt(p * (1 - p) / n)
    assert abs(hits / n - p) < 4 * sd


def test_round_randomized_feasible_on_lp_solutions():
    rng = random.Random(123)
    for seed in range(6):
        norm = tct.gen_random_layered(3 + seed % 3, 12, 400 + seed)
        lay = tct.layer(norm.base)
        cover, _ = tct.solve_lp(norm, lay, eps=Fraction(1, 4), final_exact=False)
        for _ in range(20):
            sol = round_randomized(norm, lay, cover, rng)
            assert tct.check_feasible(norm, sol).feasible


def test_round_deterministic_zero_cover():
    norm = tct.gen_random_layered(3, 8, 9, slack_factor=Fraction(2))
    lay = tct.layer(norm.base)
    x = {v: Fraction(0) for v in norm.jobs}
    sol = round_deterministic(norm, lay, x)
    assert sol.fast == frozenset() and sol.cost == 0


def test_round_deterministic_gap34_bound():
    norm, lay, cover = gap_cover(3, 4)
    sol = round_deterministic(norm, lay, cover)
    assert tct.check_feasible(norm, sol).feasible
    assert sol.cost <= Fraction(3, 2) * cover.objective  # 7.5 -> cost <= 7
    assert sol.cost <= 7
    opt = tct.exact_tct_opt(norm)
    assert opt.cost == 6 and sol.cost >= opt.cost


def test_round_deterministic_is_pure():
    norm, lay, cover = gap_cover(4, 3)
    a = round_deterministic(norm, lay, cover)
    b = round_deterministic(norm, lay, cover)
    assert a == b


def test_round_deterministic_beats_bound_on_random_instances():
    for seed in range(10):
        d = 3 + seed % 3
        norm = tct.gen_random_layered(d, 10 + seed, 500 + seed)
        lay = tct.layer(norm.base)
        cover, _ = tct.solve_lp(norm, lay, eps=Fraction(1, 4), final_exact=False)
        sol = round_deterministic(norm, lay, cover)
        assert tct.check_feasible(norm, sol).feasible
        assert sol.cost <= Fraction(d, 2) * cover.objective


def test_det_cost_within_monte_carlo_range():
    norm, lay, cover = gap_cover(4, 3)
    det = round_deterministic(norm, lay, cover)
    assert det.cost <= Fraction(2) * cover.objective
    rng = random.Random(0)
    mc = min(round_randomized(norm, lay, cover, rng).cost for _ in range(1000))
    # reporting-only comparison; the bound is the guarantee
    assert det.cost <= Fraction(2) * cover.objective and mc >= 0


def test_slack_formula_unit_case():
    norm, lay, _ = gap_cover(4, 1)  # any d=4 layered view
    x = {v: Fraction(0) for v in norm.jobs}
    x["1,0"], x["1,1"] = Fraction(1, 10), Fraction(1, 4)
    ta = tct.ThresholdAssignment(
        sigma=(1, 2, 3, 4),
        a=(Fraction(3, 10), Fraction(1, 4), Fraction(3, 8), Fraction(1, 2)),
        groups=((1, 2), (3, 4)),
    )
    s = compute_slacks(lay, x, ta)
    # layer 1 holds x-values {1/10, 1/4, 0}: slack = 0.3 - 0.25 = 1/20
    assert s.s[0] == Fraction(1, 20)
    # layer 2: only zeros below 1/4 -> slack = min(1/4, a - 0) = 1/4
    assert s.s[1] == Fraction(1, 4)


def test_slack_empty_layer_uses_cap():
    lay = tct.LayeredView(layers=((), ("b",)), level={"b": 2}, depth=2)
    ta = tct.ThresholdAssignment(
        sigma=(1, 2), a=(Fraction(1, 8), Fraction(7, 8)), groups=((1, 2),)
    )
    s = compute_slacks(lay, {"b": Fraction(1)}, ta)
    assert s.s[0] == Fraction(1, 8)  # min(1/d, a) with no x below


def test_slack_rounding_requires_depth_four():
    norm, lay, cover = gap_cover(3, 2)
    with pytest.raises(InstanceError):
        round_slack_randomized(norm, lay, cover, random.Random(0))
    with pytest.raises(InstanceError):
        round_slack_deterministic(norm, lay, cover)


def test_slack_randomized_feasible_and_never_worse_than_plain():
    rng = random.Random(3)
    for seed in range(5):
        norm = tct.gen_random_layered(4, 14, 600 + seed)
        lay = tct.layer(norm.base)
        cover, _ = tct.solve_lp(norm, lay, eps=Fraction(1, 4), final_exact=False)
        for _ in range(30):
            sol = round_slack_randomized(norm, lay, cover, rng)
            assert tct.check_feasible(norm, sol).feasible


def test_slack_randomized_mean_within_bound():
    norm = tct.gen_random_layered(4, 20, 888)
    lay = tct.layer(norm.base)
    cover, _ = tct.solve_lp(norm, lay, eps=Fraction(1, 4), final_exact=False)
    if cover.objective == 0:
        pytest.skip("degenerate instance")
    rng = random.Random(42)
    n = 20000
    costs = []
    for _ in range(n):
        costs.append(float(round_slack_randomized(norm, lay, cover, rng).cost))
    mean = sum(costs) / n
    sd = (sum((c - mean) ** 2 for c in costs) / (n - 1)) ** 0.5 / math.sqrt(n)
    bound = float((Fraction(4, 2) - Fraction(4, 64 * 20)) * cover.objective)
    assert mean <= bound + 3 * sd


def test_slack_det_bound_and_feasibility():
    for seed in range(8):
        d = 4 + seed % 2
        n = 12 + seed
        norm = tct.gen_random_layered(d, n, 700 + seed)
        lay = tct.layer(norm.base)
        cover, _ = tct.solve_lp(norm, lay, eps=Fraction(1, 4), final_exact=False)
        sol = round_slack_deterministic(norm, lay, cover)
        assert tct.check_feasible(norm, sol).feasible
        assert sol.cost <= (Fraction(d, 2) - Fraction(d, 128 * n)) * cover.objective


def test_slack_det_zero_objective():
    norm = tct.gen_random_layered(4, 8, 10, slack_factor=Fraction(2))
    lay = tct.layer(norm.base)
    x = {v: Fraction(0) for v in norm.jobs}
    sol = round_slack_deterministic(norm, lay, x)
    assert sol.fast == frozenset()


def test_slack_det_single_layer_choices():
    # one populated layer among four; DP must pick the cheaper adequate cut
    jobs = ["a", "b", "s1", "s2", "s3", "s4"]
    edges = [("s1", "s2"), ("s2", "s3"), ("s3", "s4")]
    alts = {
        "a": [(0, 1), (4, 0)],
        "b": [(0, 1), (4, 0)],
        "s1": [(0, 1), (1, 0)],
        "s2": [(0, 1), (1, 0)],
        "s3": [(0, 1), (1, 0)],
        "s4": [(0, 1), (1, 0)],
    }
    inst = tct.make_instance(jobs, edges, alts, 4)
    norm = tct.NormalizedInstance.from_instance(inst)
    lay = tct.layer(norm.base)
    x = {v: Fraction(0) for v in norm.jobs}
    x["a"], x["b"] = Fraction(3, 10), Fraction(7, 10)
    sol = round_slack_deterministic(norm, lay, x)
    assert tct.check_feasible(norm, sol).feasible


def test_round_naive_examples():
    norm, lay, cover = gap_cover(3, 2)
    zero = {v: Fraction(0) for v in norm.jobs}
    assert round_naive(norm, lay, zero).fast == frozenset()
    third = {v: Fraction(1, 3) for v in norm.jobs}
    assert round_naive(norm, lay, third).fast == frozenset(norm.jobs)
    sol = round_naive(norm, lay, cover)
    want = {v for v in norm.jobs if int(v.split(",")[1]) >= 1}
    assert sol.fast == frozenset(want) and sol.cost == 6
    assert tct.check_feasible(norm, sol).feasible


def test_bar_yehuda_even_no_violation():
    jobs = ["a", "b"]
    alts = {v: [(0, 5), (1, 0)] for v in jobs}
    inst = tct.make_instance(jobs, [("a", "b")], alts, 3)
    norm = tct.NormalizedInstance.from_instance(inst)
    assert bar_yehuda_even(norm).fast == frozenset()


def test_bar_yehuda_even_single_chain():
    jobs = ["a", "b", "c"]
    edges = [("a", "b"), ("b", "c")]
    alts = {
        "a": [(0, 1), (1, 0)],
        "b": [(0, 2), (1, 0)],
        "c": [(0, 3), (1, 0)],
    }
    inst = tct.make_instance(jobs, edges, alts, 2)
    norm = tct.NormalizedInstance.from_instance(inst)
    sol = bar_yehuda_even(norm)
    assert sol.fast == frozenset({"a"}) and sol.cost == 1


def test_bar_yehuda_even_gap_bound_and_infeasibility():
    norm, _ = tct.gen_gap_instance(3, 2)
    sol = bar_yehuda_even(norm)
    assert tct.check_feasible(norm, sol).feasible
    lp = tct.exact_lp_opt(norm)
    assert sol.cost <= 3 * lp.objective

    from tct.model import INF, InfeasibleError

    inst = tct.make_instance(
        ["a"], [], {"a": [(0, "inf"), (5, 0)]}, 2
    )
    bad = tct.NormalizedInstance.from_instance(inst)
    with pytest.raises(InfeasibleError):
        bar_yehuda_even(bad)


def test_rounding_rejects_mass_on_unbuyable_jobs():
    norm = tct.dvd_to_tct(tct.gen_path(3, 2))
    lay = tct.layer(norm.base)
    fixed = next(v for v in norm.jobs if tct.model.is_inf(norm.fast_cost[v]))
    x = {v: Fraction(0) for v in norm.jobs}
    x[fixed] = Fraction(1, 2)
    with pytest.raises(InstanceError):
        round_naive(norm, lay, x)
