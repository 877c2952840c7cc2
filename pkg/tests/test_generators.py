import itertools
import json
import random
from fractions import Fraction

import pytest

import tct
from tct.generators import (
    DvdInstance,
    dvd_deletion_feasible,
    dvd_depth,
    dvd_greedy,
    dvd_to_tct,
    gen_gap_instance,
    gen_path,
    gen_random_dag,
    gen_random_layered,
    gen_tournament,
    path_packing_certificate,
    tensor_with_tournament,
    verify_packing,
)
from tct.model import InstanceError

from conftest import oracle_dvd_opt


def test_gap_instance_shape():
    norm, cover = gen_gap_instance(3, 2)
    assert len(norm.jobs) == 9
    assert norm.deadline == 3
    assert cover.objective == 3
    assert cover.x["2,1"] == Fraction(1, 3)
    assert tct.compute_depth(norm.base) == 3


def test_gap_instance_larger():
    norm, cover = gen_gap_instance(3, 4)
    assert len(norm.jobs) == 15
    assert norm.deadline == 6
    assert cover.objective == 5
    opt = tct.exact_tct_opt(norm)
    assert opt.cost == 6  # d*k/2


def test_gap_ratio_lower_bound():
    for k in (2, 4):
        norm, cover = gen_gap_instance(3, k)
        opt = tct.exact_tct_opt(norm)
        assert Fraction(opt.cost) / cover.objective >= Fraction(3 * k, 2) / (k + 1)


def test_gap_cover_is_lp_feasible():
    norm, cover = gen_gap_instance(3, 3)
    for cut in tct.enumerate_blocker(norm):
        assert sum(cover.x[v] for v in cut) >= 1


def test_path_and_tournament_edges():
    assert len(gen_tournament(3).edges) == 3
    assert len(gen_path(5).edges) == 4


def test_tournament_opt_formula():
    for n in range(2, 8):
        for k in range(2, min(n, 5) + 1):
            opt = tct.exact_dvd_opt(gen_tournament(n, k))
            assert len(opt) == n - k + 1, (n, k)


def test_dvd_to_tct_p3():
    dvd = gen_path(3, 2)
    norm = dvd_to_tct(dvd)
    assert len(norm.jobs) == 9
    assert norm.deadline == 10
    assert tct.compute_depth(norm.base) == 3
    opt = tct.exact_tct_opt(norm)
    assert opt.cost == 1 == len(tct.exact_dvd_opt(dvd))


def test_dvd_to_tct_chain_delay_law():
    dvd = gen_path(4, 2)
    norm = dvd_to_tct(dvd)
    d = 4
    # column chain of vertex 1 plus diagonal: vary the accelerated variables
    res = tct.check_feasible(norm, frozenset())
    # slowest chain has one variable job per column vertex: delay d^2 + j
    assert res.max_delay == d * d + 4


def test_dvd_to_tct_edgeless():
    dvd = DvdInstance(("a", "b"), (), 2)
    norm = dvd_to_tct(dvd)
    assert tct.check_feasible(norm, frozenset()).feasible
    assert tct.exact_tct_opt(norm).cost == 0


def test_dvd_to_tct_k_above_depth():
    dvd = DvdInstance(("a", "b"), (("a", "b"),), 3)  # depth 2 < k
    norm = dvd_to_tct(dvd)
    assert tct.check_feasible(norm, frozenset()).feasible


def test_tensor_counts_and_depth():
    t = tensor_with_tournament(gen_path(4, 2), 4)
    assert len(t.vertices) == 16
    assert len(t.edges) == 18
    assert dvd_depth(t) <= 4


def test_tensor_edgeless():
    t = tensor_with_tournament(DvdInstance(("a",), (), 2), 3)
    assert len(t.vertices) == 3 and not t.edges


def test_packing_certificate_shapes():
    for (r, d, k) in [(1, 2, 2), (2, 3, 2), (3, 5, 3), (2, 4, 3), (1, 6, 4)]:
        paths = path_packing_certificate(r, d, k)
        assert len(paths) == r * d
        assert verify_packing(r, d, k, paths), (r, d, k)


def test_packing_certificate_grid():
    for r in (1, 2, 3):
        for d in range(2, 7):
            for k in range(2, d + 1):
                paths = path_packing_certificate(r, d, k)
                assert verify_packing(r, d, k, paths), (r, d, k)


def test_packing_parameter_validation():
    with pytest.raises(InstanceError):
        path_packing_certificate(0, 3, 2)
    with pytest.raises(InstanceError):
        path_packing_certificate(1, 2, 3)


def test_upper_bound_witness_product_cover():
    rng = random.Random(5)
    for seed in range(6):
        dvd = gen_random_dag(5, 0.4, seed, k=2)
        opt = tct.exact_dvd_opt(dvd)
        for d in (2, 3):
            t = tensor_with_tournament(dvd, d)
            lifted = {f"{v}|{i}" for v in opt for i in range(1, d + 1)}
            assert dvd_deletion_feasible(t, lifted)


def test_tournament_tensor_explicit_solution():
    for n in range(2, 7):
        for d in range(2, 6):
            for k in range(2, min(n, d) + 1):
                t = tensor_with_tournament(gen_tournament(n, k), d)
                explicit = {
                    f"{i}|{j}"
                    for i in range(1, n - k + 2)
                    for j in range(1, d + 2 - k)
                }
                assert dvd_deletion_feasible(t, explicit), (n, d, k)


def test_dvd_greedy_path9():
    deleted, witness = dvd_greedy(gen_path(9, 3))
    assert len(witness) == 3
    assert len(deleted) == 9
    assert len(tct.exact_dvd_opt(gen_path(9, 3))) == 3


def test_dvd_greedy_edgeless():
    deleted, witness = dvd_greedy(DvdInstance(("a", "b"), (), 2))
    assert deleted == frozenset() and witness == []


def test_dvd_greedy_tournament4():
    deleted, witness = dvd_greedy(gen_tournament(4, 4))
    assert len(witness) == 1 and len(deleted) == 4
    assert len(tct.exact_dvd_opt(gen_tournament(4, 4))) == 1


def test_dvd_greedy_hits_everything_and_bounds_opt():
    for seed in range(8):
        dvd = gen_random_dag(7, 0.35, 50 + seed, k=3)
        deleted, witness = dvd_greedy(dvd)
        assert dvd_deletion_feasible(dvd, deleted)
        for a, b in itertools.combinations(witness, 2):
            assert not set(a) & set(b)
        opt = tct.exact_dvd_opt(dvd)
        assert len(witness) <= len(opt)
        assert len(deleted) <= dvd.k * len(opt)


def test_random_layered_seed_stability():
    a = gen_random_layered(4, 15, 42)
    b = gen_random_layered(4, 15, 42)
    assert tct.instance_to_json(a) == tct.instance_to_json(b)
    c = gen_random_layered(4, 15, 43)
    assert tct.instance_to_json(a) != tct.instance_to_json(c)


def test_random_layered_depth_exact():
    for seed in range(10):
        d = 2 + seed % 4
        norm = gen_random_layered(d, d + 6, seed)
        assert tct.compute_depth(norm.base) == d


def test_random_layered_all_fast_feasible():
    for seed in range(5):
        norm = gen_random_layered(3, 12, 800 + seed)
        assert tct.check_feasible(norm, set(norm.jobs)).feasible


def test_random_dag_depth_cap():
    for seed in range(6):
        dvd = gen_random_dag(6, 0.5, seed, k=2, max_depth=3)
        assert dvd_depth(dvd) <= 3


def test_exact_dvd_matches_subset_oracle():
    for seed in range(6):
        dvd = gen_random_dag(6, 0.4, 30 + seed, k=2)
        assert len(tct.exact_dvd_opt(dvd)) == len(oracle_dvd_opt(dvd))
