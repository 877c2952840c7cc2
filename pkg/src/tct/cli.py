"""Command-line front end.

Subcommands: gen, normalize, lp, solve, exact, verify, bench, reduce, tensor,
certify.  Exit codes: 0 ok, 1 infeasible / verification failure, 2 input
error, 3 resource cap exceeded.  All JSON outputs are byte-identical across
reruns with the same inputs and seed; wall-clock timings appear only in the
plain-text bench table.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import exact as exact_mod
from . import generators as gen_mod
from . import lp as lp_mod
from . import rounding as round_mod
from .model import (
    CapExceededError,
    FractionalCover,
    InfeasibleError,
    InstanceError,
    IterationLimitError,
    NormalizedInstance,
    accelerate,
    check_feasible,
    instance_from_json,
    instance_to_json,
    layer,
    rational_to_json,
    solution_cost,
    solution_from_json,
    solution_to_json,
    to_rational,
)
from .normalize import normalize

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_CAP = 3

GUARANTEES = {
    "det": lambda d, n: Fraction(d, 2),
    "rand": lambda d, n: Fraction(d, 2),
    "slack-det": lambda d, n: Fraction(d, 2) - Fraction(d, 128 * n),
    "slack-rand": lambda d, n: Fraction(d, 2) - Fraction(d, 64 * n),
    "naive": lambda d, n: Fraction(d),
    "bye": lambda d, n: Fraction(d),
    "exact": lambda d, n: Fraction(1),
}


def _dump_json(data, path):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_normalized(path) -> NormalizedInstance:
    inst = instance_from_json(_load_json(path))
    try:
        return NormalizedInstance.from_instance(inst)
    except InstanceError as exc:
        raise InstanceError(
            f"{path}: not in normalized two-alternative form "
            f"(run `tct normalize` first): {exc}"
        ) from exc


def _cover_to_json(cover: FractionalCover) -> dict:
    return {
        "x": {v: rational_to_json(val) for v, val in sorted(cover.x.items())},
        "objective": rational_to_json(cover.objective),
        "quality": cover.quality,
        "eps": None if cover.eps is None else rational_to_json(cover.eps),
    }


def _cover_from_json(data) -> dict:
    return {v: to_rational(val) for v, val in data["x"].items()}


# --- subcommands -------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.family == "gap":
        norm, cover = gen_mod.gen_gap_instance(args.d, args.k)
        _dump_json(instance_to_json(norm), args.out)
        if args.cover:
            _dump_json(_cover_to_json(cover), args.cover)
    elif args.family == "random":
        norm = gen_mod.gen_random_layered(
            args.d,
            args.n,
            args.seed,
            cost_range=tuple(int(s) for s in args.cost_range.split(",")),
            delay_range=tuple(int(s) for s in args.delay_range.split(",")),
            slack_factor=to_rational(args.slack),
        )
        _dump_json(instance_to_json(norm), args.out)
    elif args.family == "dvd-path":
        _dump_json(gen_mod.dvd_to_json(gen_mod.gen_path(args.n, args.k)), args.out)
    elif args.family == "dvd-tournament":
        _dump_json(
            gen_mod.dvd_to_json(gen_mod.gen_tournament(args.n, args.k)), args.out
        )
    else:  # pragma: no cover - argparse restricts choices
        raise InstanceError(f"unknown family {args.family!r}")
    return EXIT_OK


def cmd_normalize(args) -> int:
    inst = instance_from_json(_load_json(args.infile))
    norm = normalize(inst)
    _dump_json(instance_to_json(norm), args.out)
    if args.map:
        _dump_json(
            {"origin_map": {cid: list(pair) for cid, pair in
                            sorted(norm.origin_map.items())}},
            args.map,
        )
    return EXIT_OK


def cmd_lp(args) -> int:
    norm = _load_normalized(args.infile)
    if args.exact:
        cover, _pool = lp_mod.solve_lp(norm, exact=True)
    else:
        cover, _pool = lp_mod.solve_lp(norm, eps=to_rational(args.eps))
    _dump_json(_cover_to_json(cover), args.out)
    return EXIT_OK


def run_algorithm(norm, layered, algo, cover, seed, trials=1):
    """One solver run; randomized algorithms keep the cheapest of `trials`."""
    if algo == "exact":
        return exact_mod.exact_tct_opt(norm)
    if algo == "bye":
        return round_mod.bar_yehuda_even(norm)
    if algo == "det":
        return round_mod.round_deterministic(norm, layered, cover)
    if algo == "naive":
        return round_mod.round_naive(norm, layered, cover)
    if algo == "slack-det":
        return round_mod.round_slack_deterministic(norm, layered, cover)
    best = None
    for t in range(max(trials, 1)):
        rng = random.Random(seed * 1_000_003 + t)
        if algo == "rand":
            sol = round_mod.round_randomized(norm, layered, cover, rng)
        elif algo == "slack-rand":
            sol = round_mod.round_slack_randomized(norm, layered, cover, rng)
        else:
            raise InstanceError(f"unknown algorithm {algo!r}")
        if best is None or sol.cost < best.cost:
            best = sol
    return best


def cmd_solve(args) -> int:
    norm = _load_normalized(args.infile)
    layered = layer(norm.base)
    needs_cover = args.algo in ("det", "rand", "slack-det", "slack-rand", "naive")
    cover = None
    if needs_cover:
        cover, _pool = lp_mod.solve_lp(norm, layered, eps=to_rational(args.eps))
    sol = run_algorithm(norm, layered, args.algo, cover, args.seed, args.trials)
    lp_obj = cover.objective if cover is not None else None
    record = solution_to_json(
        sol,
        algorithm=args.algo,
        seed=args.seed,
        lp_objective=None if lp_obj is None else rational_to_json(lp_obj),
        ratio_to_lp=(
            None
            if not lp_obj
            else rational_to_json(Fraction(sol.cost) / Fraction(lp_obj))
        ),
    )
    _dump_json(record, args.out)
    return EXIT_OK


def cmd_exact(args) -> int:
    if args.kind == "tct":
        norm = _load_normalized(args.infile)
        sol = exact_mod.exact_tct_opt(norm, max_jobs=args.cap)
        _dump_json(solution_to_json(sol, algorithm="exact"), args.out)
    elif args.kind == "dvd":
        dvd = gen_mod.dvd_from_json(_load_json(args.infile))
        opt = exact_mod.exact_dvd_opt(dvd, max_vertices=args.cap)
        _dump_json({"deleted": sorted(opt), "size": len(opt)}, args.out)
    elif args.kind == "lp":
        norm = _load_normalized(args.infile)
        cover = exact_mod.exact_lp_opt(norm, max_jobs=args.cap)
        _dump_json(_cover_to_json(cover), args.out)
    elif args.kind == "blocker":
        norm = _load_normalized(args.infile)
        cuts = exact_mod.enumerate_blocker(norm, max_jobs=args.cap)
        _dump_json({"cuts": [list(c) for c in cuts]}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    norm = _load_normalized(args.instance)
    fast, declared = solution_from_json(_load_json(args.solution))
    actual = solution_cost(norm, fast)
    if declared != actual:
        print(
            f"warning: declared cost {declared} != recomputed {actual}; "
            "using the recomputed value",
            file=sys.stderr,
        )
    result = check_feasible(norm, fast)
    if result.feasible:
        print(f"feasible: max chain delay {result.max_delay} <= {norm.deadline}")
        return EXIT_OK
    print(
        f"infeasible: chain {list(result.witness)} has slow delay "
        f"{result.max_delay} > {norm.deadline}"
    )
    return EXIT_INFEASIBLE


def cmd_reduce(args) -> int:
    dvd = gen_mod.dvd_from_json(_load_json(args.infile))
    if args.k is not None:
        dvd = gen_mod.DvdInstance(vertices=dvd.vertices, edges=dvd.edges, k=args.k)
    norm = gen_mod.dvd_to_tct(dvd)
    _dump_json(instance_to_json(norm), args.out)
    return EXIT_OK


def cmd_tensor(args) -> int:
    dvd = gen_mod.dvd_from_json(_load_json(args.infile))
    out = gen_mod.tensor_with_tournament(dvd, args.d)
    _dump_json(gen_mod.dvd_to_json(out), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    paths = gen_mod.path_packing_certificate(args.r, args.d, args.k)
    ok = gen_mod.verify_packing(args.r, args.d, args.k, paths)
    if not ok:
        print("packing verification FAILED", file=sys.stderr)
        return EXIT_INFEASIBLE
    n = (args.r + 1) * args.k - 1
    print(
        f"verified: {args.r * args.d} disjoint {args.k}-vertex paths in the "
        f"tensor of P_{n} with the {args.d}-tournament; deletion optimum >= "
        f"{args.r * args.d}"
    )
    if args.out:
        _dump_json(
            {"r": args.r, "d": args.d, "k": args.k,
             "paths": [list(p) for p in paths]},
            args.out,
        )
    return EXIT_OK


def _bench_instance(spec, index):
    if "file" in spec:
        norm = _load_normalized(spec["file"])
        return f"file:{spec['file']}", norm, None
    family = spec.get("family")
    if family == "gap":
        d, k = int(spec["d"]), int(spec["k"])
        norm, cover = gen_mod.gen_gap_instance(d, k)
        return f"gap(d={d},k={k})", norm, ("gap", d, k)
    if family == "random":
        d, n, seed = int(spec["d"]), int(spec["n"]), int(spec.get("seed", index))
        norm = gen_mod.gen_random_layered(
            d, n, seed, slack_factor=to_rational(spec.get("slack", "3/5"))
        )
        return f"random(d={d},n={n},seed={seed})", norm, None
    raise InstanceError(f"bench instance spec not understood: {spec}")


def cmd_bench(args) -> int:
    config = _load_json(args.config)
    algorithms = config.get("algorithms", ["det", "naive", "bye"])
    trials = int(config.get("trials", 1))
    seed = int(config.get("seed", args.seed))
    eps = to_rational(config.get("eps", "1/20"))
    oracle_cap = int(config.get("exact_cap", 25))

    instances = []
    for i, spec in enumerate(config.get("instances", [])):
        instances.append((_bench_instance(spec, i), spec))

    def run_one(task):
        (name, norm, gap_info), algo = task
        layered = layer(norm.base)
        d, n = layered.depth, len(norm.jobs)
        t0 = time.perf_counter()
        cover = None
        if algo in ("det", "rand", "slack-det", "slack-rand", "naive"):
            cover, _ = lp_mod.solve_lp(norm, layered, eps=eps, final_exact=False)
        try:
            sol = run_algorithm(norm, layered, algo, cover, seed, trials)
        except (InstanceError, InfeasibleError, CapExceededError) as exc:
            return {
                "instance": name, "algorithm": algo, "error": str(exc),
            }, time.perf_counter() - t0, gap_info, None
        elapsed = time.perf_counter() - t0
        lp_obj = cover.objective if cover is not None else None
        bound = GUARANTEES[algo](d, n)
        row = {
            "instance": name,
            "algorithm": algo,
            "n": n,
            "depth": d,
            "lp_objective": None if lp_obj is None else rational_to_json(lp_obj),
            "cost": rational_to_json(sol.cost),
            "ratio_to_lp": (
                None if not lp_obj else
                rational_to_json(Fraction(sol.cost) / Fraction(lp_obj))
            ),
            "bound": rational_to_json(bound),
            "ok": (
                None if not lp_obj else
                bool(Fraction(sol.cost) <= bound * Fraction(lp_obj))
            ),
        }
        return row, elapsed, gap_info, sol

    tasks = [(inst, algo) for inst, _spec in instances for algo in algorithms]
    workers = max(1, args.workers)
    if workers == 1:
        outcomes = [run_one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, tasks))

    rows = []
    gap_curve = {}
    for (row, elapsed, gap_info, sol) in outcomes:
        row["_elapsed"] = elapsed
        rows.append(row)
        if gap_info is not None and sol is not None and "error" not in row:
            _tag, d, k = gap_info
            if (d, k) not in gap_curve:
                name = row["instance"]
                try:
                    norm, cover = gen_mod.gen_gap_instance(d, k)
                    if len(norm.jobs) <= oracle_cap + 2:
                        opt = exact_mod.exact_tct_opt(norm, max_jobs=oracle_cap + 5)
                        gap_curve[(d, k)] = {
                            "instance": name,
                            "d": d,
                            "k": k,
                            "opt": rational_to_json(opt.cost),
                            "fractional": rational_to_json(cover.objective),
                            "ratio": rational_to_json(
                                Fraction(opt.cost) / Fraction(cover.objective)
                            ),
                        }
                    else:
                        gap_curve[(d, k)] = {
                            "instance": name, "d": d, "k": k, "opt": None,
                            "note": "no oracle (cap exceeded)",
                        }
                except CapExceededError:
                    gap_curve[(d, k)] = {
                        "instance": name, "d": d, "k": k, "opt": None,
                        "note": "no oracle (cap exceeded)",
                    }
    rows.sort(key=lambda r: (r["instance"], r["algorithm"]))
    elapsed_by_row = [r.pop("_elapsed") for r in rows]
    report = {
        "rows": rows,
        "gap_curve": [gap_curve[key] for key in sorted(gap_curve)],
    }
    if args.out:
        _dump_json(report, args.out)
    if args.format == "table" or not args.out:
        fmt = "%-28s %-10s %10s %10s %8s %6s %9s"
        print(fmt % ("instance", "algo", "lp", "cost", "ratio", "ok", "time[s]"))
        for row, elapsed in zip(rows, elapsed_by_row):
            if "error" in row:
                print(f"{row['instance']:<28} {row['algorithm']:<10} error: "
                      f"{row['error']}")
                continue
            ratio = row["ratio_to_lp"]
            print(fmt % (
                row["instance"][:28],
                row["algorithm"],
                str(row["lp_objective"]),
                str(row["cost"]),
                (f"{float(Fraction(str(ratio))):.3f}" if ratio else "-"),
                {True: "yes", False: "NO", None: "-"}[row["ok"]],
                f"{elapsed:.2f}",
            ))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tct",
        description="Deadline time-cost tradeoff solvers and oracles",
    )
    parser.add_argument("--seed", type=int, default=0, help="global RNG seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate instance families")
    p.add_argument("family", choices=["gap", "random", "dvd-path", "dvd-tournament"])
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cost-range", default="1,9")
    p.add_argument("--delay-range", default="1,9")
    p.add_argument("--slack", default="3/5")
    p.add_argument("--cover", help="also write the canonical fractional cover (gap)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("normalize", help="rewrite into two-alternative form")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--map", help="write the copy -> (job, rank) origin map")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("lp", help="solve the covering LP")
    p.add_argument("--in", dest="infile", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true")
    group.add_argument("--eps", default="1/20")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser("solve", help="LP + rounding / baselines / exact")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument(
        "--algo",
        choices=["det", "rand", "slack-det", "slack-rand", "naive", "bye", "exact"],
        default="det",
    )
    p.add_argument("--eps", default="1/20")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="brute-force oracles")
    p.add_argument("kind", choices=["tct", "dvd", "lp", "blocker"])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--cap", type=int, default=25)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("verify", help="check a solution file")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="path-deletion -> time-cost tradeoff")
    p.add_argument("what", choices=["dvd-to-tct"])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("tensor", help="tensor a digraph with the d-tournament")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("certify", help="verify packing certificates")
    p.add_argument("what", choices=["packing"])
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bench", help="run the experiment harness")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CapExceededError, IterationLimitError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
