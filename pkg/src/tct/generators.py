"""Instance families, the path-deletion reduction, tensor constructions and
packing certificates.

DvdInstance is the vertex-deletion problem: delete fewest vertices of an
acyclic digraph so that no directed path with k vertices remains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    INF,
    FractionalCover,
    InstanceError,
    NormalizedInstance,
    TctInstance,
    to_rational,
    topological_order,
)


@dataclass(frozen=True)
class DvdInstance:
    """An acyclic digraph plus the path-length parameter k (vertex count)."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InstanceError("k must be at least 1")
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise InstanceError(f"duplicate vertex {v!r}")
            seen.add(v)
        for u, w in self.edges:
            if u not in seen or w not in seen:
                raise InstanceError(f"edge ({u!r}, {w!r}) references unknown vertex")
        topological_order(self.vertices, self.edges)

    def successors(self) -> dict[str, list[str]]:
        succ = {v: [] for v in self.vertices}
        for u, w in self.edges:
            succ[u].append(w)
        for v in succ:
            succ[v].sort()
        return succ


def dvd_depth(dvd: DvdInstance) -> int:
    """Vertex count of a longest directed path."""
    order = topological_order(dvd.vertices, dvd.edges)
    pred: dict[str, list[str]] = {v: [] for v in dvd.vertices}
    for u, w in dvd.edges:
        pred[w].append(u)
    level = {}
    for v in order:
        level[v] = 1 + max((level[p] for p in pred[v]), default=0)
    return max(level.values(), default=0)


def dvd_levels(dvd: DvdInstance) -> dict[str, int]:
    order = topological_order(dvd.vertices, dvd.edges)
    pred: dict[str, list[str]] = {v: [] for v in dvd.vertices}
    for u, w in dvd.edges:
        pred[w].append(u)
    level = {}
    for v in order:
        level[v] = 1 + max((level[p] for p in pred[v]), default=0)
    return level


def dvd_to_json(dvd: DvdInstance) -> dict:
    return {
        "vertices": list(dvd.vertices),
        "edges": [[u, w] for u, w in dvd.edges],
        "k": dvd.k,
    }


def dvd_from_json(data: dict) -> DvdInstance:
    try:
        return DvdInstance(
            vertices=tuple(data["vertices"]),
            edges=tuple((u, w) for u, w in data["edges"]),
            k=int(data["k"]),
        )
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed deletion-instance JSON: {exc}") from exc


# --- instance families -------------------------------------------------------


def gen_gap_instance(d: int, k: int):
    """The layered integrality-gap family plus its canonical fractional cover.

    Jobs (i, j) for levels i = 1..d and j = 0..k; every lower-level job
    precedes every higher-level one; job (i, j) either runs free with delay j
    or instantly at cost 1; deadline d*k/2.  The returned cover x = j/T with
    objective k+1 is feasible, while every integral solution costs d*k/2.
    """
    if d < 2 or k < 1:
        raise InstanceError("gap family needs d >= 2, k >= 1")
    deadline = Fraction(d * k, 2)
    jobs, alternatives = [], {}
    for i in range(1, d + 1):
        for j in range(0, k + 1):
            v = f"{i},{j}"
            jobs.append(v)
            alternatives[v] = ((Fraction(0), Fraction(1)), (Fraction(j), Fraction(0)))
    edges = []
    for i in range(1, d):
        for j in range(0, k + 1):
            for j2 in range(0, k + 1):
                edges.append((f"{i},{j}", f"{i + 1},{j2}"))
    base = TctInstance(
        jobs=tuple(jobs),
        edges=tuple(edges),
        alternatives=alternatives,
        deadline=deadline,
    )
    norm = NormalizedInstance.from_instance(base)
    x = {v: Fraction(int(v.split(",")[1]), 1) / deadline for v in jobs}
    cover = FractionalCover(
        x=x,
        objective=sum(x.values(), Fraction(0)),
        quality="heuristic",
    )
    return norm, cover


def gen_path(n: int, k: int = 2) -> DvdInstance:
    """The directed path on vertices 1..n."""
    if n < 1:
        raise InstanceError("path needs n >= 1")
    vertices = tuple(str(i) for i in range(1, n + 1))
    edges = tuple((str(i), str(i + 1)) for i in range(1, n))
    return DvdInstance(vertices=vertices, edges=edges, k=k)


def gen_tournament(n: int, k: int = 2) -> DvdInstance:
    """The acyclic tournament on vertices 1..n (edge i -> j for i < j)."""
    if n < 1:
        raise InstanceError("tournament needs n >= 1")
    vertices = tuple(str(i) for i in range(1, n + 1))
    edges = tuple(
        (str(i), str(j)) for i in range(1, n + 1) for j in range(i + 1, n + 1)
    )
    return DvdInstance(vertices=vertices, edges=edges, k=k)


def gen_random_dag(n: int, edge_prob: float, seed: int, k: int = 2,
                   max_depth: int | None = None) -> DvdInstance:
    """Random DAG on a fixed topological order; optionally depth-capped by
    rejecting cross-level edges."""
    rng = random.Random(seed)
    vertices = tuple(f"v{i:02d}" for i in range(1, n + 1))
    if max_depth is None:
        edges = tuple(
            (vertices[i], vertices[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < edge_prob
        )
        return DvdInstance(vertices=vertices, edges=edges, k=k)
    levels = {v: rng.randrange(1, max_depth + 1) for v in vertices}
    edges = tuple(
        (u, w)
        for u in vertices
        for w in vertices
        if levels[u] < levels[w] and rng.random() < edge_prob
    )
    return DvdInstance(vertices=vertices, edges=edges, k=k)


# --- reductions and constructions -------------------------------------------


def dvd_to_tct(dvd: DvdInstance) -> NormalizedInstance:
    """Encode path deletion as a time-cost tradeoff instance of equal depth
    and equal optimum.

    Vertex v becomes a column of depth(G) jobs (v, 1..d).  The job at v's
    level is variable (instant at cost 1, else delay d+1); the others are
    fixed at delay d (fast side priced at infinity).  Deadline d^2 + k - 1:
    only full chains with at least k slow variable jobs overrun it.
    """
    d = dvd_depth(dvd)
    if d == 0:
        raise InstanceError("empty digraph")
    level = dvd_levels(dvd)
    k = dvd.k
    jobs: list[str] = []
    alternatives: dict[str, tuple] = {}
    for v in dvd.vertices:
        for i in range(1, d + 1):
            vid = f"{v}@{i}"
            jobs.append(vid)
            if i == level[v]:
                alternatives[vid] = (
                    (Fraction(0), Fraction(1)),
                    (Fraction(d + 1), Fraction(0)),
                )
            else:
                alternatives[vid] = ((Fraction(0), INF), (Fraction(d), Fraction(0)))
    edges: list[tuple[str, str]] = []
    for v in dvd.vertices:
        for i in range(1, d):
            edges.append((f"{v}@{i}", f"{v}@{i + 1}"))
    for u, w in dvd.edges:
        for i in range(level[u], d):
            edges.append((f"{u}@{i}", f"{w}@{i + 1}"))
    deadline = Fraction(d * d + k - 1)
    base = TctInstance(
        jobs=tuple(jobs),
        edges=tuple(edges),
        alternatives=alternatives,
        deadline=deadline,
    )
    return NormalizedInstance.from_instance(base)


def tensor_with_tournament(dvd: DvdInstance, d: int) -> DvdInstance:
    """Tensor product with the acyclic tournament on d vertices.

    Vertices (v, i) for i = 1..d; edges ((v,i),(w,j)) iff (v,w) is an edge and
    i < j.  The result has depth at most d.
    """
    if d < 1:
        raise InstanceError("tensor factor needs d >= 1")
    vertices = tuple(f"{v}|{i}" for v in dvd.vertices for i in range(1, d + 1))
    edges = tuple(
        (f"{u}|{i}", f"{w}|{j}")
        for u, w in dvd.edges
        for i in range(1, d + 1)
        for j in range(i + 1, d + 1)
    )
    return DvdInstance(vertices=vertices, edges=edges, k=dvd.k)


def path_packing_certificate(r: int, d: int, k: int):
    """rd vertex-disjoint directed k-vertex paths in P_{(r+1)k-1} tensor D_d.

    Certifies OPT >= r*d for the deletion problem on that tensor.  Path (i, j)
    starts on the diagonal {(ki+m, j+m)}; entries overflowing column d wrap to
    ((s - k), t) at column t = s-column - d, which keeps each path a run of
    consecutive path vertices with strictly rising columns.
    """
    if r < 1 or k < 2 or k > d:
        raise InstanceError("packing needs r >= 1 and 2 <= k <= d")
    n = (r + 1) * k - 1
    paths = []
    for i in range(1, r + 1):
        for j in range(1, d + 1):
            raw = [(k * i + m, j + m) for m in range(k)]
            fixed = [(s - k, col - d) if col > d else (s, col) for s, col in raw]
            fixed.sort(key=lambda sc: sc[1])
            paths.append(tuple(f"{s}|{c}" for s, c in fixed))
    return paths


def verify_packing(r: int, d: int, k: int, paths) -> bool:
    """Structural check: paths are k-vertex directed paths in the tensor of
    P_{(r+1)k-1} with D_d, pairwise vertex-disjoint."""
    n = (r + 1) * k - 1
    tensor = tensor_with_tournament(gen_path(n, k), d)
    edge_set = set(tensor.edges)
    vertex_set = set(tensor.vertices)
    seen: set[str] = set()
    for path in paths:
        if len(path) != k:
            return False
        for v in path:
            if v not in vertex_set or v in seen:
                return False
            seen.add(v)
        for a, b in zip(path, path[1:]):
            if (a, b) not in edge_set:
                return False
    return len(paths) == r * d


def dvd_deletion_feasible(dvd: DvdInstance, deleted) -> bool:
    """True when deleting the given vertices leaves no k-vertex path."""
    deleted = set(deleted)
    remaining = [v for v in dvd.vertices if v not in deleted]
    keep = set(remaining)
    edges = [(u, w) for u, w in dvd.edges if u in keep and w in keep]
    order = topological_order(remaining, edges)
    pred: dict[str, list[str]] = {v: [] for v in remaining}
    for u, w in edges:
        pred[w].append(u)
    level = {}
    for v in order:
        level[v] = 1 + max((level[p] for p in pred[v]), default=0)
    return max(level.values(), default=0) < dvd.k


def dvd_greedy(dvd: DvdInstance):
    """k-approximation: extract lexicographically least k-vertex paths until
    none remains; returns (deleted vertex set, witness paths).

    The witness paths are vertex-disjoint, so their count lower-bounds the
    optimum while the returned set has exactly k times as many vertices.
    """
    k = dvd.k
    succ = dvd.successors()
    alive = set(dvd.vertices)
    witness: list[tuple[str, ...]] = []

    def longest_from() -> dict[str, int]:
        order = topological_order(sorted(alive),
                                  [(u, w) for u, w in dvd.edges
                                   if u in alive and w in alive])
        out = {}
        for v in reversed(order):
            out[v] = 1 + max((out[w] for w in succ[v] if w in alive), default=0)
        return out

    while True:
        reach = longest_from()
        starts = sorted(v for v in alive if reach[v] >= k)
        if not starts:
            break
        path = [starts[0]]
        while len(path) < k:
            nxt = min(
                w for w in succ[path[-1]]
                if w in alive and reach[w] >= k - len(path)
            )
            path.append(nxt)
        witness.append(tuple(path))
        alive -= set(path)
    deleted = frozenset(v for p in witness for v in p)
    return deleted, witness


def gen_random_layered(
    d: int,
    n: int,
    seed: int,
    cost_range=(1, 9),
    delay_range=(1, 9),
    slack_factor=Fraction(3, 5),
) -> NormalizedInstance:
    """Random normalized instance with exact depth d.

    A spine chain of d jobs pins the depth; the remaining jobs get random
    levels and level-increasing edges.  The deadline is slack_factor times the
    all-slow maximum chain delay, so slack_factor < 1 makes some chains bind
    while the all-fast solution stays feasible.
    """
    if d < 2 or n < d:
        raise InstanceError("random family needs d >= 2 and n >= d")
    lo_c, hi_c = cost_range
    lo_t, hi_t = delay_range
    if lo_c < 0 or lo_t < 0 or lo_c > hi_c or lo_t > hi_t:
        raise InstanceError("bad cost/delay ranges")
    slack = to_rational(slack_factor)
    if slack <= 0:
        raise InstanceError("slack factor must be positive")
    rng = random.Random(seed)
    jobs = tuple(f"j{i:03d}" for i in range(n))
    level = {}
    for i, v in enumerate(jobs):
        level[v] = i + 1 if i < d else rng.randrange(1, d + 1)
    edges = []
    for i in range(d - 1):
        edges.append((jobs[i], jobs[i + 1]))
    for u in jobs:
        for w in jobs:
            if level[u] < level[w] and (u, w) not in edges[: d - 1]:
                prob = 0.45 if level[w] == level[u] + 1 else 0.08
                if rng.random() < prob:
                    edges.append((u, w))
    alternatives = {}
    for v in jobs:
        t = Fraction(rng.randint(lo_t, hi_t))
        c = Fraction(rng.randint(lo_c, hi_c))
        alternatives[v] = ((Fraction(0), c), (t, Fraction(0)))
    probe = TctInstance(
        jobs=jobs,
        edges=tuple(dict.fromkeys(edges)),  # dedupe, order-stable
        alternatives=alternatives,
        deadline=Fraction(1),
    )
    order = topological_order(probe.jobs, probe.edges)
    pred = probe.predecessors()
    dist = {}
    for v in order:
        dist[v] = alternatives[v][1][0] + max(
            (dist[p] for p in pred[v]), default=Fraction(0)
        )
    horizon = max(dist.values())
    deadline = slack * horizon
    if deadline <= 0:
        deadline = Fraction(1)
    base = TctInstance(
        jobs=jobs,
        edges=probe.edges,
        alternatives=alternatives,
        deadline=deadline,
    )
    return NormalizedInstance.from_instance(base)
