"""Brute-force ground truth for tiny instances.

Nothing here shares logic with the solver or with the greedy verifier: the
degeneracy test backtracks over every peelable vertex, and transversals are
found by plain enumeration.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .cover import Cover, Transversal, ValueFunction
from .errors import BudgetExceeded
from .graph_core import Graph


@dataclass
class OracleBudget:
    max_vertices: int = 10
    max_width: int = 5
    max_transversals: int = 2_000_000
    time_limit: float = 120.0
    _start: float = field(default=0.0, repr=False)
    _count: int = field(default=0, repr=False)

    def start(self) -> "OracleBudget":
        self._start = time.monotonic()
        self._count = 0
        return self

    def tick(self, k: int = 1) -> None:
        self._count += k
        if self._count > self.max_transversals:
            raise BudgetExceeded(f"more than {self.max_transversals} candidates")
        if self._count % 1024 == 0 and time.monotonic() - self._start > self.time_limit:
            raise BudgetExceeded(f"time limit of {self.time_limit}s exceeded")


def _conflicts(cover: Cover, choice: Mapping[int, int]) -> dict[int, set[int]]:
    adj = {v: set() for v in choice}
    for v, i in choice.items():
        for u, row in cover.mate[v].items():
            if u in choice and row[i] == choice[u]:
                adj[v].add(u)
    return adj


def peel_order_backtracking(
    cover: Cover, f: ValueFunction, choice: Mapping[int, int]
) -> list[int] | None:
    """Some f-removing order of ``H[choice]`` found by exhaustive backtracking.

    At each step every vertex whose degree in what is left is below its
    f-value is tried in turn; dead ends are memoised by the remaining set.
    """
    adj = _conflicts(cover, choice)
    fv = {v: f.values[v][i] for v, i in choice.items()}
    dead: set[frozenset[int]] = set()

    def go(left: frozenset[int]) -> list[int] | None:
        if not left:
            return []
        if left in dead:
            return None
        for x in sorted(left):
            if len(adj[x] & left) < fv[x]:
                rest = go(left - {x})
                if rest is not None:
                    return [x] + rest
        dead.add(left)
        return None

    return go(frozenset(choice))


def is_degenerate_backtracking(cover: Cover, f: ValueFunction, choice: Mapping[int, int]) -> bool:
    return peel_order_backtracking(cover, f, choice) is not None


def _bfs_vertices(graph: Graph, start: Sequence[int]) -> list[int]:
    order = list(dict.fromkeys(start))
    seen = set(order)
    k = 0
    while len(order) < graph.n:
        if k == len(order):
            v = min(set(range(graph.n)) - seen)
            order.append(v)
            seen.add(v)
        v = order[k]
        k += 1
        for u in graph.adjacency[v]:
            if u not in seen:
                seen.add(u)
                order.append(u)
    return order


def exhaustive_transversal(
    cover: Cover,
    f: ValueFunction,
    seed: Mapping[int, int] | None = None,
    budget: OracleBudget | None = None,
) -> Transversal | None:
    """A strictly f-degenerate transversal extending ``seed``, or ``None``.

    Vertices are assigned in BFS order from the seed, slots ascending; a
    branch is cut as soon as the partial choice is not strictly
    f-degenerate (the property is hereditary).
    """
    budget = (budget or OracleBudget()).start()
    g = cover.graph
    if g.n > budget.max_vertices or cover.s > budget.max_width:
        raise BudgetExceeded(f"{g.n} vertices of width {cover.s} exceed the oracle budget")
    seed = dict(seed or {})
    if seed and not is_degenerate_backtracking(cover, f, seed):
        return None
    todo = [v for v in _bfs_vertices(g, sorted(seed) or [0]) if v not in seed]
    choice = dict(seed)

    def go(k: int) -> bool:
        if k == len(todo):
            return True
        v = todo[k]
        for i in range(cover.s):
            if f.values[v][i] <= 0:
                continue
            budget.tick()
            choice[v] = i
            if is_degenerate_backtracking(cover, f, choice) and go(k + 1):
                return True
            del choice[v]
        return False

    if not go(0):
        return None
    order = peel_order_backtracking(cover, f, choice)
    return Transversal(dict(choice), tuple((v, choice[v]) for v in order))


# --------------------------------------------------------------------------
# DP-colourability over a space of covers


def edge_pairings(k: int, perfect_only: bool) -> list[tuple[tuple[int, int], ...]]:
    """All matchings between two copies of [k] (only the perfect ones if asked)."""
    if perfect_only:
        return [tuple(enumerate(p)) for p in itertools.permutations(range(k))]
    out = []
    for r in range(k + 1):
        for left in itertools.combinations(range(k), r):
            for right in itertools.permutations(range(k), r):
                out.append(tuple(zip(left, right)))
    return out


def _covers_exhaustive(graph: Graph, k: int) -> Iterator[Cover]:
    edges = list(graph.edges())
    options = edge_pairings(k, perfect_only=k >= 3)
    for combo in itertools.product(options, repeat=len(edges)):
        yield Cover.from_pairs(graph, k, dict(zip(edges, combo)))


def _covers_sampled(graph: Graph, k: int, samples: int, rng: random.Random) -> Iterator[Cover]:
    edges = list(graph.edges())
    for _ in range(samples):
        pairs = {}
        for e in edges:
            perm = list(range(k))
            rng.shuffle(perm)
            pairs[e] = list(enumerate(perm))
        yield Cover.from_pairs(graph, k, pairs)


@dataclass(frozen=True)
class DPVerdict:
    """``refuted`` with a witness cover, or unrefuted after ``checked`` covers."""

    refuted: bool
    checked: int
    exhaustive: bool
    witness: Cover | None = None

    def to_json(self) -> dict:
        out: dict = {"refuted": self.refuted, "checked": self.checked, "exhaustive": self.exhaustive}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def has_dp_coloring(cover: Cover, budget: OracleBudget | None = None) -> bool:
    f = ValueFunction.constant(cover.graph.n, cover.s, 1)
    return exhaustive_transversal(cover, f, None, budget) is not None


def dp_colorability(
    graph: Graph,
    k: int,
    *,
    samples: int | None = None,
    rng: random.Random | None = None,
    budget: OracleBudget | None = None,
) -> DPVerdict:
    """Look for a width-``k`` cover of ``graph`` with no DP-colouring.

    With ``samples=None`` the whole matching space is enumerated: every
    partial pairing per edge for ``k <= 2``, only perfect ones for ``k >= 3``
    (dropping pairs can only help).  Otherwise ``samples`` random perfect
    covers are tried, which refutes but never proves.
    """
    budget = budget or OracleBudget()
    if samples is None:
        covers = _covers_exhaustive(graph, k)
    else:
        covers = _covers_sampled(graph, k, samples, rng or random.Random(0))
    checked = 0
    for cover in covers:
        checked += 1
        if not has_dp_coloring(cover, budget):
            return DPVerdict(True, checked, samples is None, cover)
    return DPVerdict(False, checked, samples is None)


# --------------------------------------------------------------------------
# minors


def _contract(edges: frozenset, u: int, v: int) -> frozenset:
    out = set()
    for a, b in edges:
        a = u if a == v else a
        b = u if b == v else b
        if a != b:
            out.add((min(a, b), max(a, b)))
    return frozenset(out)


def has_k5_minor(graph: Graph, max_vertices: int = 9) -> bool:
    """Brute-force K5-minor test by vertex deletion and edge contraction."""
    if graph.n > max_vertices:
        raise BudgetExceeded(f"minor search limited to {max_vertices} vertices")
    seen: set[tuple[frozenset, frozenset]] = set()

    def go(verts: frozenset, edges: frozenset) -> bool:
        n = len(verts)
        if n < 5 or len(edges) < 10:
            return False
        if n == 5:
            return len(edges) == 10
        key = (verts, edges)
        if key in seen:
            return False
        seen.add(key)
        for v in sorted(verts):
            if go(verts - {v}, frozenset(e for e in edges if v not in e)):
                return True
        for a, b in sorted(edges):
            if go(verts - {b}, _contract(edges, a, b)):
                return True
        return False

    return go(frozenset(range(graph.n)), frozenset(graph.edges()))


def random_minor(graph: Graph, target: int, rng: random.Random) -> Graph:
    """Minor on ``target`` vertices: grow that many random connected regions
    from random roots, contract each one, and drop vertices never reached.
    """
    if target >= graph.n:
        return graph
    region = {v: k for k, v in enumerate(rng.sample(range(graph.n), target))}
    frontier = [(v, u) for v in region for u in graph.adjacency[v]]
    while frontier:
        k = rng.randrange(len(frontier))
        frontier[k], frontier[-1] = frontier[-1], frontier[k]
        v, u = frontier.pop()
        if u in region:
            continue
        region[u] = region[v]
        frontier.extend((u, w) for w in graph.adjacency[u] if w not in region)
    edges = set()
    for a, b in graph.edges():
        if a in region and b in region and region[a] != region[b]:
            x, y = region[a], region[b]
            edges.add((min(x, y), max(x, y)))
    return Graph.from_edges(target, sorted(edges))
