"""Extending a precoloured K2/K3 over a clique-sum decomposition tree.

All parts share one global cover and one mutable copy of ``f``.  Each part
returns the list ``X`` of vertices it coloured (its own seed excluded) in
removing order; the full order of the part is ``X`` followed by the order of
its seed.  Gluing two parts on a seam is ``X_second + X_first``.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping, Sequence

from ..cover import (
    Cover,
    SeedColoring,
    Transversal,
    ValueFunction,
    delete_internal_edges,
    explain_removing_order,
)
from ..errors import (
    DegreeTooHigh,
    InternalFailure,
    InvalidInstance,
    NotSpanning,
    SeedNotInTree,
)
from ..graph_core import Graph
from .nt import SolverStats, _check_seed, _check_values, run_fan_recursion
from .tree import DecompositionTree, Leaf


def augment_to_maximal(cover: Cover, supergraph: Graph) -> Cover:
    """Same cover on ``supergraph``, added edges carrying empty matchings."""
    g = cover.graph
    if g.n != supergraph.n:
        raise NotSpanning(f"graph has {g.n} vertices, supergraph {supergraph.n}")
    for u, v in g.edges():
        if not supergraph.has_edge(u, v):
            raise NotSpanning(f"edge {u}-{v} missing from the supergraph")
    if g.num_edges == supergraph.num_edges:
        return cover
    empty = tuple([-1] * cover.s)
    mate = tuple(
        {u: cover.mate[v].get(u, empty) for u in supergraph.adjacency[v]}
        for v in range(g.n)
    )
    return Cover(supergraph, cover.s, mate)


def _greedy(
    order: Sequence[int],
    nbrs: Mapping[int, Sequence[int]] | Sequence[Sequence[int]],
    mate,
    f,
    chosen: dict[int, int],
) -> list[int]:
    """Colour ``order`` one by one; returns the removing order (reversed)."""
    for v in order:
        fv = f[v]
        hits = [0] * len(fv)
        for u in nbrs[v]:
            c = chosen.get(u)
            if c is not None:
                i = mate[u][v][c]
                if i >= 0:
                    hits[i] += 1
        for i in range(len(fv)):
            if fv[i] > hits[i]:
                chosen[v] = i
                break
        else:
            raise InternalFailure(f"greedy step found no slot for vertex {v}")
    return list(reversed(order))


def _bfs_from(seed: Sequence[int], nbrs, vertices) -> list[int]:
    seen = set(seed)
    out = []
    queue = deque(seed)
    while queue:
        v = queue.popleft()
        for u in nbrs[v]:
            if u not in seen and u in vertices:
                seen.add(u)
                out.append(u)
                queue.append(u)
    rest = sorted(set(vertices) - seen)
    return out + rest


def greedy_extend(
    graph: Graph, cover: Cover, f: ValueFunction, seed: SeedColoring
) -> Transversal:
    """Colour a piece of maximum degree at most 4 greedily from the seed.

    Vertices are coloured in BFS order from the seed; each takes the lowest
    slot whose f-value beats the number of coloured neighbours matched to it.
    """
    if graph.max_degree > 4:
        raise DegreeTooHigh(f"maximum degree {graph.max_degree} > 4")
    _check_values(cover, f)
    seed_order = _check_seed(cover, f, seed)
    for v in range(graph.n):
        if v not in seed.vertices and sum(f.values[v]) < 5:
            raise InvalidInstance(f"vertex {v} has f-sum {sum(f.values[v])} < 5")
    chosen = seed.as_choice()
    todo = _bfs_from(seed.vertices, graph.adjacency, range(graph.n))
    xs = _greedy(todo, graph.adjacency, cover.mate, f.values, chosen)
    order = tuple((v, chosen[v]) for v in xs) + tuple(seed_order)
    t = Transversal(chosen, order)
    reason = explain_removing_order(cover, f, t, order)
    if reason is not None:
        raise InternalFailure(f"greedy order rejected: {reason}")
    return t


class _TreeSolver:
    def __init__(self, tree: DecompositionTree, cover: Cover, f: ValueFunction, stats: SolverStats):
        self.tree = tree
        self.cover = cover
        self.f = [list(r) for r in f.values]
        self.chosen: dict[int, int] = {}
        self.stats = stats

    def solve(self, node, seed: tuple[int, ...], cover: Cover) -> list[int]:
        if isinstance(node, Leaf):
            return self.leaf(node, seed, cover)
        self.stats.sums += 1
        vs = set(seed)
        lset = self.tree.vertex_set(node.left)
        if vs <= lset:
            first, second = node.left, node.right
        elif vs <= self.tree.vertex_set(node.right):
            first, second = node.right, node.left
        else:
            raise SeedNotInTree(f"seed {list(seed)} spans both sides of seam {list(node.seam)}")
        xa = self.solve(first, seed, cover)
        for w in node.seam:
            self.f[w][self.chosen[w]] = 1
        xb = self.solve(second, node.seam, delete_internal_edges(cover, node.seam))
        return xb + xa

    # leaves ---------------------------------------------------------------

    def leaf(self, leaf: Leaf, seed: tuple[int, ...], cover: Cover) -> list[int]:
        if leaf.kind != "triangulation":
            self.stats.greedy += 1
            vs = leaf.vertices
            local = leaf.local_graph
            if local.max_degree > 4:
                raise DegreeTooHigh(f"{leaf.kind} leaf has maximum degree {local.max_degree}")
            nbrs = {vs[i]: [vs[j] for j in local.adjacency[i]] for i in range(local.n)}
            todo = _bfs_from(seed, nbrs, nbrs.keys())
            return _greedy(todo, nbrs, cover.mate, self.f, self.chosen)
        rot = self._rotation(leaf)
        return self.triangulation(rot, seed, cover)

    def _rotation(self, leaf: Leaf) -> dict[int, list[int]]:
        vs = leaf.vertices
        return {vs[i]: [vs[j] for j in r] for i, r in enumerate(leaf.embedding.rotation)}

    def triangulation(self, rot: dict[int, list[int]], seed: tuple[int, ...], cover: Cover) -> list[int]:
        mate, f, chosen = cover.mate, self.f, self.chosen
        if len(seed) == 2:
            a, b = seed
            x3 = _pred(rot, b, a)
            self.stats.promoted += 1
            xs = _greedy([x3], rot, mate, f, chosen)
            if len(rot) == 3:
                return xs
            return self.triangulation(rot, (a, b, x3), cover) + xs
        if len(rot) == 3:
            return []
        a, b, c = seed
        if _pred(rot, b, a) == c or _pred(rot, a, b) == c:
            return self.facial(rot, seed, cover)
        return self.separating(rot, seed, cover)

    def facial(self, rot, seed, cover: Cover) -> list[int]:
        self.stats.facial += 1
        x1, x2, x3 = seed
        mate, f, chosen = cover.mate, self.f, self.chosen
        link = list(reversed(rot[x3]))
        k = len(link)
        i = link.index(x1)
        if link[(i + 1) % k] != x2:
            i = link.index(x2)
            if link[(i + 1) % k] != x1:
                raise InternalFailure(f"seed {list(seed)} is not a face")
        cycle = link[i:] + link[:i]
        c3 = chosen[x3]
        mx = mate[x3]
        for u in cycle[2:]:
            j = mx[u][c3]
            if j >= 0:
                f[u][j] = 0
        sub = {v: r for v, r in rot.items() if v != x3}
        return run_fan_recursion(sub, mate, f, chosen, cycle, self.stats)

    def separating(self, rot, seed, cover: Cover) -> list[int]:
        self.stats.separating += 1
        a, b, c = seed
        k = set(seed)
        r = rot[a]
        d = len(r)
        ib = r.index(b)
        # the neighbours of a strictly between b and c, on either side
        arc1, arc2 = [], []
        j = ib + 1
        while r[j % d] != c:
            arc1.append(r[j % d])
            j += 1
        j += 1
        while r[j % d] != b:
            arc2.append(r[j % d])
            j += 1
        if not arc1 or not arc2:
            raise InternalFailure(f"triangle {list(seed)} is not separating")
        side1 = _component(rot, k, arc1[0]) | k
        side2 = set(rot) - side1 | k
        xs1 = self.triangulation(_restrict(rot, side1), seed, cover)
        for w in seed:
            self.f[w][self.chosen[w]] = 1
        h_star = delete_internal_edges(cover, seed)
        xs2 = self.triangulation(_restrict(rot, side2), seed, h_star)
        return xs2 + xs1


def _pred(rot, v: int, u: int) -> int:
    r = rot[v]
    return r[r.index(u) - 1]


def _component(rot, blocked: set[int], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in rot[v]:
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return seen


def _restrict(rot, keep: set[int]) -> dict[int, list[int]]:
    return {v: [u for u in rot[v] if u in keep] for v in keep}


def solve_decomposition(
    tree: DecompositionTree,
    cover: Cover,
    f: ValueFunction,
    seed: SeedColoring,
    *,
    stats: SolverStats | None = None,
    validated: bool = False,
) -> Transversal:
    """Extend ``seed`` to a strictly f-degenerate transversal of the whole cover.

    ``cover`` may live on a spanning subgraph of the tree's graph; the
    missing edges then get empty matchings.  The emitted order is checked
    against the given cover before returning.
    """
    if stats is None:
        stats = SolverStats()
    if not validated:
        tree.validate()
    big = tree.graph
    work = augment_to_maximal(cover, big)
    _check_values(cover, f)
    vs = seed.vertices
    if len(vs) not in (2, 3):
        raise InvalidInstance("seed must be a K2 or a K3")
    if tree.mode == "k33" and len(vs) != 2:
        raise InvalidInstance("k33 trees take K2 seeds only")
    if any(not 0 <= v < tree.n for v in vs):
        raise SeedNotInTree(f"seed {list(vs)} out of range")
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            if not big.has_edge(vs[i], vs[j]):
                raise InvalidInstance(f"seed vertices {vs[i]} and {vs[j]} are not adjacent")
    seed_order = _check_seed(work, f, seed)
    for v in range(tree.n):
        if v in vs:
            continue
        total = sum(f.values[v])
        if total < 5:
            raise InvalidInstance(f"vertex {v} has f-sum {total} < 5")

    solver = _TreeSolver(tree, work, f, stats)
    solver.chosen.update(seed.as_choice())
    xs = solver.solve(tree.root, vs, work)
    chosen = solver.chosen
    if len(chosen) != tree.n or len(xs) + len(vs) != tree.n:
        raise InternalFailure(f"coloured {len(chosen)} of {tree.n} vertices")
    order = tuple((v, chosen[v]) for v in xs) + tuple(seed_order)
    t = Transversal(chosen, order)
    reason = explain_removing_order(cover, f, t, order)
    if reason is not None:
        raise InternalFailure(f"emitted order rejected: {reason}")
    return t
