"""Random instances that are valid by construction.

Everything takes an explicit ``random.Random``; the same spec and seed give
the same instance.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Sequence

from .cover import Cover, SeedColoring, ValueFunction, _empty_row, is_strictly_f_degenerate
from .errors import InvalidInstance, ProfileInfeasible
from .graph_core import Graph, NearTriangulation, PlaneEmbedding, _nt_from_cycle, validate_near_triangulation
from .solver.tree import DecompositionTree, Leaf, SumNode, leaves

PROFILES = ("ones", "221", "random")


@dataclass(frozen=True)
class GenSpec:
    """Knobs for trees, covers and seeds.

    ``leaf_size`` is the (min, max) vertex count of triangulation leaves;
    ``special_prob`` is the chance a leaf is a Wagner (k5 mode) or K5 (k33
    mode) leaf.  ``seed_kind`` is ``"k2"``, ``"k3"`` or ``"any"``.
    """

    mode: str = "k5"
    leaves: int = 1
    leaf_size: tuple[int, int] = (3, 12)
    special_prob: float = 0.3
    sum3_prob: float = 0.5
    s: int = 5
    profile: str = "ones"
    density: float = 1.0
    identity: bool = False
    seed_kind: str = "any"
    seam_seed_prob: float = 0.3
    seed: int = 0

    def validate(self) -> None:
        if self.mode not in ("k5", "k33"):
            raise InvalidInstance(f"unknown mode {self.mode!r}")
        if self.leaves < 1:
            raise InvalidInstance("need at least one leaf")
        lo, hi = self.leaf_size
        if not 3 <= lo <= hi:
            raise InvalidInstance(f"bad leaf size range {self.leaf_size}")
        if self.profile not in PROFILES:
            raise InvalidInstance(f"unknown profile {self.profile!r}")
        if not 0.0 <= self.density <= 1.0:
            raise InvalidInstance("density must lie in [0, 1]")
        if self.seed_kind not in ("k2", "k3", "any"):
            raise InvalidInstance(f"unknown seed kind {self.seed_kind!r}")
        if self.mode == "k33" and self.seed_kind == "k3":
            raise InvalidInstance("k33 mode takes K2 seeds only")

    def to_json(self) -> dict:
        d = dict(vars(self))
        d["leaf_size"] = list(self.leaf_size)
        return d

    @classmethod
    def from_json(cls, data: dict) -> "GenSpec":
        d = dict(data)
        if "leaf_size" in d:
            d["leaf_size"] = tuple(d["leaf_size"])
        return cls(**d)


# --------------------------------------------------------------------------
# plane triangulations


def _apollonian_rotation(n: int, rng: random.Random) -> list[list[int]]:
    rot = [[1, 2], [2, 0], [0, 1]]
    faces = [(0, 1, 2)]  # bounded faces, interior on the left
    for w in range(3, n):
        k = rng.randrange(len(faces))
        a, b, c = faces[k]
        ra, rb, rc = rot[a], rot[b], rot[c]
        ra.insert(ra.index(b) + 1, w)
        rb.insert(rb.index(c) + 1, w)
        rc.insert(rc.index(a) + 1, w)
        rot.append([a, b, c])
        faces[k] = (a, b, w)
        faces.append((b, c, w))
        faces.append((c, a, w))
    return rot


def gen_apollonian(n: int, rng: random.Random) -> NearTriangulation:
    """Stacked triangulation: K3, then each new vertex goes into a random face.

    The outer face is the initial triangle, with outer cycle ``(0, 1, 2)``.
    """
    if n < 3:
        raise InvalidInstance("a triangulation needs at least three vertices")
    emb = PlaneEmbedding.from_rotation(_apollonian_rotation(n, rng), outer_face=(0, 2, 1))
    return validate_near_triangulation(emb)


def gen_near_triangulation(
    n: int, rng: random.Random, *, peels: int | None = None
) -> NearTriangulation:
    """Near-triangulation on ``n`` vertices with a varied outer cycle.

    Built from a stacked triangulation on ``n + 1 + peels`` vertices by
    deleting one corner (its link becomes the outer cycle) and then peeling
    random outer vertices that lie on no chord.
    """
    if n < 3:
        raise InvalidInstance("a near-triangulation needs at least three vertices")
    if peels is None:
        peels = rng.randrange(0, max(1, n // 4) + 1)
    total = n + 1 + peels
    rot = {v: r for v, r in enumerate(_apollonian_rotation(total, rng))}
    gone = rng.randrange(3)
    cycle = list(reversed(rot[gone]))
    _drop(rot, gone)
    on_cycle = set(cycle)

    def peelable(i: int) -> bool:
        v = cycle[i]
        a, b = cycle[i - 1], cycle[(i + 1) % len(cycle)]
        if any(u in on_cycle and u != a and u != b for u in rot[v]):
            return False
        return not (len(cycle) == 3 and len(rot[v]) == 2)

    done = 0
    while done < peels:
        i = rng.randrange(len(cycle))
        if not peelable(i):
            # random probing failed; fall back to a scan (an ear always exists)
            cands = [k for k in range(len(cycle)) if peelable(k)]
            if not cands:
                raise InvalidInstance("no peelable outer vertex")
            i = rng.choice(cands)
        v = cycle[i]
        a, b = cycle[i - 1], cycle[(i + 1) % len(cycle)]
        r = rot[v]
        d = len(r)
        j = r.index(b)
        fan = []
        while r[j % d] != a:
            fan.append(r[j % d])
            j += 1
        inner = fan[1:]
        # cycle: ..., a, u_m, ..., u_1, b, ...
        cycle[i : i + 1] = list(reversed(inner))
        on_cycle.discard(v)
        on_cycle.update(inner)
        _drop(rot, v)
        done += 1
    keep = sorted(rot)
    index = {v: k for k, v in enumerate(keep)}
    rotation = [[index[u] for u in rot[v]] for v in keep]
    emb = PlaneEmbedding.from_rotation(rotation)
    return _nt_from_cycle(emb, [index[v] for v in cycle], None)


def _drop(rot: dict[int, list[int]], v: int) -> None:
    for u in rot.pop(v):
        rot[u].remove(v)


def planar_code(rotation: Sequence[Sequence[int]], a: int, b: int) -> tuple[int, ...]:
    """Relabel by a rotation-guided BFS from the dart ``a -> b`` and list the
    rotations in the new labels; equal codes mean isomorphic oriented embeddings.
    """
    label = {a: 0}
    order = [a]
    ref = {a: b}
    code: list[int] = []
    k = 0
    while k < len(order):
        u = order[k]
        k += 1
        r = list(rotation[u])
        i = r.index(ref[u])
        for x in r[i:] + r[:i]:
            if x not in label:
                label[x] = len(order)
                order.append(x)
                ref[x] = u
            code.append(label[x])
        code.append(-1)
    return tuple(code)


def canonical_code(rotation: Sequence[Sequence[int]], cycle: Sequence[int] | None = None) -> tuple[int, ...]:
    """Isomorphism invariant of an embedding, up to reflection.

    With ``cycle`` the code is taken over darts of that (outer) cycle only,
    so it also fixes which face is outer.
    """
    mirror = [list(reversed(r)) for r in rotation]
    best = None
    for rot, seq in ((rotation, cycle), (mirror, None if cycle is None else list(reversed(cycle)))):
        if seq is None:
            darts = [(u, v) for u in range(len(rot)) for v in rot[u]]
        else:
            p = len(seq)
            darts = [(seq[k], seq[(k + 1) % p]) for k in range(p)]
        for u, v in darts:
            c = planar_code(rot, u, v)
            if best is None or c < best:
                best = c
    return best


def _flip(rot: list[list[int]], u: int, v: int) -> list[list[int]] | None:
    """Flip edge ``uv`` of a triangulation, or ``None`` if the flip is illegal."""
    ru, rv = rot[u], rot[v]
    x = rv[(rv.index(u) - 1) % len(rv)]
    y = ru[(ru.index(v) - 1) % len(ru)]
    if x == y or y in rot[x] or len(ru) <= 3 or len(rv) <= 3:
        return None
    new = [list(r) for r in rot]
    new[u].remove(v)
    new[v].remove(u)
    for w, z in ((x, y), (y, x)):
        r = new[w]
        d = len(r)
        # u and v are consecutive around w; z goes between them
        for i in range(d):
            if {r[i], r[(i + 1) % d]} == {u, v}:
                r.insert(i + 1, z)
                break
    return new


def enumerate_triangulations(n: int) -> list[PlaneEmbedding]:
    """One representative of every plane triangulation on ``n`` vertices
    (up to isomorphism and reflection), found by a search over edge flips.
    """
    if n < 3:
        raise InvalidInstance("a triangulation needs at least three vertices")
    start = _apollonian_rotation(n, random.Random(0))
    seen = {canonical_code(start): start}
    todo = [start]
    while todo:
        rot = todo.pop()
        for u in range(n):
            for v in rot[u]:
                if u < v:
                    new = _flip(rot, u, v)
                    if new is None:
                        continue
                    key = canonical_code(new)
                    if key not in seen:
                        seen[key] = new
                        todo.append(new)
    out = []
    for key in sorted(seen):
        emb = PlaneEmbedding.from_rotation(seen[key])
        if any(len(fc) != 3 for fc in emb.faces):
            raise InvalidInstance("flip produced a non-triangular face")
        out.append(emb)
    return out


def enumerate_near_triangulations(n: int) -> list[NearTriangulation]:
    """Every near-triangulation on ``n`` vertices, up to isomorphism.

    Each one is a plane triangulation on ``n + 1`` vertices minus a vertex
    (put a new vertex in the outer face and join it to the outer cycle).
    """
    seen: dict[tuple[int, ...], NearTriangulation] = {}
    for emb in enumerate_triangulations(n + 1):
        rot = {v: list(r) for v, r in enumerate(emb.rotation)}
        for z in range(n + 1):
            sub = {v: list(r) for v, r in rot.items()}
            cycle = list(reversed(sub[z]))
            _drop(sub, z)
            keep = sorted(sub)
            index = {v: k for k, v in enumerate(keep)}
            rotation = [[index[u] for u in sub[v]] for v in keep]
            cyc = [index[v] for v in cycle]
            key = canonical_code(rotation, cyc)
            if key not in seen:
                seen[key] = _nt_from_cycle(PlaneEmbedding.from_rotation(rotation), cyc, None)
    return [seen[k] for k in sorted(seen)]


# --------------------------------------------------------------------------
# decomposition trees


class _Part:
    """A subtree with local ids 0..n-1 and its flattened adjacency."""

    __slots__ = ("node", "n", "adj")

    def __init__(self, node, n: int, adj: list[set[int]]):
        self.node = node
        self.n = n
        self.adj = adj


def _leaf_part(kind: str, n: int, rng: random.Random) -> _Part:
    if kind == "triangulation":
        emb = gen_apollonian(n, rng).embedding
        leaf = Leaf(kind, tuple(range(n)), emb)
    else:
        leaf = Leaf(kind, tuple(range(8 if kind == "wagner" else 5)))
        n = len(leaf.vertices)
    adj = [set(r) for r in leaf.local_graph.adjacency]
    return _Part(leaf, n, adj)


def _relabel(node, m: dict[int, int]):
    if isinstance(node, Leaf):
        return Leaf(node.kind, tuple(m[v] for v in node.vertices), node.embedding)
    return SumNode(tuple(m[v] for v in node.seam), _relabel(node.left, m), _relabel(node.right, m))


def _random_clique(adj: Sequence[set[int]], k: int, rng: random.Random) -> tuple[int, ...] | None:
    edges = [(u, v) for u in range(len(adj)) for v in adj[u] if u < v]
    rng.shuffle(edges)
    if k == 2:
        return edges[0] if edges else None
    for u, v in edges:
        common = sorted(adj[u] & adj[v])
        if common:
            return (u, v, rng.choice(common))
    return None


def _merge(a: _Part, b: _Part, k: int, rng: random.Random) -> _Part:
    ka = _random_clique(a.adj, k, rng) if k == 3 else None
    kb = _random_clique(b.adj, k, rng) if k == 3 else None
    if ka is None or kb is None:
        k = 2
        ka = _random_clique(a.adj, 2, rng)
        kb = _random_clique(b.adj, 2, rng)
    kb = list(kb)
    rng.shuffle(kb)
    m: dict[int, int] = dict(zip(kb, ka))
    nxt = a.n
    for v in range(b.n):
        if v not in m:
            m[v] = nxt
            nxt += 1
    adj = [set(s) for s in a.adj] + [set() for _ in range(nxt - a.n)]
    for v in range(b.n):
        adj[m[v]].update(m[u] for u in b.adj[v])
    node = SumNode(tuple(ka), a.node, _relabel(b.node, m))
    return _Part(node, nxt, adj)


def gen_tree(spec: GenSpec, rng: random.Random) -> tuple[DecompositionTree, Graph]:
    """Random clique-sum tree over ``spec.leaves`` leaves and its flattened graph."""
    spec.validate()
    special = "wagner" if spec.mode == "k5" else "k5"
    lo, hi = spec.leaf_size
    pool = []
    for _ in range(spec.leaves):
        if rng.random() < spec.special_prob:
            pool.append(_leaf_part(special, 0, rng))
        else:
            pool.append(_leaf_part("triangulation", rng.randint(lo, hi), rng))
    while len(pool) > 1:
        i = rng.randrange(len(pool))
        a = pool.pop(i)
        j = rng.randrange(len(pool))
        b = pool.pop(j)
        k = 3 if spec.mode == "k5" and rng.random() < spec.sum3_prob else 2
        pool.append(_merge(a, b, k, rng))
    part = pool[0]
    tree = DecompositionTree(part.node, spec.mode, part.n)
    return tree, tree.graph


def choose_seed_vertices(
    tree: DecompositionTree, kind: str, rng: random.Random, seam_prob: float = 0.3
) -> tuple[int, ...]:
    """A K2 or K3 on a random seam (with probability ``seam_prob``) or in a leaf."""
    flexible = kind == "any"
    if flexible:
        kind = "k2" if tree.mode == "k33" or rng.random() < 0.5 else "k3"
    k = 2 if kind == "k2" else 3
    seams = [node.seam for node in _sum_nodes(tree.root) if len(node.seam) >= k]
    cands = [lf for lf in leaves(tree.root) if k == 2 or lf.kind != "wagner"]
    if seams and (not cands or rng.random() < seam_prob):
        seam = list(rng.choice(seams))
        rng.shuffle(seam)
        return tuple(seam[:k])
    if not cands:
        if not flexible:
            raise InvalidInstance("tree has no triangle to seed")
        return choose_seed_vertices(tree, "k2", rng, seam_prob)
    leaf = rng.choice(cands)
    local = leaf.local_graph
    adj = [set(r) for r in local.adjacency]
    cl = list(_random_clique(adj, k, rng))
    rng.shuffle(cl)
    return tuple(leaf.vertices[v] for v in cl)


def _sum_nodes(node) -> Iterable[SumNode]:
    stack = [node]
    while stack:
        x = stack.pop()
        if isinstance(x, SumNode):
            yield x
            stack.append(x.left)
            stack.append(x.right)


def seed_side_first(tree: DecompositionTree, seed: Iterable[int]) -> DecompositionTree:
    """Reorder sum-node children so the seed's side is always listed first."""
    k = frozenset(seed)

    def walk(node):
        if isinstance(node, Leaf):
            return node
        lset = tree.vertex_set(node.left)
        if k <= lset:
            return SumNode(node.seam, walk(node.left), node.right)
        if k <= tree.vertex_set(node.right):
            return SumNode(node.seam, walk(node.right), node.left)
        return node

    return DecompositionTree(walk(tree.root), tree.mode, tree.n)


# --------------------------------------------------------------------------
# covers, value functions, seeds


def random_matchings(
    graph: Graph, s: int, density: float, rng: random.Random, identity: bool = False
) -> Cover:
    """Each edge gets a random permutation pairing, each pair kept with probability ``density``."""
    if identity:
        return Cover.identity(graph, s)
    rows: list[dict[int, tuple[int, ...]]] = [{} for _ in range(graph.n)]
    slots = range(s)
    empty = _empty_row(s)
    full = density >= 1.0
    rand = rng.random
    perms = _permutations(s)
    for u, v in graph.edges():
        perm = perms[int(rand() * len(perms))] if perms else rng.sample(slots, s)
        fwd = [-1] * s
        back = [-1] * s
        for i in slots:
            if full or rand() < density:
                fwd[i] = perm[i]
                back[perm[i]] = i
        if max(fwd) < 0:
            rows[u][v] = rows[v][u] = empty
        else:
            rows[u][v] = tuple(fwd)
            rows[v][u] = tuple(back)
    mate = tuple({u: row[u] for u in graph.adjacency[v]} for v, row in enumerate(rows))
    return Cover(graph, s, mate)


@lru_cache(maxsize=None)
def _permutations(s: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(s))) if s <= 6 else ()


def _random_row(s: int, total: int, rng: random.Random) -> list[int]:
    if total > 2 * s:
        raise ProfileInfeasible(f"f-sum {total} needs more than {s} slots of value 2")
    row = [0] * s
    open_slots = list(range(s))
    for _ in range(total):
        i = rng.choice(open_slots)
        row[i] += 1
        if row[i] == 2:
            open_slots.remove(i)
    return row


def value_function(
    n: int, s: int, profile: str, rng: random.Random, needs: Sequence[int] | None = None
) -> ValueFunction:
    """``ones``: f = 1 on the first ``need`` slots; ``221``: (2, 2, 1) on width 3;
    ``random``: random values in {0, 1, 2} with sum ``need`` or slightly more.

    ``needs`` gives the required f-sum per vertex (5 by default).
    """
    if needs is None:
        needs = [5] * n
    rows = []
    if profile == "ones":
        for v in range(n):
            if needs[v] > s:
                raise ProfileInfeasible(f"width {s} too small for f-sum {needs[v]} with f = 1")
            rows.append([1] * needs[v] + [0] * (s - needs[v]))
    elif profile == "221":
        if s != 3:
            raise ProfileInfeasible("profile (2, 2, 1) needs width 3")
        rows = [[2, 2, 1] for _ in range(n)]
    elif profile == "random":
        for v in range(n):
            extra = 0 if rng.random() < 0.7 else rng.randint(1, 2)
            rows.append(_random_row(s, min(needs[v] + extra, 2 * s), rng))
    else:
        raise ProfileInfeasible(f"unknown profile {profile!r}")
    return ValueFunction.from_rows(rows)


def draw_seed(
    cover: Cover, f: ValueFunction, vertices: Sequence[int], rng: random.Random, tries: int = 1000
) -> SeedColoring:
    """Random strictly f-degenerate precolouring of ``vertices``."""
    opts = [[i for i in range(cover.s) if f.values[v][i] > 0] for v in vertices]
    if any(not o for o in opts):
        raise ProfileInfeasible("a seed vertex has no slot with positive f")
    for _ in range(tries):
        slots = tuple(rng.choice(o) for o in opts)
        choice = dict(zip(vertices, slots))
        if is_strictly_f_degenerate(cover, f, choice).ok:
            return SeedColoring(tuple(vertices), slots)
    raise ProfileInfeasible(f"no valid seed found in {tries} draws")


def gen_cover(
    graph: Graph,
    spec: GenSpec,
    rng: random.Random,
    seed_vertices: Sequence[int],
    needs: Sequence[int] | None = None,
) -> tuple[Cover, ValueFunction, SeedColoring]:
    cover = random_matchings(graph, spec.s, spec.density, rng, spec.identity)
    f = value_function(graph.n, spec.s, spec.profile, rng, needs)
    return cover, f, draw_seed(cover, f, seed_vertices, rng)


def nt_needs(nt: NearTriangulation) -> list[int]:
    """f-sum thresholds of the near-triangulation extension: 3 outside, 5 inside."""
    pos = nt.outer_position
    return [3 if v in pos else 5 for v in range(nt.n)]


def spec_from_seed(spec: GenSpec, seed: int) -> GenSpec:
    return replace(spec, seed=seed)


# --------------------------------------------------------------------------
# whole instances


def generate_instance(spec: GenSpec, rng: random.Random | None = None):
    """Random tree instance; the seed's side is listed first at every sum."""
    from .instance import Instance

    rng = rng or random.Random(spec.seed)
    tree, graph = gen_tree(spec, rng)
    k = choose_seed_vertices(tree, spec.seed_kind, rng, spec.seam_seed_prob)
    tree = seed_side_first(tree, k)
    cover, f, seed = gen_cover(graph, spec, rng, k)
    return Instance(cover, f, seed, tree=tree)


def generate_nt_instance(n: int, spec: GenSpec, rng: random.Random | None = None):
    """Random near-triangulation instance (f-sums 3 on the outer cycle, 5 inside)."""
    from .instance import Instance

    rng = rng or random.Random(spec.seed)
    nt = gen_near_triangulation(n, rng)
    p = nt.p
    i = rng.randrange(p)
    edge = (nt.outer_cycle[i], nt.outer_cycle[(i + 1) % p])
    cover, f, seed = gen_cover(nt.graph, spec, rng, edge, nt_needs(nt))
    return Instance(cover, f, seed, nt=nt)
