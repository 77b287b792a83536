"""Simple graphs, rotation systems, face tracing and near-triangulations.

Conventions
-----------
``rotation[v]`` lists the neighbours of ``v`` in counterclockwise order.
Faces are traced with the rule ``(u, v) -> (v, w)`` where ``w`` precedes
``u`` in the rotation at ``v``; every bounded face is therefore walked with
its interior on the left and the outer face is walked with the unbounded
region on the left.

A :class:`NearTriangulation` stores its outer cycle in the opposite sense
(the reversed outer-face walk), so that the enclosed disk lies on the left
of ``v1 -> v2 -> ... -> vp -> v1``.  With that orientation the neighbours of
``vp`` inside the disk are the ones met when turning counterclockwise from
``v1`` to ``v(p-1)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import (
    ChordPresent,
    GraphError,
    InnerFaceNotTriangle,
    NonPlanarRotation,
    OuterNotCycle,
)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on the vertices ``0 .. n-1``."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n:
            raise GraphError(f"adjacency has {len(self.adjacency)} rows for n={self.n}")
        for v, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"neighbours of {v} must be sorted and distinct")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise GraphError(f"neighbour {u} of {v} out of range")
                if u == v:
                    raise GraphError(f"loop at {v}")
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if v not in self._adjsets[u]:
                    raise GraphError(f"adjacency not symmetric on edge {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @cached_property
    def _adjsets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nb) for nb in self.adjacency)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjsets[u]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self.adjacency), default=0)

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for u in self.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == self.n

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph relabelled to ``0 .. k-1`` (ascending original ids).

        Returns the subgraph and the tuple mapping new ids to original ids.
        """
        labels = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(labels)}
        adj = tuple(
            tuple(sorted(index[u] for u in self.adjacency[v] if u in index)) for v in labels
        )
        return Graph(len(labels), adj), labels


# --------------------------------------------------------------------------
# plane embeddings


@dataclass(frozen=True)
class PlaneEmbedding:
    """A connected simple graph with a counterclockwise rotation system."""

    graph: Graph
    rotation: tuple[tuple[int, ...], ...]
    outer_face_id: int = 0

    def __post_init__(self) -> None:
        if len(self.rotation) != self.graph.n:
            raise GraphError("rotation must list every vertex")
        for v, rot in enumerate(self.rotation):
            if sorted(rot) != list(self.graph.adjacency[v]):
                raise GraphError(f"rotation at {v} is not a permutation of its neighbours")
        if not self.graph.is_connected():
            raise GraphError("embedding must be connected")

    @classmethod
    def from_rotation(
        cls, rotation: Sequence[Sequence[int]], outer_face: Sequence[int] | None = None
    ) -> "PlaneEmbedding":
        n = len(rotation)
        edges = [(v, u) for v, rot in enumerate(rotation) for u in rot]
        graph = Graph.from_edges(n, edges)
        rot = tuple(tuple(r) for r in rotation)
        for v, r in enumerate(rot):
            if len(set(r)) != len(r):
                raise GraphError(f"rotation at {v} repeats a neighbour")
        emb = cls(graph, rot, 0)
        if outer_face is not None:
            emb = emb.with_outer_face(emb.locate_face(outer_face))
        return emb

    @cached_property
    def _rot_index(self) -> tuple[dict[int, int], ...]:
        return tuple({u: i for i, u in enumerate(r)} for r in self.rotation)

    def succ(self, v: int, u: int) -> int:
        """Neighbour following ``u`` counterclockwise around ``v``."""
        r = self.rotation[v]
        return r[(self._rot_index[v][u] + 1) % len(r)]

    def pred(self, v: int, u: int) -> int:
        """Neighbour preceding ``u`` counterclockwise around ``v``."""
        r = self.rotation[v]
        return r[self._rot_index[v][u] - 1]

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        return tuple(trace_faces(self))

    @cached_property
    def dart_face(self) -> dict[tuple[int, int], int]:
        """Map each directed edge to the id of the face on its left."""
        out: dict[tuple[int, int], int] = {}
        for fid, walk in enumerate(self.faces):
            k = len(walk)
            for i in range(k):
                out[(walk[i], walk[(i + 1) % k])] = fid
        return out

    def locate_face(self, walk: Sequence[int]) -> int:
        """Id of the face whose boundary walk is ``walk`` (either direction)."""
        walk = tuple(walk)
        if len(walk) < 2:
            raise GraphError("face walk needs at least two vertices")
        for cand in (walk, tuple(reversed(walk))):
            fid = self.dart_face.get((cand[0], cand[1]))
            if fid is not None and _same_cyclic(self.faces[fid], cand):
                return fid
        raise GraphError(f"no face with boundary walk {list(walk)}")

    def with_outer_face(self, face_id: int) -> "PlaneEmbedding":
        """Re-root the embedding: same rotation, different unbounded face."""
        if not 0 <= face_id < len(self.faces):
            raise GraphError(f"face id {face_id} out of range")
        new = PlaneEmbedding(self.graph, self.rotation, face_id)
        # faces depend only on the rotation
        new.__dict__["faces"] = self.faces
        return new

    def restrict(self, vertices: Iterable[int]) -> tuple["PlaneEmbedding", tuple[int, ...]]:
        """Sub-embedding induced on ``vertices``, relabelled ascending."""
        labels = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(labels)}
        rot = tuple(tuple(index[u] for u in self.rotation[v] if u in index) for v in labels)
        return PlaneEmbedding.from_rotation(rot), labels

    def to_json(self) -> dict:
        return {
            "n": self.graph.n,
            "rotation": [list(r) for r in self.rotation],
            "outer_face": list(self.faces[self.outer_face_id]),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlaneEmbedding":
        try:
            n = int(data["n"])
            rotation = [[int(u) for u in r] for r in data["rotation"]]
            outer = data.get("outer_face")
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"bad graph JSON: {exc}") from exc
        if len(rotation) != n:
            raise GraphError(f"rotation has {len(rotation)} rows for n={n}")
        return cls.from_rotation(rotation, outer)


def _same_cyclic(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    k = len(a)
    for shift in range(k):
        if a[shift] == b[0] and all(a[(shift + i) % k] == b[i] for i in range(k)):
            return True
    return False


def trace_faces(embedding: PlaneEmbedding) -> list[tuple[int, ...]]:
    """Trace every face of the rotation system.

    Each face is returned as its cyclic vertex walk; consecutive entries
    (wrapping around) are the directed edges of the face.  Raises
    :class:`NonPlanarRotation` if ``V - E + F != 2``.
    """
    g = embedding.graph
    if g.num_edges == 0:
        return [()]
    rot = embedding.rotation
    index = embedding._rot_index
    seen: set[tuple[int, int]] = set()
    faces: list[tuple[int, ...]] = []
    for u in range(g.n):
        for v in rot[u]:
            if (u, v) in seen:
                continue
            walk = []
            a, b = u, v
            while (a, b) not in seen:
                seen.add((a, b))
                walk.append(a)
                rb = rot[b]
                a, b = b, rb[index[b][a] - 1]
            faces.append(tuple(walk))
    euler = g.n - g.num_edges + len(faces)
    if euler != 2:
        raise NonPlanarRotation(f"V - E + F = {euler}, not a plane rotation system")
    return faces


# --------------------------------------------------------------------------
# near-triangulations


@dataclass(frozen=True)
class NearTriangulation:
    """Plane graph whose bounded faces are triangles and outer face a cycle.

    ``outer_cycle`` has the disk on its left (see module docstring).
    ``labels`` optionally maps local vertex ids to those of a parent graph.
    """

    embedding: PlaneEmbedding
    outer_cycle: tuple[int, ...]
    labels: tuple[int, ...] | None = None

    @property
    def graph(self) -> Graph:
        return self.embedding.graph

    @property
    def n(self) -> int:
        return self.embedding.graph.n

    @property
    def p(self) -> int:
        return len(self.outer_cycle)

    def label(self, v: int) -> int:
        return v if self.labels is None else self.labels[v]

    @cached_property
    def outer_position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.outer_cycle)}

    def rotate_to_edge(self, a: int, b: int) -> "NearTriangulation":
        """Same near-triangulation with the outer cycle starting at edge ``ab``.

        ``a`` and ``b`` must be consecutive on the outer cycle in either
        direction; the orientation of the cycle is kept, so the result starts
        with whichever of the two comes first along it.
        """
        pos = self.outer_position
        if a not in pos or b not in pos:
            raise GraphError(f"{a}-{b} is not an outer edge")
        p = self.p
        i, j = pos[a], pos[b]
        if (i + 1) % p == j:
            start = i
        elif (j + 1) % p == i:
            start = j
        else:
            raise GraphError(f"{a}-{b} is not an outer edge")
        cyc = self.outer_cycle[start:] + self.outer_cycle[:start]
        return NearTriangulation(self.embedding, cyc, self.labels)

    def to_json(self) -> dict:
        return self.embedding.to_json()


def validate_near_triangulation(
    embedding: PlaneEmbedding, outer_face_id: int | None = None
) -> NearTriangulation:
    """Check the near-triangulation conditions and extract the outer cycle."""
    faces = embedding.faces
    if outer_face_id is None:
        outer_face_id = embedding.outer_face_id
    if not 0 <= outer_face_id < len(faces):
        raise GraphError(f"outer face id {outer_face_id} out of range")
    if embedding.graph.n < 3:
        raise OuterNotCycle("a near-triangulation has at least three vertices")
    walk = faces[outer_face_id]
    if len(set(walk)) != len(walk):
        raise OuterNotCycle(f"outer boundary repeats a vertex: {list(walk)}")
    for fid, face in enumerate(faces):
        if fid != outer_face_id and len(face) != 3:
            raise InnerFaceNotTriangle(fid, len(face))
    if embedding.outer_face_id != outer_face_id:
        embedding = embedding.with_outer_face(outer_face_id)
    cycle = (walk[0],) + tuple(reversed(walk[1:]))
    return NearTriangulation(embedding, cycle)


def _nt_from_cycle(
    embedding: PlaneEmbedding, cycle: Sequence[int], labels: tuple[int, ...] | None
) -> NearTriangulation:
    """Near-triangulation whose disk is bounded by ``cycle`` (disk on the left)."""
    walk = (cycle[0],) + tuple(reversed(cycle[1:]))
    fid = embedding.dart_face.get((walk[0], walk[1]))
    if fid is None or not _same_cyclic(embedding.faces[fid], walk):
        raise OuterNotCycle(f"cycle {list(cycle)} does not bound a face")
    nt = validate_near_triangulation(embedding, fid)
    return NearTriangulation(nt.embedding, tuple(cycle), labels)


def find_chord(nt: NearTriangulation) -> tuple[int, int] | None:
    """Chord ``(v_i, v_j)`` with the lexicographically smallest positions ``(i, j)``."""
    pos = nt.outer_position
    p = nt.p
    adj = nt.graph.adjacency
    for i, v in enumerate(nt.outer_cycle):
        best = None
        for u in adj[v]:
            j = pos.get(u)
            if j is None or j <= i + 1 or (i == 0 and j == p - 1):
                continue
            if best is None or j < best:
                best = j
        if best is not None:
            return (v, nt.outer_cycle[best])
    return None


def _side_vertices(graph: Graph, blocked: set[int], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in graph.adjacency[v]:
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return seen


def split_on_chord(
    nt: NearTriangulation, chord: tuple[int, int]
) -> tuple[NearTriangulation, NearTriangulation]:
    """Split along a chord into the part holding ``v1 v2`` and the other part.

    Both parts are relabelled; their ``labels`` refer to the same vertex ids
    as ``nt.labels`` (or to ``nt``'s own ids when it has none).  The second
    part's outer cycle starts with the chord.
    """
    u, w = chord
    pos = nt.outer_position
    p = nt.p
    if u not in pos or w not in pos or not nt.graph.has_edge(u, w):
        raise GraphError(f"{u}-{w} is not a chord")
    i, j = sorted((pos[u], pos[w]))
    if j == i + 1 or (i == 0 and j == p - 1):
        raise GraphError(f"{u}-{w} is an outer edge, not a chord")
    cyc = nt.outer_cycle
    a, b = cyc[i], cyc[j]
    inner = list(cyc[i : j + 1])  # a .. b, closed by chord b -> a
    outer = list(cyc[j:]) + list(cyc[: i + 1])  # b .. a, closed by chord a -> b
    blocked = {a, b}
    side_inner = _side_vertices(nt.graph, blocked, cyc[i + 1]) | blocked
    side_outer = set(range(nt.n)) - side_inner | blocked

    def build(vertices: set[int], cycle: list[int]) -> NearTriangulation:
        emb, labels = nt.embedding.restrict(vertices)
        index = {v: k for k, v in enumerate(labels)}
        local = [index[v] for v in cycle]
        return _nt_from_cycle(emb, local, tuple(nt.label(v) for v in labels))

    if i == 0:
        # v1 = a lies on the inner path a, v2, ..., b
        c1 = build(side_inner, inner)
        c2 = build(side_outer, [a] + outer[:-1])
    else:
        # v1 v2 lies on b .. a; rotate so the part starts at v1
        k = outer.index(cyc[0])
        c1 = build(side_outer, outer[k:] + outer[:k])
        c2 = build(side_inner, [b] + inner[:-1])
    return c1, c2


def fan_around_last(nt: NearTriangulation) -> list[int]:
    """Neighbours of ``vp`` from ``v1`` to ``v(p-1)`` turning into the disk."""
    if nt.n == 3:
        raise GraphError("a bare triangle has no fan to peel")
    if find_chord(nt) is not None:
        raise ChordPresent("outer cycle has a chord")
    cyc = nt.outer_cycle
    v1, vq, vp = cyc[0], cyc[-2], cyc[-1]
    emb = nt.embedding
    path = [v1]
    x = emb.succ(vp, v1)
    while x != vq:
        path.append(x)
        x = emb.succ(vp, x)
    path.append(vq)
    # P followed by O - vp must close up into a simple cycle
    new_cycle = list(cyc[:-1]) + path[-2:0:-1]
    if len(set(new_cycle)) != len(new_cycle):
        raise GraphError("fan path meets the outer cycle")
    g = nt.graph
    for k in range(len(new_cycle)):
        if not g.has_edge(new_cycle[k], new_cycle[(k + 1) % len(new_cycle)]):
            raise GraphError("fan path does not close into a cycle")
    return path


def peel_last(nt: NearTriangulation) -> NearTriangulation:
    """The near-triangulation ``G - vp`` with outer cycle ``O' = P u (O - vp)``."""
    path = fan_around_last(nt)
    cyc = nt.outer_cycle
    vp = cyc[-1]
    keep = [v for v in range(nt.n) if v != vp]
    emb, labels = nt.embedding.restrict(keep)
    index = {v: k for k, v in enumerate(labels)}
    cycle = [index[v] for v in list(cyc[:-1]) + path[-2:0:-1]]
    return _nt_from_cycle(emb, cycle, tuple(nt.label(v) for v in labels))


def near_triangulation_from_json(data: dict) -> NearTriangulation:
    return validate_near_triangulation(PlaneEmbedding.from_json(data))


def embedding_from_coordinates(
    n: int, edges: Iterable[tuple[int, int]], coords: Sequence[tuple[float, float]]
) -> PlaneEmbedding:
    """Rotation system of a straight-line drawing (neighbours sorted by angle)."""
    import math

    graph = Graph.from_edges(n, edges)
    rot = []
    for v in range(n):
        x0, y0 = coords[v]
        rot.append(
            tuple(
                sorted(
                    graph.adjacency[v],
                    key=lambda u: math.atan2(coords[u][1] - y0, coords[u][0] - x0),
                )
            )
        )
    return PlaneEmbedding(graph, tuple(rot))
