"""Decomposition trees: triangulation / Wagner / K5 leaves glued by clique sums.

Leaves carry their vertices as global ids (``vertices[i]`` is the global id
of local vertex ``i``), so a sum node only has to name its seam.  Wagner and
K5 leaves use canonical local labels; triangulation leaves carry a rotation
system in local ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from ..errors import GraphError, InvalidInstance
from ..graph_core import Graph, PlaneEmbedding

MODES = ("k5", "k33")
LEAF_KINDS = ("triangulation", "wagner", "k5")


def wagner_graph() -> Graph:
    """Cycle 0..7 plus the four diameters i ~ i+4."""
    edges = [(i, (i + 1) % 8) for i in range(8)] + [(i, i + 4) for i in range(4)]
    return Graph.from_edges(8, edges)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


_WAGNER = wagner_graph()
_K5 = complete_graph(5)


@dataclass(frozen=True, eq=False)
class Leaf:
    kind: str
    vertices: tuple[int, ...]
    embedding: PlaneEmbedding | None = None

    def __post_init__(self) -> None:
        if self.kind not in LEAF_KINDS:
            raise InvalidInstance(f"unknown leaf kind {self.kind!r}")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidInstance("leaf repeats a vertex")
        if self.kind == "triangulation":
            if self.embedding is None:
                raise InvalidInstance("triangulation leaf needs an embedding")
            if self.embedding.graph.n != len(self.vertices):
                raise InvalidInstance("embedding size differs from the leaf's vertex list")
        elif len(self.vertices) != (8 if self.kind == "wagner" else 5):
            raise InvalidInstance(f"{self.kind} leaf has {len(self.vertices)} vertices")

    @property
    def local_graph(self) -> Graph:
        if self.kind == "wagner":
            return _WAGNER
        if self.kind == "k5":
            return _K5
        return self.embedding.graph

    def global_edges(self) -> Iterator[tuple[int, int]]:
        vs = self.vertices
        for u, v in self.local_graph.edges():
            yield (vs[u], vs[v])

    def check(self) -> None:
        """Triangulation leaves must be plane triangulations."""
        if self.kind != "triangulation":
            return
        try:
            faces = self.embedding.faces
        except GraphError as exc:
            raise InvalidInstance(f"triangulation leaf: {exc}") from exc
        if len(self.vertices) < 3 or any(len(fc) != 3 for fc in faces):
            raise InvalidInstance("triangulation leaf has a non-triangular face")


@dataclass(frozen=True, eq=False)
class SumNode:
    seam: tuple[int, ...]
    left: "Node"
    right: "Node"

    @property
    def kind(self) -> str:
        return f"sum{len(self.seam)}"


Node = Union[Leaf, SumNode]


def leaves(node: Node) -> Iterator[Leaf]:
    stack = [node]
    while stack:
        x = stack.pop()
        if isinstance(x, Leaf):
            yield x
        else:
            stack.append(x.right)
            stack.append(x.left)


@dataclass(frozen=True, eq=False)
class DecompositionTree:
    root: Node
    mode: str
    n: int
    _sets: dict = field(default_factory=dict, repr=False, compare=False)

    def vertex_set(self, node: Node) -> frozenset[int]:
        key = id(node)
        got = self._sets.get(key)
        if got is None:
            if isinstance(node, Leaf):
                got = frozenset(node.vertices)
            else:
                got = self.vertex_set(node.left) | self.vertex_set(node.right)
            self._sets[key] = got
        return got

    @cached_property
    def graph(self) -> Graph:
        return self.flatten()

    def flatten(self) -> Graph:
        edges = set()
        for leaf in leaves(self.root):
            for u, v in leaf.global_edges():
                edges.add((min(u, v), max(u, v)))
        return Graph.from_edges(self.n, sorted(edges))

    def validate(self) -> None:
        if self.mode not in MODES:
            raise InvalidInstance(f"unknown mode {self.mode!r}")
        covered = set()
        for leaf in leaves(self.root):
            if self.mode == "k5" and leaf.kind == "k5":
                raise InvalidInstance("K5 leaves are not allowed in k5 mode")
            if self.mode == "k33" and leaf.kind == "wagner":
                raise InvalidInstance("Wagner leaves are not allowed in k33 mode")
            if any(not 0 <= v < self.n for v in leaf.vertices):
                raise InvalidInstance("leaf vertex out of range")
            leaf.check()
            covered.update(leaf.vertices)
        if len(covered) != self.n:
            raise InvalidInstance(f"leaves cover {len(covered)} of {self.n} vertices")
        self._check_sums()

    def _check_sums(self) -> None:
        # post-order, so child graphs exist when their parent is checked
        stack: list[tuple[Node, bool]] = [(self.root, False)]
        sub_adj: dict[int, dict[int, set[int]]] = {}
        while stack:
            node, done = stack.pop()
            if isinstance(node, Leaf):
                a: dict[int, set[int]] = {v: set() for v in node.vertices}
                for u, v in node.global_edges():
                    a[u].add(v)
                    a[v].add(u)
                sub_adj[id(node)] = a
                continue
            if not done:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
                continue
            k = len(node.seam)
            if k not in (2, 3) or len(set(node.seam)) != k:
                raise InvalidInstance(f"seam {list(node.seam)} is not a K2 or K3")
            if self.mode == "k33" and k != 2:
                raise InvalidInstance("k33 mode allows 2-sums only")
            la = sub_adj.pop(id(node.left))
            ra = sub_adj.pop(id(node.right))
            if set(la) & set(ra) != set(node.seam):
                raise InvalidInstance(f"children meet outside the seam {list(node.seam)}")
            for side in (la, ra):
                for i in range(k):
                    for j in range(i + 1, k):
                        if node.seam[j] not in side[node.seam[i]]:
                            raise InvalidInstance(f"seam {list(node.seam)} is not a clique in a child")
            for v, nb in ra.items():
                la.setdefault(v, set()).update(nb)
            sub_adj[id(node)] = la

    # JSON --------------------------------------------------------------

    def to_json(self) -> dict:
        return {"mode": self.mode, "n": self.n, "root": _node_to_json(self.root)}

    @classmethod
    def from_json(cls, data: dict) -> "DecompositionTree":
        try:
            mode = str(data["mode"])
            n = int(data["n"])
            root = _node_from_json(data["root"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInstance(f"bad tree JSON: {exc}") from exc
        return cls(root, mode, n)


def _node_to_json(node: Node) -> dict:
    if isinstance(node, Leaf):
        out = {"kind": node.kind, "vertices": list(node.vertices)}
        if node.embedding is not None:
            out["embedding"] = node.embedding.to_json()
        return out
    return {
        "kind": node.kind,
        "seam": list(node.seam),
        "children": [_node_to_json(node.left), _node_to_json(node.right)],
    }


def _node_from_json(data: dict) -> Node:
    kind = data["kind"]
    if kind in ("sum2", "sum3"):
        left, right = data["children"]
        seam = tuple(int(v) for v in data["seam"])
        if len(seam) != int(kind[-1]):
            raise InvalidInstance(f"{kind} node with a seam of size {len(seam)}")
        return SumNode(seam, _node_from_json(left), _node_from_json(right))
    emb = None
    if "embedding" in data:
        try:
            emb = PlaneEmbedding.from_json(data["embedding"])
        except GraphError as exc:
            raise InvalidInstance(f"leaf embedding: {exc}") from exc
    return Leaf(kind, tuple(int(v) for v in data["vertices"]), emb)


def single_leaf_tree(embedding: PlaneEmbedding, mode: str = "k5") -> DecompositionTree:
    n = embedding.graph.n
    return DecompositionTree(Leaf("triangulation", tuple(range(n)), embedding), mode, n)
