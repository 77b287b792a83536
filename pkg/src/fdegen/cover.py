"""Covers (matching assignments), value functions and transversal checks.

Slots are 0-based internally; ``(v, i)`` is the slot ``i`` of base vertex
``v``.  The JSON formats use 1-based slot numbers.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import CoverError
from .graph_core import Graph

Slot = tuple[int, int]


@lru_cache(maxsize=None)
def _empty_row(s: int) -> tuple[int, ...]:
    return (-1,) * s


@dataclass(frozen=True, eq=False)
class Cover:
    """Cover graph ``H`` of ``graph`` with ``s`` slots per vertex.

    ``mate[u][v][i]`` is the slot of ``v`` matched to ``(u, i)`` under the
    matching of edge ``uv``, or ``-1``.
    """

    graph: Graph
    s: int
    mate: tuple[dict[int, tuple[int, ...]], ...]

    @classmethod
    def from_pairs(
        cls,
        graph: Graph,
        s: int,
        pairs: Mapping[tuple[int, int], Iterable[tuple[int, int]]] | None = None,
    ) -> "Cover":
        """Build a cover from per-edge pair lists ``(slot of u, slot of v)``.

        Keys may be given in either orientation; absent edges get the empty
        matching.
        """
        if s < 1:
            raise CoverError("cover width must be positive")
        rows: list[dict[int, list[int]]] = [
            {u: [-1] * s for u in graph.adjacency[v]} for v in range(graph.n)
        ]
        for (u, v), plist in (pairs or {}).items():
            if not (0 <= u < graph.n and 0 <= v < graph.n) or not graph.has_edge(u, v):
                raise CoverError(f"matching given for non-edge {u}-{v}")
            fwd, back = rows[u][v], rows[v][u]
            for i, j in plist:
                if not (0 <= i < s and 0 <= j < s):
                    raise CoverError(f"slot pair ({i}, {j}) on {u}-{v} out of range")
                if fwd[i] != -1 or back[j] != -1:
                    raise CoverError(f"pairing on {u}-{v} is not a matching")
                fwd[i] = j
                back[j] = i
        empty = _empty_row(s)
        mate = tuple(
            {u: (empty if all(x < 0 for x in r) else tuple(r)) for u, r in row.items()}
            for row in rows
        )
        return cls(graph, s, mate)

    @classmethod
    def identity(cls, graph: Graph, s: int) -> "Cover":
        ident = tuple(range(s))
        mate = tuple({u: ident for u in graph.adjacency[v]} for v in range(graph.n))
        return cls(graph, s, mate)

    @classmethod
    def empty(cls, graph: Graph, s: int) -> "Cover":
        e = _empty_row(s)
        return cls(graph, s, tuple({u: e for u in graph.adjacency[v]} for v in range(graph.n)))

    def matched(self, u: int, i: int, v: int) -> int:
        """Slot of ``v`` matched to ``(u, i)``, or -1."""
        return self.mate[u][v][i]

    def pairs(self, u: int, v: int) -> tuple[tuple[int, int], ...]:
        row = self.mate[u][v]
        return tuple((i, j) for i, j in enumerate(row) if j >= 0)

    def is_empty_on(self, u: int, v: int) -> bool:
        return self.mate[u][v] is _empty_row(self.s) or all(j < 0 for j in self.mate[u][v])

    def to_json(self, f: "ValueFunction | None" = None) -> dict:
        out: dict = {"s": self.s}
        if f is not None:
            out["f"] = [list(row) for row in f.values]
        matchings = {}
        for u, v in self.graph.edges():
            pl = self.pairs(u, v)
            if pl:
                matchings[f"{u}-{v}"] = [[i + 1, j + 1] for i, j in pl]
        out["matchings"] = matchings
        return out

    @classmethod
    def from_json(cls, data: Mapping, graph: Graph) -> "Cover":
        try:
            s = int(data["s"])
            raw = data.get("matchings", {})
            pairs: dict[tuple[int, int], list[tuple[int, int]]] = {}
            for key, plist in raw.items():
                a, b = key.split("-")
                pairs[(int(a), int(b))] = [(int(i) - 1, int(j) - 1) for i, j in plist]
        except (KeyError, TypeError, ValueError) as exc:
            raise CoverError(f"bad cover JSON: {exc}") from exc
        return cls.from_pairs(graph, s, pairs)


@dataclass(frozen=True)
class ValueFunction:
    """Non-negative integer value on every slot; ``values[v][i] = f(v, i)``."""

    values: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        widths = {len(r) for r in self.values}
        if len(widths) > 1:
            raise CoverError("value function rows must have a uniform width")
        if any(x < 0 for r in self.values for x in r):
            raise CoverError("value function must be non-negative")

    @classmethod
    def constant(cls, n: int, s: int, value: int = 1) -> "ValueFunction":
        return cls(tuple((value,) * s for _ in range(n)))

    @classmethod
    def from_profile(cls, n: int, profile: Sequence[int]) -> "ValueFunction":
        row = tuple(int(x) for x in profile)
        return cls(tuple(row for _ in range(n)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "ValueFunction":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    def __getitem__(self, slot: Slot) -> int:
        v, i = slot
        return self.values[v][i]

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def width(self) -> int:
        return len(self.values[0]) if self.values else 0

    def sums(self) -> list[int]:
        return [sum(r) for r in self.values]

    def range(self) -> set[int]:
        return {x for r in self.values for x in r}

    def with_updates(self, updates: Mapping[Slot, int]) -> "ValueFunction":
        rows = [list(r) for r in self.values]
        for (v, i), x in updates.items():
            rows[v][i] = x
        return ValueFunction.from_rows(rows)


@dataclass(frozen=True)
class Transversal:
    """One chosen slot per vertex of its domain, plus an optional removing order."""

    choice: Mapping[int, int]
    order: tuple[Slot, ...] | None = None

    def slots(self) -> list[Slot]:
        return [(v, i) for v, i in sorted(self.choice.items())]

    def restricted(self, vertices: Iterable[int]) -> "Transversal":
        return Transversal({v: self.choice[v] for v in vertices})

    def to_json(self, n: int | None = None, verified: bool | None = None) -> dict:
        size = n if n is not None else (max(self.choice) + 1 if self.choice else 0)
        out: dict = {"choice": [self.choice[v] + 1 if v in self.choice else None for v in range(size)]}
        if self.order is not None:
            out["order"] = [[v, i + 1] for v, i in self.order]
        if verified is not None:
            out["verified"] = verified
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Transversal":
        try:
            choice = {v: int(c) - 1 for v, c in enumerate(data["choice"]) if c is not None}
            order = data.get("order")
            if order is not None:
                order = tuple((int(v), int(i) - 1) for v, i in order)
        except (KeyError, TypeError, ValueError) as exc:
            raise CoverError(f"bad result JSON: {exc}") from exc
        return cls(choice, order)


@dataclass(frozen=True)
class SeedColoring:
    """Precoloured clique ``K`` (two or three vertices) with chosen slots."""

    vertices: tuple[int, ...]
    slots: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.slots):
            raise CoverError("seed needs one slot per vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise CoverError("seed vertices must be distinct")

    def as_choice(self) -> dict[int, int]:
        return dict(zip(self.vertices, self.slots))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "slots": [i + 1 for i in self.slots]}

    @classmethod
    def from_json(cls, data: Mapping) -> "SeedColoring":
        try:
            return cls(
                tuple(int(v) for v in data["vertices"]),
                tuple(int(i) - 1 for i in data["slots"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CoverError(f"bad seed JSON: {exc}") from exc


# --------------------------------------------------------------------------
# queries and checks


def slot_neighbors(cover: Cover, slot: Slot) -> set[Slot]:
    v, i = slot
    if not (0 <= v < cover.graph.n and 0 <= i < cover.s):
        raise CoverError(f"slot {slot} out of range")
    out = set()
    for u, row in cover.mate[v].items():
        j = row[i]
        if j >= 0:
            out.add((u, j))
    return out


def _check_domain(cover: Cover, choice: Mapping[int, int]) -> None:
    for v, i in choice.items():
        if not (0 <= v < cover.graph.n and 0 <= i < cover.s):
            raise CoverError(f"chosen slot ({v}, {i}) out of range")


def induced_adjacency(cover: Cover, choice: Mapping[int, int]) -> dict[int, list[int]]:
    """Adjacency of ``H[T]`` keyed by base vertex."""
    _check_domain(cover, choice)
    adj: dict[int, list[int]] = {v: [] for v in choice}
    mate = cover.mate
    for v, i in choice.items():
        for u, row in mate[v].items():
            j = row[i]
            if j >= 0 and choice.get(u) == j:
                adj[v].append(u)
    return adj


@dataclass(frozen=True)
class Verdict:
    ok: bool
    order: tuple[Slot, ...] | None = None
    stuck: tuple[int, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def is_strictly_f_degenerate(
    cover: Cover, f: ValueFunction, t: Transversal | Mapping[int, int]
) -> Verdict:
    """Decide strict f-degeneracy of ``H[T]`` by greedy peeling.

    A vertex is peelable while its remaining degree is below its f-value;
    the lowest peelable vertex goes first.  On success the peel sequence is an
    f-removing order.  ``stuck`` lists the vertices left when peeling halts.
    """
    choice = t.choice if isinstance(t, Transversal) else t
    adj = induced_adjacency(cover, choice)
    fv = f.values
    slack = {v: fv[v][i] - len(adj[v]) for v, i in choice.items()}
    heap = [v for v, sl in slack.items() if sl > 0]
    heapq.heapify(heap)
    removed: set[int] = set()
    order: list[Slot] = []
    while heap:
        v = heapq.heappop(heap)
        if v in removed:
            continue
        removed.add(v)
        order.append((v, choice[v]))
        for u in adj[v]:
            if u in removed:
                continue
            slack[u] += 1
            if slack[u] == 1:
                heapq.heappush(heap, u)
    if len(order) == len(choice):
        return Verdict(True, tuple(order))
    return Verdict(False, None, tuple(sorted(set(choice) - removed)))


def explain_removing_order(
    cover: Cover, f: ValueFunction, t: Transversal | Mapping[int, int], order: Sequence[Slot]
) -> str | None:
    """Why ``order`` is not an f-removing order of ``H[T]`` (``None`` if it is)."""
    choice = t.choice if isinstance(t, Transversal) else t
    if len(order) != len(choice):
        return f"order lists {len(order)} slots for {len(choice)} vertices"
    pos: dict[int, int] = {}
    for k, (v, i) in enumerate(order):
        if choice.get(v) != i:
            return f"order entry ({v}, {i}) is not a chosen slot"
        if v in pos:
            return f"vertex {v} listed twice"
        pos[v] = k
    adj = induced_adjacency(cover, choice)
    for v, i in choice.items():
        right = sum(1 for u in adj[v] if pos[u] > pos[v])
        if right >= f.values[v][i]:
            return f"slot ({v}, {i}) has {right} right neighbours, f = {f.values[v][i]}"
    return None


def check_removing_order(
    cover: Cover, f: ValueFunction, t: Transversal | Mapping[int, int], order: Sequence[Slot]
) -> bool:
    return explain_removing_order(cover, f, t, order) is None


def is_dp_coloring(cover: Cover, t: Transversal | Mapping[int, int]) -> bool:
    """True iff the chosen slots are pairwise unmatched."""
    choice = t.choice if isinstance(t, Transversal) else t
    return all(not nb for nb in induced_adjacency(cover, choice).values())


# --------------------------------------------------------------------------
# constructions


@dataclass(frozen=True)
class ListEncoding:
    """Cover built from a list assignment.

    ``colors[v][i]`` is the colour carried by slot ``i`` of ``v``; ``None``
    marks padding slots, which must get f = 0.
    """

    cover: Cover
    colors: tuple[tuple[object | None, ...], ...]

    def value_function(self) -> ValueFunction:
        return ValueFunction(tuple(tuple(0 if c is None else 1 for c in row) for row in self.colors))

    def decode(self, t: Transversal | Mapping[int, int]) -> dict[int, object]:
        choice = t.choice if isinstance(t, Transversal) else t
        out = {}
        for v, i in choice.items():
            c = self.colors[v][i]
            if c is None:
                raise CoverError(f"vertex {v} uses padding slot {i}")
            out[v] = c
        return out

    def encode(self, coloring: Mapping[int, object]) -> dict[int, int]:
        return {v: self.colors[v].index(c) for v, c in coloring.items()}


def _sorted_colors(lst: Iterable[object]) -> list[object]:
    distinct = set(lst)
    try:
        return sorted(distinct)  # type: ignore[type-var]
    except TypeError:
        return sorted(distinct, key=repr)


def from_list_instance(graph: Graph, lists: Sequence[Iterable[object]]) -> ListEncoding:
    """Correspondence cover of a list assignment: equal colours are matched."""
    if len(lists) != graph.n:
        raise CoverError("need one list per vertex")
    sorted_lists = []
    for v, lst in enumerate(lists):
        colors = _sorted_colors(lst)
        if not colors:
            raise CoverError(f"list of vertex {v} is empty")
        sorted_lists.append(colors)
    s = max(len(c) for c in sorted_lists)
    pairs = {}
    for u, v in graph.edges():
        index_v = {c: j for j, c in enumerate(sorted_lists[v])}
        pl = [(i, index_v[c]) for i, c in enumerate(sorted_lists[u]) if c in index_v]
        if pl:
            pairs[(u, v)] = pl
    cover = Cover.from_pairs(graph, s, pairs)
    colors = tuple(tuple(c) + (None,) * (s - len(c)) for c in sorted_lists)
    return ListEncoding(cover, colors)


def restrict(
    cover: Cover, f: ValueFunction, vertices: Iterable[int]
) -> tuple[Cover, ValueFunction, tuple[int, ...]]:
    """Sub-cover ``H_W`` on the induced subgraph, relabelled ascending.

    Returns the cover, the inherited value function and the label map
    (new id -> old id).
    """
    sub, labels = cover.graph.induced(vertices)
    index = {v: k for k, v in enumerate(labels)}
    mate = tuple(
        {index[u]: row for u, row in cover.mate[v].items() if u in index} for v in labels
    )
    sub_f = ValueFunction(tuple(f.values[v] for v in labels))
    return Cover(sub, cover.s, mate), sub_f, labels


def delete_internal_edges(cover: Cover, vertices: Iterable[int]) -> Cover:
    """Same cover with the matchings of every edge inside ``vertices`` emptied."""
    w = set(vertices)
    if not w:
        return cover
    empty = _empty_row(cover.s)
    mate = list(cover.mate)
    for v in w:
        row = cover.mate[v]
        if any(u in w for u in row):
            mate[v] = {u: (empty if u in w else r) for u, r in row.items()}
    return Cover(cover.graph, cover.s, tuple(mate))
