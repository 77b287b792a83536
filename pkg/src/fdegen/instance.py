"""Instance files: a decomposition tree or near-triangulation, a cover, f and a seed."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .cover import (
    Cover,
    SeedColoring,
    Transversal,
    ValueFunction,
    explain_removing_order,
    is_strictly_f_degenerate,
)
from .errors import CoverError, GraphError, InvalidInstance
from .graph_core import Graph, NearTriangulation, near_triangulation_from_json
from .solver.decomposition import solve_decomposition
from .solver.nt import FNTInstance, SolverStats, extend_near_triangulation
from .solver.tree import DecompositionTree


@dataclass(frozen=True, eq=False)
class Instance:
    """Exactly one of ``tree`` / ``nt`` is set.

    ``cover.graph`` is the base graph; for trees it may be a spanning
    subgraph of the flattened tree.
    """

    cover: Cover
    f: ValueFunction
    seed: SeedColoring
    tree: DecompositionTree | None = None
    nt: NearTriangulation | None = None

    def __post_init__(self) -> None:
        if (self.tree is None) == (self.nt is None):
            raise InvalidInstance("an instance has either a tree or a near-triangulation")

    @property
    def kind(self) -> str:
        return "tree" if self.tree is not None else "nt"

    @property
    def graph(self) -> Graph:
        return self.cover.graph

    def solve(self, stats: SolverStats | None = None) -> Transversal:
        if self.nt is not None:
            return extend_near_triangulation(FNTInstance(self.nt, self.cover, self.f, self.seed), stats=stats)
        return solve_decomposition(self.tree, self.cover, self.f, self.seed, stats=stats)

    def validate(self) -> None:
        if self.nt is not None:
            FNTInstance(self.nt, self.cover, self.f, self.seed).validate()
        else:
            self.tree.validate()

    # JSON ------------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.tree is not None:
            out["tree"] = self.tree.to_json()
            if self.cover.graph.edge_set() != self.tree.graph.edge_set():
                out["edges"] = [list(e) for e in self.cover.graph.edges()]
        else:
            out["nt"] = self.nt.to_json()
        out["cover"] = self.cover.to_json()
        out["f"] = [list(r) for r in self.f.values]
        out["seed"] = self.seed.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: Any) -> "Instance":
        if not isinstance(data, dict):
            raise InvalidInstance("instance JSON must be an object")
        try:
            tree = nt = None
            if "tree" in data:
                tree = DecompositionTree.from_json(data["tree"])
                if "edges" in data:
                    graph = Graph.from_edges(tree.n, [tuple(e) for e in data["edges"]])
                else:
                    graph = tree.graph
            elif "nt" in data:
                nt = near_triangulation_from_json(data["nt"])
                graph = nt.graph
            else:
                raise InvalidInstance("instance needs a 'tree' or an 'nt' entry")
            cover = Cover.from_json(data["cover"], graph)
            rows = data.get("f", data["cover"].get("f"))
            if rows is None:
                raise InvalidInstance("instance has no value function")
            f = ValueFunction.from_rows(rows)
            seed = SeedColoring.from_json(data["seed"])
        except KeyError as exc:
            raise InvalidInstance(f"instance JSON lacks {exc}") from exc
        except (GraphError, CoverError, TypeError, ValueError) as exc:
            raise InvalidInstance(f"bad instance JSON: {exc}") from exc
        return cls(cover, f, seed, tree, nt)

    @classmethod
    def loads(cls, text: str) -> "Instance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInstance(f"not JSON: {exc}") from exc
        return cls.from_json(data)


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        return Instance.loads(fh.read())


def check_result(inst: Instance, t: Transversal) -> str | None:
    """Why ``t`` is not a valid answer for ``inst`` (``None`` if it is).

    A carried order is checked verbatim; without one, greedy peeling decides.
    """
    n = inst.graph.n
    if sorted(t.choice) != list(range(n)):
        return f"transversal covers {len(t.choice)} of {n} vertices"
    for v, i in zip(inst.seed.vertices, inst.seed.slots):
        if t.choice.get(v) != i:
            return f"seed vertex {v} changed from slot {i + 1}"
    if t.order is not None:
        return explain_removing_order(inst.cover, inst.f, t, t.order)
    verdict = is_strictly_f_degenerate(inst.cover, inst.f, t)
    if not verdict.ok:
        return f"greedy peeling stuck on vertices {list(verdict.stuck)}"
    return None
