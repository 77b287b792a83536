"""Deliberate corruption of solved instances, for negative controls.

Each mutation returns ``None`` when the instance offers no place where it is
guaranteed to break the answer; otherwise the mutated pair is invalid by a
two-vertex argument (see the individual docstrings), independent of any
verifier.
"""

from __future__ import annotations

from dataclasses import replace

from .cover import Cover, Transversal, induced_adjacency
from .instance import Instance

FAULTS = ("flip-slot", "swap-order", "flip-matching")


def flip_slot(inst: Instance, t: Transversal) -> tuple[Instance, Transversal] | None:
    """Move one non-seed vertex to a slot that cannot be removed.

    Either the new slot has f = 0, or it is matched to a chosen neighbour
    slot and both carry f = 1 (that edge alone is not strictly f-degenerate).
    """
    cover, fv = inst.cover, inst.f.values
    seed = set(inst.seed.vertices)
    choice = t.choice
    for v in sorted(choice):
        if v in seed:
            continue
        for j in range(cover.s):
            if j != choice[v] and fv[v][j] == 0:
                return inst, _with_slot(t, v, j)
        for u in cover.graph.adjacency[v]:
            j = cover.mate[u][v][choice[u]]
            if j >= 0 and j != choice[v] and fv[v][j] == 1 and fv[u][choice[u]] == 1:
                return inst, _with_slot(t, v, j)
    return None


def _with_slot(t: Transversal, v: int, j: int) -> Transversal:
    choice = dict(t.choice)
    choice[v] = j
    order = None
    if t.order is not None:
        order = tuple((x, j) if x == v else (x, i) for x, i in t.order)
    return Transversal(choice, order)


def swap_order(inst: Instance, t: Transversal) -> tuple[Instance, Transversal] | None:
    """Swap the ends of a conflict edge ``u < v`` where ``v`` has f = 1.

    Afterwards ``u`` sits to the right of ``v``, so ``v`` has a right
    neighbour it cannot afford.
    """
    if t.order is None:
        return None
    pos = {v: k for k, (v, _) in enumerate(t.order)}
    adj = induced_adjacency(inst.cover, t.choice)
    fv = inst.f.values
    for v in sorted(adj):
        if fv[v][t.choice[v]] != 1:
            continue
        for u in sorted(adj[v]):
            if pos[u] < pos[v]:
                order = list(t.order)
                order[pos[u]], order[pos[v]] = order[pos[v]], order[pos[u]]
                return inst, Transversal(t.choice, tuple(order))
    return None


def flip_matching(inst: Instance, t: Transversal) -> tuple[Instance, Transversal] | None:
    """Rewire one edge's matching so that two chosen slots become matched.

    The edge ``uv`` is picked with ``u`` left of ``v`` and ``u`` already at
    its limit minus one, so the new right neighbour breaks the order.
    """
    if t.order is None:
        return None
    cover, fv, choice = inst.cover, inst.f.values, t.choice
    pos = {v: k for k, (v, _) in enumerate(t.order)}
    adj = induced_adjacency(cover, choice)
    for u, v in cover.graph.edges():
        if pos[u] > pos[v]:
            u, v = v, u
        if cover.mate[u][v][choice[u]] == choice[v]:
            continue
        right = sum(1 for w in adj[u] if pos[w] > pos[u])
        if right + 1 < fv[u][choice[u]]:
            continue
        pairs = [
            (i, j)
            for i, j in cover.pairs(u, v)
            if i != choice[u] and j != choice[v]
        ] + [(choice[u], choice[v])]
        all_pairs = {}
        for a, b in cover.graph.edges():
            all_pairs[(a, b)] = list(cover.pairs(a, b))
        all_pairs[(min(u, v), max(u, v))] = pairs if u < v else [(j, i) for i, j in pairs]
        new = Cover.from_pairs(cover.graph, cover.s, all_pairs)
        return replace(inst, cover=new), t
    return None


def apply_fault(name: str, inst: Instance, t: Transversal) -> tuple[Instance, Transversal] | None:
    if name == "flip-slot":
        return flip_slot(inst, t)
    if name == "swap-order":
        return swap_order(inst, t)
    if name == "flip-matching":
        return flip_matching(inst, t)
    raise ValueError(f"unknown fault {name!r}")
