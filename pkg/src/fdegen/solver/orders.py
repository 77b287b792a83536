"""Surgery on f-removing orders: pinning slots to the right and gluing."""

from __future__ import annotations

from typing import Iterable, Sequence

from ..cover import Cover, Slot, Transversal, ValueFunction, explain_removing_order
from ..errors import NotRemovingOrder, SeamMismatch


def normalize_order(
    cover: Cover,
    f: ValueFunction,
    t: Transversal,
    order: Sequence[Slot],
    pinned: Iterable[Slot],
) -> list[Slot]:
    """Move ``pinned`` slots to the right end of an f-removing order.

    Pinned slots must carry f = 1 and be pairwise unmatched; then none of
    them may have a right neighbour, so moving them right breaks nothing.
    The relative order of the other slots (and of the pinned ones) is kept.
    """
    reason = explain_removing_order(cover, f, t, order)
    if reason is not None:
        raise NotRemovingOrder(reason)
    pinned = set(pinned)
    for v, i in pinned:
        if t.choice.get(v) != i:
            raise NotRemovingOrder(f"pinned slot ({v}, {i}) is not chosen")
        if f.values[v][i] != 1:
            raise NotRemovingOrder(f"pinned slot ({v}, {i}) has f = {f.values[v][i]}, need 1")
    for v, i in pinned:
        for u, j in pinned:
            if u != v and u in cover.mate[v] and cover.mate[v][u][i] == j:
                raise NotRemovingOrder(f"pinned slots of {v} and {u} are matched")
    rest = [x for x in order if x not in pinned]
    tail = [x for x in order if x in pinned]
    return rest + tail


def merge_transversals(r: Transversal, r_star: Transversal, seam: Iterable[int]) -> Transversal:
    """Glue ``R`` (on the first part) and ``R*`` (on the second part).

    ``R*`` must agree with ``R`` on the seam and its order must end with the
    seam slots.  The result lists the slots private to ``R*`` first, then
    the whole order of ``R``.
    """
    seam = tuple(seam)
    for w in seam:
        if w not in r.choice or w not in r_star.choice:
            raise SeamMismatch(f"seam vertex {w} missing from a part")
        if r.choice[w] != r_star.choice[w]:
            raise SeamMismatch(
                f"seam vertex {w}: slot {r.choice[w]} vs {r_star.choice[w]}"
            )
    for v in r_star.choice:
        if v in r.choice and v not in seam:
            raise SeamMismatch(f"vertex {v} lies in both parts but not on the seam")
    if r.order is None or r_star.order is None:
        raise NotRemovingOrder("both parts need removing orders")
    k = len(seam)
    seam_set = set(seam)
    if k and {v for v, _ in r_star.order[-k:]} != seam_set:
        raise NotRemovingOrder("second order must end with the seam slots")
    private = [x for x in r_star.order if x[0] not in seam_set]
    choice = dict(r.choice)
    choice.update(r_star.choice)
    return Transversal(choice, tuple(private) + tuple(r.order))
