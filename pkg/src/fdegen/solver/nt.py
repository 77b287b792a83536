"""Extension of a precoloured outer edge to a whole near-triangulation.

The recursion peels the outer vertex ``vp`` next to ``v1`` when the outer
cycle is chordless and splits along a chord otherwise.  It runs on an
explicit stack; regions are kept as doubly linked outer cycles and the
removing order is assembled in a linked list, so every step costs time
proportional to the degrees it touches.

Working state shared with the callers in :mod:`.decomposition`:

``rot``
    rotation system indexed by vertex id (host ids, not relabelled);
``mate``
    ``Cover.mate`` of the cover in force;
``f``
    mutable per-vertex rows of the value function (lowered in place);
``chosen``
    vertex -> chosen slot, pre-filled for the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, MutableMapping, Sequence

from ..cover import (
    Cover,
    SeedColoring,
    Transversal,
    ValueFunction,
    explain_removing_order,
    is_dp_coloring,
    is_strictly_f_degenerate,
)
from ..errors import InternalFailure, InvalidInstance
from ..graph_core import NearTriangulation

_NIL = -1

_CASE1 = 1
_CASE2 = 2
_CHORD = 3
_MERGE = 4


@dataclass
class SolverStats:
    """Branch counters, summed across calls when one instance is reused."""

    chord: int = 0
    fan: int = 0
    case1: int = 0
    case2: int = 0
    base: int = 0
    separating: int = 0
    facial: int = 0
    promoted: int = 0
    greedy: int = 0
    sums: int = 0

    def add(self, other: "SolverStats") -> None:
        for k, v in vars(other).items():
            setattr(self, k, getattr(self, k) + v)

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


class _Region:
    __slots__ = ("nxt", "prv", "v1", "v2", "dirty")

    def __init__(self, nxt, prv, v1, v2, dirty):
        self.nxt = nxt
        self.prv = prv
        self.v1 = v1
        self.v2 = v2
        # vertices whose chords have not been looked for yet (ordered set)
        self.dirty = dirty


def _split(reg: _Region, a: int, b: int) -> tuple[_Region, _Region]:
    """Cut ``reg`` along chord ``ab``; returns (part with v1v2, other part).

    The shorter of the two boundary paths is copied out, the longer one is
    rewired in place.
    """
    nxt, prv = reg.nxt, reg.prv
    p1, p2 = a, b
    while True:
        p1 = nxt[p1]
        p2 = nxt[p2]
        if p1 == b:
            start, end = a, b
            break
        if p2 == a:
            start, end = b, a
            break
    path = [start]
    x = start
    while x != end:
        x = nxt[x]
        path.append(x)
    # small cycle: path closed by end -> start
    snxt = {}
    sprv = {}
    for k in range(len(path) - 1):
        snxt[path[k]] = path[k + 1]
        sprv[path[k + 1]] = path[k]
    snxt[end] = start
    sprv[start] = end
    dirty = reg.dirty
    sdirty = dict.fromkeys(x for x in path if x in dirty)
    sdirty[a] = None
    for x in path[1:-1]:
        del nxt[x]
        del prv[x]
        dirty.pop(x, None)
    # large cycle: other path closed by start -> end
    nxt[start] = end
    prv[end] = start
    dirty[a] = None

    v1 = reg.v1
    small_has_seed = v1 in snxt and v1 != end
    if small_has_seed:
        c1 = _Region(snxt, sprv, v1, reg.v2, sdirty)
        c2 = _Region(nxt, prv, start, end, dirty)
    else:
        c1 = reg
        c2 = _Region(snxt, sprv, end, start, sdirty)
    return c1, c2


def run_fan_recursion(
    rot: Sequence[Sequence[int]] | Mapping[int, Sequence[int]],
    mate: Sequence[Mapping[int, Sequence[int]]],
    f: Sequence[list[int]] | Mapping[int, list[int]],
    chosen: MutableMapping[int, int],
    cycle: Sequence[int],
    stats: SolverStats | None = None,
) -> list[int]:
    """Colour the disk bounded by ``cycle`` from its precoloured first edge.

    ``cycle`` has the disk on its left and starts with the seed vertices
    ``v1, v2`` (both already in ``chosen``).  Fills ``chosen`` for every other
    vertex of the disk and returns those vertices in f-removing order; the
    full order is this list followed by the seed's own order.
    """
    if stats is None:
        stats = SolverStats()
    k = len(cycle)
    nxt = {}
    prv = {}
    for i in range(k):
        a, b = cycle[i], cycle[(i + 1) % k]
        nxt[a] = b
        prv[b] = a
    cur: _Region | None = _Region(nxt, prv, cycle[0], cycle[1], dict.fromkeys(cycle))

    left: dict[int, int] = {}
    right: dict[int, int] = {}
    # result of the most recently finished region: (head, tail) or None
    seg: tuple[int, int] | None = None
    stack: list[tuple] = []

    while True:
        if cur is not None:
            nxt, prv, dirty = cur.nxt, cur.prv, cur.dirty
            chord = None
            while dirty:
                x, _ = dirty.popitem()
                ax, bx = nxt[x], prv[x]
                for y in rot[x]:
                    if y in nxt and y != ax and y != bx:
                        chord = (x, y)
                        break
                if chord is not None:
                    break
            if chord is not None:
                stats.chord += 1
                c1, c2 = _split(cur, chord[0], chord[1])
                stack.append((_CHORD, c2))
                cur = c1
                continue

            v1, v2 = cur.v1, cur.v2
            vp = prv[v1]
            vq = prv[vp]
            r = rot[vp]
            d = len(r)
            j = r.index(v1) + 1
            fan = []
            while True:
                y = r[j % d]
                if y == vq:
                    break
                fan.append(y)
                j += 1

            if not fan:
                if vq != v2 or nxt[v2] != vp:
                    raise InternalFailure(f"empty fan at {vp} on an outer cycle longer than 3")
                stats.base += 1
                k1 = mate[v1][vp][chosen[v1]]
                k2 = mate[v2][vp][chosen[v2]]
                fvp = f[vp]
                for i in range(len(fvp)):
                    if fvp[i] > (i == k1) + (i == k2):
                        chosen[vp] = i
                        break
                else:
                    raise InternalFailure(f"no slot left for the last vertex {vp}")
                left[vp] = _NIL
                right[vp] = _NIL
                seg = (vp, vp)
                cur = None
                continue

            stats.fan += 1
            kk = mate[v1][vp][chosen[v1]]
            fvp = f[vp]
            xprime = [i for i in range(len(fvp)) if fvp[i] - (i == kk) > 0]
            mvp = mate[vp]
            if len(xprime) >= 2:
                stats.case1 += 1
                x0, x1 = xprime[0], xprime[1]
                for u in fan:
                    mu = mvp[u]
                    fu = f[u]
                    i = mu[x0]
                    if i >= 0 and fu[i] > 0:
                        fu[i] -= 1
                    i = mu[x1]
                    if i >= 0 and fu[i] > 0:
                        fu[i] -= 1
                stack.append((_CASE1, vp, vq, x0, x1, v1, v2))
            elif len(xprime) == 1:
                stats.case2 += 1
                x0 = xprime[0]
                if fvp[x0] - (x0 == kk) != 2:
                    raise InternalFailure(f"single candidate slot at {vp} has f' != 2")
                for u in fan:
                    i = mvp[u][x0]
                    if i >= 0:
                        f[u][i] = 0
                stack.append((_CASE2, vp, vq, x0, vq == v2))
            else:
                raise InternalFailure(f"outer vertex {vp} has f-sum below 3")

            # O' = (O - vp) + path vq, u_m, ..., u_1, v1
            del nxt[vp]
            del prv[vp]
            prev = vq
            for u in reversed(fan):
                nxt[prev] = u
                prv[u] = prev
                prev = u
                dirty[u] = None
            nxt[prev] = v1
            prv[v1] = prev
            continue

        if not stack:
            break
        frame = stack.pop()
        tag = frame[0]
        if tag == _CASE1:
            _, vp, vq, x0, x1, v1, v2 = frame
            bad = mate[vq][vp][chosen[vq]]
            x = x0 if x0 != bad else x1
            # right neighbours of vp are the two seed slots only
            cnt = (mate[v1][vp][chosen[v1]] == x) + (vp in mate[v2] and mate[v2][vp][chosen[v2]] == x)
            if cnt >= f[vp][x]:
                raise InternalFailure(f"inserted slot ({vp}, {x}) has too many right neighbours")
            chosen[vp] = x
            seg = _append(seg, vp, left, right)
        elif tag == _CASE2:
            _, vp, vq, x, vq_is_seed = frame
            chosen[vp] = x
            if vq_is_seed:
                seg = _append(seg, vp, left, right)
            else:
                seg = _insert_before(seg, vq, vp, left, right)
        elif tag == _CHORD:
            c2 = frame[1]
            # gluing: the chord ends act as a fresh seed with f = 1
            for w in (c2.v1, c2.v2):
                f[w][chosen[w]] = 1
            stack.append((_MERGE, seg))
            seg = None
            cur = c2
        else:
            seg = _concat(seg, frame[1], left, right)

    out = []
    if seg is not None:
        x = seg[0]
        while x != _NIL:
            out.append(x)
            x = right[x]
    return out


def _append(seg, v, left, right):
    right[v] = _NIL
    if seg is None:
        left[v] = _NIL
        return (v, v)
    head, tail = seg
    right[tail] = v
    left[v] = tail
    return (head, v)


def _insert_before(seg, anchor, v, left, right):
    if seg is None:
        raise InternalFailure(f"anchor {anchor} missing from the order")
    head, tail = seg
    lft = left[anchor]
    left[v] = lft
    right[v] = anchor
    left[anchor] = v
    if lft == _NIL:
        head = v
    else:
        right[lft] = v
    return (head, tail)


def _concat(a, b, left, right):
    if a is None:
        return b
    if b is None:
        return a
    right[a[1]] = b[0]
    left[b[0]] = a[1]
    return (a[0], b[1])


# --------------------------------------------------------------------------
# public entry points


@dataclass(frozen=True)
class FNTInstance:
    """Near-triangulation with a valued cover and a precoloured outer edge."""

    nt: NearTriangulation
    cover: Cover
    f: ValueFunction
    seed: SeedColoring

    def validate(self) -> None:
        """Raise :class:`InvalidInstance` unless the extension hypotheses hold.

        Seed vertices are exempt from the f-sum bounds: only their chosen
        slots matter.
        """
        nt, cover, f, seed = self.nt, self.cover, self.f, self.seed
        if cover.graph.n != nt.n or cover.graph.edge_set() != nt.graph.edge_set():
            raise InvalidInstance("cover base graph differs from the near-triangulation")
        _check_values(cover, f)
        if len(seed.vertices) != 2:
            raise InvalidInstance("seed must precolour exactly one outer edge")
        a, b = seed.vertices
        pos = nt.outer_position
        p = nt.p
        if a not in pos or b not in pos or (pos[a] - pos[b]) % p not in (1, p - 1):
            raise InvalidInstance(f"seed {a}-{b} is not an edge of the outer cycle")
        _check_seed(cover, f, seed)
        for v in range(nt.n):
            if v in (a, b):
                continue
            need = 3 if v in pos else 5
            total = sum(f.values[v])
            if total < need:
                where = "outer" if v in pos else "inner"
                raise InvalidInstance(f"{where} vertex {v} has f-sum {total} < {need}")


def _check_values(cover: Cover, f: ValueFunction) -> None:
    if f.n != cover.graph.n or f.width != cover.s:
        raise InvalidInstance(
            f"value function is {f.n}x{f.width}, cover is {cover.graph.n}x{cover.s}"
        )
    bad = f.range() - {0, 1, 2}
    if bad:
        raise InvalidInstance(f"value function takes values {sorted(bad)} outside {{0, 1, 2}}")


def _check_seed(cover: Cover, f: ValueFunction, seed: SeedColoring) -> tuple:
    g = cover.graph
    for v, i in zip(seed.vertices, seed.slots):
        if not (0 <= v < g.n):
            raise InvalidInstance(f"seed vertex {v} out of range")
        if not (0 <= i < cover.s):
            raise InvalidInstance(f"seed slot {i + 1} of vertex {v} out of range")
    vs = seed.vertices
    for x in range(len(vs)):
        for y in range(x + 1, len(vs)):
            if not g.has_edge(vs[x], vs[y]):
                raise InvalidInstance(f"seed vertices {vs[x]} and {vs[y]} are not adjacent")
    verdict = is_strictly_f_degenerate(cover, f, seed.as_choice())
    if not verdict.ok:
        raise InvalidInstance("seed is not a strictly f-degenerate transversal of H_K")
    return verdict.order


def extend_near_triangulation(
    inst: FNTInstance, *, stats: SolverStats | None = None, verify: bool = True
) -> Transversal:
    """Extend the seed to a strictly f-degenerate transversal of the whole cover.

    The returned order is an f-removing order ending with the seed slots.
    Any failure of the construction raises :class:`InternalFailure`.
    """
    inst.validate()
    seed_order = _check_seed(inst.cover, inst.f, inst.seed)
    nt = inst.nt.rotate_to_edge(*inst.seed.vertices)
    f = [list(r) for r in inst.f.values]
    chosen = inst.seed.as_choice()
    xs = run_fan_recursion(nt.embedding.rotation, inst.cover.mate, f, chosen, list(nt.outer_cycle), stats)
    order = tuple((v, chosen[v]) for v in xs) + tuple(seed_order)
    t = Transversal(chosen, order)
    if verify:
        reason = explain_removing_order(inst.cover, inst.f, t, order)
        if len(chosen) != nt.n:
            reason = f"{nt.n - len(chosen)} vertices left uncoloured"
        if reason is not None:
            raise InternalFailure(f"emitted order rejected: {reason}")
    return t


def extend_nt_dp(
    nt: NearTriangulation,
    cover: Cover,
    seed: SeedColoring,
    f: ValueFunction | None = None,
    *,
    stats: SolverStats | None = None,
) -> Transversal:
    """DP-colouring version: ``f`` is a 0/1 list mask (all ones by default).

    Outer vertices need at least three usable slots and inner ones five.
    """
    if f is None:
        f = ValueFunction.constant(nt.n, cover.s, 1)
    if f.range() - {0, 1}:
        raise InvalidInstance("DP extension takes a 0/1 slot mask")
    t = extend_near_triangulation(FNTInstance(nt, cover, f, seed), stats=stats)
    if not is_dp_coloring(cover, t):
        raise InternalFailure("f = 1 extension is not an independent transversal")
    return t
