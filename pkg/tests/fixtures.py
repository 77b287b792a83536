"""Small hand-built and networkx-built embeddings shared by the tests."""

from __future__ import annotations

import math

import networkx as nx

from fdegen.cover import Cover, SeedColoring, ValueFunction
from fdegen.graph_core import (
    NearTriangulation,
    PlaneEmbedding,
    embedding_from_coordinates,
    validate_near_triangulation,
)


def _outer_by_length(emb: PlaneEmbedding, length: int) -> NearTriangulation:
    fids = [i for i, f in enumerate(emb.faces) if len(f) == length]
    assert len(fids) == 1, fids
    return validate_near_triangulation(emb, fids[0])


def triangle() -> NearTriangulation:
    emb = embedding_from_coordinates(3, [(0, 1), (1, 2), (0, 2)], [(0, 0), (1, 0), (0, 1)])
    return validate_near_triangulation(emb, 0)


def wheel4() -> NearTriangulation:
    """C4 on 0..3 (counterclockwise) with hub 4."""
    coords = [(1, 0), (0, 1), (-1, 0), (0, -1), (0, 0)]
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)] + [(i, 4) for i in range(4)]
    return _outer_by_length(embedding_from_coordinates(5, edges, coords), 4)


def glued_triangles() -> NearTriangulation:
    """Triangles 0-1-2 and 0-1-3 sharing the edge 0-1."""
    coords = [(0, 0), (1, 0), (0.5, 1), (0.5, -1)]
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3)]
    return _outer_by_length(embedding_from_coordinates(4, edges, coords), 4)


def hexagon_with_long_chord() -> NearTriangulation:
    """Hexagon 0..5 triangulated by the chords 0-2, 0-3, 3-5."""
    coords = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
    edges = [(k, (k + 1) % 6) for k in range(6)] + [(0, 2), (0, 3), (3, 5)]
    return _outer_by_length(embedding_from_coordinates(6, edges, coords), 6)


def networkx_embedding(g: nx.Graph) -> PlaneEmbedding:
    ok, emb = nx.check_planarity(g)
    assert ok
    nodes = sorted(g.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    rot = [[index[u] for u in reversed(list(emb.neighbors_cw_order(v)))] for v in nodes]
    return PlaneEmbedding.from_rotation(rot)


def octahedron() -> NearTriangulation:
    emb = networkx_embedding(nx.octahedral_graph())
    return validate_near_triangulation(emb, 0)


def icosahedron_minus_vertex() -> NearTriangulation:
    g = nx.icosahedral_graph()
    g.remove_node(0)
    return _outer_by_length(networkx_embedding(g), 5)


def uniform_instance(nt: NearTriangulation, s: int = 5, value: int = 1):
    cover = Cover.identity(nt.graph, s)
    return cover, ValueFunction.constant(nt.n, s, value)


def seed_on(nt: NearTriangulation, slots=(0, 1)) -> SeedColoring:
    return SeedColoring((nt.outer_cycle[0], nt.outer_cycle[1]), tuple(slots))


def octahedron_apollonian_wagner(rng):
    """3-sum of an octahedron and Apollonian(20), then a 2-sum with a Wagner leaf.

    Global ids: octahedron 0..5, Apollonian extras 6..22, Wagner extras 23..28.
    """
    from fdegen.generators import gen_apollonian
    from fdegen.solver.tree import DecompositionTree, Leaf, SumNode

    octa = octahedron().embedding
    tri = octa.faces[0]
    apo = gen_apollonian(20, rng).embedding
    # Apollonian vertices 0, 1, 2 bound the outer triangle
    apo_ids = list(tri) + list(range(6, 23))
    seam3 = tuple(tri)
    left = SumNode(seam3, Leaf("triangulation", tuple(range(6)), octa), Leaf("triangulation", tuple(apo_ids), apo))
    # Wagner local 0-1 is an edge; glue it onto an Apollonian edge
    a, b = apo_ids[3], apo_ids[apo.rotation[3][0]]
    wag = Leaf("wagner", (a, b) + tuple(range(23, 29)))
    return DecompositionTree(SumNode((a, b), left, wag), "k5", 29)
