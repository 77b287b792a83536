import pytest
from hypothesis import given, settings, strategies as st
import random

from fdegen.errors import ChordPresent, GraphError, InnerFaceNotTriangle, NonPlanarRotation, OuterNotCycle
from fdegen.generators import gen_apollonian, gen_near_triangulation
from fdegen.graph_core import (
    Graph,
    PlaneEmbedding,
    embedding_from_coordinates,
    fan_around_last,
    find_chord,
    near_triangulation_from_json,
    peel_last,
    split_on_chord,
    trace_faces,
    validate_near_triangulation,
)
from fdegen.solver.tree import wagner_graph

from fixtures import (
    glued_triangles,
    hexagon_with_long_chord,
    icosahedron_minus_vertex,
    octahedron,
    triangle,
    wheel4,
)


def test_graph_rejects_loops_and_asymmetry():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(GraphError):
        Graph(2, ((1,), ()))


def test_triangle_has_two_faces_of_length_three():
    for rot in ([[1, 2], [2, 0], [0, 1]], [[2, 1], [0, 2], [1, 0]]):
        faces = trace_faces(PlaneEmbedding.from_rotation(rot))
        assert sorted(len(f) for f in faces) == [3, 3]


def test_k4_planar_rotation_has_four_triangles():
    coords = [(0, 0), (4, 0), (2, 4), (2, 1)]
    edges = [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)]
    faces = trace_faces(embedding_from_coordinates(4, edges, coords))
    assert len(faces) == 4 and all(len(f) == 3 for f in faces)


def test_wagner_graph_never_embeds():
    g = wagner_graph()
    rng = random.Random(5)
    for _ in range(200):
        rot = []
        for v in range(8):
            r = list(g.adjacency[v])
            rng.shuffle(r)
            rot.append(r)
        with pytest.raises(NonPlanarRotation):
            trace_faces(PlaneEmbedding.from_rotation(rot))


def test_face_lengths_sum_to_twice_edges():
    nt = gen_apollonian(40, random.Random(1))
    faces = nt.embedding.faces
    assert sum(len(f) for f in faces) == 2 * nt.graph.num_edges
    darts = [(f[i], f[(i + 1) % len(f)]) for f in faces for i in range(len(f))]
    assert len(set(darts)) == len(darts)


def test_validate_triangle_and_wheel():
    assert triangle().p == 3
    w = wheel4()
    assert w.p == 4 and set(w.outer_cycle) == {0, 1, 2, 3}


def test_c5_has_an_inner_pentagon():
    coords = [(1, 0), (0.3, 0.95), (-0.8, 0.6), (-0.8, -0.6), (0.3, -0.95)]
    emb = embedding_from_coordinates(5, [(k, (k + 1) % 5) for k in range(5)], coords)
    with pytest.raises(InnerFaceNotTriangle) as info:
        validate_near_triangulation(emb, 0)
    assert info.value.face_id == 1


def test_outer_walk_repeating_a_vertex():
    # two triangles sharing vertex 0: the outer walk visits 0 twice
    coords = [(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    edges = [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]
    emb = embedding_from_coordinates(5, edges, coords)
    fid = max(range(len(emb.faces)), key=lambda i: len(emb.faces[i]))
    with pytest.raises(OuterNotCycle):
        validate_near_triangulation(emb, fid)


def test_disconnected_embedding_rejected():
    with pytest.raises(GraphError):
        PlaneEmbedding.from_rotation([[1], [0], [3], [2]])


def test_chords_of_small_cases():
    assert find_chord(triangle()) is None
    assert find_chord(wheel4()) is None
    assert set(find_chord(glued_triangles())) == {0, 1}


def test_split_glued_triangles():
    nt = glued_triangles()
    c1, c2 = split_on_chord(nt, find_chord(nt))
    assert c1.n == c2.n == 3 and c1.p == c2.p == 3
    assert {c1.label(c1.outer_cycle[0]), c1.label(c1.outer_cycle[1])} == {nt.outer_cycle[0], nt.outer_cycle[1]}


def test_split_hexagon_on_long_chord():
    nt = hexagon_with_long_chord().rotate_to_edge(0, 1)
    cyc = nt.outer_cycle
    assert cyc[0] == 0 and cyc[3] == 3
    c1, c2 = split_on_chord(nt, (cyc[0], cyc[3]))
    assert (c1.p, c2.p) == (4, 4)
    assert c1.n + c2.n == nt.n + 2


def _labelled_edges(part):
    return {tuple(sorted((part.label(u), part.label(v)))) for u, v in part.graph.edges()}


def test_split_reunion_reproduces_edges():
    rng = random.Random(3)
    for _ in range(60):
        nt = gen_near_triangulation(rng.randint(4, 40), rng)
        chord = find_chord(nt)
        if chord is None:
            continue
        c1, c2 = split_on_chord(nt, chord)
        e1, e2 = _labelled_edges(c1), _labelled_edges(c2)
        assert e1 | e2 == nt.graph.edge_set()
        assert e1 & e2 == {tuple(sorted(chord))}
        assert c1.n + c2.n == nt.n + 2


def test_fan_of_wheel():
    nt = wheel4()
    cyc = nt.outer_cycle
    assert fan_around_last(nt) == [cyc[0], 4, cyc[2]]


def test_fan_of_octahedron_has_two_inner_vertices():
    nt = octahedron()
    path = fan_around_last(nt)
    assert path[0] == nt.outer_cycle[0] and path[-1] == nt.outer_cycle[1]
    assert len(path) - 2 == 2


def test_fan_of_icosahedron_minus_vertex_closes_a_cycle():
    nt = icosahedron_minus_vertex()
    assert nt.p == 5 and find_chord(nt) is None
    path = fan_around_last(nt)
    g = nt.graph
    assert all(g.has_edge(path[k], path[k + 1]) for k in range(len(path) - 1))
    peeled = peel_last(nt)
    assert peeled.n == nt.n - 1
    assert peeled.p == nt.p - 1 + len(path) - 2


def test_fan_refuses_chords():
    with pytest.raises(ChordPresent):
        fan_around_last(glued_triangles())


def test_rotate_to_edge_either_direction():
    nt = wheel4()
    a, b = nt.outer_cycle[1], nt.outer_cycle[2]
    assert nt.rotate_to_edge(b, a).outer_cycle[:2] == (a, b)
    with pytest.raises(GraphError):
        nt.rotate_to_edge(nt.outer_cycle[0], nt.outer_cycle[2])


def test_json_round_trip():
    nt = gen_near_triangulation(30, random.Random(8))
    back = near_triangulation_from_json(nt.to_json())
    assert back.embedding.rotation == nt.embedding.rotation
    assert set(back.outer_cycle) == set(nt.outer_cycle)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 80), st.integers(0, 10**6))
def test_generated_near_triangulations_validate(n, seed):
    nt = gen_near_triangulation(n, random.Random(seed))
    assert nt.n == n
    again = validate_near_triangulation(nt.embedding, nt.embedding.outer_face_id)
    assert set(again.outer_cycle) == set(nt.outer_cycle)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 60), st.integers(0, 10**6))
def test_fan_is_a_path(n, seed):
    rng = random.Random(seed)
    nt = gen_near_triangulation(n, rng)
    while find_chord(nt) is not None:
        c1, c2 = split_on_chord(nt, find_chord(nt))
        nt = c1 if c1.n >= c2.n else c2
    if nt.n == 3:
        return
    path = fan_around_last(nt)
    g = nt.graph
    assert all(g.has_edge(path[k], path[k + 1]) for k in range(len(path) - 1))
