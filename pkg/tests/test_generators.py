import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from fdegen.cover import is_strictly_f_degenerate
from fdegen.errors import InvalidInstance, ProfileInfeasible
from fdegen.generators import (
    GenSpec,
    canonical_code,
    draw_seed,
    enumerate_near_triangulations,
    enumerate_triangulations,
    gen_apollonian,
    gen_near_triangulation,
    gen_tree,
    generate_instance,
    generate_nt_instance,
    random_matchings,
    value_function,
)
from fdegen.graph_core import embedding_from_coordinates, trace_faces, validate_near_triangulation
from fdegen.instance import Instance
from fdegen.solver.tree import DecompositionTree, Leaf, SumNode, complete_graph, leaves


def k4_embedding():
    coords = [(0, 0), (4, 0), (2, 4), (2, 1)]
    edges = [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3)]
    return embedding_from_coordinates(4, edges, coords)


def test_apollonian_small_and_euler():
    rng = random.Random(0)
    assert gen_apollonian(3, rng).graph.edge_set() == complete_graph(3).edge_set()
    k4 = gen_apollonian(4, rng)
    assert k4.graph.edge_set() == complete_graph(4).edge_set()
    assert len(k4.embedding.faces) == 4
    big = gen_apollonian(100, rng)
    assert big.graph.num_edges == 294
    assert all(len(f) == 3 for f in trace_faces(big.embedding))


def test_single_leaf_tree():
    rng = random.Random(1)
    tree, g = gen_tree(GenSpec(leaves=1, special_prob=0.0), rng)
    (leaf,) = list(leaves(tree.root))
    assert g.n == len(leaf.vertices)
    assert g.edge_set() == leaf.local_graph.edge_set()


def test_two_k4_leaves_three_sum():
    a = Leaf("triangulation", (0, 1, 2, 3), k4_embedding())
    b = Leaf("triangulation", (0, 1, 2, 4), k4_embedding())
    tree = DecompositionTree(SumNode((0, 1, 2), a, b), "k5", 5)
    tree.validate()
    assert tree.graph.n == 5 and tree.graph.num_edges == 9
    rng = random.Random(2)
    tree2, g2 = gen_tree(GenSpec(leaves=2, leaf_size=(4, 4), special_prob=0.0, sum3_prob=1.0), rng)
    assert g2.n == 5 and tree2.root.kind == "sum3"


def test_density_extremes():
    rng = random.Random(3)
    g = gen_apollonian(30, rng).graph
    empty = random_matchings(g, 5, 0.0, rng)
    assert all(empty.is_empty_on(u, v) for u, v in g.edges())
    full = random_matchings(g, 5, 1.0, rng)
    for u, v in g.edges():
        pl = full.pairs(u, v)
        assert sorted(i for i, _ in pl) == list(range(5)) and sorted(j for _, j in pl) == list(range(5))


def test_profile_221():
    f = value_function(10, 3, "221", random.Random(0))
    assert all(s == 5 for s in f.sums()) and f.range() == {1, 2}
    with pytest.raises(ProfileInfeasible):
        value_function(10, 5, "221", random.Random(0))
    with pytest.raises(ProfileInfeasible):
        value_function(10, 4, "ones", random.Random(0))


def test_random_profile_range_and_sums():
    rng = random.Random(4)
    f = value_function(200, 5, "random", rng, [3] * 100 + [5] * 100)
    assert f.range() <= {0, 1, 2}
    sums = f.sums()
    assert all(3 <= x <= 5 for x in sums[:100]) and all(5 <= x <= 7 for x in sums[100:])


def test_seed_draws_are_valid():
    rng = random.Random(5)
    g = complete_graph(3)
    for _ in range(100):
        cover = random_matchings(g, 5, 1.0, rng)
        f = value_function(3, 5, "random", rng)
        seed = draw_seed(cover, f, (0, 1, 2), rng)
        assert is_strictly_f_degenerate(cover, f, seed.as_choice()).ok


def test_mode_grammar():
    rng = random.Random(6)
    for trial in range(40):
        tree, _ = gen_tree(GenSpec(mode="k33", leaves=8, special_prob=0.5, seed=trial), rng)
        tree.validate()
        kinds = {lf.kind for lf in leaves(tree.root)}
        assert "wagner" not in kinds
        tree5, _ = gen_tree(GenSpec(mode="k5", leaves=8, special_prob=0.5, seed=trial), rng)
        tree5.validate()
        assert "k5" not in {lf.kind for lf in leaves(tree5.root)}
    with pytest.raises(InvalidInstance):
        GenSpec(mode="k33", seed_kind="k3").validate()
    with pytest.raises(InvalidInstance):
        DecompositionTree(Leaf("k5", tuple(range(5))), "k5", 5).validate()
    with pytest.raises(InvalidInstance):
        DecompositionTree(Leaf("wagner", tuple(range(8))), "k33", 8).validate()


def test_bad_sums_rejected():
    a = Leaf("triangulation", (0, 1, 2, 3), k4_embedding())
    b = Leaf("triangulation", (0, 1, 2, 4), k4_embedding())
    with pytest.raises(InvalidInstance):
        DecompositionTree(SumNode((0, 1, 2), a, b), "k33", 5).validate()
    with pytest.raises(InvalidInstance):
        DecompositionTree(SumNode((0, 1), a, b), "k5", 5).validate()
    c = Leaf("wagner", (0, 2) + tuple(range(4, 10)))
    # 0 and 2 are not adjacent in the Wagner leaf (local 0 and 1 are)
    d = Leaf("wagner", (0, 1, 3) + tuple(range(10, 15)))
    with pytest.raises(InvalidInstance):
        DecompositionTree(SumNode((0, 1), a, d), "k5", 15).validate()
    assert c.local_graph.has_edge(0, 1)


def test_tree_json_round_trip():
    rng = random.Random(7)
    tree, g = gen_tree(GenSpec(leaves=10), rng)
    back = DecompositionTree.from_json(json.loads(json.dumps(tree.to_json())))
    back.validate()
    assert back.graph.edge_set() == g.edge_set()


def test_leaf_embeddings_round_trip():
    rng = random.Random(8)
    tree, _ = gen_tree(GenSpec(leaves=20, special_prob=0.2), rng)
    for lf in leaves(tree.root):
        if lf.kind == "triangulation":
            emb = lf.embedding
            nt = validate_near_triangulation(emb, 0)
            assert nt.p == 3 and all(len(fc) == 3 for fc in emb.faces)


def test_reproducible_instances():
    spec = GenSpec(leaves=15, profile="random", density=0.6, seed=42)
    assert generate_instance(spec).dumps() == generate_instance(spec).dumps()
    nt_spec = GenSpec(profile="random", seed=9)
    a = generate_nt_instance(60, nt_spec).dumps()
    assert a == generate_nt_instance(60, nt_spec).dumps()
    assert Instance.loads(a).dumps() == a


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 200), st.integers(0, 10**6), st.sampled_from(["ones", "random"]))
def test_generated_nt_instances_validate(n, seed, profile):
    inst = generate_nt_instance(n, GenSpec(profile=profile, density=0.5, seed=seed))
    inst.validate()
    assert inst.nt.n == n


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 25), st.sampled_from(["k5", "k33"]), st.integers(0, 10**6))
def test_generated_trees_validate(n_leaves, mode, seed):
    inst = generate_instance(GenSpec(mode=mode, leaves=n_leaves, seed=seed))
    inst.validate()
    assert inst.graph.edge_set() == inst.tree.graph.edge_set()


def test_triangulation_counts():
    # plane triangulations on 4..9 vertices, up to isomorphism and reflection
    assert [len(enumerate_triangulations(n)) for n in range(4, 10)] == [1, 1, 2, 5, 14, 50]


def test_small_near_triangulation_enumeration():
    counts = {}
    codes = set()
    for n in range(3, 8):
        nts = enumerate_near_triangulations(n)
        counts[n] = len(nts)
        for nt in nts:
            again = validate_near_triangulation(nt.embedding, nt.embedding.outer_face_id)
            assert again.n == n
            codes.add(canonical_code(nt.embedding.rotation, nt.outer_cycle))
    # triangle; K4 and the two glued triangles
    assert counts[3] == 1 and counts[4] == 2
    assert len(codes) == sum(counts.values())
    for seed in range(500):
        nt = gen_near_triangulation(3 + seed % 5, random.Random(seed))
        assert canonical_code(nt.embedding.rotation, nt.outer_cycle) in codes


def test_canonical_code_ignores_labels():
    rng = random.Random(10)
    nt = gen_apollonian(12, rng)
    perm = list(range(12))
    rng.shuffle(perm)
    inv = {p: k for k, p in enumerate(perm)}
    rot = [[perm[u] for u in nt.embedding.rotation[inv[v]]] for v in range(12)]
    assert canonical_code(rot) == canonical_code(nt.embedding.rotation)
    mirror = [list(reversed(r)) for r in rot]
    assert canonical_code(mirror) == canonical_code(rot)
