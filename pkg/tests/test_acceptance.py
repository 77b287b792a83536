"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Budgets are wall-clock limits on the whole criterion (generation,
solving and every check), measured single-process.
"""

import itertools
import json
import math
import random
import time
from contextlib import contextmanager

import pytest

from fdegen.cover import (
    Cover,
    SeedColoring,
    ValueFunction,
    from_list_instance,
    is_dp_coloring,
    is_strictly_f_degenerate,
)
from fdegen.errors import InternalFailure
from fdegen.faults import flip_matching, flip_slot, swap_order
from fdegen.generators import (
    GenSpec,
    _sum_nodes,
    enumerate_near_triangulations,
    gen_apollonian,
    gen_near_triangulation,
    generate_instance,
    generate_nt_instance,
    nt_needs,
    random_matchings,
    value_function,
)
from fdegen.graph_core import Graph
from fdegen.instance import Instance, check_result
from fdegen.oracle import dp_colorability, exhaustive_transversal, has_dp_coloring, is_degenerate_backtracking
from fdegen.solver import FNTInstance, SolverStats, extend_near_triangulation, extend_nt_dp
from fdegen.solver.tree import complete_graph, leaves, single_leaf_tree


@contextmanager
def criterion(capsys, number: int, title: str, budget: float):
    """Time the block, then print one PASS/FAIL line and enforce the budget."""
    info = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        dt = time.perf_counter() - t0
        status = "PASS" if ok and dt <= budget else "FAIL"
        line = f"[{status}] criterion {number}: {title} | {info['detail']} | {dt:.1f}s of {budget:.0f}s"
        with capsys.disabled():
            print("\n" + line)
    assert dt <= budget, f"criterion {number} took {dt:.1f}s, budget {budget}s"


def _nt_spec(rng: random.Random) -> GenSpec:
    if rng.random() < 0.3:
        return GenSpec(s=5, profile="ones", density=rng.random())
    return GenSpec(s=rng.choice([3, 4, 5]), profile="random", density=rng.random())


def test_criterion_1_near_triangulation_totality(capsys):
    with criterion(capsys, 1, "10,000 near-triangulations solve and re-verify", 60) as info:
        rng = random.Random(1)
        stats = SolverStats()
        largest = 0
        for _ in range(10_000):
            n = int(round(math.exp(rng.uniform(math.log(4), math.log(500)))))
            inst = generate_nt_instance(n, _nt_spec(rng), rng)
            t = inst.solve(stats)
            assert check_result(inst, t) is None
            largest = max(largest, n)
        info["detail"] = f"max n {largest}, " + ", ".join(
            f"{k}={stats.as_dict()[k]}" for k in ("chord", "fan", "case1", "case2", "base")
        )
        assert largest == 500
        assert stats.chord > 0 and stats.fan > 0 and stats.case1 > 0 and stats.case2 > 0 and stats.base > 0


def test_criterion_2_dp_specialisation(capsys):
    with criterion(capsys, 2, "2,000 f = 1 instances are DP-colourings; list round-trip", 30) as info:
        rng = random.Random(2)
        count = 0
        for k in range(2_000):
            if k % 2:
                inst = generate_nt_instance(rng.randint(3, 200), GenSpec(s=5, profile="ones", density=rng.random()), rng)
                t = extend_nt_dp(inst.nt, inst.cover, inst.seed, inst.f)
            else:
                spec = GenSpec(mode=rng.choice(["k5", "k33"]), leaves=rng.randint(1, 20), s=5, profile="ones",
                               density=rng.random(), seed_kind="k2")
                inst = generate_instance(spec, rng)
                t = inst.solve()
            assert inst.f.range() <= {0, 1}
            assert is_dp_coloring(inst.cover, t) and check_result(inst, t) is None
            count += 1
        lists_ok = 0
        for _ in range(300):
            nt = gen_near_triangulation(rng.randint(3, 150), rng)
            pos = nt.outer_position
            lists = [rng.sample(range(9), 3 if v in pos else 5) for v in range(nt.n)]
            a, b = nt.outer_cycle[:2]
            ca = rng.choice(lists[a])
            cb = rng.choice([c for c in lists[b] if c != ca])
            enc = from_list_instance(nt.graph, lists)
            slots = enc.encode({a: ca, b: cb})
            t = extend_nt_dp(nt, enc.cover, SeedColoring((a, b), (slots[a], slots[b])), enc.value_function())
            col = enc.decode(t)
            assert all(col[v] in lists[v] for v in range(nt.n))
            assert all(col[u] != col[v] for u, v in nt.graph.edges())
            lists_ok += 1
        info["detail"] = f"{count} DP instances, {lists_ok} list colourings proper"


def _seed_place(inst: Instance) -> str:
    k = set(inst.seed.vertices)
    for node in _sum_nodes(inst.tree.root):
        if k <= set(node.seam):
            return "seam"
    return "leaf"


def _run_trees(mode: str, count: int, seed: int):
    rng = random.Random(seed)
    stats = SolverStats()
    seen = {"k2": 0, "k3": 0, "seam": 0, "leaf": 0, "wagner": 0, "k5": 0, "triangulation": 0, "sum2": 0, "sum3": 0}
    for trial in range(count):
        spec = GenSpec(
            mode=mode,
            leaves=rng.randint(1, 50),
            leaf_size=(3, rng.choice([6, 12, 20])),
            special_prob=rng.choice([0.1, 0.3, 0.6]),
            s=rng.choice([5, 6]),
            profile=rng.choice(["ones", "random", "random"]),
            density=rng.random(),
            seed_kind="k2" if mode == "k33" else "any",
            seam_seed_prob=0.4,
        )
        inst = generate_instance(spec, rng)
        t = inst.solve(stats)
        assert check_result(inst, t) is None
        assert {v: t.choice[v] for v in inst.seed.vertices} == inst.seed.as_choice()
        seen["k2" if len(inst.seed.vertices) == 2 else "k3"] += 1
        seen[_seed_place(inst)] += 1
        for lf in leaves(inst.tree.root):
            seen[lf.kind] += 1
        for node in _sum_nodes(inst.tree.root):
            seen[node.kind] += 1
    return seen, stats


def test_criterion_3_k5_minor_free_pipeline(capsys):
    with criterion(capsys, 3, "1,000 K5-mode trees solve and verify", 120) as info:
        seen, stats = _run_trees("k5", 1_000, 3)
        info["detail"] = (
            f"seeds K2 {seen['k2']} / K3 {seen['k3']}, on seams {seen['seam']} / in leaves {seen['leaf']}, "
            f"leaves Wagner {seen['wagner']} / triangulation {seen['triangulation']}, "
            f"separating {stats.separating}, promoted {stats.promoted}"
        )
        for key in ("k2", "k3", "seam", "leaf", "wagner", "triangulation", "sum2", "sum3"):
            assert seen[key] > 0, key
        assert seen["k5"] == 0
        assert stats.separating > 0 and stats.facial > 0 and stats.promoted > 0 and stats.greedy > 0


def test_criterion_4_k33_minor_free_pipeline(capsys):
    with criterion(capsys, 4, "1,000 K33-mode trees solve and verify", 60) as info:
        seen, stats = _run_trees("k33", 1_000, 4)
        info["detail"] = f"K5 leaves {seen['k5']}, triangulation leaves {seen['triangulation']}, 2-sums {seen['sum2']}"
        assert seen["k5"] > 0 and seen["sum2"] > 0
        assert seen["k3"] == 0 and seen["sum3"] == 0 and seen["wagner"] == 0


def test_criterion_5_oracle_agreement(capsys):
    with criterion(capsys, 5, "oracle agrees on all near-triangulations up to 7 vertices", 600) as info:
        rng = random.Random(5)
        nts = [nt for n in range(3, 8) for nt in enumerate_near_triangulations(n)]
        solved = 0
        for nt in nts:
            needs = nt_needs(nt)
            for _ in range(300):
                cover = random_matchings(nt.graph, 3, rng.random(), rng)
                f = value_function(nt.n, 3, "random", rng, needs)
                k = rng.randrange(nt.p)
                edge = (nt.outer_cycle[k], nt.outer_cycle[(k + 1) % nt.p])
                for i, j in itertools.product(range(3), repeat=2):
                    seed = SeedColoring(edge, (i, j))
                    if not is_strictly_f_degenerate(cover, f, seed.as_choice()).ok:
                        continue
                    try:
                        t = extend_near_triangulation(FNTInstance(nt, cover, f, seed))
                    except InternalFailure as exc:
                        pytest.fail(f"solver failed on a valid instance: {exc}")
                    assert exhaustive_transversal(cover, f, seed.as_choice()) is not None
                    assert is_degenerate_backtracking(cover, f, t.choice)
                    solved += 1
        pairs = _verifier_pairs(random.Random(55), 100_000)
        info["detail"] = f"{len(nts)} near-triangulations, {solved} seeded instances confirmed, {pairs} verifier pairs agree"


def _verifier_pairs(rng: random.Random, count: int) -> int:
    agree = 0
    for _ in range(count):
        n, s = rng.randint(1, 8), rng.randint(1, 3)
        edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.6]
        g = Graph.from_edges(n, edges)
        pairs = {e: [(i, j) for i, j in zip(range(s), rng.sample(range(s), s)) if rng.random() < 0.7] for e in edges}
        cover = Cover.from_pairs(g, s, pairs)
        f = ValueFunction.from_rows([[rng.randint(0, 2) for _ in range(s)] for _ in range(n)])
        choice = {v: rng.randrange(s) for v in range(n)}
        assert is_strictly_f_degenerate(cover, f, choice).ok == is_degenerate_backtracking(cover, f, choice)
        agree += 1
    return agree


def test_criterion_6_small_dp_chromatic_numbers(capsys):
    with criterion(capsys, 6, "DP chromatic number of K3 and C4 is 3", 60) as info:
        k3 = complete_graph(3)
        c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        found = {}
        for name, g in (("K3", k3), ("C4", c4)):
            low = dp_colorability(g, 2)
            high = dp_colorability(g, 3)
            assert low.refuted and low.exhaustive
            assert not high.refuted and high.exhaustive
            replay = Cover.from_json(json.loads(json.dumps(low.witness.to_json())), g)
            assert not has_dp_coloring(replay)
            found[name] = 3
        info["detail"] = ", ".join(f"chi_DP({k}) = {v}" for k, v in found.items())


def _is_forest(vertices, edges) -> bool:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        a, b = find(u), find(v)
        if a == b:
            return False
        parent[a] = b
    return True


def test_criterion_7_partition_corollary(capsys):
    with criterion(capsys, 7, "(2,2,1) profile splits into forest, forest, independent set", 30) as info:
        rng = random.Random(7)
        for _ in range(100):
            spec = GenSpec(mode="k5", leaves=rng.randint(1, 50), s=3, profile="221", identity=True)
            inst = generate_instance(spec, rng)
            t = inst.solve()
            assert check_result(inst, t) is None
            g = inst.graph
            for i in range(3):
                cls = {v for v, c in t.choice.items() if c == i}
                inner = [(u, v) for u, v in g.edges() if u in cls and v in cls]
                if i == 2:
                    assert not inner
                else:
                    assert _is_forest(cls, inner)
        info["detail"] = "100 instances"


def test_criterion_8_scale(capsys):
    with criterion(capsys, 8, "Apollonian n = 10,000 solves and verifies", 5) as info:
        nt = gen_apollonian(10_000, random.Random(8))
        tree = single_leaf_tree(nt.embedding)
        cover = Cover.identity(nt.graph, 5)
        f = ValueFunction.constant(nt.n, 5, 1)
        inst = Instance(cover, f, SeedColoring((0, 1), (0, 1)), tree=tree)
        t = inst.solve()
        assert check_result(inst, t) is None and is_dp_coloring(cover, t)
        info["detail"] = f"n = {nt.n}, m = {nt.graph.num_edges}"


def _fixtures(mutate, rng: random.Random, want: int):
    out = []
    while len(out) < want:
        spec = GenSpec(mode=rng.choice(["k5", "k33"]), leaves=rng.randint(1, 12), profile="random",
                       density=rng.random(), seed_kind="k2")
        inst = generate_instance(spec, rng)
        t = inst.solve()
        assert check_result(inst, t) is None
        hit = mutate(inst, t)
        if hit is not None:
            out.append(hit)
    return out


def test_criterion_9_negative_controls(capsys):
    with criterion(capsys, 9, "mutated answers are rejected", 60) as info:
        rng = random.Random(9)
        rejected = {}
        for name, mutate in (("flip-slot", flip_slot), ("swap-order", swap_order), ("flip-matching", flip_matching)):
            hits = _fixtures(mutate, rng, 100)
            caught = sum(check_result(inst, t) is not None for inst, t in hits)
            if name == "flip-slot":
                # the flipped transversal has no removing order at all
                assert all(not is_strictly_f_degenerate(inst.cover, inst.f, t).ok for inst, t in hits)
            rejected[name] = caught
        info["detail"] = ", ".join(f"{k} {v}/100" for k, v in rejected.items())
        assert all(v == 100 for v in rejected.values())
