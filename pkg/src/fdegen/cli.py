"""Command line: generate, solve, verify, oracle, stress.

Exit codes: 0 success, 1 a solved answer failed its checks (a dump is
written when a dump directory is given), 2 bad usage or a malformed or
invalid instance.  Machine-readable JSON goes to stdout, a one-line summary
to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from .cover import Transversal, induced_adjacency
from .errors import BudgetExceeded, FdegenError, InternalFailure, InvalidInstance
from .faults import FAULTS, apply_fault
from .generators import GenSpec, generate_instance, generate_nt_instance
from .graph_core import Graph
from .instance import Instance, check_result
from .oracle import OracleBudget, dp_colorability, exhaustive_transversal
from .solver.nt import SolverStats

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _emit(obj: Any, out: str | None = None) -> None:
    text = json.dumps(obj, separators=(",", ":"))
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _read_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not JSON: {exc}") from exc


def _load(path: str) -> tuple[Instance, dict | None]:
    """Instance file, or a failure dump (then the dump is returned too)."""
    data = _read_json(path)
    if isinstance(data, dict) and "instance" in data and "stage" in data:
        return Instance.from_json(data["instance"]), data
    return Instance.from_json(data), None


# --------------------------------------------------------------------------
# generate


def _spec_from_args(a: argparse.Namespace) -> GenSpec:
    lo = a.leaf_min if a.leaf_min is not None else (a.leaf_size or 3)
    hi = a.leaf_max if a.leaf_max is not None else (a.leaf_size or 12)
    spec = GenSpec(
        mode=a.mode,
        leaves=a.leaves,
        leaf_size=(lo, hi),
        special_prob=a.special_prob,
        sum3_prob=a.sum3_prob,
        s=a.width,
        profile=a.profile,
        density=a.density,
        identity=a.identity,
        seed_kind=a.seed_kind,
        seam_seed_prob=a.seam_seed_prob,
        seed=a.seed,
    )
    spec.validate()
    return spec


def _make(spec: GenSpec, nt_size: int | None, rng: random.Random) -> Instance:
    if nt_size is not None:
        return generate_nt_instance(nt_size, spec, rng)
    return generate_instance(spec, rng)


def cmd_generate(a: argparse.Namespace) -> int:
    spec = _spec_from_args(a)
    if a.nt is not None and a.nt < 3:
        raise UsageError("--nt needs at least 3 vertices")
    docs = []
    for k in range(a.count):
        rng = random.Random(_trial_seed(a.seed, k) if a.count > 1 else a.seed)
        docs.append(_make(spec, a.nt, rng).to_json())
    if a.count == 1:
        _emit(docs[0], a.out)
    elif a.out:
        os.makedirs(a.out, exist_ok=True)
        for k, d in enumerate(docs):
            _emit(d, os.path.join(a.out, f"instance_{k:05d}.json"))
    else:
        for d in docs:
            _emit(d)
    _say(f"generated {a.count} instance(s), mode={spec.mode}, seed={a.seed}")
    return EXIT_OK


# --------------------------------------------------------------------------
# solve / verify


def _dot(inst: Instance, t: Transversal) -> str:
    lines = ["graph G {"]
    for v in range(inst.graph.n):
        lines.append(f'  {v} [label="{v}:{t.choice[v] + 1}"];')
    conflict = induced_adjacency(inst.cover, t.choice)
    for u, v in inst.graph.edges():
        style = ' [color=red, penwidth=2]' if v in conflict[u] else ""
        lines.append(f"  {u} -- {v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dump(dump_dir: str | None, name: str, inst: Instance, stage: str, message: str, fault: str | None, seed: int | None = None) -> str | None:
    if not dump_dir:
        return None
    os.makedirs(dump_dir, exist_ok=True)
    path = os.path.join(dump_dir, name)
    doc = {"stage": stage, "message": message, "fault": fault, "seed": seed, "instance": inst.to_json()}
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))
    return path


def _solve_and_check(
    inst: Instance, fault: str | None, stats: SolverStats | None = None
) -> tuple[str, str | None, Transversal | None, bool]:
    """Returns (stage, failure message or None, transversal, fault applied)."""
    try:
        t = inst.solve(stats)
    except InternalFailure as exc:
        return "solve", str(exc), None, False
    checked = inst
    applied = False
    if fault:
        hit = apply_fault(fault, inst, t)
        if hit is not None:
            checked, t = hit
            applied = True
    return "verify", check_result(checked, t), t, applied


def cmd_solve(a: argparse.Namespace) -> int:
    inst, dump = _load(a.instance)
    fault = a.inject_fault or (dump or {}).get("fault")
    stats = SolverStats()
    t0 = time.perf_counter()
    stage, err, t, applied = _solve_and_check(inst, fault, stats)
    dt = time.perf_counter() - t0
    if fault and not applied:
        _say(f"note: fault {fault} has no place to apply in this instance")
    if err is not None:
        path = _dump(a.dump_dir, "solve_failure.json", inst, stage, err, fault)
        _emit({"verified": False, "stage": stage, "message": err, "dump": path})
        _say(f"FAILED at {stage}: {err}")
        return EXIT_FAIL
    doc = t.to_json(inst.graph.n, verified=True)
    if not a.emit_order:
        doc.pop("order", None)
    if a.check:
        # second opinion without the certificate
        if check_result(inst, Transversal(t.choice)) is not None:
            _emit({"verified": False, "stage": "check", "message": "greedy re-check failed"})
            return EXIT_FAIL
        doc["checked"] = True
    doc["stats"] = stats.as_dict()
    if fault:
        doc["fault_applied"] = applied
    _emit(doc, a.out)
    if a.dot:
        with open(a.dot, "w") as fh:
            fh.write(_dot(inst, t))
    _say(f"solved n={inst.graph.n} in {dt:.3f}s, verified")
    return EXIT_OK


def cmd_verify(a: argparse.Namespace) -> int:
    inst, _ = _load(a.instance)
    res = _read_json(a.result)
    try:
        t = Transversal.from_json(res)
    except FdegenError as exc:
        raise InvalidInstance(str(exc)) from exc
    if any(not 0 <= v < inst.graph.n or not 0 <= i < inst.cover.s for v, i in t.choice.items()):
        raise InvalidInstance("result names slots outside the cover")
    reason = check_result(inst, t)
    _emit({"verified": reason is None, "message": reason})
    _say("valid" if reason is None else f"INVALID: {reason}")
    return EXIT_OK if reason is None else EXIT_FAIL


# --------------------------------------------------------------------------
# oracle


def cmd_oracle(a: argparse.Namespace) -> int:
    budget = OracleBudget(max_vertices=a.max_vertices, time_limit=a.time_limit)
    if a.dp_graph:
        g = _read_json(a.dp_graph)
        try:
            graph = Graph.from_edges(int(g["n"]), [tuple(e) for e in g["edges"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad graph JSON: {exc}") from exc
        rng = random.Random(a.seed)
        verdict = dp_colorability(graph, a.k, samples=a.samples, rng=rng, budget=budget)
        _emit(verdict.to_json())
        word = "refuted" if verdict.refuted else "unrefuted"
        _say(f"k={a.k}: {word} after {verdict.checked} cover(s)")
        return EXIT_OK
    if not a.instance:
        raise UsageError("oracle needs an instance or --dp-graph")
    inst, _ = _load(a.instance)
    found = exhaustive_transversal(inst.cover, inst.f, inst.seed.as_choice(), budget)
    try:
        solved = check_result(inst, inst.solve()) is None
    except InternalFailure:
        solved = False
    # the solver must succeed, and then an extension must exist
    agree = solved and found is not None
    doc = {"exists": found is not None, "solver": solved, "agree": agree}
    if found is not None:
        doc["witness"] = found.to_json(inst.graph.n)
    _emit(doc)
    _say(f"oracle: {'extension exists' if found else 'no extension'}; solver: {solved}")
    return EXIT_OK if agree else EXIT_FAIL


# --------------------------------------------------------------------------
# stress


@dataclass
class RunReport:
    seed: int
    trials: int
    instances: int = 0
    solved: int = 0
    verified: int = 0
    oracle_checked: int = 0
    oracle_agreed: int = 0
    faults_applied: int = 0
    wall_time: float = 0.0
    stats: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def add(self, r: dict) -> None:
        self.instances += 1
        self.solved += r["solved"]
        self.verified += r["verified"]
        self.oracle_checked += r["oracle_checked"]
        self.oracle_agreed += r["oracle_agreed"]
        self.faults_applied += r["faults_applied"]
        for k, v in r["stats"].items():
            self.stats[k] = self.stats.get(k, 0) + v
        if r["failure"] is not None:
            self.failures.append(r["failure"])

    @property
    def ok(self) -> bool:
        return not self.failures and self.verified == self.instances

    def to_json(self) -> dict:
        d = asdict(self)
        d["failures"] = sorted(self.failures, key=lambda x: x["trial"])
        d["ok"] = self.ok
        return d


def _trial_seed(seed: int, trial: int) -> int:
    return (seed * 1_000_003 + trial) & 0x7FFFFFFF


def _trial(job: tuple) -> dict:
    trial, seed, spec, kind, max_leaves, nt_max, oracle_max, fault, dump_dir = job
    ts = _trial_seed(seed, trial)
    rng = random.Random(ts)
    if kind == "nt":
        inst = generate_nt_instance(rng.randint(3, nt_max), spec, rng)
    else:
        spec = GenSpec(**{**asdict(spec), "leaves": rng.randint(1, max_leaves)})
        inst = generate_instance(spec, rng)
    stats = SolverStats()
    stage, err, t, applied = _solve_and_check(inst, fault, stats)
    out = {
        "solved": int(not (stage == "solve" and err)),
        "verified": int(err is None),
        "oracle_checked": 0,
        "oracle_agreed": 0,
        "faults_applied": int(applied),
        "stats": stats.as_dict(),
        "failure": None,
    }
    if err is None and inst.graph.n <= oracle_max:
        try:
            found = exhaustive_transversal(inst.cover, inst.f, inst.seed.as_choice())
        except BudgetExceeded:
            pass
        else:
            out["oracle_checked"] = 1
            if found is not None:
                out["oracle_agreed"] = 1
            else:
                stage, err = "oracle", "oracle found no extension for a solved instance"
    if err is not None:
        path = _dump(dump_dir, f"trial_{trial:06d}.json", inst, stage, err, fault, ts)
        out["failure"] = {"trial": trial, "seed": ts, "stage": stage, "message": err, "dump": path}
    return out


def cmd_stress(a: argparse.Namespace) -> int:
    spec = _spec_from_args(a)
    report = RunReport(seed=a.seed, trials=a.trials)
    jobs = [
        (k, a.seed, spec, a.kind, a.leaves, a.nt_max, a.oracle_max, a.inject_fault, a.dump_dir)
        for k in range(a.trials)
    ]
    t0 = time.perf_counter()
    if a.workers > 1:
        import multiprocessing

        with multiprocessing.Pool(a.workers) as pool:
            for r in pool.imap_unordered(_trial, jobs, chunksize=8):
                report.add(r)
    else:
        for job in jobs:
            report.add(_trial(job))
    report.wall_time = round(time.perf_counter() - t0, 3)
    _emit(report.to_json(), a.out)
    _say(
        f"{report.instances} instances, {report.solved} solved, {report.verified} verified, "
        f"oracle {report.oracle_agreed}/{report.oracle_checked}, {len(report.failures)} failure(s), "
        f"{report.wall_time:.1f}s"
    )
    return EXIT_OK if report.ok else EXIT_FAIL


# --------------------------------------------------------------------------
# argument parsing


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("k5", "k33"), default="k5")
    p.add_argument("--leaves", type=int, default=1)
    p.add_argument("--leaf-size", type=int, default=None, help="fixed triangulation leaf size")
    p.add_argument("--leaf-min", type=int, default=None)
    p.add_argument("--leaf-max", type=int, default=None)
    p.add_argument("--special-prob", type=float, default=0.3, help="chance of a Wagner/K5 leaf")
    p.add_argument("--sum3-prob", type=float, default=0.5)
    p.add_argument("--width", type=int, default=5)
    p.add_argument("--profile", choices=("ones", "221", "random"), default="ones")
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--identity", action="store_true", help="identity matchings")
    p.add_argument("--seed-kind", choices=("k2", "k3", "any"), default="any")
    p.add_argument("--seam-seed-prob", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fdegen", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write random instance(s)")
    _gen_flags(g)
    g.add_argument("--nt", type=int, default=None, help="near-triangulation instance with this many vertices")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default=None, help="file (count 1) or directory")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve an instance (or replay a failure dump)")
    s.add_argument("instance")
    s.add_argument("--emit-order", action="store_true")
    s.add_argument("--check", action="store_true", help="also re-check without the certificate")
    s.add_argument("--out", default=None)
    s.add_argument("--dot", default=None, help="write base graph with H[T] conflicts as DOT")
    s.add_argument("--dump-dir", default=None)
    s.add_argument("--inject-fault", choices=FAULTS, default=None)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a result against an instance")
    v.add_argument("instance")
    v.add_argument("result")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive search on a tiny instance or graph")
    o.add_argument("instance", nargs="?")
    o.add_argument("--dp-graph", default=None, help='graph JSON {"n", "edges"} for a DP-colourability search')
    o.add_argument("--k", type=int, default=2)
    o.add_argument("--samples", type=int, default=None, help="sample covers instead of enumerating")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--max-vertices", type=int, default=10)
    o.add_argument("--time-limit", type=float, default=120.0)
    o.set_defaults(func=cmd_oracle)

    st = sub.add_parser("stress", help="generate -> solve -> verify loop")
    _gen_flags(st)
    st.set_defaults(leaves=10)
    st.add_argument("--kind", choices=("tree", "nt"), default="tree")
    st.add_argument("--nt-max", type=int, default=60, help="largest near-triangulation in nt mode")
    st.add_argument("--trials", type=int, default=100)
    st.add_argument("--oracle-max", type=int, default=7)
    st.add_argument("--workers", type=int, default=1)
    st.add_argument("--inject-fault", choices=FAULTS, default=None)
    st.add_argument("--dump-dir", default=None)
    st.add_argument("--out", default=None)
    st.set_defaults(func=cmd_stress)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.func(a)
    except (UsageError, InvalidInstance) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except FdegenError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
