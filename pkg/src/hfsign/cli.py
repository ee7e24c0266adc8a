"""Command-line front end.

Exit codes: 0 success, 1 a verification or check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from math import factorial

from . import calibration, homology as hm, relations, signs
from . import diagram as dg
from .errors import HFSignError, NotEquivalent
from .formal import enumerate_flows, enumerate_generators, flow_from_json

SEED_DEFAULT = 0

_INT = {"type": "integer"}
_INTS = {"type": "array", "items": _INT}

OUTPUT_SCHEMAS = {
    "counts": {"type": "object", "required": ["n", "generators", "bigons", "rectangles"],
               "properties": {"n": _INT, "generators": _INT, "bigons": _INT, "rectangles": _INT}},
    "solve": {"type": "object", "required": ["n", "scope", "gauge_id", "entries"]},
    "dimension": {"type": "object", "required": ["n", "dimension", "expected"],
                  "properties": {"n": _INT, "dimension": _INT, "expected": _INT}},
    "sign-of": {"type": "object", "required": ["sign"],
                "properties": {"sign": {"enum": [1, -1]}}},
    "verify": {"type": "object", "required": ["n", "counts", "violations", "ok"],
               "properties": {"ok": {"type": "boolean"}, "violations": {"type": "array"}}},
    "gauge-compare": {"type": "object", "required": ["n", "equivalent"],
                      "properties": {"equivalent": {"type": "boolean"}}},
    "homology": {"type": "object", "required": ["coefficients"],
                 "properties": {"betti": _INT, "torsion": _INTS, "f2_dim": _INT,
                                "q_rank": _INT, "dim": _INT}},
    "stabilize": dg.DIAGRAM_SCHEMA,
    "invariance": {"type": "object", "required": ["trials", "seed", "results", "identical"],
                   "properties": {"identical": {"type": "boolean"}}},
    "calibrate": {"type": "object", "required": ["checks", "ok"],
                  "properties": {"ok": {"type": "boolean"}, "checks": {"type": "array"}}},
}


class UsageError(HFSignError):
    pass


def _parse_families(text: str) -> list[str]:
    fams = [f.strip() for f in text.split(",") if f.strip()]
    if fams == ["all"]:
        return list(relations.FAMILIES)
    known = relations.FAMILIES + relations.EXTRA_FAMILIES
    for f in fams:
        if f not in known:
            raise UsageError(f"unknown family {f!r}; choose from {', '.join(known)}")
    return fams


def _load(args) -> dg.GridDiagram:
    if getattr(args, "named", None):
        d = dg.NAMED_DIAGRAMS[args.named]()
    elif getattr(args, "diagram", None):
        d = dg.load_diagram(args.diagram)
    else:
        raise UsageError("give --diagram PATH or --named NAME")
    if getattr(args, "b_stab", 0):
        d = dg.b_stabilize(d, args.b_stab)
    return d


def _evaluator(d: dg.GridDiagram) -> signs.SignEvaluator:
    return signs.build_evaluator(d.power, table_power=d.n)


def cmd_counts(args):
    gens = enumerate_generators(args.n)
    bigons, rects = enumerate_flows(args.n)
    return 0, {"n": args.n, "generators": len(gens), "bigons": len(bigons),
               "rectangles": len(rects)}


def cmd_solve(args):
    if args.engine == "profile1":
        table = signs.solve_profile1(args.n)
    else:
        table, _ = signs.solve_global(args.n, seed=args.seed, allow_n4=args.allow_n4)
    out = table.to_json()
    out["dimension"] = table.solution_dim
    return 0, out


def cmd_dimension(args):
    _, dim = signs.solve_global(args.n, allow_n4=args.allow_n4)
    expected = factorial(args.n) * 2 ** args.n - 1
    return (0 if dim == expected else 1), {"n": args.n, "dimension": dim, "expected": expected}


def cmd_sign_of(args):
    try:
        flow = flow_from_json(json.loads(args.flow))
    except json.JSONDecodeError as exc:
        raise UsageError(f"--flow is not JSON: {exc.msg}") from exc
    ev = signs.build_evaluator(flow.n, table_power=args.table_power)
    return 0, {"flow": json.loads(args.flow), "sign": ev(flow)}


def cmd_verify(args):
    ev = signs.build_evaluator(args.n)
    source = signs.m_twist(ev) if args.twist else ev
    report = signs.verify(source, args.n, _parse_families(args.families),
                          sample=args.sample, seed=args.seed, swapped=args.swapped)
    return (0 if report.ok else 1), report.to_json()


def cmd_gauge_compare(args):
    ev = signs.build_evaluator(args.n)
    table, _ = signs.solve_global(args.n, seed=args.seed)
    try:
        u = signs.find_gauge(ev, table)
    except NotEquivalent as exc:
        return 1, {"n": args.n, "equivalent": False, "reason": str(exc)}
    return 0, {"n": args.n, "equivalent": True, "restricted": u.restricted}


def cmd_homology(args):
    d = _load(args)
    if args.coefficients == "f2":
        return 0, {"coefficients": "f2", "dim": hm.f2_homology_dim(d)}
    ev = _evaluator(d)
    if args.coefficients == "q":
        mat = hm.differential(d, ev)
        return 0, {"coefficients": "q", "q_rank": mat.rows - 2 * hm.rational_rank(mat)}
    out = hm.homology(d, ev).to_json()
    out["coefficients"] = "z"
    return 0, out


def cmd_stabilize(args):
    d = _load(args)
    return 0, dg.diagram_to_json(dg.b_stabilize(d, args.times))


def random_spec(d: dg.GridDiagram, rng: random.Random, kind: str) -> dg.GridDiagram:
    """A copy of ``d`` with shuffled curve orders or random orientations."""
    n = d.n
    if kind == "order":
        a, b = list(range(1, n + 1)), list(range(1, n + 1))
        rng.shuffle(a)
        rng.shuffle(b)
        return dg.GridDiagram(n, d.O, d.X, tuple(a), tuple(b), d.alpha_orient,
                              d.beta_orient, d.b_stab)
    h = tuple(rng.choice((1, -1)) for _ in range(n))
    v = tuple(rng.choice((1, -1)) for _ in range(n))
    return dg.GridDiagram(n, d.O, d.X, d.alpha_order, d.beta_order, h, v, d.b_stab)


def invariance_runs(d: dg.GridDiagram, trials: int, seed: int) -> list[dict]:
    """Homology under random gauges, curve orders and orientations."""
    rng = random.Random(seed)
    ev = _evaluator(d)
    runs = [{"variant": "base", **hm.homology(d, ev).to_json()}]
    for t in range(trials):
        gauge = signs.GaugeMap.random(rng.getrandbits(64))
        runs.append({"variant": f"gauge-{t}", **hm.homology(d, signs.apply_gauge(ev, gauge)).to_json()})
    for t in range(trials):
        runs.append({"variant": f"order-{t}", **hm.homology(random_spec(d, rng, "order"), ev).to_json()})
    for t in range(trials):
        runs.append({"variant": f"orient-{t}", **hm.homology(random_spec(d, rng, "orient"), ev).to_json()})
    return runs


def cmd_invariance(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    d = _load(args)
    runs = invariance_runs(d, args.trials, args.seed)
    keys = {json.dumps({k: v for k, v in r.items() if k != "variant"}, sort_keys=True)
            for r in runs}
    same = len(keys) == 1
    return (0 if same else 1), {"trials": args.trials, "seed": args.seed,
                                "results": runs, "identical": same}


def cmd_calibrate(args):
    checks = calibration.run_calibration(tuple(args.powers))
    ok = all(p for _, p, _ in checks)
    return (0 if ok else 1), {"checks": [{"name": n, "passed": p, "detail": d}
                                         for n, p, d in checks], "ok": ok}


def _text(command: str, out: dict) -> str:
    if command == "counts":
        return (f"generators {out['generators']}\nbigons {out['bigons']}\n"
                f"rectangles {out['rectangles']}")
    if command == "dimension":
        return str(out["dimension"])
    if command == "sign-of":
        return f"{out['sign']:+d}"
    if command == "homology":
        if out["coefficients"] == "f2":
            return f"f2 dimension {out['dim']}"
        if out["coefficients"] == "q":
            return f"rational rank {out['q_rank']}"
        return f"betti {out['betti']}\ntorsion {out['torsion']}"
    if command == "calibrate":
        return "\n".join(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['detail']}"
                         for c in out["checks"])
    if command == "verify":
        lines = [f"power {out['n']}"]
        for fam, c in out["counts"].items():
            lines.append(f"  {fam}: {c} instances")
        lines.append("OK" if out["ok"] else f"FAILED: {len(out['violations'])} violations")
        return "\n".join(lines)
    return json.dumps(out, indent=2, sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hfsign", description="Sign assignments and integral grid homology.")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--output", help="write the report to this path")
    p.add_argument("--jobs", type=int, default=1, help="worker count (runs are sequential)")
    sub = p.add_subparsers(dest="command", required=True)

    def power(sp):
        sp.add_argument("--n", type=int, required=True)

    def diagram_args(sp):
        sp.add_argument("--diagram", help="diagram JSON file")
        sp.add_argument("--named", choices=sorted(dg.NAMED_DIAGRAMS))
        sp.add_argument("--b-stab", type=int, default=0, dest="b_stab",
                        help="extra type-b stabilizations")

    power(sub.add_parser("counts", help="enumeration counts"))
    sp = sub.add_parser("solve", help="solve for a sign table")
    power(sp)
    sp.add_argument("--engine", choices=("profile1", "global"), default="profile1")
    sp.add_argument("--seed", type=int, default=None, help="spanning-tree seed (global engine)")
    sp.add_argument("--allow-n4", action="store_true")
    sp = sub.add_parser("dimension", help="pre-gauge solution dimension")
    power(sp)
    sp.add_argument("--allow-n4", action="store_true")
    sp = sub.add_parser("sign-of", help="evaluate one formal flow")
    sp.add_argument("--flow", required=True, help="flow JSON")
    sp.add_argument("--table-power", type=int, default=None)
    sp = sub.add_parser("verify", help="check the axioms")
    power(sp)
    sp.add_argument("--families", default="all")
    sp.add_argument("--sample", type=int, default=None, help="random instances per family")
    sp.add_argument("--seed", type=int, default=SEED_DEFAULT)
    sp.add_argument("--twist", action="store_true", help="verify the m-twisted assignment")
    sp.add_argument("--swapped", action="store_true", help="exchange alpha and beta degenerations")
    sp = sub.add_parser("gauge-compare", help="evaluator against the global solution")
    power(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp = sub.add_parser("homology", help="homology of a grid diagram")
    diagram_args(sp)
    sp.add_argument("--coefficients", choices=("z", "f2", "q"), default="z")
    sp = sub.add_parser("stabilize", help="add type-b stabilizations")
    diagram_args(sp)
    sp.add_argument("--times", type=int, default=1)
    sp = sub.add_parser("invariance", help="homology under gauges, orders, orientations")
    diagram_args(sp)
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--seed", type=int, default=SEED_DEFAULT)
    sp = sub.add_parser("calibrate", help="convention calibration suite")
    sp.add_argument("--powers", type=int, nargs="+", default=[2, 3])
    return p


COMMANDS = {
    "counts": cmd_counts, "solve": cmd_solve, "dimension": cmd_dimension,
    "sign-of": cmd_sign_of, "verify": cmd_verify, "gauge-compare": cmd_gauge_compare,
    "homology": cmd_homology, "stabilize": cmd_stabilize, "invariance": cmd_invariance,
    "calibrate": cmd_calibrate,
}


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, out = COMMANDS[args.command](args)
    except (HFSignError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"hint: run 'hfsign {args.command} --help'", file=sys.stderr)
        return 2
    if args.format == "json":
        text = json.dumps(out, sort_keys=True, separators=(",", ":"))
    else:
        text = _text(args.command, out)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
