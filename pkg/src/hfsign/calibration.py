"""Checks that pin the local-model conventions.

Each check returns ``(name, passed, detail)``.  The conventions under test
are the companion labelling, the bigon data in edge-reversal squares and
the stabilization bigons.
"""

from __future__ import annotations

import math

from . import diagram as dg
from . import homology as hm
from . import relations, signs
from .formal import EDGES, enumerate_flows


def _rows_satisfied(table, n: int) -> tuple[int, int]:
    bad = total = 0
    for family in relations.FAMILIES:
        flows = signs.scope_flows(n, "all_flows") if family == "degenerations" else None
        for rel in relations.instances(n, family, flows):
            total += 1
            if math.prod(table(f) for f in rel.flows) != signs.expected_product(rel):
                bad += 1
    return total, bad


def check_global_rows(n: int):
    table, dim = signs.solve_global(n)
    total, bad = _rows_satisfied(table, n)
    return (f"global solution satisfies every emitted row (n={n})", bad == 0,
            f"{total} instances, {bad} violated, dimension {dim}")


def check_basic_variants(n: int):
    table, _ = signs.solve_global(n)
    _, rects = enumerate_flows(n)
    total = bad = 0
    for r in rects:
        for edge in EDGES:
            for rel in relations.basic_relation_variants(r, edge):
                total += 1
                if math.prod(table(f) for f in rel.flows) != -1:
                    bad += 1
    return (f"edge-reversal squares, all four variants (n={n})", bad == 0,
            f"{total} squares, {bad} violated")


def check_bigon_labelling():
    """The bigon formula must satisfy the degenerations under the chosen
    companion labels; with the labels exchanged it would fail."""
    bigons, _ = enumerate_flows(1)
    good = all(signs.bigon_sign(b) * signs.bigon_sign(relations.companion(b, "alpha")) == 1
               and signs.bigon_sign(b) * signs.bigon_sign(relations.companion(b, "beta")) == -1
               for b in bigons)
    return ("bigon formula matches companion labelling", good, "n=1, 4 bigons")


def check_stab_bigons():
    d = dg.b_stabilize(dg.unknot_grid())
    ev = signs.build_evaluator(d.power, table_power=d.n)
    x = dg.DiagramGenerator((1, 2), ("u",))
    pair = [ev(dg.to_formal(d, dg.StabBigon(1, v), x)) for v in (1, 2)]
    ok = pair[0] == -pair[1]
    base = hm.homology(dg.unknot_grid(), signs.build_evaluator(2)).betti
    doubled = hm.homology(d, ev).betti
    return ("stabilization bigons cancel and homology doubles", ok and doubled == 2 * base,
            f"bigon signs {pair}, betti {base} -> {doubled}")


def run_calibration(powers=(2, 3)) -> list[tuple[str, bool, str]]:
    out = [check_bigon_labelling()]
    for n in powers:
        out.append(check_global_rows(n))
        out.append(check_basic_variants(n))
    out.append(check_stab_bigons())
    return out

