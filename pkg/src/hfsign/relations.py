"""Relations a sign assignment must satisfy, and their GF(2) encoding.

Degenerations pair a flow with a companion (alpha: product +1, beta: -1).
Squares are two length-2 paths with common ends; their four signs multiply
to -1.  Square families:

* ``disjoint``: flows with disjoint moving coordinates, in both orders;
* ``grid``: composites of profile-1 rectangles on the torus;
* ``flip``: a rectangle against its simple flip at a non-moving coordinate;
* ``basic``: a rectangle against one edge reversal, through two bigons.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, NamedTuple, Sequence

from . import torus
from .errors import DecompositionCountMismatch, MovingCoordinate, NotComposable, SharedCoordinates
from .formal import (
    EDGES,
    FormalBigon,
    FormalFlow,
    FormalRectangle,
    _require,
    _reverse_edge,
    check_power,
    companion,
    drawn_frame,
    end_generator,
    enumerate_flows,
    enumerate_generators,
    flows_from,
    reverse_edge,
    simple_flip,
)
from .gf2 import GF2System

FAMILIES = ("degenerations", "disjoint", "grid", "flip", "basic")
EXTRA_FAMILIES = ("grid_oriented",)


class RelationInstance(NamedTuple):
    kind: str
    flows: tuple
    rhs: int
    family: str


def degeneration(flow: FormalFlow, kind: str) -> RelationInstance:
    rhs = 0 if kind == "alpha" else 1
    return RelationInstance(f"{kind}_degeneration", (flow, companion(flow, kind)), rhs,
                            "degenerations")


def square(flows: Sequence[FormalFlow], family: str) -> RelationInstance:
    return RelationInstance("square", tuple(flows), 1, family)


def bookkeeping_ok(rel: RelationInstance) -> bool:
    """Endpoint invariants of a relation instance."""
    if rel.kind.endswith("degeneration"):
        a, b = rel.flows
        kind = rel.kind.split("_")[0]
        return companion(a, kind) == b
    f1, f2, f3, f4 = rel.flows
    e1, e2, e3, e4 = (end_generator(f) for f in rel.flows)
    return (f1.start == f3.start and e2 == e4 and e1 == f2.start and e3 == f4.start
            and f1.start != e2)


def disjoint_partner(phi1: FormalFlow, phi2: FormalFlow) -> tuple[FormalFlow, FormalFlow]:
    _require(phi1)
    _require(phi2)
    if end_generator(phi1) != phi2.start:
        raise NotComposable("end of the first flow is not the start of the second")
    if set(phi1.coords) & set(phi2.coords):
        raise SharedCoordinates("flows share a moving coordinate")
    phi3 = phi2._replace(start=phi1.start)
    phi4 = phi1._replace(start=end_generator(phi3))
    return phi3, phi4


def flip_square(rect: FormalRectangle, p: int) -> RelationInstance:
    if p in (rect.i, rect.j):
        raise MovingCoordinate(f"coordinate {p} moves in {rect!r}")
    x = rect.start
    ep = x.epsilon[p - 1]
    b = FormalBigon(x, p, 1, ep)
    b2 = FormalBigon(end_generator(rect), p, 1, ep)
    return square((b, simple_flip(rect, p), rect, b2), "flip")


# Edge reversal squares.  Left and bottom edges are the right and top edges
# of the picture turned upside down, so everything is computed in a drawn
# frame whose bottom alpha is ``bottom``.
_DRAWN = {"right": ("i", "right"), "top": ("i", "top"),
          "left": ("j", "right"), "bottom": ("j", "top")}


def _edge_square(a_rect: FormalRectangle, edge: str, at_start: bool) -> tuple:
    """Square relating the rectangle ``a_rect`` (the one whose reversed edge is
    nearer the U-turn) and its reversal along ``edge``.  ``at_start`` places
    the U-turn at the start-corner end of the edge."""
    side, drawn_edge = _DRAWN[edge]
    bottom = a_rect.i if side == "i" else a_rect.j
    top = a_rect.j if side == "i" else a_rect.i
    h_a, h_b, v_l, v_r = drawn_frame(a_rect, bottom)
    rev = _reverse_edge(a_rect, edge)
    if drawn_edge == "right":
        if at_start:
            return (a_rect, FormalBigon(end_generator(a_rect), bottom, h_a, v_r),
                    FormalBigon(a_rect.start, top, h_b, v_r), rev)
        return (rev, FormalBigon(end_generator(rev), bottom, -h_a, v_r),
                FormalBigon(rev.start, top, -h_b, v_r), a_rect)
    if at_start:
        return (a_rect, FormalBigon(end_generator(a_rect), top, h_b, v_l),
                FormalBigon(a_rect.start, top, h_b, v_r), rev)
    return (rev, FormalBigon(end_generator(rev), top, h_b, -v_l),
            FormalBigon(rev.start, top, h_b, -v_r), a_rect)


def basic_relation(rect: FormalRectangle, edge: str) -> RelationInstance:
    """The canonical square relating ``rect`` and ``reverse_edge(rect, edge)``."""
    _require(rect)
    if edge not in EDGES:
        raise ValueError(f"unknown edge {edge!r}")
    return square(_edge_square(rect, edge, True), "basic")


def basic_relation_variants(rect: FormalRectangle, edge: str) -> list[RelationInstance]:
    """All four squares through ``rect`` and its reversal along ``edge``:
    U-turn at either endpoint of the edge, with ``rect`` on either side."""
    _require(rect)
    rev = reverse_edge(rect, edge)
    return [square(_edge_square(a, edge, at_start), "basic")
            for at_start in (True, False) for a in (rect, rev)]


def grid_composites(x: Sequence[int], n: int | None = None,
                    real: torus.Realization | None = None) -> list[RelationInstance]:
    """Squares among the formal images of torus rectangles from ``x``.

    ``x`` is 1-based: row i holds the point in column x(i).  A composite
    with one decomposition (possible only when a rectangle contains a
    generator point) forms no square and is skipped.
    """
    n = len(x) if n is None else n
    if sorted(x) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {x!r}")
    state = tuple(c - 1 for c in x)
    real = real or torus.Realization.default(n)
    out = []
    cache: dict = {}

    def formal(s, r):
        key = (s, r)
        f = cache.get(key)
        if f is None:
            f = cache[key] = torus.formal_rect(s, r, real)
        return f

    for first in torus.rects_from(state):
        y = torus.end_state(state, first)
        for second in torus.rects_from(y):
            if torus.end_state(y, second) == state:
                continue
            found = torus.decompositions(state, first, second)
            if len(found) == 1 and not (torus.is_empty(state, first) and torus.is_empty(y, second)):
                continue
            if len(found) != 2 or (first, second) not in found:
                raise DecompositionCountMismatch(
                    f"state {x}: composite {first},{second} has {len(found)} decompositions")
            r3, r4 = found[0] if found[1] == (first, second) else found[1]
            w = torus.end_state(state, r3)
            out.append(square((formal(state, first), formal(y, second),
                               formal(state, r3), formal(w, r4)), "grid"))
    return out


def profile1_rectangles(n: int) -> list[FormalRectangle]:
    """Formal images of all torus rectangles under the default realization."""
    real = torus.Realization.default(n)
    out = []
    for x in itertools.permutations(range(n)):
        for r in torus.rects_from(x):
            out.append(torus.formal_rect(x, r, real))
    return out


# instance generators

def degeneration_instances(flows: Iterable[FormalFlow]) -> Iterator[RelationInstance]:
    for f in flows:
        yield degeneration(f, "alpha")
        yield degeneration(f, "beta")


def disjoint_instances(n: int) -> Iterator[RelationInstance]:
    for x in enumerate_generators(n):
        for f1 in flows_from(x):
            c1 = set(f1.coords)
            for f2 in flows_from(end_generator(f1)):
                if c1.isdisjoint(f2.coords):
                    f3, f4 = disjoint_partner(f1, f2)
                    yield square((f1, f2, f3, f4), "disjoint")


def grid_instances(n: int) -> Iterator[RelationInstance]:
    for x in itertools.permutations(range(1, n + 1)):
        yield from grid_composites(x, n)


def oriented_grid_instances(n: int) -> Iterator[RelationInstance]:
    """Grid composites under every curve orientation and alpha order."""
    ident = tuple(range(1, n + 1))
    for order in itertools.permutations(ident):
        for h in itertools.product((1, -1), repeat=n):
            for v in itertools.product((1, -1), repeat=n):
                real = torus.Realization(order, ident, h, v)
                for x in itertools.permutations(ident):
                    for rel in grid_composites(x, n, real):
                        yield rel._replace(family="grid_oriented")


def flip_instances(n: int) -> Iterator[RelationInstance]:
    _, rects = enumerate_flows(n)
    for r in rects:
        for p in range(1, n + 1):
            if p not in (r.i, r.j):
                yield flip_square(r, p)


def basic_instances(n: int) -> Iterator[RelationInstance]:
    _, rects = enumerate_flows(n)
    for r in rects:
        for edge in EDGES:
            yield basic_relation(r, edge)


def instances(n: int, family: str, flows: Iterable[FormalFlow] | None = None
              ) -> Iterator[RelationInstance]:
    if family == "degenerations":
        if flows is None:
            bigons, rects = enumerate_flows(n)
            flows = [*bigons, *rects]
        return degeneration_instances(flows)
    if family == "disjoint":
        return disjoint_instances(n)
    if family == "grid":
        return grid_instances(n)
    if family == "grid_oriented":
        return oriented_grid_instances(n)
    if family == "flip":
        return flip_instances(n)
    if family == "basic":
        return basic_instances(n)
    raise ValueError(f"unknown relation family {family!r}")


def enumerate_relation_rows(n: int, families: Iterable[str] = FAMILIES,
                            scope: str = "all") -> GF2System:
    """Compile relation instances into parity rows.

    ``scope`` is ``all`` (every formal flow is a variable) or ``profile1``
    (only rectangles between all-plus generators); instances touching a
    flow outside the scope are dropped.
    """
    check_power(n)
    system = GF2System()
    if scope == "all":
        bigons, rects = enumerate_flows(n)
        variables: list[FormalFlow] = [*bigons, *rects]
    elif scope == "profile1":
        variables = sorted(profile1_rectangles(n), key=_profile1_key)
    else:
        raise ValueError(f"unknown scope {scope!r}")
    for f in variables:
        system.add_variable(f)
    for family in families:
        count = 0
        flows = variables if family == "degenerations" else None
        for rel in instances(n, family, flows):
            if all(f in system.index for f in rel.flows):
                system.add_row(rel.flows, rel.rhs, family)
                count += 1
        system.instance_counts[family] = count
    return system


def _profile1_key(r: FormalRectangle) -> tuple:
    return (r.start.sigma, r.i, r.j, tuple(-b for b in r.bits))
