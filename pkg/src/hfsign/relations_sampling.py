"""Seeded uniform sampling of relation instances for large powers."""

from __future__ import annotations

import random
from typing import Callable

from . import torus
from .formal import (
    EDGES,
    FormalGenerator,
    FormalRectangle,
    end_generator,
    flows_from,
    rectangles_from,
)
from .relations import (
    RelationInstance,
    basic_relation_variants,
    degeneration,
    disjoint_partner,
    flip_square,
    square,
)


def random_generator(n: int, rng: random.Random) -> FormalGenerator:
    sigma = list(range(1, n + 1))
    rng.shuffle(sigma)
    return FormalGenerator(tuple(sigma), tuple(rng.choice((1, -1)) for _ in range(n)))


def random_rectangle(n: int, rng: random.Random) -> FormalRectangle:
    return rng.choice(rectangles_from(random_generator(n, rng)))


def _degeneration(n, rng):
    flow = rng.choice(flows_from(random_generator(n, rng)))
    return degeneration(flow, rng.choice(("alpha", "beta")))


def _disjoint(n, rng):
    while True:
        f1 = rng.choice(flows_from(random_generator(n, rng)))
        options = [f for f in flows_from(end_generator(f1)) if not set(f.coords) & set(f1.coords)]
        if options:
            f2 = rng.choice(options)
            return square((f1, f2, *disjoint_partner(f1, f2)), "disjoint")


def _flip(n, rng):
    rect = random_rectangle(n, rng)
    p = rng.choice([k for k in range(1, n + 1) if k not in (rect.i, rect.j)])
    return flip_square(rect, p)


def _basic(n, rng):
    rect = random_rectangle(n, rng)
    return rng.choice(basic_relation_variants(rect, rng.choice(EDGES)))


def _grid(n, rng, oriented=False):
    ident = tuple(range(1, n + 1))
    while True:
        if oriented:
            order = list(ident)
            rng.shuffle(order)
            real = torus.Realization(tuple(order), ident,
                                     tuple(rng.choice((1, -1)) for _ in ident),
                                     tuple(rng.choice((1, -1)) for _ in ident))
        else:
            real = torus.Realization.default(n)
        x = list(range(n))
        rng.shuffle(x)
        x = tuple(x)
        first = rng.choice(torus.rects_from(x))
        y = torus.end_state(x, first)
        second = rng.choice(torus.rects_from(y))
        if torus.end_state(y, second) == x:
            continue
        found = torus.decompositions(x, first, second)
        if len(found) != 2:
            continue
        r3, r4 = found[0] if found[1] == (first, second) else found[1]
        w = torus.end_state(x, r3)
        flows = (torus.formal_rect(x, first, real), torus.formal_rect(y, second, real),
                 torus.formal_rect(x, r3, real), torus.formal_rect(w, r4, real))
        return square(flows, "grid_oriented" if oriented else "grid")


SAMPLERS: dict[str, Callable[[int, random.Random], RelationInstance]] = {
    "degenerations": _degeneration,
    "disjoint": _disjoint,
    "grid": _grid,
    "grid_oriented": lambda n, rng: _grid(n, rng, oriented=True),
    "flip": _flip,
    "basic": _basic,
}


# below these powers a family has no instances (the samplers would spin)
MIN_POWER = {"degenerations": 1, "disjoint": 2, "basic": 2, "flip": 3,
             "grid": 3, "grid_oriented": 3}


def sample_instances(n: int, family: str, count: int, rng: random.Random):
    sampler = SAMPLERS[family]
    if n < MIN_POWER[family]:
        return
    for _ in range(count):
        yield sampler(n, rng)
